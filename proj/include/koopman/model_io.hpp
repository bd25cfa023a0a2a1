// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_MODEL_IO_HPP_
#define KOOPMAN_MODEL_IO_HPP_

// JSON model files.
//
//   {
//     "name": "ou",
//     "dimension": 1,
//     "parameters": {"gamma": 1.0, "sigma": 0.5},
//     "drift":     [ [ {"coeff": -1, "params": ["gamma"], "exponents": [1]} ] ],
//     "diffusion": [ [ [ {"params": ["sigma"], "exponents": [0]} ] ] ],
//     "shift": [0.0],
//     "T": 0.1,
//     "resolvent":     {"m_min": 10, "m_max": 50, "degree_cap": null,
//                       "prune_threshold": 0.0, "max_states": 2000000},
//     "extrapolation": {"n_diff": 3, "epsilon": 1e-5},
//     "simulation":    {"dt": 0.001, "t_end": 5.0, "n_samples": 1000,
//                       "n_repeats": 100, "seed": 1, "x0": [[0.0]]},
//     "edmd":          {"degree": 6, "svd_tol": 1e-10}
//   }
//
// A term's value is coeff * prod(params); "coeff" defaults to 1 and "params"
// to none. drift has D entries, diffusion is D rows of W entries, and every
// entry is a list of terms. Only "name", "dimension", "drift" and
// "diffusion" are required.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "koopman/errors.hpp"
#include "koopman/extrapolation.hpp"
#include "koopman/generator.hpp"
#include "koopman/multi_index.hpp"
#include "koopman/polynomial.hpp"
#include "koopman/resolvent.hpp"
#include "koopman/simulator.hpp"

namespace koopman {

/// One monomial term of a coefficient function, with symbolic parameter factors.
struct TermSpec {
  double coeff = 1.0;
  std::vector<std::string> params;
  std::vector<MultiIndex::value_type> exponents;

  friend bool operator==(const TermSpec&, const TermSpec&) = default;
};

using PolynomialSpec = std::vector<TermSpec>;

struct EdmdDefaults {
  unsigned degree = 6;
  double svd_tol = 1e-10;

  friend bool operator==(const EdmdDefaults&, const EdmdDefaults&) = default;
};

struct ModelConfig {
  std::string name;
  std::size_t dimension = 0;
  std::map<std::string, double> parameters;
  std::vector<PolynomialSpec> drift;
  std::vector<std::vector<PolynomialSpec>> diffusion;
  std::vector<double> shift;
  ResolventParams resolvent;
  ExtrapolationParams extrapolation;
  SimulationConfig simulation;
  std::vector<std::vector<double>> x0s;
  EdmdDefaults edmd;

  /// The system with parameters bound, before any origin shift.
  SdeSystem raw_system() const {
    auto bind = [&](const PolynomialSpec& spec) {
      Polynomial p(dimension);
      for (const auto& t : spec) {
        double c = t.coeff;
        for (const auto& param : t.params) c *= parameters.at(param);
        p.add_term(MultiIndex(t.exponents), c);
      }
      return p;
    };
    SdeSystem sde;
    sde.dimension = dimension;
    sde.parameters = parameters;
    for (const auto& d : drift) sde.drift.push_back(bind(d));
    for (const auto& row : diffusion) {
      sde.diffusion.emplace_back();
      for (const auto& e : row) sde.diffusion.back().push_back(bind(e));
    }
    sde.validate();
    return sde;
  }

  /// The system in shifted coordinates x - shift; all pipelines work in these.
  SdeSystem system() const { return shift_origin(raw_system(), shift); }
};

inline bool operator==(const ModelConfig& a, const ModelConfig& b) {
  auto same_rp = [](const ResolventParams& x, const ResolventParams& y) {
    return x.T == y.T && x.m_min == y.m_min && x.m_max == y.m_max &&
           x.degree_cap == y.degree_cap && x.prune_threshold == y.prune_threshold &&
           x.max_states == y.max_states;
  };
  auto same_sim = [](const SimulationConfig& x, const SimulationConfig& y) {
    return x.dt == y.dt && x.t_end == y.t_end && x.T == y.T && x.n_samples == y.n_samples &&
           x.n_repeats == y.n_repeats && x.seed == y.seed;
  };
  return a.name == b.name && a.dimension == b.dimension && a.parameters == b.parameters &&
         a.drift == b.drift && a.diffusion == b.diffusion && a.shift == b.shift &&
         same_rp(a.resolvent, b.resolvent) && a.extrapolation.n_diff == b.extrapolation.n_diff &&
         a.extrapolation.epsilon == b.extrapolation.epsilon && same_sim(a.simulation, b.simulation) &&
         a.x0s == b.x0s && a.edmd == b.edmd;
}

namespace detail {

using json = nlohmann::json;

class ModelReader {
 public:
  explicit ModelReader(std::string source) : source_(std::move(source)) {}

  ModelConfig read(const json& root) {
    expect_object(root, "");
    allow_keys(root, "", {"name", "dimension", "parameters", "drift", "diffusion", "shift", "T",
                          "resolvent", "extrapolation", "simulation", "edmd", "description"});
    ModelConfig cfg;
    cfg.name = string_at(root, "name", "");
    const auto dim = integer_at(root, "dimension", "");
    if (dim < 1) fail("dimension", "must be a positive integer");
    cfg.dimension = static_cast<std::size_t>(dim);

    if (root.contains("parameters")) {
      const auto& p = root["parameters"];
      expect_object(p, "parameters");
      for (const auto& [k, v] : p.items()) {
        if (!v.is_number()) fail("parameters." + k, "must be a number");
        cfg.parameters[k] = v.get<double>();
      }
    }

    const json& drift = required(root, "drift", "");
    expect_array(drift, "drift");
    if (drift.size() != cfg.dimension) {
      fail("drift", "has " + std::to_string(drift.size()) + " components, expected " +
                        std::to_string(cfg.dimension));
    }
    for (std::size_t i = 0; i < drift.size(); ++i) {
      cfg.drift.push_back(polynomial(drift[i], "drift[" + std::to_string(i) + "]", cfg));
    }

    const json& diff = required(root, "diffusion", "");
    expect_array(diff, "diffusion");
    if (diff.size() != cfg.dimension) {
      fail("diffusion", "has " + std::to_string(diff.size()) + " rows, expected " +
                            std::to_string(cfg.dimension));
    }
    std::optional<std::size_t> width;
    for (std::size_t i = 0; i < diff.size(); ++i) {
      const std::string where = "diffusion[" + std::to_string(i) + "]";
      expect_array(diff[i], where);
      if (width && diff[i].size() != *width) fail(where, "rows of the diffusion matrix differ in length");
      width = diff[i].size();
      cfg.diffusion.emplace_back();
      for (std::size_t j = 0; j < diff[i].size(); ++j) {
        cfg.diffusion.back().push_back(
            polynomial(diff[i][j], where + "[" + std::to_string(j) + "]", cfg));
      }
    }

    cfg.shift.assign(cfg.dimension, 0.0);
    if (root.contains("shift")) cfg.shift = vector_at(root["shift"], "shift", cfg.dimension);

    double T = cfg.resolvent.T;
    if (root.contains("T")) {
      T = number(root["T"], "T");
      if (!(T > 0.0)) fail("T", "must be positive");
    }
    cfg.resolvent.T = T;
    cfg.simulation.T = T;

    if (root.contains("resolvent")) {
      const auto& r = root["resolvent"];
      expect_object(r, "resolvent");
      allow_keys(r, "resolvent", {"m_min", "m_max", "degree_cap", "prune_threshold", "max_states"});
      if (r.contains("m_min")) cfg.resolvent.m_min = static_cast<int>(integer_at(r, "m_min", "resolvent"));
      if (r.contains("m_max")) cfg.resolvent.m_max = static_cast<int>(integer_at(r, "m_max", "resolvent"));
      if (r.contains("degree_cap") && !r["degree_cap"].is_null()) {
        const auto cap = integer_at(r, "degree_cap", "resolvent");
        if (cap < 0) fail("resolvent.degree_cap", "must be non-negative");
        cfg.resolvent.degree_cap = static_cast<std::uint64_t>(cap);
      }
      if (r.contains("prune_threshold")) {
        cfg.resolvent.prune_threshold = number(r["prune_threshold"], "resolvent.prune_threshold");
      }
      if (r.contains("max_states")) {
        const auto ms = integer_at(r, "max_states", "resolvent");
        if (ms < 1) fail("resolvent.max_states", "must be positive");
        cfg.resolvent.max_states = static_cast<std::size_t>(ms);
      }
    }
    if (root.contains("extrapolation")) {
      const auto& e = root["extrapolation"];
      expect_object(e, "extrapolation");
      allow_keys(e, "extrapolation", {"n_diff", "epsilon"});
      if (e.contains("n_diff")) cfg.extrapolation.n_diff = static_cast<int>(integer_at(e, "n_diff", "extrapolation"));
      if (e.contains("epsilon")) cfg.extrapolation.epsilon = number(e["epsilon"], "extrapolation.epsilon");
    }
    if (root.contains("simulation")) {
      const auto& s = root["simulation"];
      expect_object(s, "simulation");
      allow_keys(s, "simulation", {"dt", "t_end", "n_samples", "n_repeats", "seed", "x0"});
      if (s.contains("dt")) cfg.simulation.dt = number(s["dt"], "simulation.dt");
      if (s.contains("t_end")) cfg.simulation.t_end = number(s["t_end"], "simulation.t_end");
      if (s.contains("n_samples")) cfg.simulation.n_samples = positive(s, "n_samples", "simulation");
      if (s.contains("n_repeats")) cfg.simulation.n_repeats = positive(s, "n_repeats", "simulation");
      if (s.contains("seed")) {
        if (!s["seed"].is_number_unsigned()) fail("simulation.seed", "must be a non-negative integer");
        cfg.simulation.seed = s["seed"].get<std::uint64_t>();
      }
      if (s.contains("x0")) {
        expect_array(s["x0"], "simulation.x0");
        for (std::size_t i = 0; i < s["x0"].size(); ++i) {
          cfg.x0s.push_back(vector_at(s["x0"][i], "simulation.x0[" + std::to_string(i) + "]", cfg.dimension));
        }
      }
    }
    if (root.contains("edmd")) {
      const auto& e = root["edmd"];
      expect_object(e, "edmd");
      allow_keys(e, "edmd", {"degree", "svd_tol"});
      if (e.contains("degree")) {
        const auto d = integer_at(e, "degree", "edmd");
        if (d < 0) fail("edmd.degree", "must be non-negative");
        cfg.edmd.degree = static_cast<unsigned>(d);
      }
      if (e.contains("svd_tol")) cfg.edmd.svd_tol = number(e["svd_tol"], "edmd.svd_tol");
    }
    return cfg;
  }

 private:
  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw ParseError(source_ + ": field '" + field + "' " + msg);
  }

  static std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
  }

  void expect_object(const json& j, const std::string& where) const {
    if (!j.is_object()) fail(where.empty() ? "<root>" : where, "must be an object");
  }
  void expect_array(const json& j, const std::string& where) const {
    if (!j.is_array()) fail(where, "must be an array");
  }
  void allow_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail(join(where, k), "is not a recognised key");
    }
  }
  const json& required(const json& j, const char* key, const std::string& where) const {
    if (!j.contains(key)) fail(join(where, key), "is required");
    return j[key];
  }
  std::string string_at(const json& j, const char* key, const std::string& where) const {
    const json& v = required(j, key, where);
    if (!v.is_string()) fail(join(where, key), "must be a string");
    return v.get<std::string>();
  }
  std::int64_t integer_at(const json& j, const char* key, const std::string& where) const {
    const json& v = required(j, key, where);
    if (!v.is_number_integer()) fail(join(where, key), "must be an integer");
    return v.get<std::int64_t>();
  }
  std::size_t positive(const json& j, const char* key, const std::string& where) const {
    const auto v = integer_at(j, key, where);
    if (v < 1) fail(join(where, key), "must be positive");
    return static_cast<std::size_t>(v);
  }
  double number(const json& v, const std::string& where) const {
    if (!v.is_number()) fail(where, "must be a number");
    return v.get<double>();
  }
  std::vector<double> vector_at(const json& v, const std::string& where, std::size_t dim) const {
    expect_array(v, where);
    if (v.size() != dim) fail(where, "must have " + std::to_string(dim) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }

  PolynomialSpec polynomial(const json& j, const std::string& where, const ModelConfig& cfg) const {
    if (j.is_string()) {
      fail(where, "is the expression \"" + j.get<std::string>() +
                      "\"; only polynomial term lists are accepted (introduce extra state "
                      "variables for non-polynomial coefficients)");
    }
    expect_array(j, where);
    PolynomialSpec out;
    for (std::size_t t = 0; t < j.size(); ++t) {
      const std::string tw = where + "[" + std::to_string(t) + "]";
      const json& term = j[t];
      expect_object(term, tw);
      allow_keys(term, tw, {"coeff", "params", "exponents"});
      TermSpec spec;
      if (term.contains("coeff")) {
        if (term["coeff"].is_string()) {
          fail(tw + ".coeff", "must be a number; reference parameters through \"params\"");
        }
        spec.coeff = number(term["coeff"], tw + ".coeff");
      }
      if (term.contains("params")) {
        const json& p = term["params"];
        auto add = [&](const json& name, const std::string& pw) {
          if (!name.is_string()) fail(pw, "must be a parameter name");
          const auto s = name.get<std::string>();
          if (!cfg.parameters.contains(s)) fail(pw, "references unknown parameter '" + s + "'");
          spec.params.push_back(s);
        };
        if (p.is_array()) {
          for (std::size_t i = 0; i < p.size(); ++i) add(p[i], tw + ".params[" + std::to_string(i) + "]");
        } else {
          add(p, tw + ".params");
        }
      }
      const json& e = required(term, "exponents", tw);
      expect_array(e, tw + ".exponents");
      if (e.size() != cfg.dimension) {
        fail(tw + ".exponents", "must have " + std::to_string(cfg.dimension) + " entries");
      }
      for (std::size_t d = 0; d < e.size(); ++d) {
        const std::string ew = tw + ".exponents[" + std::to_string(d) + "]";
        if (!e[d].is_number_integer() || e[d].get<std::int64_t>() < 0) {
          fail(ew, "must be a non-negative integer (polynomial coefficients only)");
        }
        const auto v = e[d].get<std::int64_t>();
        if (v > static_cast<std::int64_t>(MultiIndex::max_exponent)) fail(ew, "exceeds the exponent cap");
        spec.exponents.push_back(static_cast<MultiIndex::value_type>(v));
      }
      out.push_back(std::move(spec));
    }
    return out;
  }

  std::string source_;
};

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline ModelConfig parse_model_text(const std::string& text, const std::string& source = "<model>") {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0) +
                     ": malformed JSON");
  }
  return detail::ModelReader(source).read(root);
}

inline ModelConfig parse_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open model file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str(), path);
}

inline std::string serialize_model(const ModelConfig& cfg) {
  using json = nlohmann::json;
  auto poly = [](const PolynomialSpec& spec) {
    json arr = json::array();
    for (const auto& t : spec) {
      json term;
      term["coeff"] = t.coeff;
      if (!t.params.empty()) term["params"] = t.params;
      term["exponents"] = t.exponents;
      arr.push_back(term);
    }
    return arr;
  };
  json root;
  root["name"] = cfg.name;
  root["dimension"] = cfg.dimension;
  root["parameters"] = json::object();
  for (const auto& [k, v] : cfg.parameters) root["parameters"][k] = v;
  root["drift"] = json::array();
  for (const auto& d : cfg.drift) root["drift"].push_back(poly(d));
  root["diffusion"] = json::array();
  for (const auto& row : cfg.diffusion) {
    json r = json::array();
    for (const auto& e : row) r.push_back(poly(e));
    root["diffusion"].push_back(r);
  }
  root["shift"] = cfg.shift;
  root["T"] = cfg.resolvent.T;
  json rp;
  rp["m_min"] = cfg.resolvent.m_min;
  rp["m_max"] = cfg.resolvent.m_max;
  rp["degree_cap"] = cfg.resolvent.degree_cap ? json(*cfg.resolvent.degree_cap) : json(nullptr);
  rp["prune_threshold"] = cfg.resolvent.prune_threshold;
  rp["max_states"] = cfg.resolvent.max_states;
  root["resolvent"] = rp;
  root["extrapolation"] = {{"n_diff", cfg.extrapolation.n_diff}, {"epsilon", cfg.extrapolation.epsilon}};
  json sim;
  sim["dt"] = cfg.simulation.dt;
  sim["t_end"] = cfg.simulation.t_end;
  sim["n_samples"] = cfg.simulation.n_samples;
  sim["n_repeats"] = cfg.simulation.n_repeats;
  sim["seed"] = cfg.simulation.seed;
  if (!cfg.x0s.empty()) sim["x0"] = cfg.x0s;
  root["simulation"] = sim;
  root["edmd"] = {{"degree", cfg.edmd.degree}, {"svd_tol", cfg.edmd.svd_tol}};
  return root.dump(2) + "\n";
}

/// Parses "[2 0]", "2 0", "2,0" or "[2,0]" into a multi-index of the given dimension.
inline MultiIndex parse_multi_index(const std::string& text, std::size_t dimension) {
  std::string s;
  for (char c : text) s += (c == '[' || c == ']' || c == ',') ? ' ' : c;
  std::istringstream in(s);
  std::vector<MultiIndex::value_type> e;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || v < 0 || v > static_cast<long long>(MultiIndex::max_exponent)) {
      throw ParseError("multi-index '" + text + "': '" + tok + "' is not a non-negative integer");
    }
    e.push_back(static_cast<MultiIndex::value_type>(v));
  }
  if (e.size() != dimension) {
    throw ParseError("multi-index '" + text + "' has " + std::to_string(e.size()) +
                     " entries, model dimension is " + std::to_string(dimension));
  }
  return MultiIndex(std::move(e));
}

/// An element label "alpha -> n", e.g. "[0 2] -> [1 0]".
struct ElementLabel {
  MultiIndex alpha;
  MultiIndex n;
};

inline ElementLabel parse_element_label(const std::string& text, std::size_t dimension) {
  const auto arrow = text.find("->");
  if (arrow == std::string::npos) {
    throw ParseError("element '" + text + "' must have the form '[a b] -> [c d]'");
  }
  return {parse_multi_index(text.substr(0, arrow), dimension),
          parse_multi_index(text.substr(arrow + 2), dimension)};
}

inline std::string element_label(const MultiIndex& alpha, const MultiIndex& n) {
  return to_string(alpha) + " -> " + to_string(n);
}

}  // namespace koopman

#endif  // KOOPMAN_MODEL_IO_HPP_
