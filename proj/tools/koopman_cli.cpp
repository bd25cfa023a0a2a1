// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

// koopman: Koopman-matrix elements of polynomial SDEs from the system
// equations, with EDMD and Monte Carlo cross-checks.
//
//   koopman element --model models/vdp.json --alpha "[2 0]" --n "[0 0]"
//   koopman matrix  --model models/ou.json --degree 4
//   koopman edmd    --model models/vdp.json --paths 10 --repeats 100 --T 0.1
//   koopman compare --model models/vdp.json --T 0.1 --sizes 500,1000,2000,8000
//   koopman mc      --model models/vdp.json --alpha "[2 0]"
//
// Exit codes: 0 success, 2 parse/usage error, 3 numeric failure (singular
// resolvent denominator, state explosion, diverging path), 4 degenerate Gram
// matrix in EDMD.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "koopman/app.hpp"

namespace {

using namespace koopman;

struct Options {
  std::string model;
  std::string out;
  std::string alpha;
  std::string n;
  std::vector<std::string> elements;
  std::vector<std::size_t> sizes;
  std::optional<unsigned> degree;
  std::size_t paths = 10;
  std::string std_out;
  app::Overrides ov;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "Model JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Write CSV here instead of stdout");
  cmd->add_option("--T", o.ov.T, "Time horizon / snapshot lag");
  cmd->add_option("--threads", o.ov.threads, "Worker threads (default: $KOOPMAN_THREADS or all cores)");
}

void add_resolvent(CLI::App* cmd, Options& o) {
  cmd->add_option("--mmin", o.ov.m_min, "Smallest M is mmin+1");
  cmd->add_option("--mmax", o.ov.m_max, "Largest number of resolvent factors");
  cmd->add_option("--ndiff", o.ov.n_diff, "Highest extrapolation level");
  cmd->add_option("--epsilon", o.ov.epsilon, "Extrapolation weight regularizer");
  cmd->add_option("--degree-cap", o.ov.degree_cap, "Drop dual states above this total degree");
}

void add_simulation(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.ov.seed, "Random seed");
  cmd->add_option("--repeats", o.ov.repeats, "Independent repetitions");
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ParseError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ModelConfig load(const Options& o) {
  ModelConfig cfg = parse_model(o.model);
  app::apply(cfg, o.ov);
  return cfg;
}

int cmd_element(const Options& o) {
  const ModelConfig cfg = load(o);
  const MultiIndex alpha = parse_multi_index(o.alpha, cfg.dimension);
  const MultiIndex n = parse_multi_index(o.n, cfg.dimension);
  const auto start = std::chrono::steady_clock::now();
  const auto result = app::run_element(cfg, alpha, n);
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  Output out(o.out);
  app::write_element_csv(out.stream(), result);
  std::cerr << element_label(alpha, n) << " = " << format_double(result.value) << " ("
            << took.count() << " s)\n";
  return app::kSuccess;
}

int cmd_matrix(const Options& o) {
  const ModelConfig cfg = load(o);
  const unsigned degree = o.degree.value_or(2);
  const KoopmanMatrix km = app::run_matrix(cfg, degree);
  Output out(o.out);
  app::write_dual_matrix(out.stream(), cfg, km);
  return app::kSuccess;
}

int cmd_edmd(const Options& o) {
  ModelConfig cfg = load(o);
  const unsigned degree = o.degree.value_or(cfg.edmd.degree);
  const std::size_t repeats = o.ov.repeats.value_or(1);
  const app::EdmdRun run = app::run_edmd(cfg, o.paths, repeats, degree);
  Output out(o.out);
  app::write_edmd_metadata(out.stream(), cfg, run);
  app::write_matrix_csv(out.stream(), run.mean, run.dictionary);
  if (!o.std_out.empty()) {
    Output sd(o.std_out);
    app::write_edmd_metadata(sd.stream(), cfg, run);
    app::write_matrix_csv(sd.stream(), run.std, run.dictionary);
  }
  std::cerr << "N_data=" << run.n_data << " repeats=" << run.repeats << "\n";
  return app::kSuccess;
}

int cmd_compare(const Options& o) {
  const ModelConfig cfg = load(o);
  const unsigned degree = o.degree.value_or(cfg.edmd.degree);
  std::vector<ElementLabel> elements;
  for (const auto& e : o.elements) elements.push_back(parse_element_label(e, cfg.dimension));
  if (elements.empty()) elements = app::default_elements(cfg.dimension);
  std::vector<std::size_t> sizes = o.sizes;
  if (sizes.empty()) sizes = {500, 1000, 2000, 8000};
  const auto rows = app::run_compare(cfg, elements, sizes, degree);
  Output out(o.out);
  app::write_compare_csv(out.stream(), rows);
  return app::kSuccess;
}

int cmd_mc(const Options& o) {
  const ModelConfig cfg = load(o);
  const MultiIndex alpha = parse_multi_index(o.alpha, cfg.dimension);
  const auto est = app::run_mc(cfg, alpha);
  Output out(o.out);
  app::write_mc_csv(out.stream(), cfg, alpha, est);
  return app::kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Koopman-matrix elements of polynomial SDEs"};
  cli.require_subcommand(1);
  Options o;
  std::vector<double> x0;

  auto* element = cli.add_subcommand("element", "One element via resolvent paths and extrapolation");
  add_common(element, o);
  add_resolvent(element, o);
  element->add_option("--alpha", o.alpha, "Observable exponents, e.g. \"[2 0]\"")->required();
  element->add_option("--n", o.n, "Basis exponents, e.g. \"[0 0]\"")->required();

  auto* matrix = cli.add_subcommand("matrix", "Dense Koopman matrix on a monomial dictionary");
  add_common(matrix, o);
  add_resolvent(matrix, o);
  matrix->add_option("--degree", o.degree, "Largest total degree of the dictionary (default 2)");

  auto* edmd = cli.add_subcommand("edmd", "EDMD estimate from simulated snapshot pairs");
  add_common(edmd, o);
  add_simulation(edmd, o);
  edmd->add_option("--paths", o.paths, "Sample paths per estimate")->check(CLI::PositiveNumber);
  edmd->add_option("--degree", o.degree, "Dictionary degree (default from model)");
  edmd->add_option("--x0", x0, "Initial state of every path (shifted coordinates)");
  edmd->add_option("--std-out", o.std_out, "Write the per-element standard deviations here");

  auto* compare = cli.add_subcommand("compare", "Dual method against EDMD over data sizes");
  add_common(compare, o);
  add_resolvent(compare, o);
  add_simulation(compare, o);
  compare->add_option("--element", o.elements, "Element label \"[a b] -> [c d]\" (repeatable)");
  compare->add_option("--sizes", o.sizes, "Snapshot-pair counts, e.g. 500,1000")->delimiter(',');
  compare->add_option("--degree", o.degree, "EDMD dictionary degree (default from model)");
  compare->add_option("--x0", x0, "Initial state of every path (shifted coordinates)");

  auto* mc = cli.add_subcommand("mc", "Monte Carlo estimate of E[X(T)^alpha]");
  add_common(mc, o);
  add_simulation(mc, o);
  mc->add_option("--alpha", o.alpha, "Observable exponents")->required();
  mc->add_option("--samples", o.ov.samples, "Paths per repetition");
  mc->add_option("--x0", x0, "Initial state (shifted coordinates)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return app::kParseFailure;
  }
  if (!x0.empty()) o.ov.x0 = x0;

  try {
    if (element->parsed()) return cmd_element(o);
    if (matrix->parsed()) return cmd_matrix(o);
    if (edmd->parsed()) return cmd_edmd(o);
    if (compare->parsed()) return cmd_compare(o);
    if (mc->parsed()) return cmd_mc(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kParseFailure;
  } catch (const SingularDenominator& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return app::kNumericFailure;
  } catch (const StateExplosion& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return app::kNumericFailure;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return app::kNumericFailure;
  } catch (const DegenerateGram& e) {
    std::cerr << "degenerate Gram matrix: " << e.what() << "\n";
    return app::kDegenerateGram;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kParseFailure;
  }
  return app::kParseFailure;
}
