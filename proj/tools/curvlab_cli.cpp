// curvlab: command-line front end to the verification suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#include "curvlab/runner.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageExit = 2;

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw curvlab::UsageError("--tol expects name=value, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw curvlab::UsageError("bad tolerance value in '" + item + "'");
    }
  }
  return out;
}

fs::path place(const std::string& path, const std::string& dir) {
  fs::path p(path);
  if (p.is_relative() && !dir.empty()) p = fs::path(dir) / p;
  return p;
}

std::unique_ptr<std::ofstream> open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  auto f = std::make_unique<std::ofstream>(p, std::ios::binary);
  if (!*f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for fourth-order conformal curvature invariants"};
  app.set_config("--config", "", "Key-value file mirroring the long flags (key = value, # comments)");
  app.fallthrough();
  app.require_subcommand(1);

  curvlab::RunConfig cfg;
  std::vector<std::string> tolerances;
  std::string output, output_dir, csv;
  bool text = false, no_timestamp = false;

  app.add_option("--model", cfg.models, "Model descriptor, repeatable: sphere:n=5,lambda=1 | torus:n=4,period=6.28 | s2xs2:lambda=1/3");
  app.add_option("--n", cfg.ns, "Dimensions (comma separated)")->delimiter(',');
  app.add_option("--a", cfg.as, "Values of a (comma separated; p/q or decimals)")->delimiter(',');
  app.add_option("--b", cfg.bs, "Values of b (comma separated)")->delimiter(',');
  app.add_option("--gamma", cfg.gammas, "Gamma triples g1:g2:g3 or l4, l2, l2-flipped, dirac2 (comma separated)")
      ->delimiter(',');
  app.add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Random trials (suite default when omitted)");
  app.add_option("--nodes", cfg.nodes, "Quadrature nodes (default 256, optimize 128)");
  app.add_option("--degree", cfg.degree, "Optimizer: maximal zonal degree")->capture_default_str();
  app.add_option("--objective", cfg.objective, "Optimizer objective: total_iab, f_gamma, dj")->capture_default_str();
  app.add_option("--step", cfg.step, "Finite-difference step")->capture_default_str();
  app.add_option("--richardson", cfg.richardson, "Richardson levels")->capture_default_str();
  app.add_option("--tol", tolerances, "Tolerance override name=value (repeatable)");
  app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware)")->capture_default_str();
  app.add_option("--output", output, "JSON-lines report path (default: stdout)");
  app.add_option("--output-dir", output_dir, "Directory for reports; <subcommand>.jsonl when --output is omitted")
      ->envname("CURVLAB_OUTPUT_DIR");
  app.add_option("--csv", csv, "Also write records as CSV");
  app.add_flag("--text", text, "Human-readable lines on stdout instead of JSON");
  app.add_flag("--no-timestamp", no_timestamp, "Omit the header timestamp (byte-identical reruns)");

  for (const char* name : {"identities", "yamabe", "det4", "intervals", "optimize"}) app.add_subcommand(name);
  app.get_subcommand("identities")->description("Divergence identities, Einstein charts, scales, exact algebra");
  app.get_subcommand("yamabe")->description("Sharp Sobolev inequalities and constants, n != 4");
  app.get_subcommand("det4")->description("Dimension-4 functionals I, II, III and F_gamma");
  app.get_subcommand("intervals")->description("Exact admissible intervals, C(n,a), gamma maps");
  app.get_subcommand("optimize")->description("Optimise a functional over zonal conformal factors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.tolerances = parse_tolerances(tolerances);
    cfg.timestamp = !no_timestamp;
    curvlab::validate(cfg);

    std::unique_ptr<std::ofstream> json_file, csv_file;
    if (!output.empty()) {
      json_file = open_out(place(output, output_dir));
    } else if (!output_dir.empty()) {
      json_file = open_out(fs::path(output_dir) / (cfg.subcommand + ".jsonl"));
    }
    if (!csv.empty()) csv_file = open_out(place(csv, output_dir));
    std::ostream* json = json_file ? json_file.get() : (text ? nullptr : &std::cout);

    if (json) *json << curvlab::header_json(cfg.subcommand, cfg.to_json(), cfg.timestamp).dump() << '\n';
    const curvlab::RunResult res = curvlab::run(cfg, [&](const curvlab::Record& r) {
      if (json) *json << r.to_json().dump() << '\n' << std::flush;
      if (text) std::cout << r.str() << '\n' << std::flush;
    });
    if (json) *json << curvlab::summary_json(res.tally).dump() << '\n';
    if (csv_file) curvlab::write_csv(*csv_file, res.records);

    std::cerr << "curvlab " << cfg.subcommand << ": " << res.tally.passed << " passed, " << res.tally.failed
              << " failed, " << res.tally.suppressed << " without verdict\n";
    return res.exit_code();
  } catch (const curvlab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
