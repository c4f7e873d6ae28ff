#pragma once

// Suite orchestration behind the command-line front end.

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "curvlab/report.hpp"

namespace curvlab {

/// Invalid subcommand/model/parameter combination (exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string subcommand;  // identities, yamabe, det4, intervals, optimize
  std::vector<std::string> models;
  std::vector<int> ns;
  std::vector<std::string> as;  // rationals or decimals
  std::vector<std::string> bs;
  /// Named triples (l4, l2, l2-flipped, dirac2) or "g1:g2:g3".
  std::vector<std::string> gammas;
  std::uint64_t seed = 1;
  int trials = -1;  // < 0: suite default
  int nodes = -1;   // < 0: suite default (256; optimizer 128)
  int degree = 8;
  std::string objective = "total_iab";
  double step = 1e-2;
  int richardson = 3;
  /// Overrides of named tolerances (see default_tolerances()).
  std::map<std::string, double> tolerances;
  int threads = 0;  // 0: hardware concurrency
  bool timestamp = true;

  Json to_json() const;
};

/// Name -> default tolerance for every check the suites perform.
const std::map<std::string, double>& default_tolerances();

/// Throws UsageError for unknown subcommands, malformed parameters and
/// model/parameter combinations a suite does not handle.
void validate(const RunConfig& config);

struct RunResult {
  std::vector<Record> records;
  Tally tally;
  int exit_code() const { return tally.ok() ? 0 : 1; }
};

/// Runs the selected suite.  `sink` (optional) receives records in final
/// order as each section completes.  Deterministic in the configuration:
/// trial k draws from derive_seed(seed, k) whatever the thread count.
RunResult run(const RunConfig& config, const std::function<void(const Record&)>& sink = {});

/// f(0..count-1) on a worker pool; results in index order.  The first
/// exception (lowest index) is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& f);

}  // namespace curvlab

#include "curvlab/parallel_map.ipp"
