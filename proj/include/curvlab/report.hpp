#pragma once

// Verification records: JSON lines (one object per line, fixed schema
// version), a plain-text rendering, and CSV export for scan grids.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "curvlab/spectral_sphere.hpp"

namespace curvlab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct Record {
  std::string suite;
  std::string kind;    // functional, residual, order, constant, exact, optimizer, consistency
  std::string name;
  std::string anchor;  // label of the claim being checked
  std::string model;
  double value = 0;
  double reference = 0;
  double gap = 0;
  double scale = 1;
  double tolerance = 0;
  std::string orientation = "equality";
  bool verdict_applies = true;
  bool pass = true;
  std::string warning;
  std::map<std::string, double> params;
  std::map<std::string, std::string> text;  // exact forms, names

  Json to_json() const;
  /// One human-readable line.
  std::string str() const;
};

Record from_functional(const std::string& suite, const FunctionalReport& r);

/// Passes iff residual <= tolerance * scale (scale 1 for an absolute bound).
Record residual_record(const std::string& suite, const std::string& name, const std::string& anchor,
                       const std::string& model, double residual, double scale, double tolerance);

/// Record with no verdict: a reported value.
Record value_record(const std::string& suite, const std::string& name, const std::string& anchor,
                    const std::string& model, double value);

struct Tally {
  int passed = 0;
  int failed = 0;
  int suppressed = 0;  // verdict not applicable

  void add(const Record& r);
  bool ok() const { return failed == 0; }
};

/// Header line: schema version, subcommand, configuration and (optionally)
/// the only wall-clock field of the stream.
Json header_json(const std::string& subcommand, const Json& config, bool timestamp);
Json summary_json(const Tally& t);

/// Columns: suite, kind, name, model, value, reference, gap, scale,
/// tolerance, pass, verdict_applies, then one column per parameter name
/// present in any record (sorted).  LF line endings.
void write_csv(std::ostream& out, const std::vector<Record>& records);

}  // namespace curvlab
