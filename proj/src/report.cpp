#include "curvlab/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace curvlab {

namespace {

// NaN/inf are not JSON numbers.
Json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

Json Record::to_json() const {
  Json j;
  j["type"] = "record";
  j["suite"] = suite;
  j["kind"] = kind;
  j["name"] = name;
  j["anchor"] = anchor;
  if (!model.empty()) j["model"] = model;
  j["value"] = number(value);
  j["reference"] = number(reference);
  j["gap"] = number(gap);
  j["scale"] = number(scale);
  j["tolerance"] = number(tolerance);
  j["orientation"] = orientation;
  j["verdict_applies"] = verdict_applies;
  j["pass"] = pass;
  if (!warning.empty()) j["warning"] = warning;
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = number(v);
  j["params"] = p;
  if (!text.empty()) j["text"] = text;
  return j;
}

std::string Record::str() const {
  std::ostringstream os;
  os << (verdict_applies ? (pass ? "PASS " : "FAIL ") : "---- ") << suite << '/' << name;
  if (!model.empty()) os << " [" << model << ']';
  for (const auto& [k, v] : params) os << ' ' << k << '=' << fmt(v);
  os << "  value=" << fmt(value);
  if (kind != "constant" && kind != "exact") os << " ref=" << fmt(reference) << " gap=" << fmt(gap);
  for (const auto& [k, v] : text) os << "  " << k << ": " << v;
  if (!warning.empty()) os << "  (" << warning << ')';
  return os.str();
}

Record from_functional(const std::string& suite, const FunctionalReport& r) {
  Record rec;
  rec.suite = suite;
  rec.kind = "functional";
  rec.name = r.name;
  rec.anchor = r.anchor;
  rec.model = r.model;
  rec.value = r.value;
  rec.reference = r.reference;
  rec.gap = r.gap;
  rec.scale = r.scale;
  rec.tolerance = r.tolerance;
  rec.orientation = to_string(r.orientation);
  rec.verdict_applies = r.verdict_applies;
  rec.pass = r.pass;
  rec.warning = r.warning;
  rec.params = r.params;
  return rec;
}

Record residual_record(const std::string& suite, const std::string& name, const std::string& anchor,
                       const std::string& model, double residual, double scale, double tolerance) {
  Record r;
  r.suite = suite;
  r.kind = "residual";
  r.name = name;
  r.anchor = anchor;
  r.model = model;
  r.value = residual;
  r.reference = 0;
  r.gap = residual;
  r.scale = scale;
  r.tolerance = tolerance;
  r.orientation = "equality";
  r.pass = std::abs(residual) <= tolerance * scale;
  return r;
}

Record value_record(const std::string& suite, const std::string& name, const std::string& anchor,
                    const std::string& model, double value) {
  Record r;
  r.suite = suite;
  r.kind = "constant";
  r.name = name;
  r.anchor = anchor;
  r.model = model;
  r.value = value;
  r.reference = value;
  r.verdict_applies = false;
  return r;
}

void Tally::add(const Record& r) {
  if (!r.verdict_applies) {
    ++suppressed;
  } else if (r.pass) {
    ++passed;
  } else {
    ++failed;
  }
}

Json header_json(const std::string& subcommand, const Json& config, bool timestamp) {
  Json j;
  j["type"] = "header";
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  if (timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    j["timestamp"] = os.str();
  }
  return j;
}

Json summary_json(const Tally& t) {
  Json j;
  j["type"] = "summary";
  j["passed"] = t.passed;
  j["failed"] = t.failed;
  j["suppressed"] = t.suppressed;
  j["ok"] = t.ok();
  return j;
}

void write_csv(std::ostream& out, const std::vector<Record>& records) {
  std::set<std::string> keys;
  for (const Record& r : records)
    for (const auto& kv : r.params) keys.insert(kv.first);
  out << "suite,kind,name,model,value,reference,gap,scale,tolerance,pass,verdict_applies";
  for (const auto& k : keys) out << ',' << csv_field(k);
  out << '\n';
  for (const Record& r : records) {
    out << csv_field(r.suite) << ',' << r.kind << ',' << csv_field(r.name) << ',' << csv_field(r.model) << ','
        << csv_number(r.value) << ',' << csv_number(r.reference) << ',' << csv_number(r.gap) << ','
        << csv_number(r.scale) << ',' << csv_number(r.tolerance) << ',' << (r.pass ? 1 : 0) << ','
        << (r.verdict_applies ? 1 : 0);
    for (const auto& k : keys) {
      out << ',';
      if (auto it = r.params.find(k); it != r.params.end()) out << csv_number(it->second);
    }
    out << '\n';
  }
}

}  // namespace curvlab
