#include "curvlab/model_geometries.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "curvlab/errors.hpp"

namespace curvlab {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::sphere:
      return "sphere";
    case ModelKind::torus:
      return "torus";
    case ModelKind::s2xs2:
      return "s2xs2";
  }
  return "unknown";
}

double EinsteinModel::radius() const {
  switch (kind) {
    case ModelKind::sphere:
      return 1.0 / std::sqrt(lambda);
    case ModelKind::s2xs2:
      return 1.0 / std::sqrt(3.0 * lambda);
    case ModelKind::torus:
      break;
  }
  throw UnsupportedError("flat torus has no radius");
}

std::string EinsteinModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind);
  switch (kind) {
    case ModelKind::sphere:
      os << ":n=" << dim << ",lambda=" << lambda;
      break;
    case ModelKind::s2xs2:
      os << ":lambda=" << lambda;
      break;
    case ModelKind::torus:
      os << ":n=" << dim << ",periods=";
      for (std::size_t i = 0; i < periods.size(); ++i) os << (i ? ";" : "") << periods[i];
      break;
  }
  return os.str();
}

double unit_sphere_volume(int n) {
  const double half = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

EinsteinModel round_sphere(int n, double lambda) {
  if (n < 3) throw UnsupportedError("round_sphere: dimension must be >= 3");
  if (!(lambda > 0)) throw std::invalid_argument("round_sphere: lambda must be > 0 (use flat_torus for lambda = 0)");
  EinsteinModel m;
  m.kind = ModelKind::sphere;
  m.dim = n;
  m.lambda = lambda;
  m.weyl_norm2 = 0;
  m.volume = unit_sphere_volume(n) * std::pow(lambda, -0.5 * n);
  return m;
}

EinsteinModel flat_torus(int n, const std::vector<double>& periods) {
  if (n < 3) throw UnsupportedError("flat_torus: dimension must be >= 3");
  if (static_cast<int>(periods.size()) != n) throw std::invalid_argument("flat_torus: need one period per dimension");
  EinsteinModel m;
  m.kind = ModelKind::torus;
  m.dim = n;
  m.lambda = 0;
  m.weyl_norm2 = 0;
  m.volume = 1;
  for (double p : periods) {
    if (!(p > 0)) throw std::invalid_argument("flat_torus: periods must be positive");
    m.volume *= p;
  }
  m.periods = periods;
  return m;
}

EinsteinModel product_s2_s2(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("product_s2_s2: lambda must be > 0");
  const double k = 3 * lambda;
  EinsteinModel m;
  m.kind = ModelKind::s2xs2;
  m.dim = 4;
  m.lambda = lambda;
  // |Rm|^2 = 8K^2, |Ric|^2 = 4K^2, R = 4K; in dimension four
  // |W|^2 = |Rm|^2 - 2|Ric|^2 + R^2/3.
  m.weyl_norm2 = 16.0 * k * k / 3.0;
  const double area = 4 * std::numbers::pi / k;
  m.volume = area * area;
  return m;
}

namespace {

// Decimal or p/q.
double parse_number(const std::string& text, const std::string& key) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
      std::size_t used_den = 0;
      const double p = std::stod(num, &used), q = std::stod(den, &used_den);
      if (used == num.size() && used_den == den.size() && q != 0) return p / q;
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("model: bad number for " + key + ": '" + text + "'");
}

}  // namespace

EinsteinModel parse_model(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string kind = descriptor.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::stringstream ss(descriptor.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("model: expected key=value in '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  auto number = [&](const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const double v = parse_number(it->second, key);
    return v;
  };
  for (const auto& [key, value] : kv) {
    if (key != "n" && key != "lambda" && key != "periods" && key != "period") {
      throw std::invalid_argument("model: unknown key '" + key + "'");
    }
  }

  if (kind == "sphere") return round_sphere(static_cast<int>(number("n", 4)), number("lambda", 1));
  if (kind == "s2xs2") return product_s2_s2(number("lambda", 1.0 / 3.0));
  if (kind == "torus") {
    const int n = static_cast<int>(number("n", 4));
    std::vector<double> periods;
    if (auto it = kv.find("periods"); it != kv.end()) {
      std::stringstream ss(it->second);
      std::string p;
      while (std::getline(ss, p, ';')) periods.push_back(parse_number(p, "periods"));
    } else {
      periods.assign(static_cast<std::size_t>(n), number("period", 2 * std::numbers::pi));
    }
    return flat_torus(n, periods);
  }
  throw std::invalid_argument("model: unknown model kind '" + kind + "'");
}

EinsteinPointwise einstein_pointwise(const EinsteinModel& model) {
  const double n = model.dim;
  const double l = model.lambda;
  EinsteinPointwise p;
  p.j = n * l / 2;
  p.p_norm2 = n * l * l / 4;
  p.sigma2 = n * (n - 1) * l * l / 8;
  p.q = n * (n * n - 4) * l * l / 8;
  p.weyl_norm2 = model.weyl_norm2;
  return p;
}

double yamabe_constant_iab(const EinsteinModel& model, double a, double b) {
  const int n = model.dim;
  if (n == 4) throw UnsupportedError("yamabe_constant_iab: dimension 4 uses the log-determinant functionals");
  if (n == 3 && b != 0) throw UnsupportedError("yamabe_constant_iab: the Weyl tensor vanishes in dimension 3, b must be 0");
  if (n < 3) throw UnsupportedError("yamabe_constant_iab: dimension must be >= 3");
  const EinsteinPointwise p = einstein_pointwise(model);
  const double total = p.q + a * p.sigma2 + b * p.weyl_norm2;
  return total * std::pow(model.volume, 4.0 / n);
}

double q_constant_gamma_form(const EinsteinModel& model) {
  const int n = model.dim;
  if (n < 5) throw UnsupportedError("q_constant_gamma_form: dimension must be >= 5");
  const double ratio = std::tgamma(0.5 * (n + 4)) / std::tgamma(0.5 * (n - 4));
  return ratio * model.lambda * model.lambda * std::pow(model.volume, 4.0 / n);
}

ChartMetric stereographic_chart(const EinsteinModel& model) {
  if (model.kind != ModelKind::sphere) throw UnsupportedError("stereographic_chart: model must be a sphere");
  const int n = model.dim;
  const Real r2 = 1.0L / static_cast<Real>(model.lambda);
  const Real r = std::sqrt(r2);
  ChartMetric m;
  m.dim = n;
  m.eval = [n, r2](const VecR& x) {
    const Real d = r2 + x.squaredNorm();
    return MatR(MatR::Identity(n, n) * (4 * r2 * r2 / (d * d)));
  };
  m.lower = VecR::Constant(n, -4 * r);
  m.upper = VecR::Constant(n, 4 * r);
  return m;
}

ChartMetric product_chart(const EinsteinModel& model) {
  if (model.kind != ModelKind::s2xs2) throw UnsupportedError("product_chart: model must be s2xs2");
  const Real r2 = 1.0L / (3.0L * static_cast<Real>(model.lambda));
  const Real r = std::sqrt(r2);
  ChartMetric m;
  m.dim = 4;
  m.eval = [r2](const VecR& x) {
    MatR g = MatR::Zero(4, 4);
    const Real d1 = r2 + x[0] * x[0] + x[1] * x[1];
    const Real d2 = r2 + x[2] * x[2] + x[3] * x[3];
    g(0, 0) = g(1, 1) = 4 * r2 * r2 / (d1 * d1);
    g(2, 2) = g(3, 3) = 4 * r2 * r2 / (d2 * d2);
    return g;
  };
  m.lower = VecR::Constant(4, -4 * r);
  m.upper = VecR::Constant(4, 4 * r);
  return m;
}

ChartMetric torus_chart(const EinsteinModel& model) {
  if (model.kind != ModelKind::torus) throw UnsupportedError("torus_chart: model must be a torus");
  const int n = model.dim;
  ChartMetric m;
  m.dim = n;
  m.eval = [n](const VecR&) { return MatR(MatR::Identity(n, n)); };
  m.lower = VecR::Zero(n);
  m.upper = VecR(n);
  for (int i = 0; i < n; ++i) m.upper[i] = model.periods[static_cast<std::size_t>(i)];
  return m;
}

}  // namespace curvlab
