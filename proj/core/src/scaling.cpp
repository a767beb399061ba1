#include "pmlrate/scaling.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pmlrate/error.hpp"

namespace pml {

namespace {

// Regularized incomplete beta I_x(4,4) = 35x^4 - 84x^5 + 70x^6 - 20x^7 on [0, 1/2].
double beta44_lower(double x) {
  const double x4 = x * x * x * x;
  return x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

// I_x(4,4) evaluated through the reflection I_x = 1 - I_{1-x} above one half,
// so that I(1) = 1 exactly.
double beta44(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x <= 0.5 ? beta44_lower(x) : 1.0 - beta44_lower(1.0 - x);
}

// d/dx I_x(4,4).
double beta44_prime(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double w = x * (1.0 - x);
  return 140.0 * w * w * w;
}

double parse_double(std::string_view token, std::string_view what) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConstructionError("scaling spec: cannot parse " + std::string(what) + " from '" +
                            std::string(token) + "'");
  }
  return value;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

struct ScalingFn::Table {
  std::vector<double> r;
  std::vector<double> f;
  std::vector<double> m;  // limited slopes
};

std::string_view to_string(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::cubic:
      return "cubic";
    case ScalingKind::poly8:
      return "poly8";
    case ScalingKind::linear_tail_custom:
      return "custom";
  }
  return "unknown";
}

ScalingFn::ScalingFn(ScalingKind kind, double R1, double R2) : kind_(kind), R1_(R1), R2_(R2) {}

ScalingFn ScalingFn::make(ScalingKind kind, double R1, double R2) {
  if (!(R1 > 0.0)) throw ConstructionError("scaling: requires 0 < R1 (got R1 = " + format_number(R1) + ")");
  if (!(R2 > R1)) {
    throw ConstructionError("scaling: requires R1 < R2 (got R1 = " + format_number(R1) +
                            ", R2 = " + format_number(R2) + ")");
  }
  if (kind == ScalingKind::linear_tail_custom) {
    throw ConstructionError("scaling: custom profiles are built from samples, use ScalingFn::custom");
  }
  ScalingFn fn(kind, R1, R2);
  if (kind == ScalingKind::poly8) {
    // (t-R1)^3 (R2-t)^3 integrates to L^7 B(4,4) = L^7 / 140 over the window.
    const double L = R2 - R1;
    fn.norm_ = std::pow(L, 7) / 140.0;
  }
  return fn;
}

ScalingFn ScalingFn::custom(std::vector<ScalingSample> samples) {
  if (samples.size() < 2) throw ConstructionError("custom scaling: needs at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].r > samples[i - 1].r)) throw ConstructionError("custom scaling: r samples must be strictly increasing");
    if (samples[i].f < samples[i - 1].f) throw ConstructionError("custom scaling: f samples must be nondecreasing");
  }
  if (samples.front().f != 0.0 || samples.front().df != 0.0) {
    throw ConstructionError("custom scaling: first sample must have f = f' = 0 (it defines R1)");
  }
  if (!(samples.front().r > 0.0)) throw ConstructionError("custom scaling: requires 0 < R1");

  auto table = std::make_shared<Table>();
  const std::size_t n = samples.size();
  table->r.resize(n);
  table->f.resize(n);
  table->m.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    table->r[i] = samples[i].r;
    table->f[i] = samples[i].f;
    table->m[i] = std::max(samples[i].df, 0.0);
  }
  // Fritsch-Carlson limiter keeps the Hermite interpolant monotone.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double delta = (table->f[i + 1] - table->f[i]) / (table->r[i + 1] - table->r[i]);
    if (delta == 0.0) {
      table->m[i] = 0.0;
      table->m[i + 1] = 0.0;
      continue;
    }
    const double alpha = table->m[i] / delta;
    const double beta = table->m[i + 1] / delta;
    const double s = alpha * alpha + beta * beta;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      table->m[i] = tau * alpha * delta;
      table->m[i + 1] = tau * beta * delta;
    }
  }
  ScalingFn fn(ScalingKind::linear_tail_custom, samples.front().r, samples.back().r);
  fn.table_ = std::move(table);
  return fn;
}

ScalingFn ScalingFn::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ConstructionError("scaling spec '" + std::string(spec) + "': expected kind:R1:R2 or custom:<path>");
  }
  const auto kind = spec.substr(0, colon);
  const auto rest = spec.substr(colon + 1);
  if (kind == "custom") {
    std::ifstream in{std::string(rest)};
    if (!in) throw ConstructionError("custom scaling: cannot open '" + std::string(rest) + "'");
    std::vector<ScalingSample> samples;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      ScalingSample s{};
      if (!(row >> s.r >> s.f >> s.df)) throw ConstructionError("custom scaling: malformed row '" + line + "'");
      samples.push_back(s);
    }
    auto fn = custom(std::move(samples));
    fn.source_ = std::string(rest);
    return fn;
  }
  const auto colon2 = rest.find(':');
  if (colon2 == std::string_view::npos) {
    throw ConstructionError("scaling spec '" + std::string(spec) + "': expected kind:R1:R2");
  }
  const double R1 = parse_double(rest.substr(0, colon2), "R1");
  const double R2 = parse_double(rest.substr(colon2 + 1), "R2");
  if (kind == "cubic") return make(ScalingKind::cubic, R1, R2);
  if (kind == "poly8") return make(ScalingKind::poly8, R1, R2);
  throw ConstructionError("scaling spec: unknown kind '" + std::string(kind) + "' (cubic, poly8, custom)");
}

double ScalingFn::f(double r) const {
  if (r <= R1_) return 0.0;
  switch (kind_) {
    case ScalingKind::cubic: {
      const double s = r - R1_;
      return s * s * s;
    }
    case ScalingKind::poly8:
      if (r >= R2_) return r;
      return r * beta44((r - R1_) / (R2_ - R1_));
    case ScalingKind::linear_tail_custom: {
      const auto& t = *table_;
      if (r >= t.r.back()) return t.f.back() + t.m.back() * (r - t.r.back());
      const auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - t.r.begin()) - 1;
      const double h = t.r[i + 1] - t.r[i];
      const double u = (r - t.r[i]) / h;
      const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
      const double h10 = u * (1 - u) * (1 - u);
      const double h01 = u * u * (3 - 2 * u);
      const double h11 = u * u * (u - 1);
      return h00 * t.f[i] + h10 * h * t.m[i] + h01 * t.f[i + 1] + h11 * h * t.m[i + 1];
    }
  }
  return 0.0;
}

double ScalingFn::df(double r) const {
  if (r <= R1_) return 0.0;
  switch (kind_) {
    case ScalingKind::cubic: {
      const double s = r - R1_;
      return 3.0 * s * s;
    }
    case ScalingKind::poly8: {
      if (r >= R2_) return 1.0;
      const double L = R2_ - R1_;
      const double x = (r - R1_) / L;
      return beta44(x) + r * beta44_prime(x) / L;
    }
    case ScalingKind::linear_tail_custom: {
      const auto& t = *table_;
      if (r >= t.r.back()) return t.m.back();
      const auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - t.r.begin()) - 1;
      const double h = t.r[i + 1] - t.r[i];
      const double u = (r - t.r[i]) / h;
      const double d00 = 6 * u * (u - 1);
      const double d10 = (1 - u) * (1 - 3 * u);
      const double d01 = -d00;
      const double d11 = u * (3 * u - 2);
      return (d00 * t.f[i] + d01 * t.f[i + 1]) / h + d10 * t.m[i] + d11 * t.m[i + 1];
    }
  }
  return 0.0;
}

std::string ScalingFn::spec() const {
  if (kind_ == ScalingKind::linear_tail_custom) return "custom:" + source_;
  return std::string(to_string(kind_)) + ":" + format_number(R1_) + ":" + format_number(R2_);
}

double clamp_theta(double theta) noexcept {
  return std::clamp(theta, kThetaEps, std::numbers::pi / 2 - kThetaEps);
}

PmlProfile::PmlProfile(ScalingFn scaling, double theta)
    : scaling_(std::move(scaling)), theta_(clamp_theta(theta)), tan_(std::tan(theta_)) {}

PmlProfile::PmlProfile(ScalingFn scaling, double theta, double tan_theta)
    : scaling_(std::move(scaling)), theta_(theta), tan_(tan_theta) {}

PmlProfile PmlProfile::with_tan(ScalingFn scaling, double tan_theta) {
  if (!(tan_theta > 0.0) || !std::isfinite(tan_theta)) {
    throw ConstructionError("profile: tan(theta) must be positive and finite");
  }
  return PmlProfile(std::move(scaling), std::atan(tan_theta), tan_theta);
}

double PmlProfile::sigma_tilde(double r) const {
  if (!(r > 0.0)) throw DomainError("sigma_tilde: requires r > 0");
  return f(r) / r;
}

}  // namespace pml
