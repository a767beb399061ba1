#include "pmlrate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "pmlrate/error.hpp"
#include "pmlrate/rate.hpp"

namespace pml {

namespace {

constexpr cplx kI{0.0, 1.0};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

void add_flag(SweepRow& row, const std::string& f) {
  if (row.flag == "ok") {
    row.flag = f;
  } else {
    row.flag += "|" + f;
  }
}

SweepRow one_d_row(const OneDConfig& cfg, SweepAxis axis, double value) {
  SweepRow row;
  row.axis = axis;
  row.value = value;
  const double scale = std::abs(cfg.bc);
  double err_sup = 0.0, l2 = 0.0, grad = 0.0;
  const double ref_l2 = scale * std::sqrt(cfg.window);

  if (cfg.method == OneDConfig::Method::closed_form) {
    const auto sol = solve_1d_closed_form(cfg.k, cfg.profile, cfg.R_tr, cfg.bc);
    const auto sup = sup_error_1d(sol, cfg.profile, cfg.window, cfg.samples);
    err_sup = sup.err_sup;
    // On [0, window] z = r, so e = (A - bc) e^{ikr} + B e^{-ikr} in closed form.
    const int n = cfg.samples - 1;
    const double h = cfg.window / n;
    auto e_at = [&](double r) { return (sol.A - cfg.bc) * std::exp(kI * cfg.k * r) + sol.B * std::exp(-kI * cfg.k * r); };
    auto de_at = [&](double r) {
      return kI * cfg.k * ((sol.A - cfg.bc) * std::exp(kI * cfg.k * r) - sol.B * std::exp(-kI * cfg.k * r));
    };
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 * h : h;
      const double r = i * h;
      l2 += w * std::norm(e_at(r));
      grad += w * std::norm(de_at(r));
    }
    row.n_grid = cfg.samples;
  } else {
    int cells = cfg.n_grid;
    if (cells == 0) cells = std::max(4096, static_cast<int>(std::ceil(cfg.R_tr * std::pow(cfg.k, 1.5) / 0.3)));
    const std::array<double, 3> breaks{cfg.window, cfg.profile.scaling().R1(), cfg.profile.scaling().R2()};
    cells = commensurate_cells(0.0, cfg.R_tr, cells, breaks);
    const auto sol = solve_1d_fd(cfg.k, cfg.profile, cfg.R_tr, cells, cfg.bc);
    const UniformGrid grid{0.0, cfg.R_tr, cells};
    int last = grid.nearest(cfg.window);
    if (grid.node(last) > cfg.window + 1e-9 * grid.spacing()) --last;
    std::vector<double> r(sol.radii.begin(), sol.radii.begin() + last + 1);
    std::vector<cplx> e(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      e[i] = sol.values[i] - cfg.bc * std::exp(kI * cfg.k * r[i]);
      err_sup = std::max(err_sup, std::abs(e[i]) / scale);
    }
    const auto de = grid_derivative(r, e);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      const double h = r[i + 1] - r[i];
      l2 += 0.5 * h * (std::norm(e[i]) + std::norm(e[i + 1]));
      grad += 0.5 * h * (std::norm(de[i]) + std::norm(de[i + 1]));
    }
    row.n_grid = cells;
  }

  ErrorReport& rep = row.report;
  rep.abs_L2 = std::sqrt(l2);
  rep.abs_H1 = std::sqrt(l2 + grad);
  rep.total_L2 = ref_l2;
  rep.rel_L2 = rep.abs_L2 / ref_l2;
  rep.rel_H1 = rep.abs_H1 / ref_l2;
  // Sharp 1D prediction 2 exp(-2k int Phi); int Phi = f_theta(R_tr) - f_theta(R1).
  const double integral = cfg.profile.f(cfg.R_tr);
  rep.predicted_bound = 2.0 * std::exp(-2.0 * cfg.k * integral);
  if (rep.predicted_bound == 0.0) rep.predicted_bound = std::numeric_limits<double>::denorm_min();
  row.error = err_sup;
  rep.ratio = err_sup / rep.predicted_bound;
  row.n_modes = 1;
  row.discretization = std::numeric_limits<double>::quiet_NaN();
  return row;
}

SweepRow scatter_row(const ScatteringConfig& cfg, SweepAxis axis, double value, bool check_grid) {
  SweepRow row;
  row.axis = axis;
  row.value = value;
  const auto sol = pml_scattering_solve(cfg);
  row.report = error_norms(cfg, sol);
  row.error = row.report.rel_H1;
  row.n_modes = sol.n_modes;
  row.n_grid = sol.grid.cells;
  row.discretization = std::numeric_limits<double>::quiet_NaN();
  if (check_grid) {
    ScatteringConfig fine_cfg = cfg;
    fine_cfg.n_grid = 2 * sol.grid.cells;
    const auto fine = pml_scattering_solve(fine_cfg);
    row.discretization = relative_difference(cfg, sol, fine);
  }
  const auto pred = predicted_exponent(cfg.k, cfg.profile, cfg.dim, cfg.R_tr, cfg.Lambda, cfg.eta);
  if (pred.no_decay_guaranteed) add_flag(row, "no_decay_guaranteed");
  if (pred.below_threshold) add_flag(row, "below_threshold");
  return row;
}

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::k:
      return "k";
    case SweepAxis::theta:
      return "theta";
    case SweepAxis::R_tr:
      return "R_tr";
  }
  return "k";
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "k") return SweepAxis::k;
  if (name == "theta") return SweepAxis::theta;
  if (name == "R_tr" || name == "rtr") return SweepAxis::R_tr;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (k, theta, R_tr)");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

void validate(const SweepSpec& spec) {
  if (spec.values.size() < 3) throw std::invalid_argument("sweep: needs at least three axis values");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1])) throw std::invalid_argument("sweep: axis values must be strictly increasing");
  }
}

SweepRow run_row(const SweepSpec& spec, double value) {
  SweepRow row;
  if (std::holds_alternative<OneDConfig>(spec.base)) {
    OneDConfig cfg = std::get<OneDConfig>(spec.base);
    switch (spec.axis) {
      case SweepAxis::k:
        cfg.k = value;
        break;
      case SweepAxis::theta:
        cfg.profile = PmlProfile(cfg.profile.scaling(), value);
        break;
      case SweepAxis::R_tr:
        cfg.R_tr = value;
        break;
    }
    row = one_d_row(cfg, spec.axis, value);
  } else {
    ScatteringConfig cfg = std::get<ScatteringConfig>(spec.base);
    cfg.eta = spec.eta;
    cfg.Lambda = spec.Lambda;
    switch (spec.axis) {
      case SweepAxis::k:
        cfg.k = value;
        break;
      case SweepAxis::theta:
        cfg.profile = PmlProfile(cfg.profile.scaling(), value);
        break;
      case SweepAxis::R_tr:
        cfg.R_tr = value;
        break;
    }
    row = scatter_row(cfg, spec.axis, value, spec.check_grid);
  }
  row.below_floor = !(row.error > 10.0 * kErrorFloor);
  if (row.below_floor) add_flag(row, "below_floor");
  if (spec.check_grid && !row.below_floor && !(10.0 * row.discretization <= row.error)) add_flag(row, "unresolved");
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads) {
  validate(spec);
  const std::size_t n = spec.values.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));

  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = run_row(spec, spec.values[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    std::vector<SweepRow> prefix(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(i));
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw SweepError("sweep aborted at " + to_string(spec.axis) + " = " + std::to_string(spec.values[i]) + ": " +
                           e.what(),
                       std::move(prefix));
    }
  }
  return rows;
}

FitResult fit_decay_rate(std::span<const SweepRow> rows, const FitCriterion& criterion) {
  FitResult out;
  std::vector<double> x, y, yp;
  for (const auto& r : rows) {
    if (!(r.error > 10.0 * kErrorFloor) || !std::isfinite(r.error)) continue;
    x.push_back(r.value);
    y.push_back(std::log(r.error));
    yp.push_back(std::log(r.report.predicted_bound));
  }
  out.used_points = static_cast<int>(x.size());
  if (x.size() < 3) return out;
  const auto fit = least_squares(x, y);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.residual_rms = fit.rms;
  out.predicted_slope = least_squares(x, yp).slope;

  const double pred = out.predicted_slope;
  bool ok;
  if (criterion.two_sided) {
    ok = std::abs(out.slope - pred) <= criterion.tol_slope * std::abs(pred);
  } else {
    ok = out.slope <= pred - criterion.tol_slope * std::abs(pred);
  }
  const double span = x.back() - x.front();
  const double decades = -out.slope * span / std::numbers::ln10;
  if (decades < criterion.min_decades) ok = false;
  out.verdict = ok ? Verdict::pass : Verdict::fail;
  return out;
}

FigureTable reproduce_figure_phi(const ScalingFn& scaling, std::span<const double> thetas, double r_lo,
                                 double r_hi, int samples, int dim) {
  if (r_lo > scaling.R1() || r_hi < scaling.R1() + 3.0) {
    throw DomainError("reproduce_figure_phi: r range must contain [R1, R1 + 3]");
  }
  if (samples < 2) throw DomainError("reproduce_figure_phi: need at least two samples");
  FigureTable t;
  t.columns = {"r", "f", "df"};
  std::vector<PmlProfile> profiles;
  for (double th : thetas) {
    profiles.emplace_back(scaling, th);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", th);
    t.columns.push_back(std::string("phi_over_tan_theta_") + buf);
    t.columns.push_back(std::string("int_phi_over_tan_theta_") + buf);
  }
  std::vector<double> cumulative(profiles.size(), 0.0);
  double prev_r = scaling.R1();
  for (int i = 0; i < samples; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / (samples - 1);
    std::vector<double> row{r, scaling.f(r), scaling.df(r)};
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      const double tn = profiles[p].tan_theta();
      if (r > prev_r) cumulative[p] += integral_phi(profiles[p], dim, prev_r, r, 1e-12);
      row.push_back(r > 0.0 ? phi(profiles[p], dim, r) / tn : 0.0);
      row.push_back(r > scaling.R1() ? cumulative[p] / tn : 0.0);
    }
    if (r > prev_r) prev_r = r;
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace pml
