#include "pmlrate/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pmlrate/error.hpp"
#include "pmlrate/rate.hpp"
#include "pmlrate/special.hpp"
#include "pmlrate/tridiag.hpp"

namespace pml {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

void check_dim23(int dim) {
  if (dim != 2 && dim != 3) throw DomainError("radial modes: dimension must be 2 or 3");
}

int max_order(int dim) { return dim == 2 ? special::kMaxCylOrder : special::kMaxSphericalOrder; }

// Conservative stencil for (z^{d-1}/z' v')' + z' z^{d-1}(k^2 - mu/z^2) v = 0 on [lo, hi];
// dim = 1 with mu = 0 is the 1D scaled equation. Assembly and elimination in long double.
GridSolution solve_stretched(int dim, double mu, double k, const PmlProfile& profile, double lo, double hi,
                             int cells, cplx bc) {
  if (cells < 16) throw DomainError("finite differences: need at least 16 cells");
  if (!(hi > lo)) throw DomainError("finite differences: empty interval");
  const UniformGrid grid{lo, hi, cells};
  const long double h = (static_cast<long double>(hi) - lo) / cells;
  const long double h2 = h * h;
  const long double k2 = static_cast<long double>(k) * k;

  auto coeff = [&](double r) {
    const cplx_ld z{profile.z(r)};
    const cplx_ld dz{profile.dz(r)};
    cplx_ld zp{1.0L, 0.0L};
    for (int i = 1; i < dim; ++i) zp *= z;
    return zp / dz;
  };
  std::vector<cplx_ld> mid(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) {
    const double rm = static_cast<double>(lo + (static_cast<long double>(i) + 0.5L) * h);
    mid[static_cast<std::size_t>(i)] = coeff(rm);
  }

  const std::size_t n = static_cast<std::size_t>(cells) - 1;  // interior unknowns
  std::vector<cplx_ld> lower(n), diag(n), upper(n), rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int i = static_cast<int>(j) + 1;
    const double r = grid.node(i);
    const cplx_ld z{profile.z(r)};
    const cplx_ld dz{profile.dz(r)};
    cplx_ld zp{1.0L, 0.0L};
    for (int d = 1; d < dim; ++d) zp *= z;
    const cplx_ld q = dz * zp * (k2 - static_cast<long double>(mu) / (z * z));
    const cplx_ld cl = mid[j];
    const cplx_ld cr = mid[j + 1];
    lower[j] = cl;
    upper[j] = cr;
    diag[j] = -(cl + cr) + h2 * q;
  }
  rhs[0] = -mid[0] * cplx_ld{bc};

  const auto x = solve_tridiagonal(lower, diag, upper, rhs);
  GridSolution out;
  out.radii = grid.nodes();
  out.values.resize(static_cast<std::size_t>(cells) + 1);
  out.values.front() = bc;
  for (std::size_t j = 0; j < n; ++j) out.values[j + 1] = cplx(static_cast<double>(x[j].real()), static_cast<double>(x[j].imag()));
  out.values.back() = 0.0;
  return out;
}

// Scattering coefficient  -c_nu (J(ka)/H(ka)) so that u^S = coef * H(kr).
struct RefCoef {
  cplx coef;
  bool negligible = false;
};

RefCoef reference_coefficient(int dim, int mode, double k, double a) {
  const double x = k * a;
  cplx ratio;
  double c;
  if (dim == 2) {
    const auto p = special::bessel_jy(mode, x);
    const cplx h{p.J, p.Y};
    if (!std::isfinite(p.Y)) return {0.0, true};
    ratio = p.J / h;
    c = mode == 0 ? 1.0 : 2.0;
  } else {
    const cplx h = special::spherical_hankel1(mode, x);
    if (!std::isfinite(h.imag())) return {0.0, true};
    ratio = h.real() / h;
    c = 2.0 * mode + 1.0;
  }
  if (std::abs(ratio) < std::numeric_limits<double>::min()) return {0.0, true};
  return {-c * i_pow(mode) * ratio, false};
}

ModeValue eval_reference(int dim, int mode, double k, const RefCoef& rc, double r) {
  if (rc.negligible) return {0.0, 0.0, true};
  const double x = k * r;
  cplx h, hp;
  if (dim == 2) {
    const auto p = special::bessel_jy(mode, x);
    h = {p.J, p.Y};
    hp = {p.Jp, p.Yp};
  } else {
    h = special::spherical_hankel1(mode, x);
    hp = special::spherical_hankel1_prime(mode, x);
  }
  return {rc.coef * h, rc.coef * k * hp, false};
}

// Annulus node count (indices 0..last) of the base grid.
int annulus_last(const ScatteringConfig& cfg, const UniformGrid& grid) {
  int last = grid.nearest(cfg.R1);
  if (grid.node(last) > cfg.R1 + 1e-9 * grid.spacing()) --last;
  return last;
}

// ||u^S + u^I||^2_{L2(annulus)} assembled from exact modes.
double total_field_l2_squared(const ScatteringConfig& cfg, const std::vector<double>& r, int solved_modes) {
  int n_tot = solved_modes;
  try {
    n_tot = std::max(n_tot, mode_cutoff(cfg.k, cfg.R1, 1e-14, cfg.dim));
  } catch (const CutoffError&) {
    n_tot = std::max(n_tot, max_order(cfg.dim) - 10);
  }
  n_tot = std::min(n_tot, max_order(cfg.dim));
  double sum = 0.0;
  std::vector<cplx> u(r.size()), du(r.size());
  for (int nu = 0; nu <= n_tot; ++nu) {
    const auto rc = reference_coefficient(cfg.dim, nu, cfg.k, cfg.obstacle_radius);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto inc = incident_mode(cfg.dim, nu, cfg.k, r[i]);
      const auto sc = eval_reference(cfg.dim, nu, cfg.k, rc, r[i]);
      u[i] = inc.value + sc.value;
      du[i] = inc.derivative + sc.derivative;
    }
    sum += angular_weight(cfg.dim, nu) * mode_norms(cfg.dim, nu, r, u, du).l2;
  }
  return sum;
}

}  // namespace

// ---------------------------------------------------------------------------

cplx ClosedForm1D::operator()(const PmlProfile& profile, double r) const {
  const cplx z = profile.z(r);
  return A * std::exp(kI * k * z) + B * std::exp(-kI * k * z);
}

ClosedForm1D solve_1d_closed_form(double k, const PmlProfile& profile, double R_tr, cplx bc) {
  if (!(k > 0.0)) throw DomainError("solve_1d_closed_form: requires k > 0");
  if (!(R_tr > 0.0)) throw DomainError("solve_1d_closed_form: requires R_tr > 0");
  ClosedForm1D s;
  s.k = k;
  s.R_tr = R_tr;
  s.bc = bc;
  s.reflection = std::exp(2.0 * kI * k * profile.z(R_tr));
  const cplx den = 1.0 - s.reflection;
  if (std::abs(den) < 1e-12) {
    throw SingularSystemError("solve_1d_closed_form: resonant truncation, |1 - e^{2ikz(R_tr)}| < 1e-12");
  }
  s.A = bc / den;
  s.B = -s.A * s.reflection;
  return s;
}

SupError1D sup_error_1d(const ClosedForm1D& sol, const PmlProfile& profile, double window, int samples) {
  if (samples < 2) throw DomainError("sup_error_1d: need at least two samples");
  SupError1D out;
  const double scale = std::abs(sol.bc);
  for (int i = 0; i < samples; ++i) {
    const double r = window * i / (samples - 1);
    const double e = std::abs(sol(profile, r) - sol.bc * std::exp(kI * sol.k * r)) / scale;
    if (e > out.err_sup) {
      out.err_sup = e;
      out.at_r = r;
    }
  }
  out.predicted = 2.0 * std::abs(sol.reflection) / std::abs(1.0 - sol.reflection);
  return out;
}

GridSolution solve_1d_fd(double k, const PmlProfile& profile, double R_tr, int n_grid, cplx bc) {
  return solve_1d_fd_interval(k, profile, 0.0, R_tr, n_grid, bc);
}

GridSolution solve_1d_fd_interval(double k, const PmlProfile& profile, double r0, double R_tr, int n_grid,
                                  cplx bc) {
  if (!(k > 0.0)) throw DomainError("solve_1d_fd: requires k > 0");
  return solve_stretched(1, 0.0, k, profile, r0, R_tr, n_grid, bc);
}

double angular_eigenvalue(int dim, int mode) {
  check_dim23(dim);
  const double nu = mode;
  return dim == 2 ? nu * nu : nu * (nu + 1.0);
}

double angular_weight(int dim, int mode) {
  check_dim23(dim);
  if (dim == 2) return mode == 0 ? 2.0 * std::numbers::pi : std::numbers::pi;
  return 4.0 * std::numbers::pi / (2.0 * mode + 1.0);
}

GridSolution radial_mode_solve(const RadialModeProblem& p, cplx bc_at_a) {
  check_dim23(p.dim);
  if (p.mode < 0) throw DomainError("radial_mode_solve: mode index must be nonnegative");
  if (!(p.k > 0.0)) throw DomainError("radial_mode_solve: requires k > 0");
  if (!(p.a > 0.0 && p.a < p.R_tr)) throw DomainError("radial_mode_solve: requires 0 < a < R_tr");
  return solve_stretched(p.dim, angular_eigenvalue(p.dim, p.mode), p.k, p.profile, p.a, p.R_tr, p.n_grid,
                         bc_at_a);
}

ModeValue incident_mode(int dim, int mode, double k, double r) {
  check_dim23(dim);
  const double x = k * r;
  if (dim == 2) {
    const auto p = special::bessel_jy(mode, x);
    const cplx c = (mode == 0 ? 1.0 : 2.0) * i_pow(mode);
    return {c * p.J, c * k * p.Jp, false};
  }
  const cplx c = (2.0 * mode + 1.0) * i_pow(mode);
  return {c * special::spherical_bessel_j(mode, x), c * k * special::spherical_bessel_j_prime(mode, x), false};
}

ModeValue reference_mode(int dim, int mode, double k, double a, double r) {
  check_dim23(dim);
  if (r < a) throw DomainError("reference_mode: requires r >= a");
  return eval_reference(dim, mode, k, reference_coefficient(dim, mode, k, a), r);
}

int mode_cutoff(double k, double a, double tail_tol, int dim) {
  check_dim23(dim);
  const double x = k * a;
  if (!(x > 0.0)) throw DomainError("mode_cutoff: requires ka > 0");
  const int cap = max_order(dim);
  const int start = static_cast<int>(std::ceil(x));
  if (start + 10 > cap) throw CutoffError("mode_cutoff: ka exceeds the supported order window");
  std::vector<double> coef(static_cast<std::size_t>(cap) + 1);
  if (dim == 2) {
    const auto j = special::bessel_j_sequence(cap, x);
    for (int n = 0; n <= cap; ++n) coef[static_cast<std::size_t>(n)] = (n == 0 ? 1.0 : 2.0) * std::abs(j[static_cast<std::size_t>(n)]);
  } else {
    for (int l = 0; l <= cap; ++l) coef[static_cast<std::size_t>(l)] = (2.0 * l + 1.0) * std::abs(special::spherical_bessel_j(l, x));
  }
  for (int N = start; N + 10 <= cap; ++N) {
    bool ok = true;
    for (int nu = N + 1; nu <= N + 10; ++nu) {
      if (!(coef[static_cast<std::size_t>(nu)] < tail_tol)) {
        ok = false;
        break;
      }
    }
    if (ok) return N;
  }
  throw CutoffError("mode_cutoff: tolerance not reached below order " + std::to_string(cap) +
                    "; larger arguments need a wider order window");
}

int auto_mode_count(double k, double a) {
  const double x = k * a;
  return static_cast<int>(std::ceil(x + 6.0 * std::cbrt(x) + 20.0));
}

void validate(const ScatteringConfig& cfg) {
  check_dim23(cfg.dim);
  if (!(cfg.k > 0.0)) throw DomainError("scattering: requires k > 0");
  const double a = cfg.obstacle_radius;
  if (!(a > 0.0)) throw DomainError("scattering: requires obstacle radius > 0");
  if (!(a < cfg.R1)) throw DomainError("scattering: requires obstacle radius < R1");
  if (!(cfg.R1 < cfg.R_tr)) throw DomainError("scattering: requires R1 < R_tr");
  if (cfg.profile.scaling().R1() < cfg.R1 - 1e-12) {
    throw DomainError("scattering: the scaling must vanish on the error annulus (scaling R1 >= R1)");
  }
  if (cfg.richardson_levels < 1 || cfg.richardson_levels > 4) throw DomainError("scattering: richardson_levels in [1, 4]");
  if (cfg.n_grid != 0 && cfg.n_grid < 16) throw DomainError("scattering: n_grid must be 0 (auto) or >= 16");
  if (cfg.mode_cutoff < 0 || cfg.mode_cutoff > max_order(cfg.dim)) throw DomainError("scattering: mode cutoff outside order window");
  if (!(cfg.eta >= 0.0 && cfg.eta < 2.0)) throw DomainError("scattering: requires 0 <= eta < 2");
  if (!(cfg.Lambda >= 0.0)) throw DomainError("scattering: Lambda must be nonnegative");
}

int resolve_grid(const ScatteringConfig& cfg) {
  const double a = cfg.obstacle_radius;
  int cells = cfg.n_grid;
  if (cells == 0) {
    // h k^{3/2} <= 0.3
    cells = static_cast<int>(std::ceil((cfg.R_tr - a) * std::pow(cfg.k, 1.5) / 0.3));
    cells = std::max(cells, 64);
  }
  const std::array<double, 3> breaks{cfg.R1, cfg.profile.scaling().R1(), cfg.profile.scaling().R2()};
  return commensurate_cells(a, cfg.R_tr, cells, breaks);
}

int resolve_modes(const ScatteringConfig& cfg) {
  if (cfg.mode_cutoff > 0) return cfg.mode_cutoff;
  return std::min(auto_mode_count(cfg.k, cfg.obstacle_radius), max_order(cfg.dim));
}

ScatteringSolution pml_scattering_solve(const ScatteringConfig& cfg) {
  validate(cfg);
  ScatteringSolution out;
  const int cells = resolve_grid(cfg);
  out.grid = UniformGrid{cfg.obstacle_radius, cfg.R_tr, cells};
  const int N = resolve_modes(cfg);
  out.n_modes = N + 1;
  out.modes.reserve(static_cast<std::size_t>(N) + 1);
  const int levels = cfg.richardson_levels;
  for (int nu = 0; nu <= N; ++nu) {
    ModeSolution m;
    m.index = nu;
    m.boundary_value = -incident_mode(cfg.dim, nu, cfg.k, cfg.obstacle_radius).value;
    if (m.boundary_value == cplx{}) {
      m.skipped = true;
      m.solution.radii = out.grid.nodes();
      m.solution.values.assign(m.solution.radii.size(), 0.0);
      out.modes.push_back(std::move(m));
      continue;
    }
    RadialModeProblem p{cfg.dim, nu, cfg.k, cfg.obstacle_radius, cfg.R_tr, cfg.profile, cells};
    // Romberg table over grids cells * 2^j, sampled on the base nodes.
    std::vector<std::vector<cplx>> table;
    for (int j = 0; j < levels; ++j) {
      p.n_grid = cells << j;
      auto sol = radial_mode_solve(p, m.boundary_value);
      std::vector<cplx> coarse(static_cast<std::size_t>(cells) + 1);
      const std::size_t stride = std::size_t{1} << j;
      for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = sol.values[i * stride];
      table.push_back(std::move(coarse));
    }
    for (int m_ord = 1; m_ord < levels; ++m_ord) {
      const double factor = std::pow(4.0, m_ord) - 1.0;
      for (int j = levels - 1; j >= m_ord; --j) {
        auto& hi = table[static_cast<std::size_t>(j)];
        const auto& lo = table[static_cast<std::size_t>(j - 1)];
        for (std::size_t i = 0; i < hi.size(); ++i) hi[i] += (hi[i] - lo[i]) / factor;
      }
    }
    m.solution.radii = out.grid.nodes();
    m.solution.values = std::move(table.back());
    out.modes.push_back(std::move(m));
  }
  return out;
}

std::vector<cplx> grid_derivative(const std::vector<double>& r, const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  std::vector<cplx> d(n);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (v[1] - v[0]) / (r[1] - r[0]);
    return d;
  }
  const double h = (r.back() - r.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

ModeNorms mode_norms(int dim, int mode, const std::vector<double>& r, const std::vector<cplx>& e,
                     const std::vector<cplx>& de) {
  const double mu = angular_eigenvalue(dim, mode);
  ModeNorms out;
  auto l2_at = [&](std::size_t i) { return std::norm(e[i]) * std::pow(r[i], dim - 1); };
  auto grad_at = [&](std::size_t i) {
    return (std::norm(de[i]) + mu / (r[i] * r[i]) * std::norm(e[i])) * std::pow(r[i], dim - 1);
  };
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double h = r[i + 1] - r[i];
    out.l2 += 0.5 * h * (l2_at(i) + l2_at(i + 1));
    out.grad += 0.5 * h * (grad_at(i) + grad_at(i + 1));
  }
  return out;
}

ErrorReport error_norms(const ScatteringConfig& cfg, const ScatteringSolution& pml) {
  validate(cfg);
  const int last = annulus_last(cfg, pml.grid);
  if (last < 2) throw DomainError("error_norms: fewer than three grid points on the annulus");
  std::vector<double> r(static_cast<std::size_t>(last) + 1);
  for (int i = 0; i <= last; ++i) r[static_cast<std::size_t>(i)] = pml.grid.node(i);

  double l2 = 0.0, grad = 0.0;
  std::vector<cplx> e(r.size());
  for (const auto& m : pml.modes) {
    const auto rc = reference_coefficient(cfg.dim, m.index, cfg.k, cfg.obstacle_radius);
    for (std::size_t i = 0; i < r.size(); ++i) {
      e[i] = m.solution.values[i] - eval_reference(cfg.dim, m.index, cfg.k, rc, r[i]).value;
    }
    const auto nrm = mode_norms(cfg.dim, m.index, r, e, grid_derivative(r, e));
    const double w = angular_weight(cfg.dim, m.index);
    l2 += w * nrm.l2;
    grad += w * nrm.grad;
  }

  ErrorReport rep;
  rep.abs_L2 = std::sqrt(l2);
  rep.abs_H1 = std::sqrt(l2 + grad);
  rep.total_L2 = std::sqrt(total_field_l2_squared(cfg, r, pml.n_modes - 1));
  if (rep.total_L2 > 0.0) {
    rep.rel_L2 = rep.abs_L2 / rep.total_L2;
    rep.rel_H1 = rep.abs_H1 / rep.total_L2;
  } else {
    rep.relative_defined = false;
    rep.rel_L2 = rep.rel_H1 = std::numeric_limits<double>::quiet_NaN();
  }
  const auto pred = predicted_exponent(cfg.k, cfg.profile, cfg.dim, cfg.R_tr, cfg.Lambda, cfg.eta);
  rep.predicted_bound = pred.bound;
  rep.ratio = rep.rel_H1 / rep.predicted_bound;
  return rep;
}

double relative_difference(const ScatteringConfig& cfg, const ScatteringSolution& coarse,
                           const ScatteringSolution& fine) {
  const int ratio = fine.grid.cells / coarse.grid.cells;
  if (ratio < 1 || fine.grid.cells != ratio * coarse.grid.cells) {
    throw DomainError("relative_difference: fine grid must refine the coarse grid");
  }
  const int last = annulus_last(cfg, coarse.grid);
  std::vector<double> r(static_cast<std::size_t>(last) + 1);
  for (int i = 0; i <= last; ++i) r[static_cast<std::size_t>(i)] = coarse.grid.node(i);
  const std::size_t n_modes = std::min(coarse.modes.size(), fine.modes.size());
  double sq = 0.0;
  std::vector<cplx> e(r.size());
  for (std::size_t m = 0; m < n_modes; ++m) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      e[i] = coarse.modes[m].solution.values[i] - fine.modes[m].solution.values[i * static_cast<std::size_t>(ratio)];
    }
    const int idx = coarse.modes[m].index;
    const auto nrm = mode_norms(cfg.dim, idx, r, e, grid_derivative(r, e));
    sq += angular_weight(cfg.dim, idx) * (nrm.l2 + nrm.grad);
  }
  // Modes present only in one solution count fully.
  const auto& longer = coarse.modes.size() > fine.modes.size() ? coarse : fine;
  const int stride = (&longer == &fine) ? ratio : 1;
  for (std::size_t m = n_modes; m < longer.modes.size(); ++m) {
    for (std::size_t i = 0; i < r.size(); ++i) e[i] = longer.modes[m].solution.values[i * static_cast<std::size_t>(stride)];
    const int idx = longer.modes[m].index;
    const auto nrm = mode_norms(cfg.dim, idx, r, e, grid_derivative(r, e));
    sq += angular_weight(cfg.dim, idx) * (nrm.l2 + nrm.grad);
  }
  const double total = std::sqrt(total_field_l2_squared(cfg, r, static_cast<int>(n_modes) - 1));
  return std::sqrt(sq) / total;
}

}  // namespace pml
