#pragma once

#include <array>
#include <complex>
#include <vector>

#include "pmlrate/grid.hpp"
#include "pmlrate/scaling.hpp"

namespace pml {

using cplx = std::complex<double>;

/// Complex values on an increasing radial grid.
struct GridSolution {
  std::vector<double> radii;
  std::vector<cplx> values;
};

// ---------------------------------------------------------------------------
// One dimension

/// v(r) = A e^{ikz(r)} + B e^{-ikz(r)}, z = r + i f_theta(r): the exact solution of the
/// scaled 1D problem with v(0) = bc and v(R_tr) = 0.
struct ClosedForm1D {
  double k = 0.0;
  double R_tr = 0.0;
  cplx bc{1.0, 0.0};
  cplx A;
  cplx B;
  /// e^{2ik z(R_tr)}, the round-trip reflection through the layer.
  cplx reflection;

  cplx operator()(const PmlProfile& profile, double r) const;
};

/// Throws SingularSystemError if |1 - e^{2ik z(R_tr)}| < 1e-12.
ClosedForm1D solve_1d_closed_form(double k, const PmlProfile& profile, double R_tr, cplx bc);

/// Measured sup-norm error of the closed-form PML solution against bc e^{ikr} on [0, window].
struct SupError1D {
  double err_sup = 0.0;    // divided by |bc|
  double predicted = 0.0;  // 2|R| / |1 - R|,  R = e^{2ik z(R_tr)}
  double at_r = 0.0;
};

SupError1D sup_error_1d(const ClosedForm1D& sol, const PmlProfile& profile, double window, int samples = 100001);

/**
 * Second-order conservative finite differences for
 *   ((1/z') v')' + k^2 z' v = 0 on [0, R_tr],  v(0) = bc,  v(R_tr) = 0,
 * with 1/z' evaluated at cell midpoints. `n_grid` is the number of cells (>= 16).
 */
GridSolution solve_1d_fd(double k, const PmlProfile& profile, double R_tr, int n_grid, cplx bc);

/// As solve_1d_fd on [r0, R_tr] with v(r0) = bc.
GridSolution solve_1d_fd_interval(double k, const PmlProfile& profile, double r0, double R_tr, int n_grid,
                                  cplx bc);

// ---------------------------------------------------------------------------
// Radial modes in 2D / 3D

struct RadialModeProblem {
  int dim = 2;   ///< 2 (Fourier index) or 3 (spherical degree)
  int mode = 0;  ///< nu >= 0
  double k = 1.0;
  double a = 1.0;     ///< obstacle radius
  double R_tr = 2.0;  ///< truncation radius
  PmlProfile profile{ScalingFn::make(ScalingKind::cubic, 2.0, 4.0), 0.7853981633974483};
  int n_grid = 64;  ///< cells on [a, R_tr]
};

/// nu^2 (d = 2) or nu(nu + 1) (d = 3).
double angular_eigenvalue(int dim, int mode);
/// Integral of the squared angular basis function: 2pi, pi (d = 2, nu = 0 / nu >= 1) or 4pi/(2l+1).
double angular_weight(int dim, int mode);

/**
 * One radial mode of the PML problem:
 *   (z^{d-1}/z' v')' + z' z^{d-1} (k^2 - mu/z^2) v = 0 on [a, R_tr],  v(a) = bc_at_a, v(R_tr) = 0.
 * This is the scaled operator multiplied through by z' z^{d-1}; the stencil is
 * second order with midpoint coefficients.
 */
GridSolution radial_mode_solve(const RadialModeProblem& p, cplx bc_at_a);

struct ModeValue {
  cplx value;
  cplx derivative;  ///< d/dr
  /// Scattering coefficient underflowed; the mode is physically negligible.
  bool negligible = false;
};

/// Incident plane-wave mode: eps_nu i^nu J_nu(kr) (d = 2) or (2l+1) i^l j_l(kr) (d = 3).
ModeValue incident_mode(int dim, int mode, double k, double r);

/// Exact outgoing scattered mode for a sound-soft disk / sphere of radius a, r >= a.
ModeValue reference_mode(int dim, int mode, double k, double a, double r);

/**
 * Smallest N >= ceil(ka) such that the incident-mode coefficient at r = a is below
 * `tail_tol` for every nu in (N, N + 10]. Throws CutoffError at the order window.
 */
int mode_cutoff(double k, double a, double tail_tol, int dim = 2);

/// ceil(ka + 6 (ka)^{1/3} + 20), the default mode count.
int auto_mode_count(double k, double a);

// ---------------------------------------------------------------------------
// Plane-wave scattering

struct ScatteringConfig {
  int dim = 2;
  double k = 10.0;
  double obstacle_radius = 1.0;
  PmlProfile profile{ScalingFn::make(ScalingKind::cubic, 2.0, 4.0), 0.7853981633974483};
  double R1 = 2.0;  ///< outer edge of the error annulus (start of the layer)
  double R_tr = 3.0;
  int n_grid = 0;           ///< base cells on [a, R_tr]; 0 picks h k^{3/2} <= 0.3
  int mode_cutoff = 0;      ///< highest solved mode; 0 = auto_mode_count
  int richardson_levels = 4;  ///< grids n, 2n, 4n, 8n extrapolated (1 = plain second order)
  double eta = 0.1;
  double Lambda = 0.0;
  /// Fixed to the first axis; other directions follow by rotating the disk / sphere.
  std::array<double, 3> incidence_dir{1.0, 0.0, 0.0};
};

/// Throws DomainError / ConstructionError when a < R1 < R_tr or other preconditions fail.
void validate(const ScatteringConfig& cfg);

/// Base cell count after auto selection and alignment of R1 / R2 with grid nodes.
int resolve_grid(const ScatteringConfig& cfg);
int resolve_modes(const ScatteringConfig& cfg);

struct ModeSolution {
  int index = 0;
  cplx boundary_value;
  GridSolution solution;  ///< on the base grid
  bool skipped = false;
};

struct ScatteringSolution {
  UniformGrid grid;
  int n_modes = 0;  ///< modes 0..n_modes-1
  std::vector<ModeSolution> modes;
};

/// Solves every mode nu <= N with v(a) = -(incident mode at a) and v(R_tr) = 0.
ScatteringSolution pml_scattering_solve(const ScatteringConfig& cfg);

struct ErrorReport {
  double abs_L2 = 0.0;
  double abs_H1 = 0.0;
  double rel_L2 = 0.0;
  double rel_H1 = 0.0;
  double total_L2 = 0.0;  ///< ||u^S + u^I|| on the annulus
  double predicted_bound = 0.0;
  double ratio = 0.0;  ///< rel_H1 / predicted_bound
  bool relative_defined = true;
};

/// Modal Parseval assembly of the error on [a, R1] with trapezoid weights on the solver grid.
ErrorReport error_norms(const ScatteringConfig& cfg, const ScatteringSolution& pml);

/**
 * H1 norm on [a, R1] of the difference between two solutions of the same config
 * (the second on a refined grid), divided by the total-field L2 norm.
 */
double relative_difference(const ScatteringConfig& cfg, const ScatteringSolution& coarse,
                           const ScatteringSolution& fine);

/// Trapezoid H1 / L2 pieces of one mode function.
struct ModeNorms {
  double l2 = 0.0;    ///< int |e|^2 r^{d-1}
  double grad = 0.0;  ///< int (|e'|^2 + mu/r^2 |e|^2) r^{d-1}
};

/// Trapezoid rule with the given derivative samples; radii must be increasing.
ModeNorms mode_norms(int dim, int mode, const std::vector<double>& r, const std::vector<cplx>& e,
                     const std::vector<cplx>& de);

/// Second-order finite-difference derivative on a uniform grid (one-sided at the ends).
std::vector<cplx> grid_derivative(const std::vector<double>& r, const std::vector<cplx>& v);

}  // namespace pml
