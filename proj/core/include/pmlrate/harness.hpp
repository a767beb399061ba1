#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pmlrate/solver.hpp"

namespace pml {

enum class SweepAxis { k, theta, R_tr };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

/// The 1D experiment: PML on [0, R_tr] measured against bc e^{ikr} on [0, window].
struct OneDConfig {
  double k = 10.0;
  PmlProfile profile{ScalingFn::make(ScalingKind::cubic, 3.0, 6.0), 0.7853981633974483};
  double window = 3.0;  ///< usually R1
  double R_tr = 3.5;
  cplx bc{1.0, 0.0};
  enum class Method { closed_form, finite_difference } method = Method::closed_form;
  int n_grid = 0;  ///< finite-difference cells; 0 picks h k^{3/2} <= 0.3 (at least 4096)
  int samples = 100001;
};

struct SweepSpec {
  std::variant<ScatteringConfig, OneDConfig> base;
  SweepAxis axis = SweepAxis::k;
  std::vector<double> values;
  double eta = 0.1;
  double Lambda = 0.0;
  /// Also solve on the doubled grid and record the difference as a discretization estimate.
  bool check_grid = false;
};

/// Errors at or below this level are unobservable in double precision.
inline constexpr double kErrorFloor = 1e-12;

struct SweepRow {
  SweepAxis axis = SweepAxis::k;
  double value = 0.0;
  ErrorReport report;
  /// Headline error used for fitting: rel_H1 (d >= 2) or the relative sup error (1D).
  double error = 0.0;
  int n_modes = 0;
  int n_grid = 0;
  /// Grid-doubling difference (NaN unless check_grid).
  double discretization = 0.0;
  bool below_floor = false;
  std::string flag = "ok";
};

/// A solver failure part-way through: carries the rows completed before it.
class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, std::vector<SweepRow> completed)
      : std::runtime_error(what), completed_(std::move(completed)) {}
  const std::vector<SweepRow>& completed() const noexcept { return completed_; }

 private:
  std::vector<SweepRow> completed_;
};

/// Throws std::invalid_argument unless values are strictly increasing with at least 3 entries.
void validate(const SweepSpec& spec);

/**
 * Runs every row (concurrently on up to `threads` workers; 0 = hardware concurrency),
 * returning rows ordered by axis value. Output is identical for any thread count.
 */
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads = 1);

/// One row of the sweep, exposed for callers that drive their own loops.
SweepRow run_row(const SweepSpec& spec, double value);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct FitCriterion {
  /// false: slope must be at least as steep as predicted (upper bound, d >= 2).
  /// true: slope must match the prediction (1D sharpness).
  bool two_sided = false;
  double tol_slope = 0.15;
  /// Minimum decay across the fitted range, in decades, for a pass.
  double min_decades = 1.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double predicted_slope = 0.0;
  int used_points = 0;
  Verdict verdict = Verdict::inconclusive;
};

/**
 * Least-squares fit of log(error) against the axis value over rows with error > 10 * floor.
 * The predicted slope is the least-squares slope of log(predicted_bound) over the same rows
 * (for the k axis this is exactly -((2 - eta) int Phi - 3 Lambda)).
 * Fewer than three usable rows give an inconclusive verdict.
 */
FitResult fit_decay_rate(std::span<const SweepRow> rows, const FitCriterion& criterion = {});

/// Table reproducing the Phi plots: r, f, f', then Phi/tan and (int_{R1}^r Phi)/tan per angle.
struct FigureTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

FigureTable reproduce_figure_phi(const ScalingFn& scaling, std::span<const double> thetas, double r_lo,
                                 double r_hi, int samples, int dim = 2);

}  // namespace pml
