#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cfdm {

/// The four tuning dimensions: discovery time, rule quality, cleaning time,
/// and cleaning quality.
enum class Dimension { CW, QC, CC, QD };

std::string dimension_name(Dimension d);

/// One sweep observation: every other parameter held at its default.
struct MeasurementPoint {
  std::string parameter;  // one of n, m, e, b, b'
  double value = 0;
  double cw = 0;  // minutes
  double qc = 0;  // fraction of the standard rule set recovered
  double cc = 0;  // minutes
  double qd = 0;  // fraction of dirty tuples flagged
  bool failed = false;

  double dim(Dimension d) const;
};

/// Piecewise-linear interpolant through sorted knots; extrapolation clamps
/// to the boundary values.
class Curve {
 public:
  explicit Curve(std::vector<std::pair<double, double>> knots);
  double operator()(double x) const;
  const std::vector<std::pair<double, double>>& knots() const {
    return knots_;
  }

 private:
  std::vector<std::pair<double, double>> knots_;
};

/// Per (parameter, dimension) curves plus the separable aggregate: a
/// dimension's value at a full assignment is the mean of its per-parameter
/// curves.
class FittedModel {
 public:
  double eval(const std::string& parameter, Dimension d, double x) const;
  double aggregate(Dimension d,
                   const std::map<std::string, double>& assignment) const;
  /// Swept values for one parameter, ascending.
  std::vector<double> grid(const std::string& parameter) const;
  std::vector<std::string> parameters() const;

  friend FittedModel fit(const std::vector<MeasurementPoint>& points);

 private:
  std::map<std::string, std::array<std::optional<Curve>, 4>> curves_;
};

/// Exact interpolation through the sweep points; failed points are skipped.
/// Throws when any (parameter, dimension) has fewer than two valid points.
FittedModel fit(const std::vector<MeasurementPoint>& points);

/// What the user demands of the pipeline. CW and CC bounds are upper
/// limits, QC and QD bounds lower limits; the objective dimension is
/// minimized for CW/CC and maximized for QC/QD, and its own bound is
/// optional. data_rows (N) enables the n*m < N / 50000 budget constraint.
struct RequirementSpec {
  Dimension objective = Dimension::CW;
  std::optional<double> cw_max;
  std::optional<double> qc_min;
  std::optional<double> cc_max;
  std::optional<double> qd_min;
  std::optional<double> data_rows;

  std::optional<double> bound(Dimension d) const;
  void validate() const;
};

struct TuneResult {
  bool feasible = false;
  std::map<std::string, double> params;  // keys n, m, e, b, b'
  double objective_value = 0;
  std::string infeasible_reason;  // names the tightest violated bound
};

/// Exhaustive search over the grid (defaults to the swept values). A grid
/// point is feasible when it meets the structural constraints, every bound
/// on each per-parameter curve, and every bound on the aggregate.
TuneResult optimize(const FittedModel& model, const RequirementSpec& spec);
TuneResult optimize(const FittedModel& model, const RequirementSpec& spec,
                    const std::map<std::string, std::vector<double>>& grid);

/// CSV with header parameter,value,cw_min,qc,cc_min,qd.
std::vector<MeasurementPoint> load_measurements(std::istream& in);
std::vector<MeasurementPoint> load_measurements_file(const std::string& path);

struct SweepOutcome {
  double cw = 0, qc = 0, cc = 0, qd = 0;
};

/// Runs the full pipeline at one parameter assignment; nullopt on failure.
using SweepHarness = std::function<std::optional<SweepOutcome>(
    const std::map<std::string, double>& params)>;

/// Varies one parameter over the given values with the others at their
/// defaults. Failures become points marked failed, with a warning.
std::vector<MeasurementPoint> measure_sweep(
    const std::string& parameter, const std::vector<double>& values,
    const std::map<std::string, double>& defaults,
    const SweepHarness& harness);

}  // namespace cfdm
