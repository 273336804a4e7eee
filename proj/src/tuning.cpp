#include "cfdm/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace cfdm {

namespace {

constexpr std::array<Dimension, 4> kDimensions = {
    Dimension::CW, Dimension::QC, Dimension::CC, Dimension::QD};

bool is_upper_bounded(Dimension d) {
  return d == Dimension::CW || d == Dimension::CC;
}

void check_ranges(const MeasurementPoint& p) {
  if (p.cw < 0 || p.cc < 0)
    throw std::invalid_argument("measurement: negative time for parameter " +
                                p.parameter);
  if (p.qc < 0 || p.qc > 1 || p.qd < 0 || p.qd > 1)
    throw std::invalid_argument(
        "measurement: quality outside [0,1] for parameter " + p.parameter);
}

}  // namespace

std::string dimension_name(Dimension d) {
  switch (d) {
    case Dimension::CW: return "CW";
    case Dimension::QC: return "QC";
    case Dimension::CC: return "CC";
    case Dimension::QD: return "QD";
  }
  return "?";
}

double MeasurementPoint::dim(Dimension d) const {
  switch (d) {
    case Dimension::CW: return cw;
    case Dimension::QC: return qc;
    case Dimension::CC: return cc;
    case Dimension::QD: return qd;
  }
  return 0;
}

Curve::Curve(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
  if (knots_.empty()) throw std::invalid_argument("Curve: no knots");
  std::sort(knots_.begin(), knots_.end());
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (knots_[i].first == knots_[i - 1].first)
      throw std::invalid_argument("Curve: duplicate knot");
}

double Curve::operator()(double x) const {
  if (x <= knots_.front().first) return knots_.front().second;
  if (x >= knots_.back().first) return knots_.back().second;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (x > knots_[i].first) continue;
    auto [x0, y0] = knots_[i - 1];
    auto [x1, y1] = knots_[i];
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
  return knots_.back().second;
}

double FittedModel::eval(const std::string& parameter, Dimension d,
                         double x) const {
  auto it = curves_.find(parameter);
  if (it == curves_.end())
    throw std::invalid_argument("model: unknown parameter " + parameter);
  return (*it->second[static_cast<int>(d)])(x);
}

double FittedModel::aggregate(
    Dimension d, const std::map<std::string, double>& assignment) const {
  double sum = 0;
  for (const auto& [parameter, curves] : curves_) {
    auto it = assignment.find(parameter);
    if (it == assignment.end())
      throw std::invalid_argument("aggregate: missing parameter " + parameter);
    sum += (*curves[static_cast<int>(d)])(it->second);
  }
  return sum / double(curves_.size());
}

std::vector<double> FittedModel::grid(const std::string& parameter) const {
  auto it = curves_.find(parameter);
  if (it == curves_.end())
    throw std::invalid_argument("model: unknown parameter " + parameter);
  std::vector<double> values;
  for (const auto& [x, y] : it->second[0]->knots()) values.push_back(x);
  return values;
}

std::vector<std::string> FittedModel::parameters() const {
  std::vector<std::string> names;
  for (const auto& [name, curves] : curves_) names.push_back(name);
  return names;
}

FittedModel fit(const std::vector<MeasurementPoint>& points) {
  std::map<std::string, std::vector<const MeasurementPoint*>> grouped;
  for (const MeasurementPoint& p : points) {
    if (p.failed) continue;
    check_ranges(p);
    grouped[p.parameter].push_back(&p);
  }
  FittedModel model;
  for (const auto& [parameter, group] : grouped) {
    if (group.size() < 2)
      throw std::invalid_argument("fit: parameter " + parameter +
                                  " has fewer than two valid points");
    for (Dimension d : kDimensions) {
      std::vector<std::pair<double, double>> knots;
      for (const MeasurementPoint* p : group)
        knots.push_back({p->value, p->dim(d)});
      model.curves_[parameter][static_cast<int>(d)] =
          Curve(std::move(knots));
    }
  }
  if (model.curves_.empty()) throw std::invalid_argument("fit: no points");
  return model;
}

std::optional<double> RequirementSpec::bound(Dimension d) const {
  switch (d) {
    case Dimension::CW: return cw_max;
    case Dimension::QC: return qc_min;
    case Dimension::CC: return cc_max;
    case Dimension::QD: return qd_min;
  }
  return std::nullopt;
}

void RequirementSpec::validate() const {
  for (Dimension d : kDimensions) {
    auto b = bound(d);
    if (!b) continue;
    if (!std::isfinite(*b))
      throw std::invalid_argument("requirement: non-finite bound on " +
                                  dimension_name(d));
    if (!is_upper_bounded(d) && (*b < 0 || *b > 1))
      throw std::invalid_argument("requirement: quality bound outside [0,1]");
  }
  if (data_rows && *data_rows <= 0)
    throw std::invalid_argument("requirement: data size must be positive");
}

namespace {

bool structurally_valid(const std::map<std::string, double>& a,
                        const RequirementSpec& spec) {
  auto get = [&](const char* name) -> std::optional<double> {
    auto it = a.find(name);
    return it == a.end() ? std::nullopt : std::optional<double>(it->second);
  };
  auto e = get("e"), n = get("n"), m = get("m");
  auto b = get("b"), b_lo = get("b'");
  if (e && !(0.5 < *e && *e < 1)) return false;
  if (n && *n < 2) return false;
  if (b_lo && !(2 < *b_lo)) return false;
  if (b && !(*b < 15)) return false;
  if (b && b_lo && !(*b_lo < *b)) return false;
  if (spec.data_rows && n && m && !(*n * *m < *spec.data_rows / 50000))
    return false;
  return true;
}

/// How far one dimension is from its bound, over both the per-parameter
/// curves and the aggregate; 0 when the bound holds everywhere.
double bound_violation(const FittedModel& model, Dimension d, double limit,
                       const std::map<std::string, double>& a) {
  double worst = 0;
  auto miss = [&](double v) {
    return is_upper_bounded(d) ? std::max(0.0, v - limit)
                               : std::max(0.0, limit - v);
  };
  for (const auto& [parameter, x] : a)
    worst = std::max(worst, miss(model.eval(parameter, d, x)));
  worst = std::max(worst, miss(model.aggregate(d, a)));
  return worst;
}

}  // namespace

TuneResult optimize(const FittedModel& model, const RequirementSpec& spec) {
  std::map<std::string, std::vector<double>> grid;
  for (const std::string& parameter : model.parameters())
    grid[parameter] = model.grid(parameter);
  return optimize(model, spec, grid);
}

TuneResult optimize(const FittedModel& model, const RequirementSpec& spec,
                    const std::map<std::string, std::vector<double>>& grid) {
  spec.validate();
  std::vector<std::string> names;
  for (const auto& [name, values] : grid) {
    if (values.empty())
      throw std::invalid_argument("optimize: empty grid for " + name);
    names.push_back(name);
  }
  if (names.empty()) throw std::invalid_argument("optimize: empty grid");

  TuneResult best;
  bool any_structural = false;
  double least_violation = 0;
  std::map<std::string, double> nearest;  // closest-to-feasible point

  std::map<std::string, double> a;
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (i < names.size()) {
      for (double v : grid.at(names[i])) {
        a[names[i]] = v;
        self(self, i + 1);
      }
      a.erase(names[i]);
      return;
    }
    if (!structurally_valid(a, spec)) return;
    double total = 0;
    std::map<Dimension, double> misses;
    for (Dimension d : kDimensions) {
      auto limit = spec.bound(d);
      if (!limit) continue;
      double miss = bound_violation(model, d, *limit, a);
      misses[d] = miss;
      total += miss;
    }
    if (!any_structural || total < least_violation) {
      any_structural = true;
      least_violation = total;
      nearest = a;
    }
    if (total > 0) return;
    double objective = model.aggregate(spec.objective, a);
    bool better = !best.feasible ||
                  (is_upper_bounded(spec.objective)
                       ? objective < best.objective_value
                       : objective > best.objective_value);
    if (better) {
      best.feasible = true;
      best.params = a;
      best.objective_value = objective;
    }
  };
  visit(visit, 0);

  if (best.feasible) return best;
  if (!any_structural) {
    best.infeasible_reason = "no grid point satisfies the structural "
                             "constraints";
    return best;
  }
  Dimension tightest = spec.objective;
  double worst = -1;
  for (Dimension d : kDimensions) {
    auto limit = spec.bound(d);
    if (!limit) continue;
    double miss = bound_violation(model, d, *limit, nearest);
    if (miss > worst) {
      worst = miss;
      tightest = d;
    }
  }
  std::ostringstream os;
  os << "infeasible; tightest violated bound: " << dimension_name(tightest)
     << (is_upper_bounded(tightest) ? " <= " : " >= ")
     << *spec.bound(tightest) << " (missed by " << worst << ")";
  best.infeasible_reason = os.str();
  return best;
}

std::vector<MeasurementPoint> load_measurements(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("measurements: empty input");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
  };
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line) != std::vector<std::string>{"parameter", "value", "cw_min",
                                              "qc", "cc_min", "qd"})
    throw std::runtime_error("measurements: unexpected header: " + line);
  std::vector<MeasurementPoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split(line);
    if (fields.size() != 6)
      throw std::runtime_error("measurements: line " + std::to_string(lineno) +
                               ": expected 6 fields");
    MeasurementPoint p;
    p.parameter = fields[0];
    try {
      p.value = std::stod(fields[1]);
      p.cw = std::stod(fields[2]);
      p.qc = std::stod(fields[3]);
      p.cc = std::stod(fields[4]);
      p.qd = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw std::runtime_error("measurements: line " + std::to_string(lineno) +
                               ": malformed number");
    }
    check_ranges(p);
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<MeasurementPoint> load_measurements_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("measurements: cannot open " + path);
  return load_measurements(in);
}

std::vector<MeasurementPoint> measure_sweep(
    const std::string& parameter, const std::vector<double>& values,
    const std::map<std::string, double>& defaults,
    const SweepHarness& harness) {
  std::vector<MeasurementPoint> points;
  for (double value : values) {
    std::map<std::string, double> params = defaults;
    params[parameter] = value;
    MeasurementPoint p;
    p.parameter = parameter;
    p.value = value;
    if (auto outcome = harness(params)) {
      p.cw = outcome->cw;
      p.qc = outcome->qc;
      p.cc = outcome->cc;
      p.qd = outcome->qd;
    } else {
      p.failed = true;
      std::cerr << "warning: sweep of " << parameter << " failed at "
                << value << "; point excluded from fitting\n";
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace cfdm
