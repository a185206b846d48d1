#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiltflow/capacities.hpp"
#include "tiltflow/flow.hpp"
#include "tiltflow/parallel.hpp"
#include "tiltflow/stats.hpp"

namespace tiltflow {

/// h(n) for the cylinder over nA. Linear and square-root rules have a
/// limiting window half-angle; an explicit table does not in general.
struct HeightRule {
  enum class Kind { Linear, Sqrt, Table };
  Kind kind = Kind::Linear;
  double c = 1.0;
  std::map<int, double> table;

  static HeightRule linear(double c = 1.0) { return {Kind::Linear, c, {}}; }
  static HeightRule sqrt(double c = 1.0) { return {Kind::Sqrt, c, {}}; }
  static HeightRule explicit_table(std::map<int, double> t) { return {Kind::Table, 1.0, std::move(t)}; }

  double operator()(int n) const {
    switch (kind) {
      case Kind::Linear:
        return c * n;
      case Kind::Sqrt:
        return std::ceil(c * std::sqrt(static_cast<double>(n)));
      case Kind::Table:
        break;
    }
    const auto it = table.find(n);
    if (it == table.end()) {
      throw Error(ErrorKind::BadSchedule, "height table has no entry for n=" + std::to_string(n));
    }
    return it->second;
  }

  /// lim atan(2 h(n) / (n l(A))).
  std::optional<double> alpha(double basis_length = 1.0) const {
    switch (kind) {
      case Kind::Linear:
        return std::atan(2.0 * c / basis_length);
      case Kind::Sqrt:
        return 0.0;
      case Kind::Table:
        break;
    }
    return std::nullopt;
  }

  std::string name() const {
    switch (kind) {
      case Kind::Linear:
        return "linear";
      case Kind::Sqrt:
        return "sqrt";
      case Kind::Table:
        break;
    }
    return "table";
  }
};

/// Everything a Monte Carlo run over nA, n in n_values, depends on. A is
/// the unit segment centred at the origin orthogonal to v(theta).
struct Experiment {
  double theta = std::numbers::pi / 2;
  Distribution dist = dist::Dirac{1.0};
  std::vector<int> n_values;
  HeightRule rule;
  int reps = 1;
  std::uint64_t seed = 0;
  CapacityMode mode = CapacityMode::exact();
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// One row per n: statistics of the rescaled observable over replications.
struct Row {
  int n = 0;
  double h = 0.0;
  Summary stats;
};

struct NuEstimate {
  double theta = 0.0;
  std::vector<Row> per_n;
  double extrapolated = 0.0;
  Interval ci95;
};

enum class Observable { Phi, Tau, PhiOverTau };

inline std::string to_string(Observable o) {
  switch (o) {
    case Observable::Phi:
      return "phi";
    case Observable::Tau:
      return "tau";
    case Observable::PhiOverTau:
      break;
  }
  return "phi_over_tau";
}

struct PredictedLimit {
  std::optional<double> value;
  std::string provenance;  // how the value was obtained, or why it is absent
};

struct TrajectoryReport {
  Observable observable = Observable::Phi;
  double theta = 0.0;
  std::vector<Row> rows;
  PredictedLimit predicted;
};

/// theta -> nu_theta, either exact for constant capacities, interpolated from
/// estimates, or one value everywhere.
class NuCurve {
 public:
  enum class Kind { ClosedForm, Estimated, Constant };

  /// Capacities identically v: nu_theta = v (|cos theta| + |sin theta|).
  static NuCurve dirac(double v = 1.0) {
    NuCurve c;
    c.kind_ = Kind::ClosedForm;
    c.value_ = v;
    return c;
  }

  static NuCurve constant(double v) {
    NuCurve c;
    c.kind_ = Kind::Constant;
    c.value_ = v;
    return c;
  }

  /// Periodic (period pi) piecewise-linear interpolation through
  /// (angle, nu) points.
  static NuCurve estimated(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw Error(ErrorKind::EmptyGrid, "nu curve needs at least one point");
    NuCurve c;
    c.kind_ = Kind::Estimated;
    for (auto& [angle, nu] : points) {
      if (!std::isfinite(angle) || !std::isfinite(nu)) {
        throw Error(ErrorKind::InvalidSpec, "nu curve points must be finite");
      }
      angle = reduce(angle);
    }
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i].first - points[i - 1].first < 1e-12) {
        throw Error(ErrorKind::InvalidSpec, "nu curve has two points at the same angle mod pi");
      }
    }
    c.points_ = std::move(points);
    return c;
  }

  Kind kind() const { return kind_; }

  double operator()(double angle) const {
    switch (kind_) {
      case Kind::ClosedForm:
        return value_ * (std::abs(std::cos(angle)) + std::abs(std::sin(angle)));
      case Kind::Constant:
        return value_;
      case Kind::Estimated:
        break;
    }
    if (points_.size() == 1) return points_.front().second;
    const double x = reduce(angle);
    const auto hi = std::upper_bound(points_.begin(), points_.end(), std::pair{x, -std::numeric_limits<double>::infinity()});
    // outside [first, last] the neighbours wrap around the period
    auto [x0, y0] = hi == points_.begin() ? points_.back() : *std::prev(hi);
    auto [x1, y1] = hi == points_.end() ? points_.front() : *hi;
    if (hi == points_.begin()) x0 -= std::numbers::pi;
    if (hi == points_.end()) x1 += std::numbers::pi;
    return y0 + (x - x0) / (x1 - x0) * (y1 - y0);
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::ClosedForm:
        return "closed_form";
      case Kind::Constant:
        return "constant";
      case Kind::Estimated:
        break;
    }
    return "estimated";
  }

 private:
  static double reduce(double angle) {
    double r = std::fmod(angle, std::numbers::pi);
    if (r < 0) r += std::numbers::pi;
    return r;
  }

  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

struct GridPoint {
  double angle = 0.0;
  double nu = 0.0;
  double ratio = 0.0;  // nu / cos(angle - theta), +inf near the window ends
};

struct LimitReport {
  double theta = 0.0;
  double alpha = 0.0;
  std::vector<GridPoint> grid;
  double eta_hat = 0.0;
  double argmin_theta = 0.0;
  double nu_theta_hat = 0.0;
};

/// min over theta~ of nu(theta~) / cos(theta~ - theta) for |theta~ - theta| <= alpha.
/// Grid angles are theta + j pi / (grid_size - 1), so a larger alpha only adds
/// points and eta_hat can only go down.
inline LimitReport limit_functional(double theta, double alpha, const NuCurve& curve,
                                    int grid_size = 129) {
  if (grid_size < 3) throw Error(ErrorKind::EmptyGrid, "grid_size must be at least 3");
  if (!(alpha >= 0.0)) throw Error(ErrorKind::EmptyGrid, "alpha must be nonnegative");
  if (alpha > std::numbers::pi / 2 + 1e-12) {
    throw Error(ErrorKind::InvalidSpec, "alpha must not exceed pi/2");
  }
  const double step = std::numbers::pi / (grid_size - 1);
  const int reach = static_cast<int>(std::floor(alpha / step + 1e-9));

  LimitReport r{theta, alpha, {}, INFINITY, theta, curve(theta)};
  for (int j = -reach; j <= reach; ++j) {
    const double offset = j * step;
    const double angle = theta + offset;
    const double cos_off = std::cos(offset);
    const double nu = curve(angle);
    const double ratio = cos_off <= 1e-9 ? INFINITY : nu / cos_off;
    r.grid.push_back({angle, nu, ratio});
    if (ratio < r.eta_hat) {
      r.eta_hat = ratio;
      r.argmin_theta = angle;
    }
  }
  return r;
}

namespace detail {

inline void validate(const Experiment& ex) {
  if (!std::isfinite(ex.theta)) throw Error(ErrorKind::InvalidSpec, "theta must be finite");
  if (!ex.dist.has_finite_first_moment()) {
    throw Error(ErrorKind::InfiniteMean, "capacity law has no finite mean");
  }
  if (ex.n_values.empty()) throw Error(ErrorKind::BadSchedule, "n_values is empty");
  for (std::size_t i = 1; i < ex.n_values.size(); ++i) {
    if (ex.n_values[i] <= ex.n_values[i - 1]) {
      throw Error(ErrorKind::BadSchedule, "n_values must be strictly increasing");
    }
  }
  if (ex.rule.kind != HeightRule::Kind::Table && !(ex.rule.c > 0.0)) {
    throw Error(ErrorKind::BadSchedule, "height rule constant must be positive");
  }
  if (ex.reps < 1) throw Error(ErrorKind::InvalidSpec, "reps must be at least 1");
}

/// Replication r at size n reads capacity stream (n << 32) | r.
inline std::uint64_t stream_id(int n, std::size_t rep) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(rep);
}

struct Samples {
  double h = 0.0;
  std::vector<double> phi;
  std::vector<double> tau;
};

inline Samples replicate(const Experiment& ex, int n, bool want_phi, bool want_tau) {
  Samples s;
  s.h = ex.rule(n);
  const CylinderGraph graph = build_cylinder(CylinderSpec::centered_unit(ex.theta, n, s.h));
  const auto reps = static_cast<std::size_t>(ex.reps);
  if (want_phi) s.phi.resize(reps);
  if (want_tau) s.tau.resize(reps);
  parallel_for(reps, [&](std::size_t r) {
    const CapacityMap caps = sample(ex.dist, graph.edge_count(), ex.seed, stream_id(n, r), ex.mode);
    if (want_phi) s.phi[r] = phi(graph, caps).value;
    if (want_tau) s.tau[r] = tau(graph, caps).value;
  });
  return s;
}

inline std::vector<double> rescaled(std::vector<double> xs, int n) {
  for (double& x : xs) x /= static_cast<double>(n);  // l(A) = 1
  return xs;
}

}  // namespace detail

/// tau(nA, h(n)) / (n l(A)) over reps replications per n; the estimate of
/// nu_theta is the mean at the largest n.
inline NuEstimate estimate_nu(const Experiment& ex) {
  detail::validate(ex);
  NuEstimate est;
  est.theta = ex.theta;
  for (const int n : ex.n_values) {
    const detail::Samples s = detail::replicate(ex, n, false, true);
    est.per_n.push_back({n, s.h, summarize(detail::rescaled(s.tau, n))});
  }
  const Summary& last = est.per_n.back().stats;
  est.extrapolated = last.mean;
  est.ci95 = {last.mean - 1.96 * last.std_error, last.mean + 1.96 * last.std_error};
  return est;
}

namespace detail {

// log h(n) / n must not increase over the last three n.
inline void check_schedule(const Experiment& ex) {
  const std::size_t m = ex.n_values.size();
  std::vector<double> ratio;
  for (std::size_t i = m >= 3 ? m - 3 : 0; i < m; ++i) {
    const int n = ex.n_values[i];
    ratio.push_back(std::log(ex.rule(n)) / n);
  }
  for (std::size_t i = 1; i < ratio.size(); ++i) {
    if (ratio[i] > ratio[i - 1] + 1e-12) {
      throw Error(ErrorKind::ScheduleViolation, "log h(n)/n increases over the last n values");
    }
  }
}

}  // namespace detail

/// Trajectory of phi/(n l(A)), tau/(n l(A)) or phi/tau. When a nu curve is
/// supplied the predicted limit of the rescaled observable is attached.
inline TrajectoryReport lln_trajectory(const Experiment& ex, Observable obs,
                                       const std::optional<NuCurve>& curve = std::nullopt,
                                       int grid_size = 129) {
  detail::validate(ex);
  detail::check_schedule(ex);
  TrajectoryReport rep;
  rep.observable = obs;
  rep.theta = ex.theta;
  const bool want_phi = obs != Observable::Tau;
  const bool want_tau = obs != Observable::Phi;
  for (const int n : ex.n_values) {
    detail::Samples s = detail::replicate(ex, n, want_phi, want_tau);
    std::vector<double> xs;
    switch (obs) {
      case Observable::Phi:
        xs = detail::rescaled(std::move(s.phi), n);
        break;
      case Observable::Tau:
        xs = detail::rescaled(std::move(s.tau), n);
        break;
      case Observable::PhiOverTau:
        xs.resize(s.phi.size());
        // phi <= tau, so tau = 0 forces phi = 0; count that as ratio 1
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = s.tau[i] > 0 ? s.phi[i] / s.tau[i] : 1.0;
        break;
    }
    rep.rows.push_back({n, s.h, summarize(xs)});
  }

  if (!curve) {
    rep.predicted.provenance = "none";
    return rep;
  }
  const std::optional<double> alpha = ex.rule.alpha();
  if (!alpha) {
    rep.predicted.provenance = "window-dependent";
    return rep;
  }
  const double nu = (*curve)(ex.theta);
  const double eta = limit_functional(ex.theta, *alpha, *curve, grid_size).eta_hat;
  switch (obs) {
    case Observable::Phi:
      rep.predicted = {eta, "limit_functional:" + curve->describe()};
      break;
    case Observable::Tau:
      rep.predicted = {nu, "nu_curve:" + curve->describe()};
      break;
    case Observable::PhiOverTau:
      rep.predicted = {nu > 0 ? std::optional<double>(eta / nu) : std::nullopt,
                       "limit_functional/nu_curve:" + curve->describe()};
      break;
  }
  return rep;
}

struct DeviationRow {
  int n = 0;
  double h = 0.0;
  int reps = 0;
  double mean = 0.0;           // of phi_n itself, not rescaled
  int tail_count = 0;          // replications with phi_n <= (1 - eta) mean
  double tail_probability = 0.0;
};

struct DeviationReport {
  double theta = 0.0;
  double eta = 0.0;
  std::vector<DeviationRow> rows;
};

/// Empirical P[phi_n <= (1 - eta) E phi_n], the mean taken from the same pool.
inline DeviationReport deviation_experiment(const Experiment& ex, double eta) {
  detail::validate(ex);
  if (!(ex.dist.mass_at_zero() < 0.5)) {
    throw Error(ErrorKind::PreconditionViolated, "lower-tail experiment needs F(0) < 1/2");
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::PreconditionViolated, "eta must lie in (0, 1]");
  }
  DeviationReport rep{ex.theta, eta, {}};
  for (const int n : ex.n_values) {
    const detail::Samples s = detail::replicate(ex, n, true, false);
    const double mean = pairwise_sum(s.phi) / static_cast<double>(s.phi.size());
    const double bar = (1.0 - eta) * mean;
    const auto hits = static_cast<int>(std::count_if(s.phi.begin(), s.phi.end(),
                                                     [bar](double v) { return v <= bar; }));
    rep.rows.push_back({n, s.h, ex.reps, mean, hits, static_cast<double>(hits) / ex.reps});
  }
  return rep;
}

}  // namespace tiltflow
