#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tiltflow/error.hpp"
#include "tiltflow/philox.hpp"

namespace tiltflow {

namespace dist {
struct Dirac {
  double value = 1.0;
};
/// Capacity `value` with probability p, zero otherwise.
struct Bernoulli {
  double p = 0.5;
  double value = 1.0;
};
struct UniformReal {
  double lo = 0.0;
  double hi = 1.0;
};
struct Exponential {
  double rate = 1.0;
};
struct DiscreteTable {
  std::vector<double> values;
  std::vector<double> probs;
};
}  // namespace dist

/// Common law F of the edge capacities.
class Distribution {
 public:
  using Kind = std::variant<dist::Dirac, dist::Bernoulli, dist::UniformReal, dist::Exponential,
                            dist::DiscreteTable>;

  Distribution(Kind kind) : kind_(std::move(kind)) { check(); }  // NOLINT(google-explicit-constructor)
  template <class Law>
    requires std::is_constructible_v<Kind, Law> && (!std::is_same_v<std::decay_t<Law>, Kind>)
  Distribution(Law law) : Distribution(Kind(std::move(law))) {}  // NOLINT(google-explicit-constructor)

  const Kind& kind() const { return kind_; }

  bool is_continuous() const {
    return std::holds_alternative<dist::UniformReal>(kind_) ||
           std::holds_alternative<dist::Exponential>(kind_);
  }

  /// F(0) = P(t(e) = 0).
  double mass_at_zero() const {
    return std::visit(
        [](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, dist::Dirac>) {
            return d.value == 0.0 ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
            return d.value == 0.0 ? 1.0 : 1.0 - d.p;
          } else if constexpr (std::is_same_v<D, dist::UniformReal>) {
            return d.hi == 0.0 ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<D, dist::Exponential>) {
            return 0.0;
          } else {
            double m = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              if (d.values[i] == 0.0) m += d.probs[i];
            }
            return m;
          }
        },
        kind_);
  }

  double mean() const { return moment(1); }
  double second_moment() const { return moment(2); }

  // Every supported law has moments of all orders.
  bool has_finite_first_moment() const { return std::isfinite(mean()); }
  bool has_finite_second_moment() const { return std::isfinite(second_moment()); }

  /// Atoms of a discrete law; empty for continuous kinds.
  std::vector<double> support() const {
    return std::visit(
        [](const auto& d) -> std::vector<double> {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, dist::Dirac>) {
            return {d.value};
          } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
            return {0.0, d.value};
          } else if constexpr (std::is_same_v<D, dist::DiscreteTable>) {
            return d.values;
          } else {
            return {};
          }
        },
        kind_);
  }

  /// P(t(e) <= x).
  double cdf(double x) const {
    return std::visit(
        [x](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, dist::Dirac>) {
            return x >= d.value ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
            if (x < 0.0) return 0.0;
            return x >= d.value ? 1.0 : 1.0 - d.p;
          } else if constexpr (std::is_same_v<D, dist::UniformReal>) {
            if (x < d.lo) return 0.0;
            if (x >= d.hi) return 1.0;
            return (x - d.lo) / (d.hi - d.lo);
          } else if constexpr (std::is_same_v<D, dist::Exponential>) {
            return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x);
          } else {
            double c = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              if (d.values[i] <= x) c += d.probs[i];
            }
            return c;
          }
        },
        kind_);
  }

  /// Inverse-CDF draw from a uniform in [0, 1).
  double quantile(double u) const {
    return std::visit(
        [u](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, dist::Dirac>) {
            return d.value;
          } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
            return u < d.p ? d.value : 0.0;
          } else if constexpr (std::is_same_v<D, dist::UniformReal>) {
            return d.lo + u * (d.hi - d.lo);
          } else if constexpr (std::is_same_v<D, dist::Exponential>) {
            return -std::log1p(-u) / d.rate;
          } else {
            double c = 0.0;
            for (std::size_t i = 0; i + 1 < d.values.size(); ++i) {
              c += d.probs[i];
              if (u < c) return d.values[i];
            }
            return d.values.back();
          }
        },
        kind_);
  }

 private:
  double moment(int order) const {
    return std::visit(
        [order](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, dist::Dirac>) {
            return std::pow(d.value, order);
          } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
            return d.p * std::pow(d.value, order);
          } else if constexpr (std::is_same_v<D, dist::UniformReal>) {
            if (d.hi == d.lo) return std::pow(d.lo, order);
            return (std::pow(d.hi, order + 1) - std::pow(d.lo, order + 1)) /
                   ((order + 1) * (d.hi - d.lo));
          } else if constexpr (std::is_same_v<D, dist::Exponential>) {
            return order == 1 ? 1.0 / d.rate : 2.0 / (d.rate * d.rate);
          } else {
            double m = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              m += d.probs[i] * std::pow(d.values[i], order);
            }
            return m;
          }
        },
        kind_);
  }

  void check() const {
    const auto bad = [](const std::string& what) {
      throw Error(ErrorKind::InvalidDistribution, what);
    };
    const auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    std::visit(
        [&](const auto& d) {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, dist::Dirac>) {
            if (!nonneg(d.value)) bad("dirac value must be a nonnegative real");
          } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
            if (!(d.p >= 0.0 && d.p <= 1.0)) bad("bernoulli p must lie in [0, 1]");
            if (!nonneg(d.value)) bad("bernoulli value must be a nonnegative real");
          } else if constexpr (std::is_same_v<D, dist::UniformReal>) {
            if (!nonneg(d.lo) || !nonneg(d.hi) || d.hi < d.lo) bad("uniform needs 0 <= lo <= hi");
          } else if constexpr (std::is_same_v<D, dist::Exponential>) {
            if (!(std::isfinite(d.rate) && d.rate > 0.0)) bad("exponential rate must be positive");
          } else {
            if (d.values.empty() || d.values.size() != d.probs.size()) {
              bad("table needs equally many values and probs");
            }
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              if (!nonneg(d.values[i])) bad("table values must be nonnegative");
              if (!nonneg(d.probs[i])) bad("table probs must be nonnegative");
            }
            const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
            if (std::abs(total - 1.0) > 1e-12) bad("table probs must sum to 1");
          }
        },
        kind_);
  }

  Kind kind_;
};

struct TheoryFlags {
  double F0 = 0.0;
  double mean = 0.0;
  double second_moment = 0.0;
  bool nu_positive = false;
};

/// Summary of a law used by the estimators: nu_theta > 0 iff F(0) < 1/2.
inline TheoryFlags theory_flags(const Distribution& d) {
  const double f0 = d.mass_at_zero();
  return {f0, d.mean(), d.second_moment(), f0 < 0.5};
}

/// Either exact multiples of 1/scale (flows computed in integer arithmetic)
/// or plain reals.
struct CapacityMode {
  enum class Kind { ExactInteger, Real };
  Kind kind = Kind::ExactInteger;
  std::int64_t scale = 1;

  static constexpr CapacityMode exact(std::int64_t scale = 1) { return {Kind::ExactInteger, scale}; }
  static constexpr CapacityMode real() { return {Kind::Real, 1}; }
  bool is_exact() const { return kind == Kind::ExactInteger; }
};

class CapacityMap {
 public:
  CapacityMap() = default;

  /// Exact map from integer units (value = units / scale).
  static CapacityMap from_units(std::vector<std::int64_t> units, std::int64_t scale = 1) {
    CapacityMap m;
    m.mode_ = CapacityMode::exact(scale);
    m.values_.reserve(units.size());
    for (const auto u : units) {
      if (u < 0) throw Error(ErrorKind::InvalidDistribution, "negative capacity");
      m.values_.push_back(static_cast<double>(u) / static_cast<double>(scale));
    }
    m.units_ = std::move(units);
    return m;
  }

  static CapacityMap from_reals(std::vector<double> values) {
    CapacityMap m;
    m.mode_ = CapacityMode::real();
    for (const double v : values) {
      if (!(std::isfinite(v) && v >= 0.0)) {
        throw Error(ErrorKind::InvalidDistribution, "capacities must be finite and nonnegative");
      }
    }
    m.values_ = std::move(values);
    return m;
  }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t e) const { return values_[e]; }
  /// Integer units; empty in real mode.
  std::span<const std::int64_t> units() const { return units_; }
  const CapacityMode& mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t replication() const { return replication_; }

  double total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  /// Same map with every capacity multiplied by an integer factor.
  CapacityMap scaled(std::int64_t factor) const {
    if (mode_.is_exact()) {
      std::vector<std::int64_t> u(units_);
      for (auto& x : u) x *= factor;
      return from_units(std::move(u), mode_.scale);
    }
    std::vector<double> v(values_);
    for (auto& x : v) x *= static_cast<double>(factor);
    return from_reals(std::move(v));
  }

  /// Copy with one edge replaced; units are used in exact mode.
  CapacityMap with_edge(std::size_t e, double value) const {
    if (mode_.is_exact()) {
      std::vector<std::int64_t> u(units_);
      u[e] = std::llround(value * static_cast<double>(mode_.scale));
      return from_units(std::move(u), mode_.scale);
    }
    std::vector<double> v(values_);
    v[e] = value;
    return from_reals(std::move(v));
  }

  /// Capacities reindexed by `perm`: new edge i carries old edge perm[i].
  CapacityMap permuted(std::span<const int> perm) const {
    if (mode_.is_exact()) {
      std::vector<std::int64_t> u(perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i) u[i] = units_[static_cast<std::size_t>(perm[i])];
      return from_units(std::move(u), mode_.scale);
    }
    std::vector<double> v(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) v[i] = values_[static_cast<std::size_t>(perm[i])];
    return from_reals(std::move(v));
  }

  friend CapacityMap sample(const Distribution&, std::size_t, std::uint64_t, std::uint64_t,
                            CapacityMode);

 private:
  std::vector<double> values_;
  std::vector<std::int64_t> units_;
  CapacityMode mode_ = CapacityMode::real();
  std::uint64_t seed_ = 0;
  std::uint64_t replication_ = 0;
};

/// Uniform in [0, 1) attached to (seed, replication, edge index).
inline double edge_uniform(std::uint64_t seed, std::uint64_t replication, std::uint64_t edge) {
  const auto block = Philox4x32(seed).block(edge, replication);
  return to_unit_interval(block[0], block[1]);
}

/// Draws t(e) for edge indices 0 .. edge_count-1. Each value depends only on
/// (seed, replication, e), so edges and replications can be sampled in any
/// order or in parallel.
inline CapacityMap sample(const Distribution& law, std::size_t edge_count, std::uint64_t seed,
                          std::uint64_t replication, CapacityMode mode) {
  CapacityMap m;
  m.mode_ = mode;
  m.seed_ = seed;
  m.replication_ = replication;
  m.values_.resize(edge_count);
  if (mode.is_exact()) {
    if (mode.scale < 1) throw Error(ErrorKind::UnsupportedMode, "exact scale must be positive");
    if (law.is_continuous()) {
      throw Error(ErrorKind::UnsupportedMode, "exact integer mode needs a discrete distribution");
    }
    for (const double atom : law.support()) {
      const double units = atom * static_cast<double>(mode.scale);
      if (std::abs(units - std::round(units)) > 1e-9 || units > 0x1.0p52) {
        throw Error(ErrorKind::UnsupportedMode,
                    "capacity " + std::to_string(atom) + " is not a multiple of 1/scale");
      }
    }
    m.units_.resize(edge_count);
  }
  const double scale = static_cast<double>(mode.scale);
  for (std::size_t e = 0; e < edge_count; ++e) {
    const double v = law.quantile(edge_uniform(seed, replication, e));
    m.values_[e] = v;
    if (mode.is_exact()) {
      const double rounded = std::round(v * scale);
      m.units_[e] = static_cast<std::int64_t>(rounded);
      m.values_[e] = rounded / scale;
    }
  }
  return m;
}

}  // namespace tiltflow
