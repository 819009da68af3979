#pragma once

// Compositions as projective points: the Lp-normalization family, homogeneous
// coordinate charts, centered log-ratios and subcompositions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linfcomp/errors.hpp"

namespace linfcomp {

using ComponentIndex = std::size_t;

/// Exponent p of an Lp (quasi-)norm: any positive real, or infinity.
class PExponent {
 public:
  explicit PExponent(double value) : value_(value) {
    if (!(value > 0.0)) {
      throw InvalidArgument("p must be positive or infinity, got " + std::to_string(value));
    }
  }

  static PExponent infinity() { return PExponent(std::numeric_limits<double>::infinity()); }

  // Accepts "inf", "infinity" or a positive decimal.
  static PExponent parse(std::string_view text) {
    if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity") return infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(std::string(text), &used);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse p from '" + std::string(text) + "'");
    }
    if (used != text.size()) {
      throw InvalidArgument("cannot parse p from '" + std::string(text) + "'");
    }
    return PExponent(v);
  }

  bool is_infinite() const noexcept { return std::isinf(value_); }
  double value() const noexcept { return value_; }

  friend bool operator==(const PExponent&, const PExponent&) = default;

 private:
  double value_;
};

namespace detail {

inline void validate_values(std::span<const double> values) {
  if (values.size() < 2) {
    throw InvalidComposition("a composition needs at least 2 components, got " +
                             std::to_string(values.size()));
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidComposition("component " + std::to_string(i) +
                               " must be finite and non-negative");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw InvalidComposition("all components are zero");
}

inline double max_value(std::span<const double> x) {
  return *std::max_element(x.begin(), x.end());
}

inline double lp_norm(std::span<const double> x, const PExponent& p) {
  const double mx = max_value(x);
  if (p.is_infinite()) return mx;
  const double q = p.value();
  if (q == 1.0) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  // Scale by the maximum so large exponents neither overflow nor underflow.
  double acc = 0.0;
  for (double v : x) {
    if (v > 0.0) acc += std::pow(v / mx, q);
  }
  return mx * std::pow(acc, 1.0 / q);
}

inline void lp_normalize_into(std::span<const double> x, const PExponent& p, std::span<double> out) {
  // Division (not multiplication by 1/n) keeps the maximal coordinate exactly 1 for p = inf.
  const double n = lp_norm(x, p);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / n;
}

// Chart coordinates x_j / x_k for j != k, in component order.
inline void chart_into(std::span<const double> x, ComponentIndex k, std::span<double> out) {
  const double ref = x[k];
  std::size_t o = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == k) continue;
    out[o++] = x[j] / ref;
  }
}

inline void check_index(ComponentIndex k, std::size_t size, std::string_view what) {
  if (k >= size) {
    throw InvalidArgument(std::string(what) + " index " + std::to_string(k) +
                          " out of range for " + std::to_string(size) + " components");
  }
}

}  // namespace detail

/// One sample: non-negative abundances, meaningful only up to positive scale.
class Composition {
 public:
  explicit Composition(std::vector<double> values, std::vector<std::string> component_ids = {})
      : values_(std::move(values)), ids_(std::move(component_ids)) {
    detail::validate_values(values_);
    if (!ids_.empty() && ids_.size() != values_.size()) {
      throw InvalidArgument("component_ids must align with values");
    }
  }

  Composition(std::initializer_list<double> values) : Composition(std::vector<double>(values)) {}

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& component_ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return values_.size(); }
  // d, the dimension of the compositional space.
  std::size_t dimension() const noexcept { return values_.size() - 1; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Composition&, const Composition&) = default;

 private:
  std::vector<double> values_;
  std::vector<std::string> ids_;
};

inline double lp_norm(const Composition& x, const PExponent& p) { return detail::lp_norm(x.values(), p); }

/// pi_p(x) = x / |x|_p, the projection onto the Lp-simplex.
inline Composition lp_normalize(const Composition& x, const PExponent& p) {
  std::vector<double> out(x.size());
  detail::lp_normalize_into(x.values(), p, out);
  return Composition(std::move(out), x.component_ids());
}

/// Componentwise x_i^(1/p); carries the standard simplex onto the Lp-simplex.
inline Composition power_transform(const Composition& x, const PExponent& p) {
  if (p.is_infinite()) throw InvalidArgument("power_transform needs a finite p");
  const double e = 1.0 / p.value();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = e == 1.0 ? x[i] : std::pow(x[i], e);
  return Composition(std::move(out), x.component_ids());
}

/// The k-th homogeneous chart with the constant 1 at position k dropped.
inline std::vector<double> homogeneous_chart(const Composition& x, ComponentIndex k) {
  detail::check_index(k, x.size(), "reference");
  if (x[k] == 0.0) {
    throw ReferenceZero("reference component " + std::to_string(k) + " is zero");
  }
  std::vector<double> out(x.dimension());
  detail::chart_into(x.values(), k, out);
  return out;
}

inline double component_ratio(const Composition& x, ComponentIndex j, ComponentIndex i) {
  detail::check_index(j, x.size(), "numerator");
  detail::check_index(i, x.size(), "denominator");
  if (x[i] == 0.0) throw ReferenceZero("denominator component " + std::to_string(i) + " is zero");
  return x[j] / x[i];
}

/// log(x_i / g(x)) with g the geometric mean. Undefined on the simplex boundary.
inline std::vector<double> clr_transform(const Composition& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      throw ZeroComponent("component " + std::to_string(i) + " is zero; CLR is undefined");
    }
    out[i] = std::log(x[i]);
  }
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= mean;
  return out;
}

/// Restriction of x to the components in `subset`, in the order given.
inline Composition subcomposition(const Composition& x, std::span<const ComponentIndex> subset) {
  if (subset.size() < 2) throw InvalidArgument("a subcomposition needs at least 2 components");
  std::unordered_set<ComponentIndex> seen;
  std::vector<double> values;
  std::vector<std::string> ids;
  values.reserve(subset.size());
  bool any_positive = false;
  for (ComponentIndex k : subset) {
    detail::check_index(k, x.size(), "subset");
    if (!seen.insert(k).second) {
      throw InvalidArgument("subset index " + std::to_string(k) + " repeated");
    }
    values.push_back(x[k]);
    any_positive = any_positive || x[k] > 0.0;
    if (!x.component_ids().empty()) ids.push_back(x.component_ids()[k]);
  }
  if (!any_positive) throw AllZeroSubcomposition("the selected components are all zero");
  return Composition(std::move(values), std::move(ids));
}

inline Composition subcomposition(const Composition& x, std::initializer_list<ComponentIndex> subset) {
  return subcomposition(x, std::span<const ComponentIndex>(subset.begin(), subset.size()));
}

/// [x] == [y] up to `tol` in the max-norm of their L-infinity normalizations.
inline bool projectively_equal(const Composition& x, const Composition& y, double tol) {
  if (x.size() != y.size()) {
    throw LengthMismatch("compositions have " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()) + " components");
  }
  const double mx = detail::max_value(x.values());
  const double my = detail::max_value(y.values());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] / mx - y[i] / my) > tol) return false;
  }
  return true;
}

/// Samples x components, dense row-major, with a valid composition per row.
class CompositionDataset {
 public:
  CompositionDataset(std::vector<std::string> sample_ids, std::vector<std::string> component_ids,
                     std::vector<double> matrix)
      : sample_ids_(std::move(sample_ids)),
        component_ids_(std::move(component_ids)),
        matrix_(std::move(matrix)) {
    const std::size_t n = sample_ids_.size();
    const std::size_t c = component_ids_.size();
    if (c < 2) throw ValidationError("a dataset needs at least 2 components");
    if (matrix_.size() != n * c) {
      throw InvalidArgument("matrix has " + std::to_string(matrix_.size()) + " entries, expected " +
                            std::to_string(n * c));
    }
    check_unique(component_ids_, "component");
    check_unique(sample_ids_, "sample");
    for (std::size_t i = 0; i < n; ++i) {
      try {
        detail::validate_values(row(i));
      } catch (const InvalidComposition& e) {
        throw ValidationError("sample '" + sample_ids_[i] + "': " + e.what());
      }
    }
  }

  std::size_t num_samples() const noexcept { return sample_ids_.size(); }
  std::size_t num_components() const noexcept { return component_ids_.size(); }
  std::size_t dimension() const noexcept { return component_ids_.size() - 1; }

  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& component_ids() const noexcept { return component_ids_; }
  const std::vector<double>& data() const noexcept { return matrix_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(matrix_).subspan(i * num_components(), num_components());
  }
  double operator()(std::size_t i, ComponentIndex k) const { return matrix_[i * num_components() + k]; }

  Composition sample(std::size_t i) const {
    auto r = row(i);
    return Composition(std::vector<double>(r.begin(), r.end()), component_ids_);
  }

  std::optional<ComponentIndex> component_index(std::string_view name) const {
    for (std::size_t k = 0; k < component_ids_.size(); ++k) {
      if (component_ids_[k] == name) return k;
    }
    return std::nullopt;
  }

 private:
  static void check_unique(const std::vector<std::string>& ids, std::string_view what) {
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        throw ValidationError("duplicate " + std::string(what) + " id '" + id + "'");
      }
    }
  }

  std::vector<std::string> sample_ids_;
  std::vector<std::string> component_ids_;
  std::vector<double> matrix_;
};

}  // namespace linfcomp
