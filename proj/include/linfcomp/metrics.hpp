#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linfcomp/composition.hpp"
#include "linfcomp/errors.hpp"
#include "linfcomp/parallel.hpp"

namespace linfcomp {

enum class BaseDissimilarity { bray_curtis, manhattan, euclidean };

inline std::string_view to_string(BaseDissimilarity b) {
  switch (b) {
    case BaseDissimilarity::bray_curtis: return "bray_curtis";
    case BaseDissimilarity::manhattan: return "manhattan";
    case BaseDissimilarity::euclidean: return "euclidean";
  }
  return "unknown";
}

inline BaseDissimilarity parse_base_dissimilarity(std::string_view s) {
  if (s == "bray_curtis") return BaseDissimilarity::bray_curtis;
  if (s == "manhattan") return BaseDissimilarity::manhattan;
  if (s == "euclidean") return BaseDissimilarity::euclidean;
  throw InvalidArgument("unknown base dissimilarity '" + std::string(s) + "'");
}

namespace detail {

inline void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw LengthMismatch("vectors have " + std::to_string(a) + " and " + std::to_string(b) + " components");
  }
}

inline double base_dissimilarity(std::span<const double> a, std::span<const double> b, BaseDissimilarity base) {
  switch (base) {
    case BaseDissimilarity::bray_curtis: {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::abs(a[i] - b[i]);
        den += a[i] + b[i];
      }
      return den > 0.0 ? num / den : 0.0;
    }
    case BaseDissimilarity::manhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    case BaseDissimilarity::euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
  }
  return 0.0;
}

// Angle between two unit vectors, 2 atan2(|a - b|, |a + b|); accurate near 0
// and pi/2, unlike acos of the inner product.
inline double unit_angle(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    sum += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace detail

/// Bray-Curtis on raw vectors. Not scale invariant; see pullback_dissimilarity.
inline double bray_curtis(std::span<const double> a, std::span<const double> b) {
  detail::check_same_length(a.size(), b.size());
  return detail::base_dissimilarity(a, b, BaseDissimilarity::bray_curtis);
}

/// Angle between the L2-normalized representatives, in [0, pi/2].
inline double angular_distance(const Composition& x, const Composition& y) {
  detail::check_same_length(x.size(), y.size());
  std::vector<double> a(x.size()), b(y.size());
  detail::lp_normalize_into(x.values(), PExponent(2.0), a);
  detail::lp_normalize_into(y.values(), PExponent(2.0), b);
  return detail::unit_angle(a, b);
}

/// A base dissimilarity evaluated on the Lp-normalizations of x and y.
inline double pullback_dissimilarity(const Composition& x, const Composition& y, const PExponent& p,
                                     BaseDissimilarity base) {
  detail::check_same_length(x.size(), y.size());
  std::vector<double> a(x.size()), b(y.size());
  detail::lp_normalize_into(x.values(), p, a);
  detail::lp_normalize_into(y.values(), p, b);
  return detail::base_dissimilarity(a, b, base);
}

struct DissimilarityMeasure {
  enum class Kind { angular, pullback };
  Kind kind = Kind::pullback;
  PExponent p = PExponent(1.0);
  BaseDissimilarity base = BaseDissimilarity::bray_curtis;

  static DissimilarityMeasure angular() { return {Kind::angular, PExponent(2.0), BaseDissimilarity::euclidean}; }
  static DissimilarityMeasure pullback(PExponent p, BaseDissimilarity base) { return {Kind::pullback, p, base}; }
};

struct DissimilarityMatrix {
  std::vector<std::string> labels;
  std::size_t n = 0;
  std::vector<double> values;  // n x n, row-major

  double operator()(std::size_t a, std::size_t b) const { return values[a * n + b]; }
};

/// All pairwise dissimilarities; each unordered pair is computed once and
/// mirrored, so the result is exactly symmetric with a zero diagonal.
inline DissimilarityMatrix pairwise_matrix(const CompositionDataset& ds, const DissimilarityMeasure& measure,
                                           unsigned threads = 1) {
  const std::size_t n = ds.num_samples();
  const std::size_t c = ds.num_components();
  const PExponent p = measure.kind == DissimilarityMeasure::Kind::angular ? PExponent(2.0) : measure.p;
  std::vector<double> normalized(n * c);
  parallel_for(n, threads, [&](std::size_t i) {
    detail::lp_normalize_into(ds.row(i), p, std::span<double>(normalized).subspan(i * c, c));
  });
  auto row = [&](std::size_t i) { return std::span<const double>(normalized).subspan(i * c, c); };

  DissimilarityMatrix out{ds.sample_ids(), n, std::vector<double>(n * n, 0.0)};
  parallel_for(n, threads, [&](std::size_t a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = measure.kind == DissimilarityMeasure::Kind::angular
                           ? detail::unit_angle(row(a), row(b))
                           : detail::base_dissimilarity(row(a), row(b), measure.base);
      out.values[a * n + b] = v;
      out.values[b * n + a] = v;
    }
  });
  return out;
}

}  // namespace linfcomp
