#pragma once

// Hypercube embedding of the whole compositional space for one reference
// component k: finite points (x_k > 0) go through the k-th chart and the
// radial-sigma map into [0,1)^d; points with x_k = 0 ("points at infinity")
// are placed on the max-coordinate-1 boundary by L-infinity normalization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "linfcomp/composition.hpp"
#include "linfcomp/errors.hpp"
#include "linfcomp/parallel.hpp"

namespace linfcomp {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<double> row(std::size_t i) { return std::span<double>(values).subspan(i * cols, cols); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
};

inline constexpr double kDefaultSafetyFactor = 4.0;

struct SigmoidConfig {
  double lambda = 1.0;
  double C = kDefaultSafetyFactor;
  double epsilon = std::numeric_limits<double>::epsilon();
  double M = 0.0;  // largest chart L1-norm among finite samples
  double m = 0.0;  // smallest positive chart L1-norm among finite samples
};

namespace detail {

// Largest double below 1.
inline constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

inline void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive");
}

}  // namespace detail

/// sigma(x) = 1 - exp(-lambda x), evaluated with expm1. The result is capped at
/// the largest double below 1 so that finite inputs never reach the boundary.
inline double sigmoid(double x, double lambda) {
  detail::check_lambda(lambda);
  if (!(x >= 0.0)) throw InvalidArgument("sigmoid expects a non-negative argument");
  return std::min(-std::expm1(-lambda * x), detail::kBelowOne);
}

inline double sigmoid_inverse(double t, double lambda) {
  detail::check_lambda(lambda);
  if (!(t >= 0.0 && t < 1.0)) throw OutOfRange("sigmoid_inverse expects t in [0, 1)");
  return -std::log1p(-t) / lambda;
}

/// lambda = -ln(C eps) / M, so that sigma(M) = 1 - C eps. Feasible only when
/// this is at least -ln(1 - C eps) / m, which keeps sigma(m) >= C eps.
inline double select_lambda(double M, double m, double C,
                            double epsilon = std::numeric_limits<double>::epsilon()) {
  if (!(m > 0.0) || !(M >= m) || !std::isfinite(M)) {
    throw InvalidArgument("select_lambda requires M >= m > 0");
  }
  if (!(C > 0.0) || !(epsilon > 0.0)) throw InvalidArgument("C and epsilon must be positive");
  const double ce = C * epsilon;
  if (!(ce < 1.0)) throw Infeasible("C * epsilon must be below 1");
  const double upper = -std::log(ce) / M;
  const double lower = -std::log1p(-ce) / m;
  if (lower > upper) {
    throw Infeasible("no lambda keeps both sigma(M) < 1 and sigma(m) > 0: need lambda >= " +
                     std::to_string(lower) + " but lambda <= " + std::to_string(upper));
  }
  return upper;
}

inline SigmoidConfig make_sigmoid_config(double M, double m, double C = kDefaultSafetyFactor,
                                         double epsilon = std::numeric_limits<double>::epsilon()) {
  return {select_lambda(M, m, C, epsilon), C, epsilon, M, m};
}

namespace detail {

inline void radial_sigma_into(std::span<const double> z, double lambda, std::span<double> out) {
  double l1 = 0.0, linf = 0.0;
  for (double v : z) {
    l1 += v;
    linf = std::max(linf, v);
  }
  if (linf == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double s = sigmoid(l1, lambda);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = s * (z[i] / linf);
}

}  // namespace detail

/// z -> sigma(|z|_1) z / |z|_inf, with 0 -> 0. Direction-preserving.
inline std::vector<double> radial_sigma(std::span<const double> z, double lambda) {
  for (double v : z) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("radial_sigma expects z >= 0");
  }
  std::vector<double> out(z.size());
  detail::radial_sigma_into(z, lambda, out);
  return out;
}

inline std::vector<double> radial_sigma_inverse(std::span<const double> w, double lambda) {
  double wmax = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0 && w[i] < 1.0)) {
      throw OutOfRange("coordinate " + std::to_string(i) + " is outside [0, 1)");
    }
    wmax = std::max(wmax, w[i]);
  }
  std::vector<double> z(w.size(), 0.0);
  if (wmax == 0.0) return z;
  double u1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    z[i] = w[i] / wmax;
    u1 += z[i];
  }
  const double c = sigmoid_inverse(wmax, lambda) / u1;
  for (double& v : z) v *= c;
  return z;
}

struct CubePoint {
  std::vector<double> coords;  // d coordinates in [0, 1]
  bool at_infinity = false;
};

namespace detail {

// Returns true when the sample is a point at infinity for k.
inline bool cube_embed_into(std::span<const double> x, ComponentIndex k, double lambda,
                            std::span<double> chart_scratch, std::span<double> out) {
  if (x[k] > 0.0) {
    chart_into(x, k, chart_scratch);
    radial_sigma_into(chart_scratch, lambda, out);
    return false;
  }
  const double mx = max_value(x);
  std::size_t o = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == k) continue;
    out[o++] = x[j] / mx;
  }
  return true;
}

inline double chart_l1(std::span<const double> x, ComponentIndex k) {
  const double ref = x[k];
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j != k) s += x[j] / ref;
  }
  return s;
}

}  // namespace detail

/// Total on the compositional space; never throws for a valid composition.
inline CubePoint cube_embed(const Composition& x, ComponentIndex k, const SigmoidConfig& config) {
  detail::check_index(k, x.size(), "reference");
  CubePoint p;
  p.coords.resize(x.dimension());
  std::vector<double> scratch(x.dimension());
  p.at_infinity = detail::cube_embed_into(x.values(), k, config.lambda, scratch, p.coords);
  return p;
}

inline Composition cube_embed_inverse(std::span<const double> w, bool at_infinity, ComponentIndex k,
                                      const SigmoidConfig& config) {
  if (k > w.size()) throw InvalidArgument("reference index out of range");
  double wmax = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0 && w[i] <= 1.0)) {
      throw OutOfRange("coordinate " + std::to_string(i) + " is outside [0, 1]");
    }
    wmax = std::max(wmax, w[i]);
  }
  if (at_infinity != (wmax == 1.0)) {
    throw FlagMismatch(at_infinity ? "point at infinity must have max coordinate 1"
                                   : "finite point must have every coordinate below 1");
  }
  std::vector<double> x;
  x.reserve(w.size() + 1);
  if (at_infinity) {
    x.assign(w.begin(), w.end());
    x.insert(x.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  } else {
    x = radial_sigma_inverse(w, config.lambda);
    x.insert(x.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
  }
  return Composition(std::move(x));
}

inline Composition cube_embed_inverse(const CubePoint& p, ComponentIndex k, const SigmoidConfig& config) {
  return cube_embed_inverse(p.coords, p.at_infinity, k, config);
}

struct CubeEmbedding {
  ComponentIndex reference = 0;
  Matrix points;  // n x d
  std::vector<bool> at_infinity;
  SigmoidConfig config;
};

/// Embeds every sample for reference k. M and m are taken over finite samples
/// with a nonzero chart, then lambda is chosen by select_lambda.
inline CubeEmbedding embed_dataset(const CompositionDataset& ds, ComponentIndex k,
                                   double C = kDefaultSafetyFactor, unsigned threads = 1) {
  detail::check_index(k, ds.num_components(), "reference");
  const std::size_t n = ds.num_samples();
  const std::size_t d = ds.dimension();

  std::vector<double> norms(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    auto r = ds.row(i);
    norms[i] = r[k] > 0.0 ? detail::chart_l1(r, k) : 0.0;
  });
  double M = 0.0, m = std::numeric_limits<double>::infinity();
  for (double v : norms) {
    if (v > 0.0) {
      M = std::max(M, v);
      m = std::min(m, v);
    }
  }
  if (!(M > 0.0)) {
    throw DegenerateDataset("no sample has a finite nonzero chart for reference '" +
                            ds.component_ids()[k] + "'");
  }

  CubeEmbedding e;
  e.reference = k;
  e.config = make_sigmoid_config(M, m, C);
  e.points = Matrix(n, d);
  std::vector<char> inf(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> scratch(d);
    inf[i] = detail::cube_embed_into(ds.row(i), k, e.config.lambda, scratch, e.points.row(i)) ? 1 : 0;
  });
  e.at_infinity.assign(inf.begin(), inf.end());
  return e;
}

struct ProductEmbedding {
  std::vector<CubeEmbedding> blocks;  // in refs order
  Matrix points;                      // n x (|refs| * d), blocks side by side
};

/// Cartesian product of the cube embeddings for each reference in `refs`.
inline ProductEmbedding product_embedding(const CompositionDataset& ds, std::span<const ComponentIndex> refs,
                                          double C = kDefaultSafetyFactor, unsigned threads = 1) {
  if (refs.empty()) throw InvalidArgument("product_embedding needs at least one reference");
  std::unordered_set<ComponentIndex> seen;
  for (ComponentIndex k : refs) {
    if (!seen.insert(k).second) throw InvalidArgument("references must be distinct");
  }
  const std::size_t n = ds.num_samples();
  const std::size_t d = ds.dimension();
  ProductEmbedding p;
  for (ComponentIndex k : refs) p.blocks.push_back(embed_dataset(ds, k, C, threads));
  p.points = Matrix(n, refs.size() * d);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      auto src = p.blocks[b].points.row(i);
      std::copy(src.begin(), src.end(), p.points.row(i).begin() + static_cast<std::ptrdiff_t>(b * d));
    }
  }
  return p;
}

}  // namespace linfcomp
