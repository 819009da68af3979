#pragma once

// Global (non-smooth) coordinates on [0,2]^d: every L-infinity cell Q_j is
// rotated about its face shared with a reference cell Q_i and then stretched,
// so that the cells tile [0,2]^d around Q_i = [0,1]^d.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "linfcomp/composition.hpp"
#include "linfcomp/decomposition.hpp"
#include "linfcomp/errors.hpp"

namespace linfcomp {

/// An L-infinity normalized point of cell Q_j: coords[j] == 1, others in [0,1].
class CellPoint {
 public:
  CellPoint(ComponentIndex cell, std::vector<double> coords) : cell_(cell), coords_(std::move(coords)) {
    if (cell_ >= coords_.size()) throw InvalidArgument("cell index out of range");
    if (coords_[cell_] != 1.0) throw InvalidArgument("cell coordinate must equal 1");
    for (double v : coords_) {
      if (!(v >= 0.0 && v <= 1.0)) throw OutOfRange("cell point coordinates must lie in [0, 1]");
    }
  }

  static CellPoint from(const Composition& x) {
    const auto label = assign_cell(x);
    std::vector<double> y(x.size());
    detail::lp_normalize_into(x.values(), PExponent::infinity(), y);
    return CellPoint(label.cell, std::move(y));
  }

  ComponentIndex cell() const noexcept { return cell_; }
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  ComponentIndex cell_;
  std::vector<double> coords_;
};

/// Rotates Q_j onto the hyperplane of Q_i about their common face: coordinate
/// i becomes 1 and coordinate j becomes 2 - x_i. Same formula for i > j.
inline std::vector<double> rotate_cell(const CellPoint& p, ComponentIndex i) {
  const ComponentIndex j = p.cell();
  if (i >= p.coords().size()) throw InvalidArgument("target cell index out of range");
  if (i == j) throw SameCell("rotation target equals the source cell");
  std::vector<double> out(p.coords().begin(), p.coords().end());
  out[j] = 2.0 - p.coords()[i];
  out[i] = 1.0;
  return out;
}

namespace detail {

inline void unfold_into(std::span<const double> x, ComponentIndex i, std::span<double> y,
                        std::span<double> out) {
  lp_normalize_into(x, PExponent::infinity(), y);
  const ComponentIndex j = assign_cell(x).cell;
  if (j != i) {
    const double height = 2.0 - y[i];
    for (std::size_t k = 0; k < y.size(); ++k) {
      if (k != i && k != j) y[k] *= height;
    }
    y[j] = height;
  }
  std::size_t o = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (k != i) out[o++] = y[k];
  }
}

}  // namespace detail

/// The global chart r_i. Points of Q_i keep their cell coordinates; a point of
/// another cell Q_j is rotated onto Q_i and every coordinate other than i and j
/// is stretched by the rotated height u_j = 2 - x_i in [1, 2].
inline std::vector<double> unfold_chart(const Composition& x, ComponentIndex i) {
  detail::check_index(i, x.size(), "reference");
  std::vector<double> y(x.size()), out(x.dimension());
  detail::unfold_into(x.values(), i, y, out);
  return out;
}

/// Inverse of unfold_chart. The source cell is the reference when every
/// coordinate is at most 1, otherwise the (lowest) argmax coordinate.
inline Composition unfold_inverse(std::span<const double> w, ComponentIndex i) {
  if (i > w.size()) throw InvalidArgument("reference index out of range");
  std::size_t arg = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!(w[k] >= 0.0 && w[k] <= 2.0)) {
      throw OutOfRange("coordinate " + std::to_string(k) + " is outside [0, 2]");
    }
    if (w[k] > w[arg]) arg = k;
  }
  std::vector<double> x;
  x.reserve(w.size() + 1);
  if (w.empty() || w[arg] <= 1.0) {
    x.assign(w.begin(), w.end());
    x.insert(x.begin() + static_cast<std::ptrdiff_t>(i), 1.0);
    return Composition(std::move(x));
  }
  const double height = w[arg];
  for (std::size_t k = 0; k < w.size(); ++k) x.push_back(k == arg ? 1.0 : w[k] / height);
  x.insert(x.begin() + static_cast<std::ptrdiff_t>(i), 2.0 - height);
  return Composition(std::move(x));
}

/// Source cell (full component index) recovered from an unfolded point.
inline ComponentIndex unfolded_region(std::span<const double> w, ComponentIndex i) {
  std::size_t arg = 0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (w[k] > w[arg]) arg = k;
  }
  if (w.empty() || w[arg] <= 1.0) return i;
  return arg < i ? arg : arg + 1;
}

}  // namespace linfcomp
