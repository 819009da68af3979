#pragma once

// L-infinity cells: per-sample cell assignment, Table-1 style summaries, the
// n0-truncated decomposition, 2^d sub-cell refinement, and concordance
// tables against external labels.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linfcomp/composition.hpp"
#include "linfcomp/errors.hpp"
#include "linfcomp/parallel.hpp"

namespace linfcomp {

struct CellLabel {
  ComponentIndex cell = 0;
  bool tied = false;

  friend bool operator==(const CellLabel&, const CellLabel&) = default;
};

namespace detail {

inline CellLabel assign_cell(std::span<const double> x) {
  ComponentIndex best = 0;
  bool tied = false;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) {
      best = i;
      tied = false;
    } else if (x[i] == x[best]) {
      tied = true;
    }
  }
  return {best, tied};
}

}  // namespace detail

/// Cell Q_k of x: the lowest index attaining the maximum component.
inline CellLabel assign_cell(const Composition& x) { return detail::assign_cell(x.values()); }

struct CellAssignment {
  std::vector<ComponentIndex> cells;  // aligned with the dataset's sample_ids
  std::vector<bool> tied;
};

inline CellAssignment assign_cells(const CompositionDataset& ds, unsigned threads = 1) {
  const std::size_t n = ds.num_samples();
  std::vector<CellLabel> labels(n);
  parallel_for(n, threads, [&](std::size_t i) { labels[i] = detail::assign_cell(ds.row(i)); });
  CellAssignment out;
  out.cells.reserve(n);
  out.tied.reserve(n);
  for (const auto& l : labels) {
    out.cells.push_back(l.cell);
    out.tied.push_back(l.tied);
  }
  return out;
}

/// Components within a factor tau of the maximum: { i : x_i >= tau * max x }.
inline std::vector<ComponentIndex> dominant_set(const Composition& x, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in (0, 1]");
  const double threshold = tau * detail::max_value(x.values());
  std::vector<ComponentIndex> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= threshold) out.push_back(i);
  }
  return out;
}

struct CellSummaryRow {
  ComponentIndex component = 0;
  std::size_t freq = 0;
  double perc = 0.0;
  double cum_perc = 0.0;
  std::size_t n_det = 0;  // samples where the component is nonzero
  double p_det = 0.0;
};

/// Occupied cells sorted by frequency (descending, ties by component order).
inline std::vector<CellSummaryRow> cell_summary(const CompositionDataset& ds, unsigned threads = 1) {
  const std::size_t n = ds.num_samples();
  const std::size_t c = ds.num_components();
  const auto assignment = assign_cells(ds, threads);
  std::vector<std::size_t> freq(c, 0), det(c, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++freq[assignment.cells[i]];
    auto r = ds.row(i);
    for (std::size_t k = 0; k < c; ++k) det[k] += r[k] > 0.0 ? 1 : 0;
  }
  std::vector<ComponentIndex> order;
  for (std::size_t k = 0; k < c; ++k) {
    if (freq[k] > 0) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](ComponentIndex a, ComponentIndex b) { return freq[a] > freq[b]; });

  const double total = static_cast<double>(n);
  std::vector<CellSummaryRow> rows;
  std::size_t running = 0;
  for (ComponentIndex k : order) {
    running += freq[k];
    rows.push_back({k, freq[k], 100.0 * static_cast<double>(freq[k]) / total,
                    100.0 * static_cast<double>(running) / total, det[k],
                    100.0 * static_cast<double>(det[k]) / total});
  }
  return rows;
}

struct TruncatedDecomposition {
  std::size_t n0 = 1;
  std::vector<ComponentIndex> retained_cells;  // ascending component order
  std::vector<ComponentIndex> raw_assignment;
  std::vector<ComponentIndex> final_assignment;
  std::vector<bool> reassigned;
};

namespace detail {

// Retained component with the largest value in x; lowest index on ties.
inline ComponentIndex best_retained(std::span<const double> x, std::span<const ComponentIndex> retained) {
  ComponentIndex best = retained.front();
  for (ComponentIndex k : retained) {
    if (x[k] > x[best]) best = k;
  }
  return best;
}

}  // namespace detail

/// Keeps the cells holding at least n0 samples and moves every other sample to
/// the retained component it expresses most. Retained cells are fixed from the
/// raw counts in one pass; reassignment never re-triggers truncation.
inline TruncatedDecomposition truncated_decomposition(const CompositionDataset& ds, std::size_t n0,
                                                      unsigned threads = 1) {
  if (n0 < 1) throw InvalidArgument("n0 must be at least 1");
  const std::size_t n = ds.num_samples();
  auto raw = assign_cells(ds, threads);

  std::vector<std::size_t> counts(ds.num_components(), 0);
  for (ComponentIndex k : raw.cells) ++counts[k];

  TruncatedDecomposition out;
  out.n0 = n0;
  std::vector<bool> is_retained(ds.num_components(), false);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] >= n0 && counts[k] > 0) {
      out.retained_cells.push_back(k);
      is_retained[k] = true;
    }
  }
  if (out.retained_cells.empty()) {
    throw NoRetainedCell("no L-infinity cell holds at least " + std::to_string(n0) + " of " +
                         std::to_string(n) + " samples");
  }

  out.raw_assignment = std::move(raw.cells);
  out.final_assignment.resize(n);
  out.reassigned.assign(n, false);
  std::vector<char> moved(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const ComponentIndex cell = out.raw_assignment[i];
    if (is_retained[cell]) {
      out.final_assignment[i] = cell;
    } else {
      out.final_assignment[i] = detail::best_retained(ds.row(i), out.retained_cells);
      moved[i] = 1;
    }
  });
  for (std::size_t i = 0; i < n; ++i) out.reassigned[i] = moved[i] != 0;
  return out;
}

/// Binary index of one of the 2^d sub-cubes of [0,1]^d.
using SubcellCode = std::vector<std::uint8_t>;

inline std::string to_string(const SubcellCode& code) {
  std::string s;
  s.reserve(code.size());
  for (auto b : code) s.push_back(b ? '1' : '0');
  return s;
}

/// Bit i is 1 iff w_i >= 0.5.
inline SubcellCode refine_cell(std::span<const double> w) {
  SubcellCode code(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0 && w[i] <= 1.0)) {
      throw OutOfRange("coordinate " + std::to_string(i) + " lies outside [0, 1]");
    }
    code[i] = w[i] >= 0.5 ? 1 : 0;
  }
  return code;
}

/// Coordinates of x inside the cube of `cell`: ratios x_j / x_cell clipped to
/// [0, 1]. Samples reassigned by truncation may exceed the reference; they are
/// clipped onto the cell boundary. A zero reference sends every positive
/// component to 1.
inline std::vector<double> cell_local_coordinates(std::span<const double> x, ComponentIndex cell) {
  std::vector<double> out;
  out.reserve(x.size() - 1);
  const double ref = x[cell];
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == cell) continue;
    if (ref == 0.0) {
      out.push_back(x[j] > 0.0 ? 1.0 : 0.0);
    } else {
      out.push_back(std::min(1.0, x[j] / ref));
    }
  }
  return out;
}

struct RefinedLabel {
  ComponentIndex cell = 0;
  SubcellCode raw_subcell;
  SubcellCode subcell;
  bool merged = false;
};

namespace detail {

inline std::size_t hamming(const SubcellCode& a, const SubcellCode& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

}  // namespace detail

/// Merges sub-cells holding fewer than n0 samples into the nearest (Hamming)
/// retained sub-cell of the same cell, preferring the most populated one and
/// then the lexicographically smallest code. A cell without any retained
/// sub-cell collapses onto its most populated sub-cell.
inline std::vector<SubcellCode> merge_subcells(std::span<const ComponentIndex> cells,
                                               std::span<const SubcellCode> codes, std::size_t n0) {
  if (cells.size() != codes.size()) throw LengthMismatch("cells and codes must align");
  std::map<ComponentIndex, std::map<SubcellCode, std::size_t>> counts;
  for (std::size_t i = 0; i < cells.size(); ++i) ++counts[cells[i]][codes[i]];

  std::map<ComponentIndex, std::map<SubcellCode, SubcellCode>> target;
  for (const auto& [cell, by_code] : counts) {
    std::vector<std::pair<const SubcellCode*, std::size_t>> retained;
    const SubcellCode* most = nullptr;
    std::size_t most_count = 0;
    for (const auto& [code, count] : by_code) {
      if (count >= n0) retained.emplace_back(&code, count);
      if (count > most_count) {
        most = &code;
        most_count = count;
      }
    }
    auto& map = target[cell];
    for (const auto& [code, count] : by_code) {
      if (count >= n0) {
        map[code] = code;
        continue;
      }
      if (retained.empty()) {
        map[code] = *most;
        continue;
      }
      const SubcellCode* best = nullptr;
      std::size_t best_dist = 0, best_count = 0;
      for (const auto& [cand, cand_count] : retained) {
        const std::size_t dist = detail::hamming(code, *cand);
        if (best == nullptr || dist < best_dist || (dist == best_dist && cand_count > best_count)) {
          best = cand;
          best_dist = dist;
          best_count = cand_count;
        }
      }
      map[code] = *best;
    }
  }

  std::vector<SubcellCode> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out.push_back(target[cells[i]][codes[i]]);
  return out;
}

/// Sub-cell labels within the truncated cells, with small sub-cells merged.
inline std::vector<RefinedLabel> refined_decomposition(const CompositionDataset& ds,
                                                       const TruncatedDecomposition& truncated,
                                                       std::size_t n0) {
  const std::size_t n = ds.num_samples();
  if (truncated.final_assignment.size() != n) {
    throw LengthMismatch("truncated decomposition does not match the dataset");
  }
  std::vector<SubcellCode> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    codes[i] = refine_cell(cell_local_coordinates(ds.row(i), truncated.final_assignment[i]));
  }
  auto merged = merge_subcells(truncated.final_assignment, codes, n0);
  std::vector<RefinedLabel> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].cell = truncated.final_assignment[i];
    out[i].merged = merged[i] != codes[i];
    out[i].raw_subcell = std::move(codes[i]);
    out[i].subcell = std::move(merged[i]);
  }
  return out;
}

/// Contingency table of cell labels (rows) against external labels (columns).
struct Crosstab {
  std::vector<std::string> row_labels;  // by cell size, descending; ties by label
  std::vector<std::string> col_labels;  // lexicographic
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> row_percents;
  std::vector<bool> empty_rows;  // rows with no labelled sample; percents all zero

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& r : counts) {
      for (auto v : r) t += v;
    }
    return t;
  }
};

/// Rows are restricted to cells holding at least `min_cell` samples (counting
/// every sample of the cell, labelled or not). Missing external labels are
/// std::nullopt.
inline Crosstab crosstab(std::span<const std::string> cells,
                         std::span<const std::optional<std::string>> external, std::size_t min_cell) {
  if (cells.size() != external.size()) throw LengthMismatch("label vectors must align");
  std::map<std::string, std::size_t> cell_size;
  std::map<std::string, std::map<std::string, std::size_t>> joint;
  std::map<std::string, std::size_t> col_set;
  bool any = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ++cell_size[cells[i]];
    if (external[i]) {
      ++joint[cells[i]][*external[i]];
      ++col_set[*external[i]];
      any = true;
    }
  }
  if (!any) throw NoOverlap("no sample carries both a cell and an external label");

  Crosstab t;
  for (const auto& [label, size] : cell_size) {
    if (size >= min_cell) t.row_labels.push_back(label);
  }
  std::stable_sort(t.row_labels.begin(), t.row_labels.end(),
                   [&](const std::string& a, const std::string& b) { return cell_size[a] > cell_size[b]; });
  for (const auto& [label, _] : col_set) t.col_labels.push_back(label);

  for (const auto& row : t.row_labels) {
    std::vector<std::size_t> c(t.col_labels.size(), 0);
    std::size_t row_total = 0;
    if (auto it = joint.find(row); it != joint.end()) {
      for (std::size_t j = 0; j < t.col_labels.size(); ++j) {
        if (auto jt = it->second.find(t.col_labels[j]); jt != it->second.end()) c[j] = jt->second;
        row_total += c[j];
      }
    }
    std::vector<double> pct(c.size(), 0.0);
    if (row_total > 0) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        pct[j] = 100.0 * static_cast<double>(c[j]) / static_cast<double>(row_total);
      }
    }
    t.counts.push_back(std::move(c));
    t.row_percents.push_back(std::move(pct));
    t.empty_rows.push_back(row_total == 0);
  }
  return t;
}

inline Crosstab crosstab(std::span<const std::string> cells, std::span<const std::string> external,
                         std::size_t min_cell) {
  std::vector<std::optional<std::string>> ext(external.begin(), external.end());
  return crosstab(cells, ext, min_cell);
}

struct CellLabelMapping {
  std::string cell;
  std::string label;      // majority external label within the cell
  std::size_t n_comm = 0; // samples with both this cell and this label
  std::size_t n_label = 0;
  std::size_t n_cell = 0;
};

/// Majority external label per cell (ties: lexicographically smallest label).
/// Rows are ordered by label, then by cell. Cells without any labelled sample
/// are omitted.
inline std::vector<CellLabelMapping> map_cells_to_labels(std::span<const std::string> cells,
                                                         std::span<const std::optional<std::string>> external) {
  if (cells.size() != external.size()) throw LengthMismatch("label vectors must align");
  std::map<std::string, std::size_t> cell_size, label_size;
  std::map<std::string, std::map<std::string, std::size_t>> joint;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ++cell_size[cells[i]];
    if (external[i]) {
      ++label_size[*external[i]];
      ++joint[cells[i]][*external[i]];
    }
  }
  if (joint.empty()) throw NoOverlap("no sample carries both a cell and an external label");

  std::vector<CellLabelMapping> out;
  for (const auto& [cell, by_label] : joint) {
    // std::map iterates labels in lexicographic order, so '>' keeps the smallest on ties.
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [label, count] : by_label) {
      if (count > best_count) {
        best = &label;
        best_count = count;
      }
    }
    out.push_back({cell, *best, best_count, label_size[*best], cell_size[cell]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CellLabelMapping& a, const CellLabelMapping& b) { return a.label < b.label; });
  return out;
}

inline std::vector<CellLabelMapping> map_cells_to_labels(std::span<const std::string> cells,
                                                         std::span<const std::string> external) {
  std::vector<std::optional<std::string>> ext(external.begin(), external.end());
  return map_cells_to_labels(cells, ext);
}

}  // namespace linfcomp
