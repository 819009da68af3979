#include <gtest/gtest.h>

#include <map>
#include <random>

#include "linfcomp/decomposition.hpp"
#include "test_support.hpp"

using namespace linfcomp;
namespace lt = linfcomp::testing;

namespace {

CompositionDataset make_dataset(const std::vector<std::vector<double>>& rows) {
  std::vector<std::string> samples, comps;
  std::vector<double> m;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    samples.push_back("s" + std::to_string(i));
    m.insert(m.end(), rows[i].begin(), rows[i].end());
  }
  for (std::size_t k = 0; k < rows.front().size(); ++k) comps.push_back("c" + std::to_string(k));
  return CompositionDataset(samples, comps, m);
}

CompositionDataset five_sample_fixture() {
  return make_dataset({{9, 1, 0}, {8, 2, 0}, {1, 9, 0}, {2, 8, 0}, {0, 1, 5}});
}

}  // namespace

TEST(AssignCell, Examples) {
  EXPECT_EQ(assign_cell({1, 5, 3}), (CellLabel{1, false}));
  EXPECT_EQ(assign_cell({2, 2, 1}), (CellLabel{0, true}));
  EXPECT_EQ(assign_cell({0, 0, 9}), (CellLabel{2, false}));
}

TEST(AssignCell, MatchesBruteForceArgmax) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10000; ++trial) {
    auto v = lt::random_values(rng, 2 + trial % 15);
    if (trial % 4 == 0) v = lt::with_planted_tie(rng, v);
    const auto oracle = lt::brute_argmax_set(v);
    const auto label = assign_cell(Composition(v));
    EXPECT_EQ(label.cell, oracle.front());
    EXPECT_EQ(label.tied, oracle.size() > 1);
  }
}

TEST(AssignCell, IndependentOfOtherSamples) {
  std::mt19937_64 rng(7);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 300; ++i) rows.push_back(lt::random_values(rng, 8));
  const auto full = assign_cells(make_dataset(rows));
  for (int round = 0; round < 20; ++round) {
    std::vector<std::vector<double>> subset;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (lt::uniform(rng, 0, 1) < 0.4) {
        subset.push_back(rows[i]);
        kept.push_back(i);
      }
    }
    if (subset.empty()) continue;
    const auto part = assign_cells(make_dataset(subset));
    for (std::size_t s = 0; s < kept.size(); ++s) EXPECT_EQ(part.cells[s], full.cells[kept[s]]);
  }
}

TEST(DominantSet, Examples) {
  EXPECT_EQ(dominant_set({4, 4, 1}, 1.0), (std::vector<ComponentIndex>{0, 1}));
  EXPECT_EQ(dominant_set({10, 9, 1}, 0.8), (std::vector<ComponentIndex>{0, 1}));
  EXPECT_EQ(dominant_set({10, 9, 1}, 0.95), (std::vector<ComponentIndex>{0}));
  EXPECT_THROW(dominant_set({1, 2}, 0.0), InvalidArgument);
  EXPECT_THROW(dominant_set({1, 2}, 1.5), InvalidArgument);
}

TEST(DominantSet, TauOneIsArgmaxSet) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    auto v = lt::random_values(rng, 2 + trial % 7);
    if (trial % 3 == 0) v = lt::with_planted_tie(rng, v);
    EXPECT_EQ(dominant_set(Composition(v), 1.0), lt::brute_argmax_set(v));
  }
}

TEST(CellSummary, HandEnumeratedExample) {
  const auto rows = cell_summary(make_dataset({{5, 1}, {3, 1}, {1, 2}, {0, 2}}));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].component, 0u);
  EXPECT_EQ(rows[0].freq, 2u);
  EXPECT_DOUBLE_EQ(rows[0].perc, 50.0);
  EXPECT_DOUBLE_EQ(rows[0].cum_perc, 50.0);
  EXPECT_EQ(rows[0].n_det, 3u);
  EXPECT_DOUBLE_EQ(rows[0].p_det, 75.0);
  EXPECT_EQ(rows[1].component, 1u);
  EXPECT_EQ(rows[1].freq, 2u);
  EXPECT_DOUBLE_EQ(rows[1].perc, 50.0);
  EXPECT_DOUBLE_EQ(rows[1].cum_perc, 100.0);
  EXPECT_EQ(rows[1].n_det, 4u);
  EXPECT_DOUBLE_EQ(rows[1].p_det, 100.0);
}

TEST(CellSummary, SingleSampleAndTotals) {
  const auto single = cell_summary(make_dataset({{1, 0}}));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].freq, 1u);
  EXPECT_DOUBLE_EQ(single[0].perc, 100.0);
  EXPECT_DOUBLE_EQ(single[0].cum_perc, 100.0);

  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 777; ++i) rows.push_back(lt::random_values(rng, 13, 0.6));
  const auto summary = cell_summary(make_dataset(rows));
  EXPECT_NEAR(summary.back().cum_perc, 100.0, 0.1);
  for (std::size_t r = 1; r < summary.size(); ++r) EXPECT_GE(summary[r - 1].freq, summary[r].freq);
}

TEST(TruncatedDecomposition, FiveSampleFixture) {
  const auto t = truncated_decomposition(five_sample_fixture(), 2);
  EXPECT_EQ(t.retained_cells, (std::vector<ComponentIndex>{0, 1}));
  EXPECT_EQ(t.raw_assignment, (std::vector<ComponentIndex>{0, 0, 1, 1, 2}));
  EXPECT_EQ(t.final_assignment, (std::vector<ComponentIndex>{0, 0, 1, 1, 1}));
  EXPECT_EQ(t.reassigned, (std::vector<bool>{false, false, false, false, true}));
}

TEST(TruncatedDecomposition, NoRetainedCell) {
  EXPECT_THROW(truncated_decomposition(five_sample_fixture(), 6), NoRetainedCell);
  EXPECT_THROW(truncated_decomposition(five_sample_fixture(), 0), InvalidArgument);
}

TEST(TruncatedDecomposition, Properties) {
  std::mt19937_64 rng(21);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 2000; ++i) rows.push_back(lt::random_values(rng, 30, 0.7));
  const auto ds = make_dataset(rows);

  const auto identity = truncated_decomposition(ds, 1);
  EXPECT_EQ(identity.final_assignment, identity.raw_assignment);
  for (bool r : identity.reassigned) EXPECT_FALSE(r);

  const auto t = truncated_decomposition(ds, 80);
  std::map<ComponentIndex, std::size_t> raw, final;
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    ++raw[t.raw_assignment[i]];
    ++final[t.final_assignment[i]];
    const bool retained = std::find(t.retained_cells.begin(), t.retained_cells.end(), t.raw_assignment[i]) !=
                          t.retained_cells.end();
    EXPECT_EQ(t.reassigned[i], !retained);
    EXPECT_NE(std::find(t.retained_cells.begin(), t.retained_cells.end(), t.final_assignment[i]),
              t.retained_cells.end());
  }
  for (auto k : t.retained_cells) {
    EXPECT_GE(raw[k], 80u);
    EXPECT_GE(final[k], raw[k]);
  }
}

TEST(TruncatedDecomposition, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(22);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 1000; ++i) rows.push_back(lt::random_values(rng, 10, 0.5));
  const auto ds = make_dataset(rows);
  const auto a = truncated_decomposition(ds, 40, 1);
  const auto b = truncated_decomposition(ds, 40, 4);
  EXPECT_EQ(a.final_assignment, b.final_assignment);
  EXPECT_EQ(a.reassigned, b.reassigned);
}

TEST(RefineCell, Examples) {
  EXPECT_EQ(refine_cell(std::vector<double>{0.2, 0.7}), (SubcellCode{0, 1}));
  EXPECT_EQ(refine_cell(std::vector<double>{0.5, 0.5}), (SubcellCode{1, 1}));
  EXPECT_EQ(refine_cell(std::vector<double>{0.0, 0.0}), (SubcellCode{0, 0}));
  EXPECT_THROW(refine_cell(std::vector<double>{0.2, 1.2}), OutOfRange);
  EXPECT_THROW(refine_cell(std::vector<double>{-0.1}), OutOfRange);
}

TEST(CellLocalCoordinates, ClipsReassignedSamples) {
  EXPECT_EQ(cell_local_coordinates(std::vector<double>{4, 2, 1}, 0), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(cell_local_coordinates(std::vector<double>{4, 2, 1}, 1), (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(cell_local_coordinates(std::vector<double>{0, 1, 5}, 0), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(cell_local_coordinates(std::vector<double>{0, 0, 5}, 0), (std::vector<double>{0.0, 1.0}));
}

TEST(MergeSubcells, OnlyRetainedSubcell) {
  std::vector<ComponentIndex> cells(6, 0);
  std::vector<SubcellCode> codes(5, SubcellCode{0, 0});
  codes.push_back({1, 1});
  const auto merged = merge_subcells(cells, codes, 2);
  for (const auto& c : merged) EXPECT_EQ(c, (SubcellCode{0, 0}));
}

TEST(MergeSubcells, IdentityWhenAllLarge) {
  std::vector<ComponentIndex> cells(4, 3);
  std::vector<SubcellCode> codes = {{0, 1}, {0, 1}, {1, 0}, {1, 0}};
  EXPECT_EQ(merge_subcells(cells, codes, 2), codes);
}

TEST(MergeSubcells, NearestInHamming) {
  std::vector<ComponentIndex> cells(11, 0);
  std::vector<SubcellCode> codes(5, SubcellCode{0, 0});
  codes.insert(codes.end(), 5, SubcellCode{0, 1});
  codes.push_back({1, 1});
  const auto merged = merge_subcells(cells, codes, 2);
  EXPECT_EQ(merged.back(), (SubcellCode{0, 1}));
}

TEST(MergeSubcells, CellWithoutRetainedSubcellCollapses) {
  std::vector<ComponentIndex> cells = {0, 0, 0, 1, 1, 1};
  std::vector<SubcellCode> codes = {{0}, {0}, {1}, {1}, {0}, {1}};
  const auto merged = merge_subcells(cells, codes, 3);
  EXPECT_EQ(merged, (std::vector<SubcellCode>{{0}, {0}, {0}, {1}, {1}, {1}}));
}

TEST(MergeSubcells, HammingTieGoesToMostPopulated) {
  std::vector<ComponentIndex> cells(8, 0);
  std::vector<SubcellCode> codes = {{0, 0}, {0, 0}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {0, 1}};
  const auto merged = merge_subcells(cells, codes, 2);
  EXPECT_EQ(merged.back(), (SubcellCode{1, 1}));
}

TEST(RefinedDecomposition, LabelsStayInsideTheirCell) {
  const auto ds = make_dataset({{9, 1, 0}, {8, 6, 0}, {9, 2, 1}, {1, 9, 0}, {2, 8, 0}, {0, 1, 5}});
  const auto t = truncated_decomposition(ds, 2);
  const auto refined = refined_decomposition(ds, t, 2);
  ASSERT_EQ(refined.size(), 6u);
  for (std::size_t i = 0; i < refined.size(); ++i) EXPECT_EQ(refined[i].cell, t.final_assignment[i]);
  // Cell 0 raw codes: 00, 10, 00 -> 10 merged into 00.
  EXPECT_EQ(refined[1].raw_subcell, (SubcellCode{1, 0}));
  EXPECT_EQ(refined[1].subcell, (SubcellCode{0, 0}));
  EXPECT_TRUE(refined[1].merged);
  // The reassigned sample [0,1,5] sits at local (0, 1) in cell 1 (clipped).
  EXPECT_EQ(refined[5].raw_subcell, (SubcellCode{0, 1}));
}

TEST(Crosstab, Examples) {
  const std::vector<std::string> cells = {"A", "A", "B"}, ext = {"X", "Y", "X"};
  const auto t = crosstab(cells, ext, 0);
  EXPECT_EQ(t.row_labels, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(t.col_labels, (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(t.counts, (std::vector<std::vector<std::size_t>>{{1, 1}, {1, 0}}));
  EXPECT_EQ(t.row_percents, (std::vector<std::vector<double>>{{50, 50}, {100, 0}}));
  EXPECT_EQ(t.total(), 3u);

  const auto filtered = crosstab(cells, ext, 2);
  EXPECT_EQ(filtered.row_labels, (std::vector<std::string>{"A"}));

  const auto same = crosstab(cells, cells, 0);
  for (std::size_t r = 0; r < same.row_labels.size(); ++r) {
    const auto col = std::find(same.col_labels.begin(), same.col_labels.end(), same.row_labels[r]) -
                     same.col_labels.begin();
    EXPECT_DOUBLE_EQ(same.row_percents[r][static_cast<std::size_t>(col)], 100.0);
  }
}

TEST(Crosstab, MissingLabelsAndNoOverlap) {
  const std::vector<std::string> cells = {"A", "A", "B"};
  const std::vector<std::optional<std::string>> ext = {"X", std::nullopt, std::nullopt};
  const auto t = crosstab(cells, ext, 0);
  EXPECT_EQ(t.total(), 1u);
  EXPECT_EQ(t.empty_rows, (std::vector<bool>{false, true}));
  EXPECT_EQ(t.row_percents[1], (std::vector<double>{0.0}));

  const std::vector<std::optional<std::string>> none = {std::nullopt, std::nullopt, std::nullopt};
  EXPECT_THROW(crosstab(cells, none, 0), NoOverlap);
  EXPECT_THROW(crosstab(cells, std::vector<std::string>{"X"}, 0), LengthMismatch);
}

TEST(Crosstab, RowPercentsAndMarginals) {
  std::mt19937_64 rng(31);
  std::vector<std::string> cells, ext;
  std::map<std::string, std::size_t> ext_freq;
  for (int i = 0; i < 3000; ++i) {
    cells.push_back("cell" + std::to_string(lt::uniform_index(rng, 9)));
    ext.push_back("cst" + std::to_string(lt::uniform_index(rng, 6)));
    ++ext_freq[ext.back()];
  }
  const auto t = crosstab(cells, ext, 0);
  EXPECT_EQ(t.total(), cells.size());
  for (const auto& row : t.row_percents) {
    double s = 0;
    for (double v : row) s += v;
    EXPECT_NEAR(s, 100.0, 0.1);
  }
  for (std::size_t j = 0; j < t.col_labels.size(); ++j) {
    std::size_t col = 0;
    for (const auto& row : t.counts) col += row[j];
    EXPECT_EQ(col, ext_freq[t.col_labels[j]]);
  }
}

TEST(MapCellsToLabels, Examples) {
  const std::vector<std::string> cells = {"A", "A", "B"}, ext = {"X", "Y", "X"};
  const auto m = map_cells_to_labels(cells, ext);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].cell, "A");
  EXPECT_EQ(m[0].label, "X");  // X:1 vs Y:1, lexicographic tie-break
  EXPECT_EQ(m[0].n_comm, 1u);
  EXPECT_EQ(m[0].n_label, 2u);
  EXPECT_EQ(m[0].n_cell, 2u);
  EXPECT_EQ(m[1].cell, "B");
  EXPECT_EQ(m[1].label, "X");
  EXPECT_EQ(m[1].n_comm, 1u);
  EXPECT_EQ(m[1].n_label, 2u);
  EXPECT_EQ(m[1].n_cell, 1u);

  const std::vector<std::string> one(7, "Q"), lab(7, "L");
  const auto single = map_cells_to_labels(one, lab);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].n_comm, 7u);
  EXPECT_EQ(single[0].n_label, 7u);
  EXPECT_EQ(single[0].n_cell, 7u);

  const std::vector<std::optional<std::string>> none(3);
  EXPECT_THROW(map_cells_to_labels(cells, none), NoOverlap);
}
