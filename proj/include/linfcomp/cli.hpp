#pragma once

// Subcommand driver behind the linf-compose tool. Every subcommand reads the
// input table, runs one analysis and writes tab-delimited artifacts into the
// output directory.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linfcomp/composition.hpp"
#include "linfcomp/cube_embedding.hpp"
#include "linfcomp/decomposition.hpp"
#include "linfcomp/errors.hpp"
#include "linfcomp/io.hpp"
#include "linfcomp/metrics.hpp"
#include "linfcomp/parallel.hpp"
#include "linfcomp/unfold.hpp"

namespace linfcomp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;       // parse / validation / usage
inline constexpr int kExitInfeasible = 3;  // NoRetainedCell, Infeasible, DegenerateDataset

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"normalize", "cells",   "csts",          "refine",
                                                 "crosstab",  "map-csts", "embed",        "product-embed",
                                                 "unfold",    "dist",     "synth"};
  return names;
}

struct RunConfig {
  std::string command;
  std::filesystem::path input;
  std::optional<std::filesystem::path> labels;
  std::vector<std::string> refs;
  std::size_t n0 = 50;
  double tau = 1.0;
  double C = kDefaultSafetyFactor;
  std::optional<PExponent> p;  // normalize defaults to inf, dist to 1
  std::string base = "bray_curtis";
  std::filesystem::path out = ".";
  std::uint64_t seed = 42;
  unsigned threads = 1;
  // synth only
  std::size_t synth_samples = 1000;
  std::size_t synth_components = 20;
  double synth_sparsity = 0.6;
  double synth_dominance = 10.0;

  void validate() const {
    if (n0 < 1) throw InvalidArgument("--n0 must be at least 1");
    if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("--tau must lie in (0, 1]");
    if (!(C > 0.0)) throw InvalidArgument("--C must be positive");
    if (threads < 1) throw InvalidArgument("thread count must be at least 1");
  }
};

inline int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_argument:
    case ErrorCategory::parse:
    case ErrorCategory::validation: return kExitInput;
    case ErrorCategory::infeasible: return kExitInfeasible;
    case ErrorCategory::domain: return kExitFailure;
  }
  return kExitFailure;
}

namespace detail {

inline std::string flag(bool b) { return b ? "1" : "0"; }

inline std::string file_safe(std::string_view name) {
  std::string s;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_' || ch == '.';
    s.push_back(ok ? ch : '_');
  }
  return s;
}

inline std::vector<ComponentIndex> resolve_refs(const CompositionDataset& ds, const std::vector<std::string>& refs) {
  std::vector<ComponentIndex> out;
  for (const auto& r : refs) {
    auto k = ds.component_index(r);
    if (!k) throw InvalidArgument("unknown reference component '" + r + "'");
    out.push_back(*k);
  }
  return out;
}

inline ComponentIndex single_ref(const CompositionDataset& ds, const RunConfig& cfg) {
  if (cfg.refs.size() != 1) throw InvalidArgument(cfg.command + " needs exactly one --ref");
  return resolve_refs(ds, cfg.refs).front();
}

inline LabelJoin require_labels(const CompositionDataset& ds, const RunConfig& cfg, std::ostream& log) {
  if (!cfg.labels) throw InvalidArgument(cfg.command + " needs --labels");
  auto join = join_labels(ds, load_labels(*cfg.labels));
  for (const auto& w : join.warnings) log << "warning: " << w << '\n';
  return join;
}

inline std::vector<std::string> names_of(const CompositionDataset& ds, std::span<const ComponentIndex> idx) {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (auto k : idx) out.push_back(ds.component_ids()[k]);
  return out;
}

inline void write(const RunConfig& cfg, const std::string& name, const TextTable& t) {
  atomic_write_file(cfg.out / name, t.to_string());
}

inline TextTable embedding_table(const CompositionDataset& ds, const CubeEmbedding& e) {
  TextTable t;
  t.header = {"sample_id", "ref_component"};
  for (std::size_t j = 0; j < ds.num_components(); ++j) {
    if (j != e.reference) t.header.push_back(ds.component_ids()[j]);
  }
  t.header.push_back("at_infinity");
  const auto& ref = ds.component_ids()[e.reference];
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    std::vector<std::string> r = {ds.sample_ids()[i], ref};
    for (double v : e.points.row(i)) r.push_back(format_double(v));
    r.push_back(flag(e.at_infinity[i]));
    t.rows.push_back(std::move(r));
  }
  return t;
}

inline TextTable sigmoid_params_table(const std::string& ref, const SigmoidConfig& c) {
  TextTable t;
  t.header = {"ref_component", "lambda", "C", "epsilon", "M", "m"};
  t.rows.push_back({ref, format_double(c.lambda), format_double(c.C), format_double(c.epsilon),
                    format_double(c.M), format_double(c.m)});
  return t;
}

inline void cmd_normalize(const CompositionDataset& ds, const RunConfig& cfg) {
  const PExponent p = cfg.p.value_or(PExponent::infinity());
  const std::size_t c = ds.num_components();
  std::vector<double> values(ds.num_samples() * c);
  parallel_for(ds.num_samples(), cfg.threads, [&](std::size_t i) {
    lp_normalize_into(ds.row(i), p, std::span<double>(values).subspan(i * c, c));
  });
  CompositionDataset normalized(ds.sample_ids(), ds.component_ids(), std::move(values));
  atomic_write_file(cfg.out / "normalized.tsv", format_counts(normalized));
}

inline void cmd_cells(const CompositionDataset& ds, const RunConfig& cfg) {
  const auto assignment = assign_cells(ds, cfg.threads);
  TextTable cells;
  cells.header = {"sample_id", "cell", "tied", "dominant_set"};
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    const auto row = ds.row(i);
    const double threshold = cfg.tau * max_value(row);
    std::string dominant;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] >= threshold) {
        if (!dominant.empty()) dominant += ';';
        dominant += ds.component_ids()[k];
      }
    }
    cells.rows.push_back({ds.sample_ids()[i], ds.component_ids()[assignment.cells[i]],
                          flag(assignment.tied[i]), std::move(dominant)});
  }
  write(cfg, "cells.tsv", cells);

  TextTable summary;
  summary.header = {"component", "Freq", "Perc", "CumPerc", "n(det)", "p(det)"};
  for (const auto& r : cell_summary(ds, cfg.threads)) {
    summary.rows.push_back({ds.component_ids()[r.component], std::to_string(r.freq), format_double(r.perc),
                            format_double(r.cum_perc), std::to_string(r.n_det), format_double(r.p_det)});
  }
  write(cfg, "cell_summary.tsv", summary);
}

inline void cmd_csts(const CompositionDataset& ds, const RunConfig& cfg) {
  const auto t = truncated_decomposition(ds, cfg.n0, cfg.threads);
  TextTable rows;
  rows.header = {"sample_id", "raw_cell", "cst", "reassigned"};
  std::vector<std::size_t> raw(ds.num_components(), 0), final(ds.num_components(), 0);
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    ++raw[t.raw_assignment[i]];
    ++final[t.final_assignment[i]];
    rows.rows.push_back({ds.sample_ids()[i], ds.component_ids()[t.raw_assignment[i]],
                         ds.component_ids()[t.final_assignment[i]], flag(t.reassigned[i])});
  }
  write(cfg, "csts.tsv", rows);
  TextTable summary;
  summary.header = {"cst", "n_raw", "n_final"};
  for (auto k : t.retained_cells) {
    summary.rows.push_back({ds.component_ids()[k], std::to_string(raw[k]), std::to_string(final[k])});
  }
  write(cfg, "cst_summary.tsv", summary);
}

inline void cmd_refine(const CompositionDataset& ds, const RunConfig& cfg) {
  const auto t = truncated_decomposition(ds, cfg.n0, cfg.threads);
  const auto refined = refined_decomposition(ds, t, cfg.n0);
  TextTable rows;
  rows.header = {"sample_id", "cst", "raw_subcell", "subcell", "merged"};
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    rows.rows.push_back({ds.sample_ids()[i], ds.component_ids()[refined[i].cell], to_string(refined[i].raw_subcell),
                         to_string(refined[i].subcell), flag(refined[i].merged)});
  }
  write(cfg, "refined.tsv", rows);
}

inline void cmd_crosstab(const CompositionDataset& ds, const RunConfig& cfg, std::ostream& log) {
  const auto join = require_labels(ds, cfg, log);
  const auto assignment = assign_cells(ds, cfg.threads);
  const auto cells = names_of(ds, assignment.cells);
  const auto t = crosstab(cells, join.labels, cfg.n0);
  TextTable counts, percents;
  counts.header = {"cell"};
  counts.header.insert(counts.header.end(), t.col_labels.begin(), t.col_labels.end());
  percents.header = counts.header;
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    std::vector<std::string> c = {t.row_labels[r]}, p = {t.row_labels[r]};
    for (std::size_t j = 0; j < t.col_labels.size(); ++j) {
      c.push_back(std::to_string(t.counts[r][j]));
      p.push_back(format_double(t.row_percents[r][j]));
    }
    counts.rows.push_back(std::move(c));
    percents.rows.push_back(std::move(p));
  }
  write(cfg, "crosstab_counts.tsv", counts);
  write(cfg, "crosstab_percent.tsv", percents);
}

inline void cmd_map_csts(const CompositionDataset& ds, const RunConfig& cfg, std::ostream& log) {
  const auto join = require_labels(ds, cfg, log);
  const auto t = truncated_decomposition(ds, cfg.n0, cfg.threads);
  const auto csts = names_of(ds, t.final_assignment);
  TextTable table;
  table.header = {"Linf_CST", "CST", "n_comm", "n_CST", "n_Linf_CST"};
  for (const auto& m : map_cells_to_labels(csts, join.labels)) {
    table.rows.push_back({m.cell, m.label, std::to_string(m.n_comm), std::to_string(m.n_label),
                          std::to_string(m.n_cell)});
  }
  write(cfg, "cst_map.tsv", table);
}

inline void cmd_embed(const CompositionDataset& ds, const RunConfig& cfg) {
  const ComponentIndex k = single_ref(ds, cfg);
  const auto e = embed_dataset(ds, k, cfg.C, cfg.threads);
  const auto& ref = ds.component_ids()[k];
  write(cfg, "embedding_" + file_safe(ref) + ".tsv", embedding_table(ds, e));
  write(cfg, "embedding_" + file_safe(ref) + ".params.tsv", sigmoid_params_table(ref, e.config));
}

inline void cmd_product_embed(const CompositionDataset& ds, const RunConfig& cfg) {
  if (cfg.refs.empty()) throw InvalidArgument("product-embed needs at least one --ref");
  const auto refs = resolve_refs(ds, cfg.refs);
  const auto p = product_embedding(ds, refs, cfg.C, cfg.threads);
  TextTable t;
  t.header = {"sample_id"};
  for (auto k : refs) {
    for (std::size_t j = 0; j < ds.num_components(); ++j) {
      if (j != k) t.header.push_back(ds.component_ids()[k] + ":" + ds.component_ids()[j]);
    }
  }
  for (auto k : refs) t.header.push_back("at_infinity:" + ds.component_ids()[k]);
  t.rows.reserve(ds.num_samples());
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    std::vector<std::string> r;
    r.reserve(t.header.size());
    r.push_back(ds.sample_ids()[i]);
    for (double v : p.points.row(i)) r.push_back(format_double(v));
    for (const auto& b : p.blocks) r.push_back(flag(b.at_infinity[i]));
    t.rows.push_back(std::move(r));
  }
  write(cfg, "product_embedding.tsv", t);
  TextTable params;
  for (const auto& b : p.blocks) {
    auto one = sigmoid_params_table(ds.component_ids()[b.reference], b.config);
    params.header = one.header;
    params.rows.push_back(one.rows.front());
  }
  write(cfg, "product_embedding.params.tsv", params);
}

inline void cmd_unfold(const CompositionDataset& ds, const RunConfig& cfg) {
  const ComponentIndex ref = single_ref(ds, cfg);
  const std::size_t c = ds.num_components();
  const std::size_t d = ds.dimension();
  std::vector<double> coords(ds.num_samples() * d);
  parallel_for(ds.num_samples(), cfg.threads, [&](std::size_t i) {
    std::vector<double> scratch(c);
    unfold_into(ds.row(i), ref, scratch, std::span<double>(coords).subspan(i * d, d));
  });
  TextTable t;
  t.header = {"sample_id", "cell"};
  for (std::size_t j = 0; j < c; ++j) {
    if (j != ref) t.header.push_back(ds.component_ids()[j]);
  }
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    std::vector<std::string> r = {ds.sample_ids()[i], ds.component_ids()[assign_cell(ds.row(i)).cell]};
    for (std::size_t j = 0; j < d; ++j) r.push_back(format_double(coords[i * d + j]));
    t.rows.push_back(std::move(r));
  }
  write(cfg, "unfold_" + file_safe(ds.component_ids()[ref]) + ".tsv", t);
}

inline void cmd_dist(const CompositionDataset& ds, const RunConfig& cfg) {
  const auto measure = cfg.base == "angular"
                           ? DissimilarityMeasure::angular()
                           : DissimilarityMeasure::pullback(cfg.p.value_or(PExponent(1.0)),
                                                            parse_base_dissimilarity(cfg.base));
  const auto m = pairwise_matrix(ds, measure, cfg.threads);
  TextTable t;
  t.header = {"sample_id"};
  t.header.insert(t.header.end(), m.labels.begin(), m.labels.end());
  for (std::size_t a = 0; a < m.n; ++a) {
    std::vector<std::string> r = {m.labels[a]};
    for (std::size_t b = 0; b < m.n; ++b) r.push_back(format_double(m(a, b)));
    t.rows.push_back(std::move(r));
  }
  write(cfg, "distances.tsv", t);
}

inline void cmd_synth(const RunConfig& cfg) {
  const auto s = synth_generate(cfg.synth_samples, cfg.synth_components, cfg.synth_sparsity,
                                cfg.synth_dominance, cfg.seed);
  atomic_write_file(cfg.out / "synthetic.tsv", format_counts(s.dataset));
  TextTable planted;
  planted.header = {"sample_id", "planted"};
  for (std::size_t i = 0; i < s.planted.size(); ++i) {
    planted.rows.push_back({s.dataset.sample_ids()[i], s.dataset.component_ids()[s.planted[i]]});
  }
  write(cfg, "synthetic_planted.tsv", planted);
}

}  // namespace detail

/// Runs one subcommand. Errors are reported on `log` as
/// "error: <category>/<kind>: <message>" and mapped to the exit code.
inline int run_command(const RunConfig& cfg, std::ostream& log = std::cerr) {
  try {
    cfg.validate();
    std::filesystem::create_directories(cfg.out);
    if (cfg.command == "synth") {
      detail::cmd_synth(cfg);
      return kExitOk;
    }
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), cfg.command) == names.end()) {
      throw InvalidArgument("unknown subcommand '" + cfg.command + "'");
    }
    const auto ds = load_counts(cfg.input);
    if (cfg.command == "normalize") detail::cmd_normalize(ds, cfg);
    else if (cfg.command == "cells") detail::cmd_cells(ds, cfg);
    else if (cfg.command == "csts") detail::cmd_csts(ds, cfg);
    else if (cfg.command == "refine") detail::cmd_refine(ds, cfg);
    else if (cfg.command == "crosstab") detail::cmd_crosstab(ds, cfg, log);
    else if (cfg.command == "map-csts") detail::cmd_map_csts(ds, cfg, log);
    else if (cfg.command == "embed") detail::cmd_embed(ds, cfg);
    else if (cfg.command == "product-embed") detail::cmd_product_embed(ds, cfg);
    else if (cfg.command == "unfold") detail::cmd_unfold(ds, cfg);
    else if (cfg.command == "dist") detail::cmd_dist(ds, cfg);
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << to_string(e.category()) << '/' << e.kind() << ": " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: io/FilesystemError: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace linfcomp
