#pragma once

// Delimited-text ingestion and serialization, synthetic fixtures, and atomic
// file output.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "linfcomp/composition.hpp"
#include "linfcomp/errors.hpp"

namespace linfcomp {

/// Shortest-safe text form of a double: 17 significant digits, so reading it
/// back reproduces the same bits.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

// Non-empty lines with their 1-based line numbers.
inline std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) out.push_back({number, line});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

inline char sniff_delimiter(std::string_view header) {
  return header.find('\t') != std::string_view::npos ? '\t' : ',';
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses a count table: a header of component names after a sample-ID
/// column, then one row per sample. Comma or tab, chosen from the header.
inline CompositionDataset parse_counts(std::string_view text) {
  const auto lines = detail::lines_of(text);
  if (lines.empty()) throw ParseError(1, 1, "empty input");
  const char delim = detail::sniff_delimiter(lines[0].text);
  const auto header = detail::split(lines[0].text, delim);
  if (header.size() < 3) {
    throw ParseError(lines[0].number, header.size() + 1,
                     "header needs a sample-ID column and at least 2 components");
  }
  std::vector<std::string> components;
  std::unordered_set<std::string_view> seen_components;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError(lines[0].number, c + 1, "empty component name");
    if (!seen_components.insert(header[c]).second) {
      throw ValidationError("duplicate component '" + std::string(header[c]) + "' in header");
    }
    components.emplace_back(header[c]);
  }
  const std::size_t width = components.size();

  std::vector<std::string> samples;
  std::vector<double> matrix;
  samples.reserve(lines.size() - 1);
  matrix.reserve((lines.size() - 1) * width);
  std::unordered_map<std::string, std::size_t> sample_line;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, line] = lines[li];
    const auto fields = detail::split(line, delim);
    if (fields.size() != width + 1) {
      throw ParseError(number, std::min(fields.size(), width + 1) + 1,
                       "expected " + std::to_string(width + 1) + " fields, found " +
                           std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) throw ParseError(number, 1, "empty sample ID");
    if (auto [it, inserted] = sample_line.emplace(id, number); !inserted) {
      throw ValidationError("line " + std::to_string(number) + ": duplicate sample '" + id +
                            "' (first seen on line " + std::to_string(it->second) + ")");
    }
    bool any_positive = false;
    for (std::size_t c = 0; c < width; ++c) {
      const auto f = fields[c + 1];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(number, c + 2, "'" + std::string(f) + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw ValidationError("line " + std::to_string(number) + ": sample '" + id + "', component '" +
                              components[c] + "' is not finite");
      }
      if (v < 0.0) {
        throw ValidationError("line " + std::to_string(number) + ": sample '" + id + "', component '" +
                              components[c] + "' is negative (" + std::string(f) + ")");
      }
      any_positive = any_positive || v > 0.0;
      matrix.push_back(v);
    }
    if (!any_positive) {
      throw ValidationError("line " + std::to_string(number) + ": sample '" + id + "' is all zeros");
    }
    samples.push_back(std::move(id));
  }
  if (samples.empty()) throw ValidationError("no samples in input");
  return CompositionDataset(std::move(samples), std::move(components), std::move(matrix));
}

inline CompositionDataset load_counts(const std::filesystem::path& path) {
  return parse_counts(detail::read_file(path));
}

/// Tab-delimited text with a "sample_id" header and 17-digit values.
inline std::string format_counts(const CompositionDataset& ds) {
  std::string out = "sample_id";
  for (const auto& c : ds.component_ids()) {
    out += '\t';
    out += c;
  }
  out += '\n';
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    out += ds.sample_ids()[i];
    for (double v : ds.row(i)) {
      out += '\t';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

struct LabelTable {
  std::vector<std::string> sample_ids;  // file order
  std::unordered_map<std::string, std::string> label_of;
};

/// Two-column table (sample ID, label) with a header row.
inline LabelTable parse_labels(std::string_view text) {
  const auto lines = detail::lines_of(text);
  if (lines.empty()) throw ParseError(1, 1, "empty label file");
  const char delim = detail::sniff_delimiter(lines[0].text);
  if (detail::split(lines[0].text, delim).size() != 2) {
    throw ParseError(lines[0].number, 1, "label header must have exactly 2 columns");
  }
  LabelTable t;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, line] = lines[li];
    const auto fields = detail::split(line, delim);
    if (fields.size() != 2) {
      throw ParseError(number, std::min<std::size_t>(fields.size(), 2) + 1,
                       "expected 2 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(number, 1, "empty sample ID");
    if (fields[1].empty()) throw ParseError(number, 2, "empty label");
    std::string id(fields[0]);
    if (!t.label_of.emplace(id, std::string(fields[1])).second) {
      throw DuplicateSample("line " + std::to_string(number) + ": sample '" + id + "' labelled twice");
    }
    t.sample_ids.push_back(std::move(id));
  }
  return t;
}

inline LabelTable load_labels(const std::filesystem::path& path) {
  return parse_labels(detail::read_file(path));
}

struct LabelJoin {
  std::vector<std::optional<std::string>> labels;  // aligned with the dataset
  std::vector<std::string> warnings;
};

/// Aligns labels to dataset samples. Label rows naming unknown samples become
/// warnings; dataset samples without a label get std::nullopt.
inline LabelJoin join_labels(const CompositionDataset& ds, const LabelTable& table) {
  LabelJoin j;
  j.labels.reserve(ds.num_samples());
  std::unordered_set<std::string_view> known;
  for (const auto& id : ds.sample_ids()) {
    known.insert(id);
    if (auto it = table.label_of.find(id); it != table.label_of.end()) {
      j.labels.emplace_back(it->second);
    } else {
      j.labels.emplace_back(std::nullopt);
    }
  }
  for (const auto& id : table.sample_ids) {
    if (!known.contains(id)) j.warnings.push_back("label for unknown sample '" + id + "' ignored");
  }
  return j;
}

struct SyntheticDataset {
  CompositionDataset dataset;
  std::vector<ComponentIndex> planted;  // dominant component per row
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::string padded(char prefix, std::size_t i, std::size_t count) {
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::string digits = std::to_string(i);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

}  // namespace detail

/// Zero-rich dominance-structured fixture. Each row plants one dominant
/// component with value in [dominance, 2 dominance), draws the rest from
/// [0, 1), then zeroes round(sparsity * (components - 1)) of the non-dominant
/// entries. Uses mt19937_64 with explicit conversions, so the output depends
/// only on the arguments.
inline SyntheticDataset synth_generate(std::size_t n, std::size_t components, double sparsity, double dominance,
                                       std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one sample");
  if (components < 2) throw InvalidArgument("need at least two components");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) throw InvalidArgument("sparsity must lie in [0, 1)");
  if (!(dominance >= 1.0)) throw InvalidArgument("dominance must be at least 1");

  std::mt19937_64 rng(seed);
  const std::size_t zeros = static_cast<std::size_t>(std::llround(sparsity * static_cast<double>(components - 1)));
  std::vector<double> matrix(n * components);
  std::vector<ComponentIndex> planted(n);
  std::vector<ComponentIndex> others(components - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const ComponentIndex dom = rng() % components;
    planted[i] = dom;
    double* row = matrix.data() + i * components;
    for (std::size_t k = 0; k < components; ++k) {
      row[k] = k == dom ? dominance * (1.0 + detail::uniform01(rng)) : detail::uniform01(rng);
    }
    std::size_t o = 0;
    for (std::size_t k = 0; k < components; ++k) {
      if (k != dom) others[o++] = k;
    }
    for (std::size_t z = 0; z < zeros; ++z) {
      const std::size_t pick = z + rng() % (others.size() - z);
      std::swap(others[z], others[pick]);
      row[others[z]] = 0.0;
    }
  }
  std::vector<std::string> sample_ids(n), component_ids(components);
  for (std::size_t i = 0; i < n; ++i) sample_ids[i] = detail::padded('S', i, n);
  for (std::size_t k = 0; k < components; ++k) component_ids[k] = detail::padded('C', k, components);
  return {CompositionDataset(std::move(sample_ids), std::move(component_ids), std::move(matrix)),
          std::move(planted)};
}

/// Header plus rows of already-formatted cells.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string(char delim = '\t') const {
    std::string out;
    auto put = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += delim;
        out += r[i];
      }
      out += '\n';
    };
    put(header);
    for (const auto& r : rows) put(r);
    return out;
  }
};

/// Writes to a sibling temporary file, then renames over the target.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace linfcomp
