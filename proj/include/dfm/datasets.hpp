#pragma once

// Real-network case studies (Karate club, Polbooks) and plain-text I/O for
// matrices and files.

#include "dfm/core.hpp"
#include "dfm/gml.hpp"
#include "dfm/model.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifndef DFM_DEFAULT_DATA_DIR
#define DFM_DEFAULT_DATA_DIR "data"
#endif

namespace dfm {

struct Dataset {
  std::string name;
  Matrix adjacency;  // symmetric, 0/1, zero diagonal
  CommunityLabels truth;
  int k = 0;
  std::vector<long long> node_ids;  // GML id of each row
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// $DFM_DATA_DIR if set, else the data/ directory of the source tree.
inline std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("DFM_DATA_DIR"); env && *env) return env;
  return DFM_DEFAULT_DATA_DIR;
}

/// Lines of `node_id label`; '#' starts a comment.
inline std::map<long long, int> parse_label_file(const std::string& text) {
  std::map<long long, int> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long id = 0;
    int label = 0;
    if (!(fields >> id)) continue;
    std::string extra;
    if (!(fields >> label) || (fields >> extra)) {
      throw ParseError("label file line " + std::to_string(line_no) +
                       ": expected 'node_id label'");
    }
    if (!out.emplace(id, label).second) {
      throw ParseError("label file line " + std::to_string(line_no) + ": duplicate node " +
                       std::to_string(id));
    }
  }
  return out;
}

namespace detail {
inline Dataset dataset_from_graph(std::string name, const GmlGraph& g,
                                  const std::vector<int>& one_based, int k) {
  Dataset d;
  d.name = std::move(name);
  d.adjacency = gml_adjacency(g);
  d.truth = CommunityLabels::from_one_based(one_based, k);
  d.k = k;
  for (const auto& n : g.nodes) d.node_ids.push_back(n.id);
  return d;
}
}  // namespace detail

inline constexpr Index kKarateNodes = 34;

/// Karate club with the two-faction split from the bundled label fixture.
inline Dataset load_karate(const GmlGraph& g, const std::string& label_text) {
  if (static_cast<Index>(g.nodes.size()) != kKarateNodes) {
    throw ValidationError("karate graph must have 34 nodes, found " +
                          std::to_string(g.nodes.size()));
  }
  const auto labels = parse_label_file(label_text);
  std::vector<int> ids;
  for (const auto& node : g.nodes) {
    auto it = labels.find(node.id);
    if (it == labels.end()) {
      throw ValidationError("karate label fixture has no entry for node " +
                            std::to_string(node.id));
    }
    if (it->second != 1 && it->second != 2) {
      throw ValidationError("karate labels must be 1 or 2");
    }
    ids.push_back(it->second);
  }
  return detail::dataset_from_graph("karate", g, ids, 2);
}

inline constexpr Index kPolbooksNodes = 105;

/// Polbooks with the Neutral books and their edges removed; Conservative is
/// community 1, Liberal community 2. Isolated nodes are kept.
inline Dataset load_polbooks(const GmlGraph& g) {
  GmlGraph kept;
  kept.directed = g.directed;
  std::vector<int> ids;
  std::map<long long, bool> keep;
  for (const auto& node : g.nodes) {
    const auto value = node.attribute("value");
    if (!value) {
      throw ValidationError("polbooks node " + std::to_string(node.id) +
                            " has no value attribute");
    }
    int label = 0;
    if (*value == "c") {
      label = 1;
    } else if (*value == "l") {
      label = 2;
    } else if (*value != "n") {
      throw ValidationError("polbooks node " + std::to_string(node.id) +
                            " has unknown value '" + *value + "'");
    }
    keep[node.id] = label != 0;
    if (label != 0) {
      kept.nodes.push_back(node);
      ids.push_back(label);
    }
  }
  for (const auto& e : g.edges) {
    if (keep.at(e.source) && keep.at(e.target)) kept.edges.push_back(e);
  }
  return detail::dataset_from_graph("polbooks", kept, ids, 2);
}

inline Dataset load_karate_from_dir(const std::filesystem::path& dir) {
  return load_karate(parse_gml(read_text_file(dir / "karate.gml")),
                     read_text_file(dir / "karate_labels.txt"));
}

inline Dataset load_polbooks_from_dir(const std::filesystem::path& dir) {
  return load_polbooks(parse_gml(read_text_file(dir / "polbooks.gml")));
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

/// Whitespace-separated rows, one matrix row per line.
inline std::string format_matrix(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) row.push_back(parse_double(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ParseError("matrix row " + std::to_string(i + 1) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " +
                       std::to_string(rows.front().size()));
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace dfm
