#pragma once

// Reader and writer for the GML subset used by the netdata collection:
//   graph [ directed 0 node [ id 1 label "x" ] edge [ source 1 target 2 ] ]
// Unknown attributes (including nested lists) are kept verbatim.

#include "dfm/core.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dfm {

struct GmlAttribute {
  enum class Kind { Number, String, List };
  std::string key;
  Kind kind = Kind::Number;
  std::string text;                   // Number or String payload
  std::vector<GmlAttribute> children;  // List payload

  friend bool operator==(const GmlAttribute&, const GmlAttribute&) = default;
};

struct GmlNode {
  long long id = 0;
  std::vector<GmlAttribute> attributes;

  /// First attribute with this key, if it is a number or string.
  std::optional<std::string> attribute(std::string_view key) const {
    for (const auto& a : attributes) {
      if (a.key == key && a.kind != GmlAttribute::Kind::List) return a.text;
    }
    return std::nullopt;
  }

  friend bool operator==(const GmlNode&, const GmlNode&) = default;
};

struct GmlEdge {
  long long source = 0;
  long long target = 0;
  std::vector<GmlAttribute> attributes;

  friend bool operator==(const GmlEdge&, const GmlEdge&) = default;
};

struct GmlGraph {
  bool directed = false;
  std::vector<GmlAttribute> header;            // top-level entries besides graph
  std::vector<GmlAttribute> graph_attributes;  // graph-level besides node/edge/directed
  std::vector<GmlNode> nodes;
  std::vector<GmlEdge> edges;

  /// Position of each node id in `nodes`.
  std::map<long long, Index> index_of() const {
    std::map<long long, Index> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) out[nodes[i].id] = static_cast<Index>(i);
    return out;
  }

  friend bool operator==(const GmlGraph&, const GmlGraph&) = default;
};

namespace gml_detail {

struct Token {
  enum class Type { Key, Number, String, Open, Close, End };
  Type type = Type::End;
  std::string text;
  int line = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (c == '[') {
      ++pos_;
      t.type = Token::Type::Open;
    } else if (c == ']') {
      ++pos_;
      t.type = Token::Type::Close;
    } else if (c == '"') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= src_.size()) fail(t.line, "unterminated string");
      t.type = Token::Type::String;
      t.text = std::string(src_.substr(start, pos_ - start));
      ++pos_;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      t.type = Token::Type::Key;
      t.text = std::string(src_.substr(start, pos_ - start));
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
               c == '.') {
      const std::size_t start = pos_;
      ++pos_;
      while (pos_ < src_.size()) {
        const char d = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' ||
            d == 'E' || ((d == '-' || d == '+') &&
                         (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))) {
          ++pos_;
        } else {
          break;
        }
      }
      t.type = Token::Type::Number;
      t.text = std::string(src_.substr(start, pos_ - start));
      double ignored = 0.0;
      std::istringstream check(t.text);
      if (!(check >> ignored) || !check.eof()) fail(t.line, "malformed number '" + t.text + "'");
    } else {
      fail(t.line, std::string("unexpected character '") + c + "'");
    }
    return t;
  }

  [[noreturn]] static void fail(int line, const std::string& what) {
    throw ParseError("GML line " + std::to_string(line) + ": " + what);
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#' && at_line_start()) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_line_start() const {
    for (std::size_t p = pos_; p > 0; --p) {
      const char c = src_[p - 1];
      if (c == '\n') return true;
      if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

struct Located {
  GmlAttribute attr;
  int line = 0;
  std::vector<Located> kids;  // same as attr.children, with line numbers
};

// Parses `key value` pairs until `]` (nested) or end of input (top level).
inline std::vector<Located> parse_list(Lexer& lex, bool nested, int open_line) {
  std::vector<Located> out;
  while (true) {
    Token key = lex.next();
    if (key.type == Token::Type::End) {
      if (nested) Lexer::fail(key.line, "missing ']' for list opened on line " +
                                            std::to_string(open_line));
      return out;
    }
    if (key.type == Token::Type::Close) {
      if (!nested) Lexer::fail(key.line, "unmatched ']'");
      return out;
    }
    if (key.type != Token::Type::Key) Lexer::fail(key.line, "expected a key");
    Token value = lex.next();
    Located item;
    item.line = key.line;
    item.attr.key = key.text;
    switch (value.type) {
      case Token::Type::Number:
        item.attr.kind = GmlAttribute::Kind::Number;
        item.attr.text = value.text;
        break;
      case Token::Type::String:
        item.attr.kind = GmlAttribute::Kind::String;
        item.attr.text = value.text;
        break;
      case Token::Type::Open: {
        item.attr.kind = GmlAttribute::Kind::List;
        item.kids = parse_list(lex, true, value.line);
        for (const auto& child : item.kids) item.attr.children.push_back(child.attr);
        break;
      }
      default:
        Lexer::fail(value.line, "missing value for key '" + key.text + "'");
    }
    out.push_back(std::move(item));
  }
}

inline long long as_id(const GmlAttribute& a, int line) {
  if (a.kind != GmlAttribute::Kind::Number) {
    Lexer::fail(line, "'" + a.key + "' must be an integer");
  }
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(a.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != a.text.size()) Lexer::fail(line, "'" + a.key + "' must be an integer");
  return v;
}

inline void write_list(std::ostringstream& os, const std::vector<GmlAttribute>& attrs,
                       int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& a : attrs) {
    os << pad << a.key;
    switch (a.kind) {
      case GmlAttribute::Kind::Number:
        os << ' ' << a.text << '\n';
        break;
      case GmlAttribute::Kind::String:
        os << " \"" << a.text << "\"\n";
        break;
      case GmlAttribute::Kind::List:
        os << '\n' << pad << "[\n";
        write_list(os, a.children, depth + 1);
        os << pad << "]\n";
        break;
    }
  }
}

}  // namespace gml_detail

inline GmlGraph parse_gml(std::string_view text) {
  using gml_detail::Lexer;
  Lexer lex(text);
  auto top = gml_detail::parse_list(lex, false, 0);

  GmlGraph g;
  const gml_detail::Located* graph_entry = nullptr;
  for (const auto& item : top) {
    if (item.attr.key == "graph" && item.attr.kind == GmlAttribute::Kind::List) {
      if (graph_entry) Lexer::fail(item.line, "more than one graph");
      graph_entry = &item;
    } else {
      g.header.push_back(item.attr);
    }
  }
  if (!graph_entry) throw ParseError("GML: no 'graph [ ... ]' block");

  std::map<long long, int> seen;
  for (const auto& loc : graph_entry->kids) {
    const GmlAttribute& a = loc.attr;
    const int line = loc.line;
    if (a.key == "node" && a.kind == GmlAttribute::Kind::List) {
      GmlNode node;
      bool has_id = false;
      for (const auto& c : a.children) {
        if (c.key == "id" && !has_id) {
          node.id = gml_detail::as_id(c, line);
          has_id = true;
        } else {
          node.attributes.push_back(c);
        }
      }
      if (!has_id) Lexer::fail(line, "node without id");
      if (!seen.emplace(node.id, 1).second) {
        Lexer::fail(line, "duplicate node id " + std::to_string(node.id));
      }
      g.nodes.push_back(std::move(node));
    } else if (a.key == "edge" && a.kind == GmlAttribute::Kind::List) {
      GmlEdge edge;
      bool has_source = false, has_target = false;
      for (const auto& c : a.children) {
        if (c.key == "source" && !has_source) {
          edge.source = gml_detail::as_id(c, line);
          has_source = true;
        } else if (c.key == "target" && !has_target) {
          edge.target = gml_detail::as_id(c, line);
          has_target = true;
        } else {
          edge.attributes.push_back(c);
        }
      }
      if (!has_source || !has_target) Lexer::fail(line, "edge without source/target");
      g.edges.push_back(std::move(edge));
    } else if (a.key == "directed" && a.kind == GmlAttribute::Kind::Number) {
      g.directed = gml_detail::as_id(a, line) != 0;
    } else {
      g.graph_attributes.push_back(a);
    }
  }
  for (const auto& e : g.edges) {
    for (long long end : {e.source, e.target}) {
      if (!seen.count(end)) {
        throw ParseError("GML: edge " + std::to_string(e.source) + " -> " +
                         std::to_string(e.target) + " references undeclared node " +
                         std::to_string(end));
      }
    }
  }
  return g;
}

inline std::string serialize_gml(const GmlGraph& g) {
  std::ostringstream os;
  gml_detail::write_list(os, g.header, 0);
  os << "graph\n[\n";
  if (g.directed) os << "  directed 1\n";
  gml_detail::write_list(os, g.graph_attributes, 1);
  for (const auto& n : g.nodes) {
    os << "  node\n  [\n    id " << n.id << '\n';
    gml_detail::write_list(os, n.attributes, 2);
    os << "  ]\n";
  }
  for (const auto& e : g.edges) {
    os << "  edge\n  [\n    source " << e.source << "\n    target " << e.target << '\n';
    gml_detail::write_list(os, e.attributes, 2);
    os << "  ]\n";
  }
  os << "]\n";
  return os.str();
}

/// Symmetric 0/1 adjacency in node order. Multi-edges collapse to one entry
/// and self-loops are dropped.
inline Matrix gml_adjacency(const GmlGraph& g) {
  const auto index = g.index_of();
  const auto n = static_cast<Index>(g.nodes.size());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges) {
    const Index i = index.at(e.source);
    const Index j = index.at(e.target);
    if (i == j) continue;
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

}  // namespace dfm
