#pragma once

// Model files, tree edge lists, shape strings and CSV output.
//
// Model JSON:
//   {"lambda": 1.0,
//    "tree": {"d": 3, "edges": [[1, 2], [2, 3]]},
//    "alpha": {"broadcast": 0.3}            or
//    "alpha": {"edges": [[1, 2, 0.3], [2, 3, 0.5]]}}
//
// Tree text: optional "d=<n>" line, then one "u v" pair per line; '#' starts
// a comment. Without the header d is the largest label seen.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mpmrf/error.hpp"
#include "mpmrf/model.hpp"
#include "mpmrf/tree.hpp"

namespace mpmrf::io {

inline std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(ErrorCode::BadInput, "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

/// "star:<d>", "series:<d>", "chinary:<chi>:<xi>" or "example50".
inline Tree tree_from_spec(std::string_view spec) {
  if (spec == "example50") return example_tree_50();
  const auto parts = split(spec, ':');
  if (parts[0] == "star" && parts.size() == 2) return generate(Star{parse_size(parts[1], "d")});
  if (parts[0] == "series" && parts.size() == 2) return generate(Series{parse_size(parts[1], "d")});
  if (parts[0] == "chinary" && parts.size() == 3)
    return generate(ChiNary{parse_size(parts[1], "chi"), parse_size(parts[2], "xi")});
  throw Error(ErrorCode::BadInput, "unknown tree spec '" + std::string(spec) + "'");
}

inline Tree read_tree_text(std::istream& in) {
  std::size_t d = 0;
  bool have_d = false;
  std::vector<Edge> edges;
  std::string line;
  std::size_t max_label = 0;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first.rfind("d=", 0) == 0) {
      d = parse_size(std::string_view(first).substr(2), "d");
      have_d = true;
      continue;
    }
    std::string second, extra;
    if (!(fields >> second) || (fields >> extra))
      throw Error(ErrorCode::BadInput, "tree line must hold two labels: '" + line + "'");
    const Vertex u = parse_size(first, "vertex"), v = parse_size(second, "vertex");
    max_label = std::max({max_label, u, v});
    edges.emplace_back(u, v);
  }
  if (!have_d) d = edges.empty() ? 1 : max_label;
  return Tree::build(d, edges);
}

inline Tree read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path);
  return read_tree_text(in);
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    const double lambda = j.at("lambda").get<double>();
    const auto& jt = j.at("tree");
    std::vector<Edge> edges;
    for (const auto& e : jt.at("edges")) edges.emplace_back(e.at(0).get<Vertex>(), e.at(1).get<Vertex>());
    Tree tree = Tree::build(jt.at("d").get<std::size_t>(), edges);
    const auto& ja = j.at("alpha");
    if (ja.contains("broadcast")) return new_model(std::move(tree), lambda, ja.at("broadcast").get<double>());
    std::vector<EdgeAlpha> entries;
    for (const auto& e : ja.at("edges"))
      entries.push_back({e.at(0).get<Vertex>(), e.at(1).get<Vertex>(), e.at(2).get<double>()});
    return new_model(std::move(tree), lambda, entries);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::BadInput, std::string("model json: ") + ex.what());
  }
}

inline Model read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path);
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorCode::BadInput, std::string("model json: ") + ex.what());
  }
}

inline nlohmann::json model_to_json(const Model& model) {
  nlohmann::json edges = nlohmann::json::array(), alphas = nlohmann::json::array();
  for (std::size_t id = 0; id < model.tree().edges().size(); ++id) {
    const Edge& e = model.tree().edges()[id];
    edges.push_back({e.u, e.v});
    alphas.push_back({e.u, e.v, model.alphas()[id]});
  }
  return {{"lambda", model.lambda()},
          {"tree", {{"d", model.size()}, {"edges", edges}}},
          {"alpha", {{"edges", alphas}}}};
}

inline void write_tree_text(std::ostream& out, const Tree& tree) {
  out << "d=" << tree.size() << '\n';
  for (const Edge& e : tree.edges()) out << e.u << ' ' << e.v << '\n';
}

/// Round-trip precision for doubles.
inline std::ostream& full_precision(std::ostream& out) {
  return out << std::setprecision(std::numeric_limits<double>::max_digits10);
}

/// Minimal CSV writer: values are numeric or plain labels, never quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) { full_precision(out_); }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }

  template <typename Range>
  void row_range(const Range& cells) {
    bool first = true;
    for (const auto& c : cells) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace mpmrf::io
