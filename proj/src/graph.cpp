#include "circlecomm/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>
#include <variant>

#include "circlecomm/error.hpp"

namespace circlecomm {

const char* to_string(AdjacencyMode mode) {
  return mode == AdjacencyMode::binary ? "binary" : "count";
}

AdjacencyMode adjacency_mode_from_string(const std::string& name) {
  if (name == "binary") return AdjacencyMode::binary;
  if (name == "count") return AdjacencyMode::count;
  throw std::invalid_argument("unknown adjacency mode '" + name + "'");
}

Graph::Graph(std::size_t n, AdjacencyMode mode)
    : n_(n), mode_(mode), adj_(n * n, 0), nbrs_(n), origin_(n) {
  for (Vertex i = 0; i < n; ++i) origin_[i] = i;
}

void Graph::add_edge(Vertex i, Vertex j, std::uint32_t w) {
  if (i >= n_ || j >= n_) throw std::out_of_range("edge endpoint out of range");
  if (i == j) throw std::invalid_argument("self-loops are not allowed");
  if (w == 0) return;
  auto& a = adj_[i * n_ + j];
  if (a == 0) {
    nbrs_[i].push_back(j);
    nbrs_[j].push_back(i);
  }
  a = mode_ == AdjacencyMode::binary ? 1 : a + w;
  adj_[j * n_ + i] = a;
}

std::uint64_t Graph::strength(Vertex i) const {
  std::uint64_t s = 0;
  for (Vertex j : nbrs_[i]) s += weight(i, j);
  return s;
}

std::uint64_t Graph::total_weight() const {
  std::uint64_t s = 0;
  for (Vertex i = 0; i < n_; ++i) s += strength(i);
  return s / 2;
}

std::size_t Graph::edge_count() const {
  std::size_t s = 0;
  for (const auto& nb : nbrs_) s += nb.size();
  return s / 2;
}

void Graph::set_origin(std::vector<Vertex> origin) {
  if (origin.size() != n_) throw std::invalid_argument("origin size mismatch");
  origin_ = std::move(origin);
}

void Graph::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != n_)
    throw std::invalid_argument("labels must cover every vertex");
  labels_ = std::move(labels);
}

std::string Graph::label(Vertex i) const {
  return labels_.empty() ? std::to_string(i) : labels_[i];
}

void Graph::set_ground_truth(std::vector<int> truth) {
  if (truth.size() != n_)
    throw std::invalid_argument("ground truth must cover every vertex");
  truth_ = std::move(truth);
}

// ---------------------------------------------------------------------------
// Edge lists

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Graph parse_edge_list(std::istream& in, AdjacencyMode mode) {
  struct Edge {
    Vertex u, v;
    std::uint32_t w;
  };
  std::unordered_map<std::string, Vertex> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view tok) {
    auto [it, inserted] = ids.try_emplace(std::string(tok), labels.size());
    if (inserted) labels.emplace_back(tok);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks.size() != 2 && toks.size() != 3)
      throw ParseError("expected 'u v [weight]'", lineno);
    std::uint32_t w = 1;
    if (toks.size() == 3) {
      long long parsed = 0;
      auto [p, ec] = std::from_chars(toks[2].data(), toks[2].data() + toks[2].size(), parsed);
      if (ec != std::errc{} || p != toks[2].data() + toks[2].size())
        throw ParseError("weight is not an integer", lineno);
      if (parsed <= 0) throw ParseError("weight must be a positive integer", lineno);
      if (parsed > UINT32_MAX) throw ParseError("weight too large", lineno);
      w = static_cast<std::uint32_t>(parsed);
    }
    Vertex u = intern(toks[0]);
    Vertex v = intern(toks[1]);
    if (u != v) edges.push_back({u, v, w});
  }

  Graph g(labels.size(), mode);
  for (const auto& e : edges) g.add_edge(e.u, e.v, e.w);
  g.set_labels(std::move(labels));
  return g;
}

// ---------------------------------------------------------------------------
// GML

namespace {

struct GmlList;
struct GmlValue {
  std::variant<double, std::string, std::shared_ptr<GmlList>> v;
  std::size_t line = 0;
};
struct GmlList {
  std::vector<std::pair<std::string, GmlValue>> items;
};

class GmlLexer {
 public:
  explicit GmlLexer(std::string text) : s_(std::move(text)) {}

  enum class Kind { key, number, string, open, close, end };
  struct Token {
    Kind kind;
    std::string text;
    std::size_t line;
  };

  Token next() {
    skip();
    if (i_ >= s_.size()) return {Kind::end, {}, line_};
    char c = s_[i_];
    if (c == '[') return ++i_, Token{Kind::open, "[", line_};
    if (c == ']') return ++i_, Token{Kind::close, "]", line_};
    if (c == '"') {
      std::size_t start_line = line_;
      std::size_t j = ++i_;
      while (j < s_.size() && s_[j] != '"') {
        if (s_[j] == '\n') ++line_;
        ++j;
      }
      if (j >= s_.size()) throw ParseError("unterminated string", start_line);
      Token t{Kind::string, s_.substr(i_, j - i_), start_line};
      i_ = j + 1;
      return t;
    }
    std::size_t j = i_;
    while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) &&
           s_[j] != '[' && s_[j] != ']' && s_[j] != '"')
      ++j;
    std::string word = s_.substr(i_, j - i_);
    i_ = j;
    bool numeric = !word.empty() &&
                   (std::isdigit(static_cast<unsigned char>(word[0])) || word[0] == '-' ||
                    word[0] == '+' || word[0] == '.');
    return {numeric ? Kind::number : Kind::key, word, line_};
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '#' && (i_ == 0 || s_[i_ - 1] == '\n')) {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  std::string s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
};

// Parses key/value pairs until `]` (nested) or end of input (top level).
std::shared_ptr<GmlList> parse_gml_list(GmlLexer& lex, bool nested) {
  auto list = std::make_shared<GmlList>();
  for (;;) {
    auto t = lex.next();
    if (t.kind == GmlLexer::Kind::end) {
      if (nested) throw ParseError("unexpected end of document inside a block", t.line);
      return list;
    }
    if (t.kind == GmlLexer::Kind::close) {
      if (!nested) throw ParseError("unbalanced ']'", t.line);
      return list;
    }
    if (t.kind != GmlLexer::Kind::key) throw ParseError("expected a key, got '" + t.text + "'", t.line);
    auto v = lex.next();
    GmlValue value;
    value.line = t.line;
    switch (v.kind) {
      case GmlLexer::Kind::number: {
        try {
          value.v = std::stod(v.text);
        } catch (const std::exception&) {
          throw ParseError("bad number '" + v.text + "'", v.line);
        }
        break;
      }
      case GmlLexer::Kind::string:
        value.v = v.text;
        break;
      case GmlLexer::Kind::open:
        value.v = parse_gml_list(lex, true);
        break;
      default:
        throw ParseError("missing value for key '" + t.text + "'", t.line);
    }
    list->items.emplace_back(std::move(t.text), std::move(value));
  }
}

const GmlValue* find_key(const GmlList& list, std::string_view key) {
  for (const auto& [k, v] : list.items)
    if (k == key) return &v;
  return nullptr;
}

long long as_id(const GmlValue& v, std::string_view what) {
  if (const double* d = std::get_if<double>(&v.v)) return static_cast<long long>(*d);
  throw ParseError(std::string(what) + " must be numeric", v.line);
}

std::string as_text(const GmlValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  if (const double* d = std::get_if<double>(&v.v)) {
    std::ostringstream os;
    os << *d;
    return os.str();
  }
  throw ParseError("expected a scalar value", v.line);
}

}  // namespace

Graph parse_gml(std::istream& in, AdjacencyMode mode) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  GmlLexer lex(std::move(text));
  auto doc = parse_gml_list(lex, false);
  const GmlValue* graph_v = find_key(*doc, "graph");
  if (!graph_v || !std::holds_alternative<std::shared_ptr<GmlList>>(graph_v->v))
    throw ParseError("no graph block");
  const auto& graph = *std::get<std::shared_ptr<GmlList>>(graph_v->v);

  std::map<long long, Vertex> index;
  std::vector<std::string> labels;
  std::vector<std::string> values;
  std::size_t with_value = 0;
  struct Edge {
    long long s, t;
    std::size_t line;
  };
  std::vector<Edge> edges;

  for (const auto& [key, val] : graph.items) {
    const auto* block = std::get_if<std::shared_ptr<GmlList>>(&val.v);
    if (key == "node") {
      if (!block) throw ParseError("node must be a block", val.line);
      const GmlValue* id = find_key(**block, "id");
      if (!id) throw ParseError("node without id", val.line);
      long long nid = as_id(*id, "node id");
      if (!index.try_emplace(nid, labels.size()).second)
        throw ParseError("duplicate node id " + std::to_string(nid), id->line);
      const GmlValue* label = find_key(**block, "label");
      labels.push_back(label ? as_text(*label) : std::to_string(nid));
      const GmlValue* value = find_key(**block, "value");
      values.push_back(value ? as_text(*value) : std::string{});
      with_value += value != nullptr;
    } else if (key == "edge") {
      if (!block) throw ParseError("edge must be a block", val.line);
      const GmlValue* s = find_key(**block, "source");
      const GmlValue* t = find_key(**block, "target");
      if (!s || !t) throw ParseError("edge without source/target", val.line);
      edges.push_back({as_id(*s, "source"), as_id(*t, "target"), val.line});
    }
  }
  if (labels.empty()) throw ParseError("no nodes");

  Graph g(labels.size(), mode);
  for (const auto& e : edges) {
    auto s = index.find(e.s);
    auto t = index.find(e.t);
    if (s == index.end() || t == index.end())
      throw ParseError("edge references unknown node", e.line);
    if (s->second != t->second) g.add_edge(s->second, t->second);
  }
  g.set_labels(std::move(labels));
  if (with_value == values.size()) {
    std::map<std::string, int> ids;
    std::vector<int> truth;
    truth.reserve(values.size());
    for (const auto& v : values) {
      auto [it, _] = ids.try_emplace(v, static_cast<int>(ids.size()));
      truth.push_back(it->second);
    }
    g.set_ground_truth(std::move(truth));
  } else if (with_value > 0) {
    throw ParseError("'value' present on some nodes only");
  }
  return g;
}

// ---------------------------------------------------------------------------
// JSON / file dispatch

Graph graph_from_json(const nlohmann::json& doc) {
  try {
    auto n = doc.at("n").get<std::size_t>();
    Graph g(n, adjacency_mode_from_string(doc.value("mode", std::string("binary"))));
    for (const auto& e : doc.at("edges")) {
      auto u = e.at(0).get<Vertex>();
      auto v = e.at(1).get<Vertex>();
      auto w = e.size() > 2 ? e.at(2).get<std::uint32_t>() : 1u;
      if (u >= n || v >= n) throw ParseError("edge endpoint out of range");
      if (u != v) g.add_edge(u, v, w);
    }
    if (doc.contains("labels") && !doc["labels"].is_null())
      g.set_labels(doc["labels"].get<std::vector<std::string>>());
    if (doc.contains("ground_truth") && !doc["ground_truth"].is_null())
      g.set_ground_truth(doc["ground_truth"].get<std::vector<int>>());
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid graph document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid graph document: ") + e.what());
  }
}

Graph read_graph(const std::filesystem::path& path, AdjacencyMode mode) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".gml") return parse_gml(in, mode);
  if (ext == ".json") {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what());
    }
    return graph_from_json(doc);
  }
  return parse_edge_list(in, mode);
}

// ---------------------------------------------------------------------------
// Derived graphs

Graph induced_subgraph(const Graph& g, std::span<const Vertex> vertices) {
  if (vertices.empty()) throw std::invalid_argument("induced_subgraph: empty vertex set");
  std::vector<char> seen(g.size(), 0);
  for (Vertex v : vertices) {
    if (v >= g.size()) throw std::out_of_range("induced_subgraph: unknown vertex");
    if (seen[v]++) throw std::invalid_argument("induced_subgraph: duplicate vertex");
  }
  const std::size_t m = vertices.size();
  Graph sub(m, g.mode());
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (auto w = g.weight(vertices[a], vertices[b])) sub.add_edge(a, b, w);

  std::vector<Vertex> origin(m);
  for (std::size_t a = 0; a < m; ++a) origin[a] = g.origin()[vertices[a]];
  sub.set_origin(std::move(origin));
  if (!g.labels().empty()) {
    std::vector<std::string> labels(m);
    for (std::size_t a = 0; a < m; ++a) labels[a] = g.labels()[vertices[a]];
    sub.set_labels(std::move(labels));
  }
  if (g.ground_truth()) {
    std::vector<int> truth(m);
    for (std::size_t a = 0; a < m; ++a) truth[a] = (*g.ground_truth())[vertices[a]];
    sub.set_ground_truth(std::move(truth));
  }
  return sub;
}

Graph graph_from_impulses(std::span<const ImpulseTrace> traces, std::size_t n,
                          AdjacencyMode output_mode, BroadcastEdges broadcast) {
  Graph g(n, output_mode);
  auto check = [n](Vertex v) {
    if (v >= n) throw std::out_of_range("impulse references vertex outside the graph");
  };
  for (const auto& t : traces) {
    if (t.kind == ImpulseKind::sequential) {
      for (auto [a, b] : t.contacts) {
        check(a);
        check(b);
        if (a != b) g.add_edge(a, b);
      }
    } else {
      check(t.center);
      for (Vertex r : t.recipients) check(r);
      for (Vertex r : t.recipients) g.add_edge(t.center, r);
      if (broadcast == BroadcastEdges::clique)
        for (std::size_t a = 0; a < t.recipients.size(); ++a)
          for (std::size_t b = a + 1; b < t.recipients.size(); ++b)
            g.add_edge(t.recipients[a], t.recipients[b]);
    }
  }
  return g;
}

nlohmann::json to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (Vertex i = 0; i < g.size(); ++i)
    for (Vertex j = i + 1; j < g.size(); ++j)
      if (auto w = g.weight(i, j)) edges.push_back({i, j, w});
  nlohmann::json doc{{"n", g.size()}, {"mode", to_string(g.mode())}, {"edges", edges}};
  doc["labels"] = g.labels().empty() ? nlohmann::json(nullptr) : nlohmann::json(g.labels());
  doc["ground_truth"] =
      g.ground_truth() ? nlohmann::json(*g.ground_truth()) : nlohmann::json(nullptr);
  return doc;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (Vertex i = 0; i < g.size(); ++i)
    for (Vertex j = i + 1; j < g.size(); ++j)
      if (auto w = g.weight(i, j)) {
        out << g.label(i) << ' ' << g.label(j);
        if (g.mode() == AdjacencyMode::count) out << ' ' << w;
        out << '\n';
      }
}

void write_gml(std::ostream& out, const Graph& g) {
  out << "graph [\n";
  for (Vertex i = 0; i < g.size(); ++i) {
    out << "  node [\n    id " << i << "\n    label \"" << g.label(i) << "\"\n";
    if (g.ground_truth()) out << "    value \"" << (*g.ground_truth())[i] << "\"\n";
    out << "  ]\n";
  }
  for (Vertex i = 0; i < g.size(); ++i)
    for (Vertex j = i + 1; j < g.size(); ++j)
      for (std::uint32_t w = g.weight(i, j), c = 0; c < w; ++c)
        out << "  edge [\n    source " << i << "\n    target " << j << "\n  ]\n";
  out << "]\n";
}

void write_dot(std::ostream& out, const Graph& g) {
  out << "graph G {\n";
  for (Vertex i = 0; i < g.size(); ++i) {
    out << "  " << i << " [label=\"" << g.label(i) << "\"";
    if (g.ground_truth()) out << ", group=" << (*g.ground_truth())[i];
    out << "];\n";
  }
  for (Vertex i = 0; i < g.size(); ++i)
    for (Vertex j = i + 1; j < g.size(); ++j)
      if (auto w = g.weight(i, j)) {
        out << "  " << i << " -- " << j;
        if (g.mode() == AdjacencyMode::count) out << " [weight=" << w << "]";
        out << ";\n";
      }
  out << "}\n";
}

}  // namespace circlecomm
