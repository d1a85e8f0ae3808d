#include "oversmooth/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <iterator>
#include <map>
#include <numeric>
#include <sstream>

#include "oversmooth/errors.hpp"

namespace oversmooth {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_size(std::string_view tok, std::size_t& out) {
  if (tok.empty() || tok.front() == '-' || tok.front() == '+') return false;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_real(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges,
             std::optional<FeatureMatrix> features)
    : n_(n), features_(std::move(features)) {
  for (auto& e : edges) {
    if (e.u >= n || e.v >= n)
      throw DomainError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                        ") out of range for n=" + std::to_string(n));
    if (!std::isfinite(e.w) || e.w < 0.0)
      throw DomainError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                        ") has invalid weight");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
      if (edges_.back().w != e.w)
        throw DomainError("conflicting weights for edge (" + std::to_string(e.u) + "," +
                          std::to_string(e.v) + ")");
      continue;
    }
    edges_.push_back(e);
  }
  // Zero weights carry no connectivity.
  std::erase_if(edges_, [](const Edge& e) { return e.w == 0.0; });
  if (features_ && static_cast<std::size_t>(features_->rows()) != n)
    throw ContractError("feature matrix has " + std::to_string(features_->rows()) +
                        " rows, graph has " + std::to_string(n) + " nodes");
}

Graph Graph::with_features(FeatureMatrix features) const {
  return Graph(n_, edges_, std::move(features));
}

Matrix Graph::adjacency() const {
  const auto n = static_cast<Index>(n_);
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : edges_) {
    a(static_cast<Index>(e.u), static_cast<Index>(e.v)) = e.w;
    a(static_cast<Index>(e.v), static_cast<Index>(e.u)) = e.w;
  }
  return a;
}

Vector Graph::degrees() const {
  Vector d = Vector::Zero(static_cast<Index>(n_));
  for (const auto& e : edges_) {
    d(static_cast<Index>(e.u)) += e.w;
    if (e.u != e.v) d(static_cast<Index>(e.v)) += e.w;
  }
  return d;
}

std::vector<std::vector<std::pair<std::size_t, double>>> Graph::neighbors() const {
  std::vector<std::vector<std::pair<std::size_t, double>>> nb(n_);
  for (const auto& e : edges_) {
    nb[e.u].emplace_back(e.v, e.w);
    if (e.u != e.v) nb[e.v].emplace_back(e.u, e.w);
  }
  return nb;
}

std::vector<std::size_t> Graph::components() const {
  // Union-find with path halving.
  std::vector<std::size_t> parent(n_);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges_) {
    const auto a = find(e.u), b = find(e.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> label(n_);
  std::map<std::size_t, std::size_t> ids;
  for (std::size_t i = 0; i < n_; ++i) {
    const auto root = find(i);
    auto it = ids.find(root);
    if (it == ids.end()) it = ids.emplace(root, ids.size()).first;
    label[i] = it->second;
  }
  return label;
}

bool Graph::is_connected() const {
  const auto label = components();
  return std::all_of(label.begin(), label.end(), [](std::size_t l) { return l == 0; });
}

bool Graph::is_regular(double tol) const {
  if (n_ == 0) return true;
  const Vector d = degrees();
  return (d.array() - d(0)).abs().maxCoeff() <= tol;
}

Graph Graph::largest_component() const {
  if (n_ == 0) return *this;
  const auto label = components();
  const auto count = 1 + *std::max_element(label.begin(), label.end());
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : label) ++sizes[l];
  const auto best = static_cast<std::size_t>(
      std::distance(sizes.begin(), std::max_element(sizes.begin(), sizes.end())));
  std::vector<std::size_t> remap(n_, n_);
  std::vector<Index> keep;
  for (std::size_t i = 0; i < n_; ++i)
    if (label[i] == best) {
      remap[i] = keep.size();
      keep.push_back(static_cast<Index>(i));
    }
  std::vector<Edge> edges;
  for (const auto& e : edges_)
    if (label[e.u] == best) edges.push_back({remap[e.u], remap[e.v], e.w});
  std::optional<FeatureMatrix> feats;
  if (features_) feats = (*features_)(keep, Eigen::all);
  return Graph(keep.size(), std::move(edges), std::move(feats));
}

Graph parse_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::size_t lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tok = split_ws(body);
    if (tok.size() != 2 && tok.size() != 3)
      throw ParseError(lineno, "expected \"u v\" or \"u v w\"");
    Edge e;
    if (!parse_size(tok[0], e.u) || !parse_size(tok[1], e.v))
      throw ParseError(lineno, "node index is not a non-negative integer");
    if (tok.size() == 3) {
      if (!parse_real(tok[2], e.w)) throw ParseError(lineno, "weight is not a number");
      if (!(e.w >= 0.0) || !std::isfinite(e.w))
        throw DomainError("line " + std::to_string(lineno) + ": weight must be finite and >= 0");
    }
    n = std::max({n, e.u + 1, e.v + 1});
    edges.push_back(e);
  }
  return Graph(n, std::move(edges));
}

Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

FeatureMatrix parse_feature_csv(std::istream& in, std::size_t n) {
  auto lines = read_lines(in);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.size() != n)
    throw ParseError("expected " + std::to_string(n) + " feature rows, got " +
                     std::to_string(lines.size()));
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split_on(trim(lines[i]), ',');
    if (!rows.empty() && cells.size() != rows.front().size())
      throw ParseError(i + 1, "ragged row: expected " + std::to_string(rows.front().size()) +
                                  " cells, got " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (!parse_real(trim(cells[j]), row[j]) || !std::isfinite(row[j]))
        throw ParseError(i + 1, "cell " + std::to_string(j) + " is not a finite number");
    rows.push_back(std::move(row));
  }
  const auto k = rows.empty() ? 0 : rows.front().size();
  FeatureMatrix x(static_cast<Index>(n), static_cast<Index>(k));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return x;
}

FeatureMatrix parse_feature_csv(std::string_view text, std::size_t n) {
  std::istringstream in{std::string(text)};
  return parse_feature_csv(in, n);
}

FeatureMatrix normalize_columns(FeatureMatrix x) {
  for (Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm > 0.0) x.col(j) /= norm;
  }
  return x;
}

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError(std::string(name) + " must lie in [0,1]");
}

template <class SameBlock>
std::vector<Edge> bernoulli_edges(std::size_t n, Rng& rng, SameBlock prob) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < prob(i, j)) edges.push_back({i, j, 1.0});
  return edges;
}

struct Generate {
  Rng& rng;

  Graph operator()(const gen::ErdosRenyi& s) const {
    check_probability(s.p, "p");
    return Graph(s.n, bernoulli_edges(s.n, rng, [&](auto, auto) { return s.p; }));
  }
  Graph operator()(const gen::Sbm& s) const {
    check_probability(s.p_in, "p_in");
    check_probability(s.p_out, "p_out");
    std::vector<std::size_t> block;
    for (std::size_t b = 0; b < s.block_sizes.size(); ++b)
      block.insert(block.end(), s.block_sizes[b], b);
    return Graph(block.size(), bernoulli_edges(block.size(), rng, [&](auto i, auto j) {
                   return block[i] == block[j] ? s.p_in : s.p_out;
                 }));
  }
  Graph operator()(const gen::Path& s) const {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < s.n; ++i) edges.push_back({i, i + 1, 1.0});
    return Graph(s.n, std::move(edges));
  }
  Graph operator()(const gen::Star& s) const {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < s.n; ++i) edges.push_back({0, i, 1.0});
    return Graph(s.n, std::move(edges));
  }
  Graph operator()(const gen::Cycle& s) const {
    if (s.n < 3) throw DomainError("cycle needs at least 3 nodes");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < s.n; ++i) edges.push_back({i, (i + 1) % s.n, 1.0});
    return Graph(s.n, std::move(edges));
  }
  Graph operator()(const gen::CompleteRegular& s) const {
    if (s.d >= s.n && s.n > 0) throw DomainError("regular graph needs d < n");
    if (s.d % 2 == 1 && s.n % 2 == 1) throw DomainError("odd degree needs an even node count");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < s.n; ++i) {
      for (std::size_t off = 1; off <= s.d / 2; ++off) edges.push_back({i, (i + off) % s.n, 1.0});
      if (s.d % 2 == 1) edges.push_back({i, (i + s.n / 2) % s.n, 1.0});
    }
    return Graph(s.n, std::move(edges));
  }
};

std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Shortest form that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, x);
    if (std::strtod(tmp, nullptr) == x) return tmp;
  }
  return buf;
}

}  // namespace

Graph gen_graph(const GeneratorSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Graph g = std::visit(Generate{rng}, spec.shape);
  return spec.largest_component ? g.largest_component() : g;
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  GeneratorSpec spec;
  text = trim(text);
  constexpr std::string_view lcc = "/lcc";
  if (text.size() >= lcc.size() && text.substr(text.size() - lcc.size()) == lcc) {
    spec.largest_component = true;
    text.remove_suffix(lcc.size());
  }
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("generator spec \"" + std::string(text) + "\" lacks ':'");
  const auto kind = text.substr(0, colon);
  const auto args = split_on(text.substr(colon + 1), ',');
  auto bad = [&]() {
    return ParseError("malformed generator spec \"" + std::string(text) + "\"");
  };
  auto size_arg = [&](std::string_view tok) {
    std::size_t v = 0;
    if (!parse_size(trim(tok), v)) throw bad();
    return v;
  };
  auto real_arg = [&](std::string_view tok) {
    double v = 0;
    if (!parse_real(trim(tok), v)) throw bad();
    return v;
  };
  if (kind == "er") {
    if (args.size() != 2) throw bad();
    spec.shape = gen::ErdosRenyi{size_arg(args[0]), real_arg(args[1])};
  } else if (kind == "sbm") {
    if (args.size() != 3) throw bad();
    gen::Sbm s;
    for (auto b : split_on(args[0], '+')) s.block_sizes.push_back(size_arg(b));
    s.p_in = real_arg(args[1]);
    s.p_out = real_arg(args[2]);
    spec.shape = s;
  } else if (kind == "path" || kind == "star" || kind == "cycle") {
    if (args.size() != 1) throw bad();
    const auto n = size_arg(args[0]);
    if (kind == "path") spec.shape = gen::Path{n};
    else if (kind == "star") spec.shape = gen::Star{n};
    else spec.shape = gen::Cycle{n};
  } else if (kind == "regular") {
    if (args.size() != 2) throw bad();
    spec.shape = gen::CompleteRegular{size_arg(args[0]), size_arg(args[1])};
  } else {
    throw ParseError("unknown generator \"" + std::string(kind) + "\"");
  }
  return spec;
}

std::string to_string(const GeneratorSpec& spec) {
  struct Show {
    std::string operator()(const gen::ErdosRenyi& s) const {
      return "er:" + std::to_string(s.n) + "," + fmt_real(s.p);
    }
    std::string operator()(const gen::Sbm& s) const {
      std::string out = "sbm:";
      for (std::size_t i = 0; i < s.block_sizes.size(); ++i)
        out += (i ? "+" : "") + std::to_string(s.block_sizes[i]);
      return out + "," + fmt_real(s.p_in) + "," + fmt_real(s.p_out);
    }
    std::string operator()(const gen::Path& s) const { return "path:" + std::to_string(s.n); }
    std::string operator()(const gen::Star& s) const { return "star:" + std::to_string(s.n); }
    std::string operator()(const gen::Cycle& s) const { return "cycle:" + std::to_string(s.n); }
    std::string operator()(const gen::CompleteRegular& s) const {
      return "regular:" + std::to_string(s.n) + "," + std::to_string(s.d);
    }
  };
  return std::visit(Show{}, spec.shape) + (spec.largest_component ? "/lcc" : "");
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Adjacency: return "adjacency";
    case OperatorKind::SymNormalized: return "symnorm";
    case OperatorKind::RowStochastic: return "rowstoch";
    case OperatorKind::Centered: return "centered";
  }
  return "?";
}

OperatorKind parse_operator_kind(std::string_view text) {
  for (auto k : {OperatorKind::Adjacency, OperatorKind::SymNormalized,
                 OperatorKind::RowStochastic, OperatorKind::Centered})
    if (to_string(k) == text) return k;
  throw ParseError("unknown operator kind \"" + std::string(text) +
                   "\" (adjacency|symnorm|rowstoch|centered)");
}

namespace {
bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}
}  // namespace

OperatorMatrix::OperatorMatrix(Matrix data, OperatorKind kind, double tau)
    : data_(std::move(data)), kind_(kind), tau_(tau) {
  if (data_.rows() != data_.cols()) throw ContractError("operator must be square");
  if (!data_.allFinite()) throw ContractError("operator has non-finite entries");
  symmetric_ = data_.size() == 0 || is_symmetric(data_, 1e-12);
  if ((kind_ == OperatorKind::Adjacency || kind_ == OperatorKind::SymNormalized) && !symmetric_)
    throw ContractError(std::string(to_string(kind_)) + " operator must be symmetric");
  if (kind_ != OperatorKind::Centered && data_.size() > 0 && data_.minCoeff() < 0.0)
    throw ContractError(std::string(to_string(kind_)) + " operator must be non-negative");
}

double OperatorMatrix::spectral_radius() const {
  if (data_.size() == 0) return 0.0;
  if (symmetric_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(data_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::EigenSolver<Matrix> es(data_, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

OperatorMatrix build_operator(const Graph& g, OperatorKind kind) {
  Matrix a = g.adjacency();
  if (kind == OperatorKind::Adjacency) return OperatorMatrix(std::move(a), kind);
  if (kind == OperatorKind::Centered)
    throw ContractError("use center_operator to build a centered operator");
  const Vector d = g.degrees();
  for (Index i = 0; i < d.size(); ++i)
    if (!(d(i) > 0.0))
      throw DomainError("node " + std::to_string(i) + " is isolated; cannot normalize");
  if (kind == OperatorKind::SymNormalized) {
    const Vector s = d.cwiseSqrt().cwiseInverse();
    Matrix m = s.asDiagonal() * a * s.asDiagonal();
    // Exact symmetry despite rounding in the two scalings.
    m = 0.5 * (m + m.transpose()).eval();
    return OperatorMatrix(std::move(m), kind);
  }
  return OperatorMatrix(d.cwiseInverse().asDiagonal() * a, kind);
}

OperatorMatrix center_operator(const OperatorMatrix& a, double tau) {
  if (a.kind() == OperatorKind::Centered)
    throw ContractError("operator is already centered");
  if (!std::isfinite(tau)) throw DomainError("tau must be finite");
  const Index n = a.size();
  if (n == 0 || tau == 0.0) return OperatorMatrix(a.data(), OperatorKind::Centered, tau);
  const Eigen::RowVectorXd colsum = a.data().colwise().sum();
  Matrix m = a.data();
  m.rowwise() -= (tau / static_cast<double>(n)) * colsum;
  return OperatorMatrix(std::move(m), OperatorKind::Centered, tau);
}

}  // namespace oversmooth
