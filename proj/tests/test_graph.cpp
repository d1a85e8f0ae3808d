#include "doctest.h"
#include "oversmooth/errors.hpp"
#include "oversmooth/graph.hpp"
#include "oversmooth/spectral.hpp"
#include "support.hpp"

#include <cmath>

using namespace oversmooth;

TEST_CASE("edge list basics") {
  const auto g = parse_edge_list("0 1\n1 2");
  CHECK(g.size() == 3);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0] == Edge{0, 1, 1.0});
  CHECK(g.edges()[1] == Edge{1, 2, 1.0});

  const auto empty = parse_edge_list("");
  CHECK(empty.size() == 0);
  CHECK(empty.edge_count() == 0);

  CHECK_THROWS_AS(parse_edge_list("0 1 -2"), DomainError);
}

TEST_CASE("edge list comments, weights and symmetrization") {
  const auto g = parse_edge_list("# header\n\n2 0 0.5\n0 2 0.5\n1 1\n");
  CHECK(g.size() == 3);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0] == Edge{0, 2, 0.5});
  CHECK(g.edges()[1] == Edge{1, 1, 1.0});
  CHECK_THROWS_AS(parse_edge_list("0 1 1\n1 0 2"), DomainError);
}

TEST_CASE("edge list errors carry the line") {
  try {
    parse_edge_list("0 1\n0 x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_edge_list("0 1 2 3"), ParseError);
  CHECK_THROWS_AS(parse_edge_list("0"), ParseError);
}

TEST_CASE("feature csv") {
  const auto x = parse_feature_csv("1,0\n0,1", 2);
  CHECK(x.isApprox(Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(parse_feature_csv("1,0\n0", 2), ParseError);
  CHECK_THROWS_AS(parse_feature_csv("1,2,3", 2), ParseError);
  CHECK_THROWS_AS(parse_feature_csv("1,a\n0,1", 2), ParseError);
  CHECK(parse_feature_csv("1.5,-2\n3,4\n\n", 2)(0, 1) == -2.0);
}

TEST_CASE("deterministic generators") {
  const auto star = gen_graph(parse_generator_spec("star:4"), 0);
  CHECK(star.edges() == std::vector<Edge>{{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  const auto path = gen_graph(parse_generator_spec("path:3"), 0);
  CHECK(path.edges() == std::vector<Edge>{{0, 1, 1}, {1, 2, 1}});
  const auto cycle = gen_graph(parse_generator_spec("cycle:5"), 0);
  CHECK(cycle.edge_count() == 5);
  CHECK(cycle.is_regular());
  const auto reg = gen_graph(parse_generator_spec("regular:8,3"), 0);
  CHECK(reg.is_regular());
  CHECK(reg.degrees()(0) == 3.0);
  CHECK_THROWS_AS(gen_graph(parse_generator_spec("regular:7,3"), 0), DomainError);
}

TEST_CASE("random generators are seeded") {
  const auto spec = parse_generator_spec("er:50,0.2");
  CHECK(gen_graph(spec, 11).edges() == gen_graph(spec, 11).edges());
  CHECK(gen_graph(spec, 11).edges() != gen_graph(spec, 12).edges());
  CHECK_THROWS_AS(gen_graph(parse_generator_spec("er:5,1.5"), 0), DomainError);
  CHECK_THROWS_AS(gen_graph(parse_generator_spec("sbm:3+3,0.5,-0.1"), 0), DomainError);

  // SBM block structure: with pout = 0 no edge crosses blocks.
  const auto sbm = gen_graph(parse_generator_spec("sbm:5+4,0.9,0"), 3);
  for (const auto& e : sbm.edges()) CHECK((e.u < 5) == (e.v < 5));

  const auto lcc = gen_graph(parse_generator_spec("er:60,0.03/lcc"), 0);
  CHECK(lcc.is_connected());
  CHECK(lcc.size() <= 60);
}

TEST_CASE("generator spec errors") {
  CHECK(to_string(parse_generator_spec("sbm:10+10,0.5,0.1")) == "sbm:10+10,0.5,0.1");
  CHECK(parse_generator_spec("er:200,0.05/lcc").largest_component);
  CHECK_THROWS_AS(parse_generator_spec("wheel:5"), ParseError);
  CHECK_THROWS_AS(parse_generator_spec("er:5"), ParseError);
}

TEST_CASE("operators") {
  const auto path = gen_graph(parse_generator_spec("path:3"), 0);
  const auto sym = build_operator(path, OperatorKind::SymNormalized);
  const double h = 1.0 / std::sqrt(2.0);
  Matrix expect(3, 3);
  expect << 0, h, 0, h, 0, h, 0, h, 0;
  CHECK((sym.data() - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(sym.symmetric());

  // Hand-built D^{-1/2} A D^{-1/2} as a second oracle.
  const Matrix a = testing::dense_adjacency(path);
  const Vector d = a.rowwise().sum();
  const Matrix brute = d.cwiseSqrt().cwiseInverse().asDiagonal() * a *
                       d.cwiseSqrt().cwiseInverse().asDiagonal();
  CHECK((sym.data() - brute).norm() < 1e-15);

  const auto star = gen_graph(parse_generator_spec("star:4"), 0);
  const auto adj = build_operator(star, OperatorKind::Adjacency);
  CHECK(adj.data().row(0) == Eigen::RowVector4d(0, 1, 1, 1));

  const auto rs = build_operator(star, OperatorKind::RowStochastic);
  CHECK((rs.data().rowwise().sum() - Vector::Ones(4)).norm() < 1e-15);
  CHECK(!rs.symmetric());

  const Graph isolated(3, {{0, 1, 1}});
  try {
    build_operator(isolated, OperatorKind::SymNormalized);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("node 2") != std::string::npos);
  }
  CHECK_THROWS_AS(build_operator(star, OperatorKind::Centered), ContractError);
}

TEST_CASE("center operator") {
  const auto k3 = gen_graph(parse_generator_spec("cycle:3"), 0);
  const auto a = build_operator(k3, OperatorKind::Adjacency);
  CHECK(center_operator(a, 0.0).data() == a.data());
  const auto c = center_operator(a, 1.0);
  CHECK(c.kind() == OperatorKind::Centered);
  CHECK(std::abs(c.data().trace() - (-2.0)) < 1e-14);
  CHECK(c.data().colwise().sum().cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(center_operator(c, 1.0), ContractError);

  const auto star = build_operator(gen_graph(parse_generator_spec("star:5"), 0), OperatorKind::Adjacency);
  CHECK(!center_operator(star, 1.0).symmetric());
}

TEST_CASE("components") {
  const Graph g(6, {{0, 1, 1}, {2, 3, 1}, {3, 4, 1}});
  CHECK(!g.is_connected());
  CHECK(g.components() == std::vector<std::size_t>{0, 0, 1, 1, 1, 2});
  Matrix x(6, 1);
  x << 0, 1, 2, 3, 4, 5;
  const auto lcc = g.with_features(x).largest_component();
  CHECK(lcc.size() == 3);
  CHECK(lcc.edges() == std::vector<Edge>{{0, 1, 1}, {1, 2, 1}});
  REQUIRE(lcc.features());
  CHECK((*lcc.features())(0, 0) == 2.0);
  CHECK_THROWS_AS(Graph(2, {{0, 2, 1}}), DomainError);
  CHECK_THROWS_AS(Graph(2, {{0, 1, std::nan("")}}), DomainError);
}

TEST_CASE("property: operator invariants on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = 3 + static_cast<std::size_t>(uniform01(rng) * 12);
    const auto g = testing::random_connected_graph(n, 0.3, rng, trial % 2 == 1);
    const auto sym = build_operator(g, OperatorKind::SymNormalized);
    CHECK(sym.spectral_radius() <= 1.0 + 1e-9);

    // Dominant pair is (1, D^{1/2}1 / ||D^{1/2}1||).
    const auto es = symmetric_eig(sym);
    Vector d = g.degrees().cwiseSqrt();
    d /= d.norm();
    CHECK(std::abs(es.values(0) - 1.0) < 1e-8);
    CHECK(std::abs(std::abs(es.vectors.col(0).dot(d)) - 1.0) < 1e-8);

    // Purity and the centering identity.
    CHECK(build_operator(g, OperatorKind::SymNormalized).data() == sym.data());
    const double tau = uniform01(rng) * 2.0;
    const auto c = center_operator(sym, tau);
    const auto nn = static_cast<double>(n);
    const Matrix p = Matrix::Constant(static_cast<Index>(n), static_cast<Index>(n), 1.0 / nn);
    const Matrix back = c.data() + tau * (p * sym.data());
    CHECK((back - sym.data()).cwiseAbs().maxCoeff() < 1e-12);
  }
}
