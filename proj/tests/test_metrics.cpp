#include "doctest.h"
#include "oversmooth/errors.hpp"
#include "oversmooth/metrics.hpp"
#include "support.hpp"

#include <cmath>

using namespace oversmooth;

TEST_CASE("mu fixtures") {
  Vector v = Vector::Zero(3);
  v(0) = 1.0;
  Vector u = Vector::Zero(3);
  u(1) = 1.0;
  CHECK(mu(Matrix(v), v) == 0.0);
  CHECK(mu(Matrix(u), v) == doctest::Approx(1.0));
  Matrix vu(3, 2);
  vu << v, u;
  CHECK(mu(vu, v) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mu(Matrix(u), Vector(2.0 * v)), ContractError);
  CHECK_THROWS_AS(ReferenceVector(Vector::Ones(3), ReferenceKind::Custom), ContractError);
}

TEST_CASE("dirichlet fixtures") {
  const Graph edge(2, {{0, 1, 1.0}});
  Matrix x(2, 1);
  x << 1, -1;
  CHECK(dirichlet(edge, x) == doctest::Approx(2.0));
  CHECK(dirichlet(edge, 3.0 * x) == doctest::Approx(18.0));

  const auto g = gen_graph(parse_generator_spec("er:30,0.3/lcc"), 2);
  const Matrix d = g.degrees().cwiseSqrt();
  CHECK(dirichlet(g, d) < 1e-12);
  CHECK_THROWS_AS(dirichlet(Graph(3, {{0, 1, 1}}), Matrix::Ones(3, 1)), DomainError);
}

TEST_CASE("column distances") {
  const Matrix same = Matrix::Ones(4, 3);
  CHECK(col_distance(same) == 0.0);
  CHECK(col_projection_distance(same) == 0.0);

  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(col_distance(i2) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(col_projection_distance(i2) == doctest::Approx(0.5));
  CHECK(col_distance(Matrix::Ones(5, 1)) == 0.0);

  Matrix opp(3, 2);
  opp.col(0) << 1, 2, 2;
  opp.col(1) = -opp.col(0);
  CHECK(col_projection_distance(opp) == doctest::Approx(1.0));

  // Zero column convention: it contributes the other column's normalized norm.
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 4.0;
  CHECK(col_distance(z) == doctest::Approx(0.5));
}

TEST_CASE("eigenspace distance") {
  const auto a = build_operator(gen_graph(parse_generator_spec("er:10,0.5"), 1), OperatorKind::Adjacency);
  const auto es = symmetric_eig(a);
  Rng rng(1);
  CHECK(eigenspace_distance(gaussian_matrix(10, 2, 0, 1, rng), es) < 1e-8);
  CHECK(eigenspace_distance(top_k(es, 2), es, 2) < 1e-12);
  const Matrix orth = es.vectors.col(5);
  CHECK(eigenspace_distance(orth, es, 3) == doctest::Approx(0.1));
}

TEST_CASE("measure equivalence") {
  const auto g = gen_graph(parse_generator_spec("er:50,0.2"), 0);
  REQUIRE(g.is_connected());
  const auto at_d = measure_equivalence_check(g, g.degrees().cwiseSqrt());
  CHECK(at_d.mu < 1e-12);
  CHECK(at_d.energy < 1e-12);
  CHECK(at_d.zero_set_equivalent);
  const auto zero = measure_equivalence_check(g, Matrix::Zero(50, 2));
  CHECK(zero.mu == 0.0);
  CHECK(zero.energy == 0.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto rep = measure_equivalence_check(g, gaussian_matrix(50, 3, 0, 1, rng));
    CHECK(rep.zero_set_equivalent);
    CHECK(rep.bounds_hold);
    CHECK(rep.unit_upper_bound);
    CHECK(rep.energy <= 2.0 * g.degrees().maxCoeff() * rep.mu);
  }
  CHECK_THROWS_AS(measure_equivalence_check(Graph(4, {{0, 1, 1}, {2, 3, 1}}), Matrix::Ones(4, 1)),
                  DomainError);
}

TEST_CASE("metric context fills every column") {
  const auto g = gen_graph(parse_generator_spec("cycle:6"), 0);
  const auto a = build_operator(g, OperatorKind::SymNormalized);
  const auto es = symmetric_eig(a);
  MetricContext ctx;
  ctx.graph = &g;
  ctx.v = es.vectors.col(0);
  ctx.full_basis = top_k(es, 1);
  ctx.topk_basis = top_k(es, 2);
  Rng rng(2);
  const auto rec = ctx.measure(4, gaussian_matrix(6, 3, 0, 1, rng));
  CHECK(rec.step == 4);
  CHECK(rec.rank == 3);
  CHECK(rec.mu_v > 0.0);
  CHECK(rec.dirichlet > 0.0);
  CHECK(rec.d_ev > 0.0);
  CHECK(std::string(kMetricCsvHeader) == "step,mu_v,dirichlet,d_col,d_pcol,d_ev,rank,top_k_dist");
}

TEST_CASE("property: metric identities") {
  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 3 + static_cast<std::size_t>(uniform01(rng) * 15);
    const auto g = testing::random_connected_graph(n, 0.3, rng, trial % 3 == 0);
    const Index k = 1 + static_cast<Index>(uniform01(rng) * 5);
    const auto nn = static_cast<Index>(n);
    const Matrix x = gaussian_matrix(nn, k, 0, 1, rng);
    Vector v = gaussian_matrix(nn, 1, 0, 1, rng).col(0);
    v /= v.norm();

    // Pythagoras.
    const double along = (v * (v.transpose() * x)).squaredNorm();
    CHECK(std::abs(mu(x, v) + along - x.squaredNorm()) <= 1e-10 * x.squaredNorm());

    // Orthogonal right factor.
    const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(k, k, 0, 1, rng));
    const Matrix q = qr.householderQ();
    CHECK(std::abs(mu(x * q, v) - mu(x, v)) <= 1e-10 * x.squaredNorm());

    // Positive per-column rescaling.
    Matrix scaled = x;
    for (Index j = 0; j < k; ++j) scaled.col(j) *= std::exp(4.0 * uniform01(rng) - 2.0);
    CHECK(col_distance(scaled) == doctest::Approx(col_distance(x)).epsilon(1e-10));
    CHECK(col_projection_distance(scaled) ==
          doctest::Approx(col_projection_distance(x)).epsilon(1e-10));

    // Dirichlet zero set: span(D^{1/2} 1) column-wise.
    const Vector d = g.degrees().cwiseSqrt();
    Matrix in_span(nn, k);
    for (Index j = 0; j < k; ++j) in_span.col(j) = (uniform01(rng) - 0.5) * 4.0 * d;
    CHECK(dirichlet(g, in_span) <= 1e-10 * std::max(1.0, in_span.squaredNorm()));
    CHECK(dirichlet(g, x) > 1e-10);

    // Permutation equivariance.
    const auto p = testing::random_permutation(n, rng);
    const auto gp = testing::permute_graph(g, p);
    const Matrix xp = testing::permute_rows(x, p);
    const Vector vp = testing::permute_rows(v, p);
    CHECK(mu(xp, vp) == doctest::Approx(mu(x, v)).epsilon(1e-12));
    CHECK(dirichlet(gp, xp) == doctest::Approx(dirichlet(g, x)).epsilon(1e-12));
    CHECK(col_distance(xp) == doctest::Approx(col_distance(x)).epsilon(1e-12));
    CHECK(col_projection_distance(xp) == doctest::Approx(col_projection_distance(x)).epsilon(1e-12));
  }
}
