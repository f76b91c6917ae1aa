#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "symmetria/correspondence.hpp"
#include "symmetria/geodesics.hpp"
#include "symmetria/laplace.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace symmetria;

namespace {

FunctionalMap identity_map(int k) {
    FunctionalMap fm;
    fm.sign.assign(k, 1);
    fm.confidence.assign(k, 1.0);
    for (int i = 0; i < k; ++i) fm.active.push_back(i);
    return fm;
}

} // namespace

TEST_CASE("embedding: identity map reproduces the spectral coordinates") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    SpectralBasis basis;
    basis.k = 4;
    basis.eigenvalues = {0.0, 1.0, 2.0, 3.0};
    basis.Phi.resize(10, 4);
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 4; ++c) basis.Phi(r, c) = normal(rng);

    FunctionalMap fm = identity_map(4);
    Embedding e = embed(basis, fm);
    REQUIRE(e.source.rows() == 4);
    REQUIRE(e.source.cols() == 10);
    CHECK((e.source - basis.Phi.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((e.source - e.target).cwiseAbs().maxCoeff() <= 1e-15);

    // All-odd parities negate the target wholesale.
    FunctionalMap odd = fm;
    odd.sign.assign(4, -1);
    Embedding eo = embed(basis, odd);
    CHECK((eo.target + eo.source).cwiseAbs().maxCoeff() <= 1e-15);

    // Mixed case: each target row is the signed source row; inactive columns
    // are dropped from both matrices.
    FunctionalMap mixed;
    mixed.sign = {1, -1, 0, 1};
    mixed.active = {0, 1, 3};
    mixed.confidence.assign(4, 1.0);
    Embedding em = embed(basis, mixed);
    REQUIRE(em.source.rows() == 3);
    std::vector<int> cols = {0, 1, 3};
    std::vector<double> signs = {1.0, -1.0, 1.0};
    for (int i = 0; i < 3; ++i) {
        CHECK((em.source.row(i) - basis.Phi.col(cols[i]).transpose()).cwiseAbs().maxCoeff() <=
              1e-15);
        CHECK((em.target.row(i) - signs[i] * em.source.row(i)).cwiseAbs().maxCoeff() <= 1e-15);
    }

    // A rotation multiplies in on the left of both halves.
    Eigen::MatrixXd R(3, 3);
    R << 0, 1, 0, -1, 0, 0, 0, 0, 1;
    Embedding er = embed(basis, mixed, &R);
    Eigen::MatrixXd expect_source = R.transpose() * em.source;
    CHECK((er.source - expect_source).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::VectorXd c(3);
    c << 1, -1, 1;
    Eigen::MatrixXd expect_target = c.asDiagonal() * expect_source;
    CHECK((er.target - expect_target).cwiseAbs().maxCoeff() <= 1e-14);

    FunctionalMap weak;
    weak.sign = {1, 0, 0, 0};
    weak.active = {0};
    CHECK_THROWS_AS(embed(basis, weak), DegenerateMapError);
}

TEST_CASE("nearest neighbors: identical embeddings map to self") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd pts(3, 40);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 40; ++c) pts(r, c) = normal(rng);

    SymmetryMap sm = nearest_neighbor_map(pts, pts);
    for (int j = 0; j < 40; ++j) {
        CHECK(sm.sigma[j] == j);
        CHECK(sm.nn_distance[j] == doctest::Approx(0.0));
    }
}

TEST_CASE("nearest neighbors: exact duplicate columns tie to the lower index") {
    Eigen::MatrixXd target(2, 4);
    target.col(0) << 0.0, 0.0;
    target.col(1) << 1.0, 1.0;
    target.col(2) << 1.0, 1.0; // duplicate of column 1
    target.col(3) << 3.0, -1.0;
    Eigen::MatrixXd source(2, 4);
    source.col(0) << 1.0, 1.1;  // equidistant from the duplicates
    source.col(1) << 2.9, -1.0;
    source.col(2) << 0.05, 0.0;
    source.col(3) << 1.0, 1.0;  // exactly on the duplicates

    SymmetryMap sm = nearest_neighbor_map(source, target);
    CHECK(sm.sigma[0] == 1);
    CHECK(sm.sigma[1] == 3);
    CHECK(sm.sigma[2] == 0);
    CHECK(sm.sigma[3] == 1);
    CHECK(sm.nn_distance[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(sm.nn_distance[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(sm.nn_distance[3] == doctest::Approx(0.0));
}

TEST_CASE("nearest neighbors agree with the exhaustive scan") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> normal;
    const int k = 5, n = 600;
    Eigen::MatrixXd source(k, n), target(k, n);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < n; ++c) {
            source(r, c) = normal(rng);
            target(r, c) = normal(rng);
        }

    SymmetryMap sm = nearest_neighbor_map(source, target);
    REQUIRE((int)sm.sigma.size() == n);
    for (int j = 0; j < n; ++j) {
        int expect = testsupport::brute_force_nearest(target, source.col(j));
        CHECK(sm.sigma[j] == expect);
        double dist = (source.col(j) - target.col(expect)).norm();
        CHECK(sm.nn_distance[j] == doctest::Approx(dist).epsilon(1e-12));
    }
}

TEST_CASE("mirrored sheet with exact parities recovers the involution") {
    auto sheet = testsupport::mirrored_sheet(10, 12);
    LaplaceOperator op = assemble_operator(sheet.mesh);
    SpectralBasis basis = eigendecompose(op, 13);
    auto flags = eigen_gap_flags(basis, 1e-3);
    const auto& pi = sheet.involution;
    const int n = sheet.mesh.n();

    // Exact parities from the known involution, bypassing the vote stage.
    FunctionalMap fm;
    fm.sign.assign(13, 0);
    fm.confidence.assign(13, 1.0);
    for (int i = 0; i < 13; ++i) {
        if (flags[i]) continue;
        double overlap = testsupport::involution_overlap(basis.Phi, op.A, pi, i);
        if (std::abs(overlap) < 0.5) continue;
        fm.sign[i] = overlap > 0.0 ? 1 : -1;
        fm.active.push_back(i);
    }
    REQUIRE((int)fm.active.size() >= 3);

    Embedding e = embed(basis, fm);
    SymmetryMap sm = nearest_neighbor_map(e.source, e.target);
    int hits = 0;
    for (int v = 0; v < n; ++v)
        if (sm.sigma[v] == pi[v]) ++hits;
    CHECK(hits >= (int)(0.99 * n));
}

TEST_CASE("involution diagnostics: identity and exact involutions vanish") {
    auto sheet = testsupport::mirrored_sheet(6, 7);
    AdjacencyIndex adj = build_adjacency(sheet.mesh);
    const int n = sheet.mesh.n();

    std::vector<int> ident(n);
    for (int v = 0; v < n; ++v) ident[v] = v;
    for (double err : involution_diagnostics(sheet.mesh, adj, ident))
        CHECK(err == doctest::Approx(0.0));

    for (double err : involution_diagnostics(sheet.mesh, adj, sheet.involution))
        CHECK(err == doctest::Approx(0.0));

    // A map that shifts one vertex to a neighbor and back is charged the
    // round-trip geodesic distance at the vertices it breaks.
    std::vector<int> bent = ident;
    auto ring = adj.one_ring(0);
    REQUIRE(!ring.empty());
    bent[0] = ring[0]; // sigma(sigma(0)) = sigma(ring[0]) = ring[0] != 0
    auto errs = involution_diagnostics(sheet.mesh, adj, bent);
    double edge = (sheet.mesh.vertices()[0] - sheet.mesh.vertices()[ring[0]]).norm();
    CHECK(errs[0] == doctest::Approx(edge).epsilon(1e-9));
    for (int v = 1; v < n; ++v) CHECK(errs[v] == doctest::Approx(0.0));
}
