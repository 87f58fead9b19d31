#include "gwca/error.hpp"
#include "gwca/solver.hpp"
#include "helpers.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <algorithm>

using namespace gwca;
using namespace gwca::testing;

namespace {

std::vector<GraphPair> correlated_pairs(std::mt19937_64& gen, std::size_t m, Eigen::Index d1, Eigen::Index d2,
                                        double noise, Eigen::Index nmin = 4, Eigen::Index nmax = 12) {
    const Matrix mix = random_matrix(gen, d1, d2);
    std::uniform_int_distribution<Eigen::Index> nodes(nmin, nmax);
    std::vector<GraphPair> pairs;
    for (std::size_t i = 0; i < m; ++i) {
        const auto n = nodes(gen);
        const Matrix a = random_adjacency(gen, n, 0.4);
        const Matrix x1 = random_matrix(gen, n, d1);
        const Matrix x2 = x1 * mix + random_matrix(gen, n, d2, noise);
        pairs.emplace_back(Graph(a, x1), Graph(a, x2));
    }
    return pairs;
}

// Filtered per-node features, built from naive powers of the naive Laplacian.
Matrix oracle_features(const Graph& g, const FeatureLift& lift, Eigen::Index n) {
    const Matrix a = pad_rows(pad_rows(g.adjacency(), n).transpose(), n);
    const Matrix x = pad_rows(g.features(), n);
    const Matrix l = naive_normalized_laplacian(a);
    if (!lift.fusion) return naive_matmul(naive_power(l, static_cast<int>(lift.order) - 1), x);
    Matrix out(n, x.cols() * static_cast<Eigen::Index>(lift.order));
    for (std::size_t k = 0; k < lift.order; ++k)
        out.middleCols(static_cast<Eigen::Index>(k) * x.cols(), x.cols()) = naive_matmul(naive_power(l, static_cast<int>(k)), x);
    return out;
}

// The kernel sum K_mu + K_Sigma reduces to (1/n) I on filtered features, so
// every correlation matrix is a per-pair uncentered second moment.
CorrelationMatrices oracle_accumulate(std::span<const GraphPair> pairs, const FeatureLift& lift) {
    CorrelationMatrices cm;
    for (const auto& [g1, g2] : pairs) {
        const auto n = static_cast<Eigen::Index>(std::max(g1.size(), g2.size()));
        const Matrix f1 = oracle_features(g1, lift, n);
        const Matrix f2 = oracle_features(g2, lift, n);
        const Matrix c1 = naive_matmul(f1.transpose(), f1) / static_cast<double>(n);
        const Matrix c2 = naive_matmul(f2.transpose(), f2) / static_cast<double>(n);
        const Matrix c12 = naive_matmul(f1.transpose(), f2) / static_cast<double>(n);
        if (cm.c1.size() == 0) {
            cm.c1 = c1;
            cm.c2 = c2;
            cm.c12 = c12;
        } else {
            cm.c1 += c1;
            cm.c2 += c2;
            cm.c12 += c12;
        }
    }
    return cm;
}

// rho^2 from a general (non-symmetric) eigensolve of the explicit product.
std::vector<double> product_eigenvalues(const Matrix& r1, const Matrix& r2, const Matrix& c12) {
    const Matrix prod = r1.inverse() * c12 * r2.inverse() * c12.transpose();
    Eigen::EigenSolver<Matrix> es(prod);
    std::vector<double> v;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) v.push_back(es.eigenvalues()(i).real());
    std::sort(v.rbegin(), v.rend());
    return v;
}

}  // namespace

TEST_CASE("accumulate matches per-pair second moments") {
    std::mt19937_64 gen(41);
    const auto pairs = correlated_pairs(gen, 13, 3, 2, 0.3, 2, 9);
    for (const FeatureLift lift : {FeatureLift{1, false}, FeatureLift{3, false}, FeatureLift{2, true}, FeatureLift{3, true}}) {
        CAPTURE(lift.order);
        CAPTURE(lift.fusion);
        const auto cm = accumulate(pairs, lift);
        const auto want = oracle_accumulate(pairs, lift);
        CHECK(cm.pair_count == 13);
        CHECK(cm.c1.rows() == static_cast<Eigen::Index>(lift.lifted_dim(3)));
        CHECK(rel_err(cm.c1, want.c1) < 1e-10);
        CHECK(rel_err(cm.c2, want.c2) < 1e-10);
        CHECK(rel_err(cm.c12, want.c12) < 1e-10);
        CHECK(cm.c21 == cm.c12.transpose());
        CHECK(cm.c1 == cm.c1.transpose());
    }
}

TEST_CASE("accumulate result does not depend on thread count") {
    std::mt19937_64 gen(42);
    const auto pairs = correlated_pairs(gen, 70, 3, 3, 0.1);
    const auto a = accumulate(pairs, {2, true}, 1);
    const auto b = accumulate(pairs, {2, true}, 4);
    CHECK(a.c1 == b.c1);
    CHECK(a.c12 == b.c12);
}

TEST_CASE("accumulate special cases") {
    std::mt19937_64 gen(43);
    SUBCASE("duplicated view at order 0") {
        const Graph g = random_graph(gen, 6, 3);
        const std::vector<GraphPair> pairs{{g, g}};
        const auto cm = accumulate(pairs, {1, false});
        CHECK((cm.c1 - cm.c2).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((cm.c1 - cm.c12).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("an all-zero pair contributes nothing") {
        const auto pairs = correlated_pairs(gen, 1, 3, 2, 0.2);
        auto more = pairs;
        const auto n = static_cast<Eigen::Index>(5);
        more.emplace_back(Graph(random_adjacency(gen, n), Matrix::Zero(n, 3)), Graph(random_adjacency(gen, n), Matrix::Zero(n, 2)));
        const auto a = accumulate(pairs, {2, true});
        const auto b = accumulate(more, {2, true});
        CHECK(a.c1 == b.c1);
        CHECK(a.c2 == b.c2);
        CHECK(a.c12 == b.c12);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(accumulate(std::vector<GraphPair>{}, {2, true}), ConfigError);
        auto pairs = correlated_pairs(gen, 2, 3, 2, 0.1);
        pairs.emplace_back(random_graph(gen, 4, 2), random_graph(gen, 4, 2));
        CHECK_THROWS_AS(accumulate(pairs, {2, true}), DimensionMismatch);
        CHECK_THROWS_AS(accumulate(correlated_pairs(gen, 2, 3, 2, 0.1), {0, true}), ConfigError);
    }
}

TEST_CASE("solve satisfies the eigen-equations") {
    std::mt19937_64 gen(44);
    const auto pairs = correlated_pairs(gen, 40, 4, 3, 0.5);
    const auto cm = accumulate(pairs, {2, true});
    const auto model = solve(cm);
    REQUIRE(model.channels() == 6);

    const auto res = eigen_residuals(cm, model);
    for (double r : res.view1) CHECK(r < 1e-6);
    for (double r : res.view2) CHECK(r < 1e-6);

    const auto [r1, r2] = regularized_views(cm, model.reg);
    for (Eigen::Index j = 0; j < model.rho.size(); ++j) {
        CHECK(model.rho(j) <= 1.0 + 1e-8);
        CHECK(model.rho(j) >= 0.0);
        if (j > 0) CHECK(model.rho(j) <= model.rho(j - 1));
        CHECK(model.w1.col(j).dot(r1 * model.w1.col(j)) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(model.w2.col(j).dot(r2 * model.w2.col(j)) == doctest::Approx(1.0).epsilon(1e-9));
        // Correlation of the pair equals rho.
        CHECK(model.w1.col(j).dot(cm.c12 * model.w2.col(j)) == doctest::Approx(model.rho(j)).epsilon(1e-9));
        Eigen::Index arg = 0;
        model.w1.col(j).cwiseAbs().maxCoeff(&arg);
        CHECK(model.w1(arg, j) > 0.0);
    }
}

TEST_CASE("rho^2 matches a brute-force product eigendecomposition") {
    std::mt19937_64 gen(45);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pairs = correlated_pairs(gen, 25, 3, 3, 0.7);
        const auto cm = accumulate(pairs, {1, false});
        const auto model = solve(cm);
        const auto [r1, r2] = regularized_views(cm, model.reg);
        const auto ev = product_eigenvalues(r1, r2, cm.c12);
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(model.rho(j) * model.rho(j) - ev[static_cast<std::size_t>(j)]) < 1e-8);
    }
}

TEST_CASE("identical views are perfectly correlated") {
    std::mt19937_64 gen(46);
    std::vector<GraphPair> pairs;
    for (int m = 0; m < 20; ++m) {
        const Graph g = random_graph(gen, 8, 4);
        pairs.emplace_back(g, g);
    }
    const auto model = solve(accumulate(pairs, {2, true}), 1e-12);
    CHECK(std::abs(model.rho(0) - 1.0) < 1e-8);
}

TEST_CASE("independent views are nearly uncorrelated") {
    std::mt19937_64 gen(47);
    std::vector<GraphPair> pairs;
    for (int m = 0; m < 500; ++m) {
        const Matrix a = random_adjacency(gen, 10, 0.4);
        pairs.emplace_back(Graph(a, random_matrix(gen, 10, 4)), Graph(a, random_matrix(gen, 10, 4)));
    }
    const auto model = solve(accumulate(pairs, {1, false}));
    CHECK(model.rho(0) < 0.2);
}

TEST_CASE("correlations are invariant to view scaling and view swap") {
    std::mt19937_64 gen(48);
    const auto pairs = correlated_pairs(gen, 30, 3, 4, 0.8);
    const auto base = solve(accumulate(pairs, {2, true}));

    std::vector<GraphPair> scaled;
    std::vector<GraphPair> swapped;
    for (const auto& [g1, g2] : pairs) {
        scaled.emplace_back(g1.with_features(-3.5 * g1.features()), g2);
        swapped.emplace_back(g2, g1);
    }
    const auto s = solve(accumulate(scaled, {2, true}));
    const auto w = solve(accumulate(swapped, {2, true}));
    CHECK((s.rho - base.rho).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((w.rho - base.rho).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("stronger regularization never raises the top correlation") {
    std::mt19937_64 gen(49);
    const auto cm = accumulate(correlated_pairs(gen, 15, 5, 4, 0.5), {2, true});
    double prev = 2.0;
    for (double reg : {1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
        const double rho1 = solve(cm, reg).rho(0);
        CHECK(rho1 <= prev + 1e-15);
        prev = rho1;
    }
}

TEST_CASE("solver errors") {
    std::mt19937_64 gen(50);
    SUBCASE("a view with no signal is singular") {
        std::vector<GraphPair> pairs;
        for (int m = 0; m < 5; ++m) pairs.emplace_back(Graph(random_adjacency(gen, 6), Matrix::Zero(6, 3)), random_graph(gen, 6, 2));
        const auto cm = accumulate(pairs, {1, false});
        try {
            solve(cm);
            FAIL("expected SolverError");
        } catch (const SolverError& e) {
            CHECK(e.view() == "view1");
        }
    }
    SUBCASE("rank-deficient data with negligible regularization") {
        std::vector<GraphPair> pairs;
        const Graph g = random_graph(gen, 3, 2);
        pairs.emplace_back(random_graph(gen, 3, 2), Graph(g.adjacency(), random_matrix(gen, 3, 1) * Matrix::Ones(1, 6)));
        const auto cm = accumulate(pairs, {1, false});
        try {
            solve(cm, 1e-18);
            FAIL("expected SolverError");
        } catch (const SolverError& e) {
            CHECK(e.view() == "view2");
        }
    }
    SUBCASE("bad arguments") {
        const auto cm = accumulate(correlated_pairs(gen, 5, 3, 2, 0.3), {1, false});
        CHECK_THROWS_AS(solve(cm, 0.0), ConfigError);
        CHECK_THROWS_AS(solve(cm, 1e-6, 3), ConfigError);
        CHECK(solve(cm, 1e-6, 1).channels() == 1);
    }
}

TEST_CASE("projection") {
    std::mt19937_64 gen(51);
    const auto pairs = correlated_pairs(gen, 20, 3, 2, 0.3);
    const auto model = solve(accumulate(pairs, {3, true}));

    SUBCASE("zero features project to zero") {
        const Graph g(random_adjacency(gen, 7), Matrix::Zero(7, 3));
        CHECK(project(model, g, View::first).isZero(0.0));
    }
    SUBCASE("unit selector at order 0") {
        CorrelationModel sel;
        sel.w1 = Vector::Unit(3, 0);
        sel.w2 = Vector::Unit(2, 0);
        sel.rho = Vector::Ones(1);
        sel.lift = {1, false};
        sel.d1 = 3;
        sel.d2 = 2;
        const Graph g = random_graph(gen, 6, 3);
        CHECK(project(sel, g, View::first).col(0) == g.features().col(0));
    }
    SUBCASE("agrees with the equivalent polynomial filter") {
        for (int trial = 0; trial < 5; ++trial) {
            const Graph g = random_graph(gen, 11, 2);
            const auto powers = laplacian_powers(build_laplacian(g), 2);
            const Matrix z = project(model, g, View::second);
            for (std::size_t j = 0; j < model.channels(); ++j) {
                const Vector want = polynomial_filter(powers, channel_filter(model, View::second, j), g.features());
                CHECK((z.col(static_cast<Eigen::Index>(j)) - want).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
        const auto nofuse = solve(accumulate(pairs, {3, false}));
        const Graph g = random_graph(gen, 9, 3);
        const auto powers = laplacian_powers(build_laplacian(g), 2);
        const Vector want = polynomial_filter(powers, channel_filter(nofuse, View::first, 0), g.features());
        CHECK((project(nofuse, g, View::first).col(0) - want).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(project(model, random_graph(gen, 5, 4), View::first), DimensionMismatch);
        CHECK_THROWS_AS(channel_filter(model, View::first, 99), DimensionMismatch);
    }
}
