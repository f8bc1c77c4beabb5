#include "selinf/lasso.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <numeric>

using namespace selinf;

namespace {

struct Orthonormal {
    DesignMatrix X;
    Eigen::VectorXd y;
};

Orthonormal orthonormal_with_scores(const Eigen::VectorXd& u, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DesignMatrix X = oracle::orthonormal_design(8, static_cast<int>(u.size()), rng);
    Eigen::VectorXd y = X.data() * u;
    return {X, y};
}

bool same_event(const LassoSolution& fit, const IndexList& M, const std::vector<int>& s) {
    return fit.active == M && fit.signs == s;
}

}  // namespace

TEST_CASE("soft thresholding on an orthonormal design") {
    Eigen::Vector3d u(3.0, -1.0, 0.5);
    const auto d = orthonormal_with_scores(u, 1);
    const LassoSolution fit = lasso_fit(d.X, d.y, 1.0);
    CHECK(fit.beta_hat(0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.beta_hat(1) == 0.0);
    CHECK(fit.beta_hat(2) == 0.0);
    CHECK(fit.active == IndexList{0});
    CHECK(fit.signs == std::vector<int>{1});
    CHECK(kkt_check(d.X, d.y, 1.0, oracle::soft_threshold(u, 1.0)).max_violation <= 1e-10);
}

TEST_CASE("lambda above the first knot gives the zero solution") {
    SplitMix64 rng(2);
    const DesignMatrix X = oracle::random_design(15, 4, rng);
    const Eigen::VectorXd y = oracle::gaussian(15, rng);
    const double lam1 = (X.data().transpose() * y).cwiseAbs().maxCoeff();
    const LassoSolution fit = lasso_fit(X, y, lam1 * 1.0001);
    CHECK(fit.beta_hat.norm() == 0.0);
    CHECK(fit.active.empty());

    const KktReport kkt = kkt_check(X, y, 2.0 * lam1, Eigen::VectorXd::Zero(4));
    CHECK(kkt.subgradient.cwiseAbs().maxCoeff() <= 0.5 + 1e-15);
    CHECK(kkt.max_violation == 0.0);
}

TEST_CASE("vanishing penalty recovers least squares") {
    SplitMix64 rng(3);
    const DesignMatrix X = oracle::random_design(30, 4, rng);
    const Eigen::VectorXd y = oracle::gaussian(30, rng);
    const LassoSolution fit = lasso_fit(X, y, 1e-9);
    const Eigen::VectorXd ols = (X.data().transpose() * X.data()).inverse() * X.data().transpose() * y;
    CHECK((fit.beta_hat - ols).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("KKT check reacts to a perturbed solution") {
    SplitMix64 rng(4);
    const DesignMatrix X = oracle::random_design(20, 5, rng);
    const Eigen::VectorXd y = oracle::gaussian(20, rng) * 3.0;
    const double lam = 0.3 * (X.data().transpose() * y).cwiseAbs().maxCoeff();
    const LassoSolution fit = lasso_fit(X, y, lam);
    REQUIRE(!fit.active.empty());
    CHECK(kkt_check(X, y, lam, fit.beta_hat).passes());
    Eigen::VectorXd b = fit.beta_hat;
    b(fit.active.front()) += 0.1;
    CHECK(kkt_check(X, y, lam, b).max_violation > 0.01);
}

TEST_CASE("fits are invariant to column order") {
    SplitMix64 rng(5);
    const DesignMatrix X = oracle::random_design(25, 6, rng);
    const Eigen::VectorXd y = oracle::gaussian(25, rng) * 2.0;
    const double lam = 0.25 * (X.data().transpose() * y).cwiseAbs().maxCoeff();
    const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
    Eigen::MatrixXd P(25, 6);
    for (int j = 0; j < 6; ++j) P.col(j) = X.column(perm[j]);
    const LassoSolution a = lasso_fit(X, y, lam);
    const LassoSolution b = lasso_fit(DesignMatrix(P, true, true), y, lam);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(b.beta_hat(j) - a.beta_hat(perm[j])) < 1e-8);
}

TEST_CASE("coordinate descent objective matches the polished optimum") {
    SplitMix64 rng(6);
    const DesignMatrix X = oracle::random_design(20, 5, rng);
    const Eigen::VectorXd y = oracle::gaussian(20, rng) * 2.0;
    const double lam = 0.2 * (X.data().transpose() * y).cwiseAbs().maxCoeff();
    LassoOptions raw;
    raw.polish = false;
    const LassoSolution a = lasso_fit(X, y, lam, raw);
    const LassoSolution b = lasso_fit(X, y, lam);
    CHECK(lasso_objective(X, y, lam, b.beta_hat) <= lasso_objective(X, y, lam, a.beta_hat) + 1e-12);
    CHECK(a.dual_gap <= 1e-14 * 0.5 * y.squaredNorm());
}

TEST_CASE("iteration cap raises with the last iterate") {
    SplitMix64 rng(7);
    const DesignMatrix X = oracle::random_design(20, 5, rng);
    const Eigen::VectorXd y = oracle::gaussian(20, rng);
    LassoOptions opt;
    opt.max_iter = 1;
    opt.tol = 1e-300;
    const double lam = 0.05 * (X.data().transpose() * y).cwiseAbs().maxCoeff();
    try {
        lasso_fit(X, y, lam, opt);
        FAIL("expected LassoDidNotConverge");
    } catch (const LassoDidNotConverge& e) {
        CHECK(e.code() == ErrorCode::DidNotConverge);
        CHECK(e.last_iterate().size() == 5);
        CHECK(e.gap() > 0.0);
    }
}

TEST_CASE("single orthonormal column polyhedron") {
    Eigen::MatrixXd A(4, 1);
    A << 1, -1, 1, -1;
    A /= 2.0;
    const DesignMatrix X(A, true, true);
    const Polyhedron poly = lasso_polyhedron(X, {0}, {1}, 0.7);
    REQUIRE(poly.rows() == 1);
    CHECK((poly.A().row(0).transpose() + X.column(0)).norm() < 1e-14);
    CHECK(poly.b()(0) == doctest::Approx(-0.7));
    CHECK(poly.tags()[0].kind == RowKind::LassoSign);
}

TEST_CASE("polyhedron of the observed event contains the observation") {
    SplitMix64 rng(20);
    const DesignMatrix X = oracle::random_design(20, 5, rng);
    const Eigen::VectorXd y = oracle::gaussian(20, rng) * 2.0;
    const double lam = 0.3 * (X.data().transpose() * y).cwiseAbs().maxCoeff();
    const LassoSolution fit = lasso_fit(X, y, lam);
    REQUIRE(!fit.active.empty());
    const Polyhedron poly = lasso_polyhedron(X, fit.active, fit.signs, lam);
    CHECK(poly.rows() == 2 * 5 - static_cast<Eigen::Index>(fit.active.size()));
    CHECK(poly.contains(y));

    std::vector<int> flipped = fit.signs;
    flipped[0] = -flipped[0];
    CHECK(!lasso_polyhedron(X, fit.active, flipped, lam).contains(y));
}

TEST_CASE("membership matches the fitted event on small instances") {
    SplitMix64 rng(21);
    const DesignMatrix X = oracle::random_design(6, 3, rng);
    const double lam = 0.8;
    int agree = 0;
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        const Eigen::VectorXd y = oracle::gaussian(6, rng) * 1.5;
        const LassoSolution fit = lasso_fit(X, y, lam);
        bool ok = true;
        for (int mask = 0; mask < 8 && ok; ++mask) {
            IndexList M;
            for (int j = 0; j < 3; ++j)
                if (mask & (1 << j)) M.push_back(j);
            for (int sm = 0; sm < (1 << M.size()); ++sm) {
                std::vector<int> s;
                for (std::size_t i = 0; i < M.size(); ++i) s.push_back((sm >> i) & 1 ? -1 : 1);
                const bool inside = lasso_polyhedron(X, M, s, lam).max_violation(y) <= 1e-7;
                if (inside != same_event(fit, M, s)) ok = false;
            }
        }
        agree += ok;
    }
    CHECK(agree == reps);
}

TEST_CASE("model region enumerates sign patterns") {
    SplitMix64 rng(22);
    const DesignMatrix X = oracle::random_design(10, 3, rng);
    CHECK(lasso_model_region(X, {1}, 0.5).size() == 2);
    const auto empty = lasso_model_region(X, {}, 0.5);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].rows() == 6);
    const auto two = lasso_model_region(X, {0, 2}, 0.5);
    REQUIRE(two.size() == 4);
    const Eigen::VectorXd y = oracle::gaussian(10, rng);
    CHECK(two[1].max_violation(y) == doctest::Approx(lasso_polyhedron(X, {0, 2}, {-1, 1}, 0.5).max_violation(y)));

    SplitMix64 wide_rng(23);
    const DesignMatrix wide = oracle::random_design(30, 21, wide_rng);
    IndexList all(21);
    std::iota(all.begin(), all.end(), 0);
    try {
        lasso_model_region(wide, all, 0.5);
        FAIL("expected TooManySignPatterns");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManySignPatterns);
    }
}
