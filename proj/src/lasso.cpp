#include "selinf/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace selinf {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Primal minus dual objective, using the residual rescaled into the dual
// feasible set ||X^T theta||_inf <= lambda.
double duality_gap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const Eigen::VectorXd& beta, const Eigen::VectorXd& residual) {
    const double primal = 0.5 * residual.squaredNorm() + lambda * beta.lpNorm<1>();
    const double corr = (X.transpose() * residual).lpNorm<Eigen::Infinity>();
    const double scale = corr > lambda ? lambda / corr : 1.0;
    const Eigen::VectorXd theta = scale * residual;
    const double dual = 0.5 * y.squaredNorm() - 0.5 * (y - theta).squaredNorm();
    return std::max(0.0, primal - dual);
}

void read_support(LassoSolution& sol, double active_tol) {
    sol.active.clear();
    sol.signs.clear();
    const double cutoff = active_tol * sol.beta_hat.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < sol.beta_hat.size(); ++j) {
        if (std::abs(sol.beta_hat(j)) > cutoff && sol.beta_hat(j) != 0.0) {
            sol.active.push_back(static_cast<int>(j));
            sol.signs.push_back(sol.beta_hat(j) > 0.0 ? 1 : -1);
        } else {
            sol.beta_hat(j) = 0.0;
        }
    }
}

// Exact solution of the stationarity equations on (M, s). Coordinates that
// come out with the wrong sign are dropped and the system re-solved; the
// result is kept only if it passes the KKT check and does not raise the
// objective.
bool polish(const DesignMatrix& X, const Eigen::VectorXd& y, LassoSolution& sol) {
    IndexList M = sol.active;
    std::vector<int> signs = sol.signs;
    try {
        while (!M.empty()) {
            const Projector proj(X, M);
            Eigen::VectorXd s(static_cast<Eigen::Index>(signs.size()));
            for (std::size_t i = 0; i < signs.size(); ++i) s(static_cast<Eigen::Index>(i)) = signs[i];
            const Eigen::VectorXd beta_m = proj.coefficients(y) - sol.lambda * proj.gram_solve(s);

            IndexList kept;
            std::vector<int> kept_signs;
            Eigen::VectorXd candidate = Eigen::VectorXd::Zero(X.cols());
            for (std::size_t i = 0; i < M.size(); ++i) {
                const double b = beta_m(static_cast<Eigen::Index>(i));
                if (b * signs[i] <= 0.0) continue;
                kept.push_back(M[i]);
                kept_signs.push_back(signs[i]);
                candidate(M[i]) = b;
            }
            if (kept.size() < M.size()) {
                M = std::move(kept);
                signs = std::move(kept_signs);
                continue;
            }
            if (!kkt_check(X, y, sol.lambda, candidate).passes(1e-9)) return false;
            if (lasso_objective(X, y, sol.lambda, candidate) >
                lasso_objective(X, y, sol.lambda, sol.beta_hat) + 1e-12 * (1.0 + y.squaredNorm())) {
                return false;
            }
            sol.beta_hat = std::move(candidate);
            return true;
        }
    } catch (const Error&) {
        return false;
    }
    return false;
}

}  // namespace

LassoDidNotConverge::LassoDidNotConverge(Eigen::VectorXd beta, double gap, int max_iter)
    : Error(ErrorCode::DidNotConverge, "lasso coordinate descent did not converge in " +
                                           std::to_string(max_iter) + " sweeps (gap " +
                                           std::to_string(gap) + ")"),
      beta_(std::move(beta)),
      gap_(gap) {}

double lasso_objective(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                       const Eigen::VectorXd& beta) {
    return 0.5 * (y - X.data() * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

LassoSolution lasso_fit(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                        const LassoOptions& options) {
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    if (y.size() != X.rows()) fail(ErrorCode::InvalidArgument, "y length does not match rows of X");

    const Eigen::MatrixXd& A = X.data();
    const Eigen::Index p = A.cols();
    const Eigen::VectorXd col_sq = A.colwise().squaredNorm().transpose();
    const double target = options.tol * 0.5 * y.squaredNorm();

    LassoSolution sol;
    sol.lambda = lambda;
    sol.beta_hat = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd residual = y;
    double gap = duality_gap(A, y, lambda, sol.beta_hat, residual);

    int sweep = 0;
    while (gap > target) {
        if (sweep >= options.max_iter) {
            throw LassoDidNotConverge(sol.beta_hat, gap, options.max_iter);
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            if (col_sq(j) == 0.0) continue;
            const double old = sol.beta_hat(j);
            const double z = A.col(j).dot(residual) + col_sq(j) * old;
            const double updated = soft_threshold(z, lambda) / col_sq(j);
            if (updated != old) {
                residual -= (updated - old) * A.col(j);
                sol.beta_hat(j) = updated;
            }
        }
        ++sweep;
        // Periodic refresh keeps the incremental residual from drifting.
        if (sweep % 64 == 0) residual = y - A * sol.beta_hat;
        gap = duality_gap(A, y, lambda, sol.beta_hat, residual);
    }
    sol.iterations = sweep;

    read_support(sol, options.active_tol);
    if (options.polish && polish(X, y, sol)) {
        read_support(sol, options.active_tol);
    }
    sol.dual_gap = duality_gap(A, y, lambda, sol.beta_hat, y - A * sol.beta_hat);
    return sol;
}

KktReport kkt_check(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                    const Eigen::VectorXd& beta_hat) {
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    KktReport report;
    report.subgradient = X.data().transpose() * (y - X.data() * beta_hat) / lambda;
    for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
        const double s = report.subgradient(j);
        const double v = beta_hat(j) != 0.0 ? std::abs(s - (beta_hat(j) > 0.0 ? 1.0 : -1.0))
                                            : std::max(0.0, std::abs(s) - 1.0);
        report.max_violation = std::max(report.max_violation, v);
    }
    return report;
}

Polyhedron lasso_polyhedron(const DesignMatrix& X, const IndexList& M, const std::vector<int>& s,
                            double lambda) {
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    if (M.size() != s.size()) fail(ErrorCode::InvalidArgument, "M and s differ in length");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (static_cast<Eigen::Index>(M.size()) > p) fail(ErrorCode::InvalidArgument, "|M| exceeds p");

    std::vector<char> in_model(static_cast<std::size_t>(p), 0);
    for (int j : M) {
        if (j < 0 || j >= p || in_model[static_cast<std::size_t>(j)]) {
            fail(ErrorCode::InvalidArgument, "M must hold distinct column indices");
        }
        in_model[static_cast<std::size_t>(j)] = 1;
    }
    IndexList inactive;
    for (int j = 0; j < p; ++j) {
        if (!in_model[static_cast<std::size_t>(j)]) inactive.push_back(j);
    }

    const Projector proj(X, M);
    Eigen::VectorXd sv(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != 1 && s[i] != -1) fail(ErrorCode::InvalidArgument, "signs must be +1 or -1");
        sv(static_cast<Eigen::Index>(i)) = s[i];
    }
    // (X_M^T)^+ s = X_M (X_M^T X_M)^{-1} s
    const Eigen::VectorXd pinv_t_s = proj.pinv_transpose_apply(sv);
    const Eigen::MatrixXd XI = X.select(inactive);
    const Eigen::MatrixXd residualized = proj.apply_complement(XI);  // P_M^perp X_{-M}

    PolyhedronBuilder builder(n);
    for (Eigen::Index i = 0; i < XI.cols(); ++i) {
        builder.add(residualized.col(i) / lambda, 1.0 - XI.col(i).dot(pinv_t_s),
                    RowTag{RowKind::LassoInactive});
    }
    for (Eigen::Index i = 0; i < XI.cols(); ++i) {
        builder.add(-residualized.col(i) / lambda, 1.0 + XI.col(i).dot(pinv_t_s),
                    RowTag{RowKind::LassoInactive});
    }
    if (!M.empty()) {
        const Eigen::MatrixXd pinv = proj.pinv();  // m x n
        const Eigen::VectorXd gram_s = proj.gram_solve(sv);
        for (Eigen::Index i = 0; i < pinv.rows(); ++i) {
            builder.add(-sv(i) * pinv.row(i).transpose(), -lambda * sv(i) * gram_s(i),
                        RowTag{RowKind::LassoSign});
        }
    }
    return builder.build();
}

std::vector<Polyhedron> lasso_model_region(const DesignMatrix& X, const IndexList& M, double lambda,
                                           std::int64_t max_signs) {
    const std::size_t m = M.size();
    if (m >= 62 || (std::int64_t{1} << m) > max_signs) {
        fail(ErrorCode::TooManySignPatterns,
             "|M| = " + std::to_string(m) + " needs 2^" + std::to_string(m) +
                 " sign patterns, above the cap of " + std::to_string(max_signs));
    }
    const std::int64_t count = std::int64_t{1} << m;
    std::vector<Polyhedron> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> s(m);
    for (std::int64_t pattern = 0; pattern < count; ++pattern) {
        for (std::size_t i = 0; i < m; ++i) s[i] = ((pattern >> i) & 1) ? -1 : 1;
        out.push_back(lasso_polyhedron(X, M, s, lambda));
    }
    return out;
}

}  // namespace selinf
