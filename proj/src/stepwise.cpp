#include "selinf/stepwise.hpp"

#include "selinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace selinf {

namespace {

constexpr double kCollinearTol = 1e-10;

// Columns of P^perp X with the norms of the raw columns alongside.
struct Residualized {
    Eigen::MatrixXd U;
    Eigen::VectorXd norms;
    Eigen::VectorXd raw_norms;
};

Residualized residualize(const DesignMatrix& X, const IndexList& model) {
    const Projector proj(X, model);
    Residualized out;
    out.U = proj.apply_complement(X.data());
    out.norms = out.U.colwise().norm().transpose();
    out.raw_norms = X.data().colwise().norm().transpose();
    return out;
}

bool usable(const Residualized& r, Eigen::Index j) {
    return r.norms(j) >= kCollinearTol * r.raw_norms(j) && r.norms(j) > 0.0;
}

}  // namespace

FSPath fs_path(const DesignMatrix& X, const Eigen::VectorXd& y, int steps) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) fail(ErrorCode::InvalidArgument, "y length does not match rows of X");
    if (steps < 1 || steps > std::min<Eigen::Index>(n - 1, p)) {
        fail(ErrorCode::InvalidArgument,
             "steps must lie in [1, min(n-1, p)], got " + std::to_string(steps));
    }

    FSPath path;
    path.residuals.push_back(y);
    path.rss.push_back(y.squaredNorm());
    std::vector<char> taken(static_cast<std::size_t>(p), 0);

    for (int k = 1; k <= steps; ++k) {
        const Residualized res = residualize(X, path.order);
        const Eigen::VectorXd& r = path.residuals.back();
        int best = -1;
        double best_score = -1.0;
        double best_inner = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (taken[static_cast<std::size_t>(j)] || !usable(res, j)) continue;
            const double inner = res.U.col(j).dot(r);
            const double score = std::abs(inner) / res.norms(j);
            if (score > best_score) {
                best = static_cast<int>(j);
                best_score = score;
                best_inner = inner;
            }
        }
        if (best < 0) {
            fail(ErrorCode::CollinearCandidate,
                 "every remaining column lies in the span of the selected ones at step " + std::to_string(k));
        }
        taken[static_cast<std::size_t>(best)] = 1;
        path.order.push_back(best);
        path.signs.push_back(best_inner >= 0.0 ? 1 : -1);
        const Eigen::VectorXd next = project(path.order, X, y, true);
        path.rss.push_back(next.squaredNorm());
        path.residuals.push_back(next);
    }
    return path;
}

Polyhedron fs_polyhedron(const DesignMatrix& X, const FSPath& path, int m) {
    if (m < 1 || m > path.size()) {
        fail(ErrorCode::InvalidArgument, "m must lie in [1, path length], got " + std::to_string(m));
    }
    const Eigen::Index p = X.cols();
    PolyhedronBuilder builder(X.rows());
    std::vector<char> in_model(static_cast<std::size_t>(p), 0);
    for (int k = 1; k <= m; ++k) {
        const Residualized res = residualize(X, path.model(k - 1));
        const int jk = path.order[static_cast<std::size_t>(k - 1)];
        in_model[static_cast<std::size_t>(jk)] = 1;
        const Eigen::VectorXd w = path.signs[static_cast<std::size_t>(k - 1)] * res.U.col(jk) / res.norms(jk);
        for (Eigen::Index j = 0; j < p; ++j) {
            if (in_model[static_cast<std::size_t>(j)]) continue;
            const Eigen::VectorXd v = usable(res, j) ? Eigen::VectorXd(res.U.col(j) / res.norms(j))
                                                     : Eigen::VectorXd::Zero(X.rows());
            builder.add(v - w, 0.0, RowTag{RowKind::FsStep, k});
            builder.add(-v - w, 0.0, RowTag{RowKind::FsStep, k});
        }
    }
    return builder.build();
}

double r_stat(const FSPath& path, int k, double sigma) {
    if (k < 1 || k > path.size()) fail(ErrorCode::InvalidArgument, "k outside the path");
    if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
    const double drop = path.rss[static_cast<std::size_t>(k - 1)] - path.rss[static_cast<std::size_t>(k)];
    return std::max(0.0, drop) / (sigma * sigma);
}

}  // namespace selinf
