#include "selinf/lars.hpp"

#include "selinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace selinf {

namespace {

constexpr double kDenominatorTol = 1e-12;
constexpr double kCollinearTol = 1e-10;
constexpr double kAngleTol = 1e-10;

Eigen::VectorXd sign_vector(const std::vector<int>& s) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) out(static_cast<Eigen::Index>(i)) = s[i];
    return out;
}

// (X_M^+)^T s_M, zero for the empty model.
Eigen::VectorXd equiangular(const Projector& proj, const std::vector<int>& s) {
    if (s.empty()) return Eigen::VectorXd::Zero(proj.dim());
    return proj.pinv_transpose_apply(sign_vector(s));
}

// Every admissible c(j, s) for j outside M, ordered by j and then s = +1, -1.
std::vector<CVector> candidates(const DesignMatrix& X, const IndexList& M, const std::vector<int>& sM) {
    const Projector proj(X, M);
    const Eigen::VectorXd a = equiangular(proj, sM);
    const Eigen::MatrixXd U = proj.apply_complement(X.data());
    std::vector<char> in_model(static_cast<std::size_t>(X.cols()), 0);
    for (int j : M) in_model[static_cast<std::size_t>(j)] = 1;

    std::vector<CVector> out;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (in_model[static_cast<std::size_t>(j)]) continue;
        const double norm = U.col(j).norm();
        if (norm < kCollinearTol * X.data().col(j).norm() || norm == 0.0) continue;
        const double cross = X.data().col(j).dot(a);
        for (int s : {1, -1}) {
            const double denom = s - cross;
            if (std::abs(denom) <= kDenominatorTol) continue;
            out.push_back(CVector{static_cast<int>(j), s, U.col(j) / denom});
        }
    }
    return out;
}

void check_step(const LarsPath& path, int k) {
    if (k < 1 || k > path.size()) {
        fail(ErrorCode::InvalidArgument, "step " + std::to_string(k) + " outside a path of length " +
                                             std::to_string(path.size()));
    }
}

// Pairs outside M_l split by the angle their step-l vector makes with c_l,
// keeping only those with c_l(j,s)^T y <= lambda_l.
struct AngleSets {
    std::vector<CVector> plus;
    std::vector<CVector> minus;
    std::vector<CVector> zero;
};

AngleSets angle_sets(const LarsPath& path, int l) {
    const Eigen::VectorXd& cl = path.entry_c[static_cast<std::size_t>(l - 1)];
    const double cl_sq = cl.squaredNorm();
    const int jl = path.steps[static_cast<std::size_t>(l - 1)].j;
    const double lambda = path.knot(l);
    AngleSets out;
    for (CVector& c : candidates(path.X, path.model(l - 1), path.model_signs(l - 1))) {
        if (c.j == jl || c.vector.dot(path.y) > lambda) continue;
        const double inner = c.vector.dot(cl);
        if (std::abs(inner - cl_sq) <= kAngleTol * cl_sq) {
            out.zero.push_back(std::move(c));
        } else if (inner < cl_sq) {
            out.plus.push_back(std::move(c));
        } else {
            out.minus.push_back(std::move(c));
        }
    }
    return out;
}

// c_{l+1}(j, s) for each pair, dropping those with a degenerate denominator.
std::vector<CVector> advance(const LarsPath& path, int l, const std::vector<CVector>& pairs) {
    const IndexList M = path.model(l);
    const std::vector<int> sM = path.model_signs(l);
    std::vector<CVector> out;
    for (const CVector& c : pairs) {
        try {
            out.push_back(lars_c(path.X, M, sM, c.j, c.s));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateDenominator) throw;
        }
    }
    return out;
}

}  // namespace

double LarsPath::knot(int k) const {
    if (k == 0) return kInf;
    if (k < 0 || k > size()) fail(ErrorCode::MissingNextKnot, "no knot " + std::to_string(k) + " on this path");
    return steps[static_cast<std::size_t>(k - 1)].knot;
}

IndexList LarsPath::model(int k) const {
    IndexList out;
    for (int i = 0; i < k; ++i) out.push_back(steps[static_cast<std::size_t>(i)].j);
    return out;
}

std::vector<int> LarsPath::model_signs(int k) const {
    std::vector<int> out;
    for (int i = 0; i < k; ++i) out.push_back(steps[static_cast<std::size_t>(i)].s);
    return out;
}

CVector lars_c(const DesignMatrix& X, const IndexList& M_prev, const std::vector<int>& s_prev, int j,
               int s) {
    if (M_prev.size() != s_prev.size()) fail(ErrorCode::InvalidArgument, "M and s differ in length");
    if (j < 0 || j >= X.cols()) fail(ErrorCode::InvalidArgument, "column index out of range");
    if (s != 1 && s != -1) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
    if (std::find(M_prev.begin(), M_prev.end(), j) != M_prev.end()) {
        fail(ErrorCode::InvalidArgument, "column " + std::to_string(j) + " is already active");
    }
    const Projector proj(X, M_prev);
    const double denom = s - X.data().col(j).dot(equiangular(proj, s_prev));
    if (std::abs(denom) <= kDenominatorTol) {
        fail(ErrorCode::DegenerateDenominator,
             "denominator for column " + std::to_string(j) + " is " + std::to_string(denom));
    }
    return CVector{j, s, proj.apply_complement(Eigen::VectorXd(X.data().col(j))) / denom};
}

LarsPath lars_path(const DesignMatrix& X, const Eigen::VectorXd& y, int steps) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) fail(ErrorCode::InvalidArgument, "y length does not match rows of X");
    if (steps < 1 || steps > std::min<Eigen::Index>(n - 1, p)) {
        fail(ErrorCode::InvalidArgument,
             "steps must lie in [1, min(n-1, p)], got " + std::to_string(steps));
    }

    LarsPath path{X, y, {}, {}, {}, {}};
    for (int k = 1; k <= steps; ++k) {
        const IndexList M = path.model(k - 1);
        const std::vector<int> sM = path.model_signs(k - 1);
        const double lambda_prev = path.knot(k - 1);
        std::vector<CVector> cs = candidates(X, M, sM);
        if (cs.empty()) {
            fail(ErrorCode::CollinearCandidate,
                 "no admissible candidate remains at step " + std::to_string(k));
        }

        LarsStep step;
        int best = -1;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const Candidate cand{cs[i].j, cs[i].s, cs[i].vector.dot(y)};
            if (cand.value <= lambda_prev) {
                step.competitors.push_back(cand);
                if (cand.value >= 0.0 && (best < 0 || cand.value > cs[static_cast<std::size_t>(best)].vector.dot(y))) {
                    best = static_cast<int>(i);
                }
            } else {
                step.dominated.push_back(cand);
            }
        }
        if (best < 0) {
            fail(ErrorCode::NoFeasibleEntry, "no candidate knot in [0, lambda_" + std::to_string(k - 1) +
                                                 "] at step " + std::to_string(k));
        }
        const CVector& entry = cs[static_cast<std::size_t>(best)];
        step.j = entry.j;
        step.s = entry.s;
        step.knot = entry.vector.dot(y);

        // On [lambda_k, lambda_{k-1}] the active block solves
        // X_M^T (y - X_M b) = lambda s_M.
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        if (!M.empty()) {
            const Projector proj(X, M);
            const Eigen::VectorXd bm = proj.coefficients(y) - step.knot * proj.gram_solve(sign_vector(sM));
            for (std::size_t i = 0; i < M.size(); ++i) beta(M[i]) = bm(static_cast<Eigen::Index>(i));
        }
        path.residual_at_knots.push_back(y - X.data() * beta);
        path.beta_at_knots.push_back(std::move(beta));
        path.entry_c.push_back(entry.vector);
        path.steps.push_back(std::move(step));
    }
    return path;
}

CStar lars_cstar(const LarsPath& path, int k) {
    check_step(path, k);
    CStar out;
    out.pairs = advance(path, k, angle_sets(path, k).plus);
    for (const CVector& c : out.pairs) {
        const double v = c.vector.dot(path.y);
        out.value = out.empty ? v : std::max(out.value, v);
        out.empty = false;
    }
    return out;
}

Polyhedron lars_polyhedron(const LarsPath& path, int k, LarsMode mode) {
    check_step(path, k);
    auto c_entry = [&](int l) -> const Eigen::VectorXd& { return path.entry_c[static_cast<std::size_t>(l - 1)]; };

    PolyhedronBuilder builder(path.X.rows());
    for (int l = 1; l < k; ++l) builder.add(c_entry(l + 1) - c_entry(l), 0.0, RowTag{RowKind::LarsOrder, l});
    builder.add(-c_entry(k), 0.0, RowTag{RowKind::LarsOrder, k});

    const CStar cstar = lars_cstar(path, k);
    if (mode == LarsMode::Reduced) {
        builder.add(-c_entry(k), -cstar.value, RowTag{RowKind::LarsCompete, k});
        return builder.build();
    }

    for (const CVector& c : cstar.pairs) builder.add(c.vector - c_entry(k), 0.0, RowTag{RowKind::LarsCompete, k});
    for (int l = 1; l <= k; ++l) {
        const AngleSets sets = angle_sets(path, l);
        for (const CVector& c : advance(path, l, sets.minus)) {
            builder.add(c_entry(l) - c.vector, 0.0, RowTag{RowKind::LarsCompete, l});
        }
        for (const CVector& c : sets.zero) builder.add(c.vector - c_entry(l), 0.0, RowTag{RowKind::LarsCompete, l});
    }

    for (int l = 1; l <= k; ++l) {
        const LarsStep& step = path.steps[static_cast<std::size_t>(l - 1)];
        const IndexList M = path.model(l - 1);
        const std::vector<int> sM = path.model_signs(l - 1);
        for (const Candidate& cand : step.competitors) {
            const Eigen::VectorXd c = lars_c(path.X, M, sM, cand.j, cand.s).vector;
            if (l >= 2) builder.add(c - c_entry(l - 1), 0.0, RowTag{RowKind::LarsCompete, l});
            if (cand.j != step.j || cand.s != step.s) builder.add(c - c_entry(l), 0.0, RowTag{RowKind::LarsCompete, l});
        }
        for (const Candidate& cand : step.dominated) {
            const Eigen::VectorXd c = lars_c(path.X, M, sM, cand.j, cand.s).vector;
            builder.add(c_entry(l - 1) - c, 0.0, RowTag{RowKind::LarsCompete, l});
        }
        builder.add(-c_entry(l), 0.0, RowTag{RowKind::LarsCompete, l});
    }
    return builder.build();
}

}  // namespace selinf
