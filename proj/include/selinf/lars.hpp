#pragma once

#include "selinf/linmodel.hpp"
#include "selinf/polytope.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace selinf {

// c_k(j, s): the vector whose inner product with y is the knot at which the
// pair (j, s) would join the active set at step k.
struct CVector {
    int j = -1;
    int s = 1;
    Eigen::VectorXd vector;
};

struct Candidate {
    int j = -1;
    int s = 1;
    double value = 0.0;  // c_k(j, s)^T y

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct LarsStep {
    int j = -1;
    int s = 1;
    double knot = 0.0;
    // Pairs with c_k(j,s)^T y <= lambda_{k-1} (the entering pair included),
    // and the rest. Both sorted by (j, -s).
    std::vector<Candidate> competitors;
    std::vector<Candidate> dominated;
};

struct LarsPath {
    DesignMatrix X;
    Eigen::VectorXd y;
    std::vector<LarsStep> steps;
    // beta_at_knots[k-1] and residual_at_knots[k-1] are taken at lambda_k.
    std::vector<Eigen::VectorXd> beta_at_knots;
    std::vector<Eigen::VectorXd> residual_at_knots;
    // c_k(j_k, s_k) for every step.
    std::vector<Eigen::VectorXd> entry_c;

    int size() const { return static_cast<int>(steps.size()); }
    double knot(int k) const;  // lambda_0 = +inf
    IndexList model(int k) const;
    std::vector<int> model_signs(int k) const;
};

// Least angle regression for `steps` knots, 1 <= steps <= min(n-1, p).
// Knot ties go to the smallest index, then s = +1. Pairs whose denominator
// is within 1e-12 of zero, or whose residualized column has norm below
// 1e-10 * ||X_j||, are not candidates.
LarsPath lars_path(const DesignMatrix& X, const Eigen::VectorXd& y, int steps);

// c = P_{M}^perp X_j / (s - X_j^T (X_M^+)^T s_M). Throws DegenerateDenominator
// when |s - X_j^T (X_M^+)^T s_M| <= 1e-12.
CVector lars_c(const DesignMatrix& X, const IndexList& M_prev, const std::vector<int>& s_prev, int j,
               int s);

struct CStar {
    // max over S_k^+ of c_{k+1}(j,s)^T y, or 0 when S_k^+ is empty.
    double value = 0.0;
    bool empty = true;
    // c_{k+1}(j,s) for every pair of S_k^+.
    std::vector<CVector> pairs;
};

// S_k^+ = {(j,s) : j not in M_k, c_k(j,s)^T c_k(j_k,s_k) < ||c_k(j_k,s_k)||^2,
//                  c_k(j,s)^T y <= lambda_k}.
CStar lars_cstar(const LarsPath& path, int k);

enum class LarsMode { Exact, Reduced };

// Reduced: k+1 rows. For l < k, (c_{l+1} - c_l)^T y <= 0; then -c_k^T y <= 0
// and -c_k^T y <= -c*. Exact: the ordering rows, -c_k^T y <= 0, one
// (c_{k+1}(j,s) - c_k)^T y <= 0 row per pair of S_k^+, the S_l^- and S_l^0
// rows for l <= k, and the competitor rows of every step.
Polyhedron lars_polyhedron(const LarsPath& path, int k, LarsMode mode);

}  // namespace selinf
