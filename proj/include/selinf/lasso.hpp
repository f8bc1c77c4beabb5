#pragma once

#include "selinf/errors.hpp"
#include "selinf/linmodel.hpp"
#include "selinf/polytope.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace selinf {

struct LassoSolution {
    Eigen::VectorXd beta_hat;
    double lambda = 0.0;
    IndexList active;
    std::vector<int> signs;  // +1/-1, aligned with active
    double dual_gap = 0.0;
    int iterations = 0;
};

struct LassoOptions {
    // Stop when the duality gap is below tol * 0.5 * ||y||^2.
    double tol = 1e-14;
    int max_iter = 100000;
    // Coordinates with |beta_j| <= active_tol * max|beta| are treated as zero.
    double active_tol = 1e-10;
    // After coordinate descent, re-solve the stationarity equations on the
    // detected (M, s) and keep that solution when it passes the KKT check.
    bool polish = true;
};

class LassoDidNotConverge : public Error {
public:
    LassoDidNotConverge(Eigen::VectorXd beta, double gap, int max_iter);
    const Eigen::VectorXd& last_iterate() const { return beta_; }
    double gap() const { return gap_; }

private:
    Eigen::VectorXd beta_;
    double gap_;
};

// Minimizes 0.5 ||y - X b||^2 + lambda ||b||_1 by cyclic coordinate descent
// (ascending index order) with a duality-gap stopping rule.
LassoSolution lasso_fit(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                        const LassoOptions& options = {});

double lasso_objective(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                       const Eigen::VectorXd& beta);

struct KktReport {
    Eigen::VectorXd subgradient;
    double max_violation = 0.0;

    bool passes(double tol = 1e-6) const { return max_violation <= tol; }
};

// s_j = X_j^T (y - X beta) / lambda. Violation is |s_j - sign(beta_j)| over
// the active coordinates and max(0, |s_j| - 1) over the inactive ones.
KktReport kkt_check(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                    const Eigen::VectorXd& beta_hat);

// {y : the Lasso at lambda selects exactly M with signs s}. Rows, in order:
// (1/lambda) X_{-M}^T P_M^perp, then its negation (both tagged
// lasso-inactive), then -diag(s) (X_M^+)^T (lasso-sign).
Polyhedron lasso_polyhedron(const DesignMatrix& X, const IndexList& M, const std::vector<int>& s,
                            double lambda);

inline constexpr std::int64_t kDefaultMaxSignPatterns = std::int64_t{1} << 20;

// One polyhedron per sign pattern in {-1,+1}^|M|; their union is {M_hat = M}.
// Sign patterns are enumerated in binary order with bit i set meaning s_i = -1.
std::vector<Polyhedron> lasso_model_region(const DesignMatrix& X, const IndexList& M, double lambda,
                                           std::int64_t max_signs = kDefaultMaxSignPatterns);

}  // namespace selinf
