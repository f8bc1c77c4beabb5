#pragma once

#include "selinf/linmodel.hpp"
#include "selinf/polytope.hpp"

#include <Eigen/Dense>

#include <vector>

namespace selinf {

struct FSPath {
    IndexList order;
    std::vector<int> signs;
    // residuals[k] = P_k^perp y, k = 0..m
    std::vector<Eigen::VectorXd> residuals;
    std::vector<double> rss;

    int size() const { return static_cast<int>(order.size()); }
    IndexList model(int k) const { return IndexList(order.begin(), order.begin() + k); }
};

// Greedy forward selection: at each step the column whose residualized
// version is most correlated (in absolute value, after normalization) with
// the current residual enters. Ties go to the smallest index. Columns whose
// residualized norm falls below 1e-10 * ||X_j|| are skipped; when every
// remaining column is skipped, CollinearCandidate is thrown.
FSPath fs_path(const DesignMatrix& X, const Eigen::VectorXd& y, int steps);

// Selection event of the first m steps: for every step k and every column
// outside M_k, two rows (+/- v_j - s_k w_k)^T with offset 0, where v and w
// are the normalized residualized columns. 2pm - m^2 - m rows in total.
Polyhedron fs_polyhedron(const DesignMatrix& X, const FSPath& path, int m);

// Drop in residual sum of squares at step k, divided by sigma^2.
double r_stat(const FSPath& path, int k, double sigma);

}  // namespace selinf
