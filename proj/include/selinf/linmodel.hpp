#pragma once

#include <Eigen/Dense>

#include <vector>

namespace selinf {

using IndexList = std::vector<int>;

struct LinalgOptions {
    // Columns are declared dependent when the smallest singular value of X_M
    // falls below rank_tol times the largest.
    double rank_tol = 1e-10;
};

// An n x p design with the preprocessing applied to it. Immutable.
class DesignMatrix {
public:
    // Wraps an already prepared matrix. The claimed flags are verified:
    // centered columns must sum to zero and normalized columns must have unit
    // squared norm, otherwise InvalidArgument is thrown.
    explicit DesignMatrix(Eigen::MatrixXd data, bool centered = false, bool normalized = false);

    DesignMatrix(Eigen::MatrixXd data, Eigen::VectorXd column_means, Eigen::VectorXd column_norms,
                 bool centered, bool normalized);

    Eigen::Index rows() const { return data_.rows(); }
    Eigen::Index cols() const { return data_.cols(); }
    const Eigen::MatrixXd& data() const { return data_; }
    auto column(int j) const { return data_.col(j); }

    // Means removed during centering (zeros when not centered).
    const Eigen::VectorXd& column_means() const { return means_; }
    // Euclidean norms of the centered columns before any rescaling.
    const Eigen::VectorXd& column_norms() const { return norms_; }
    bool centered() const { return centered_; }
    bool normalized() const { return normalized_; }

    Eigen::MatrixXd select(const IndexList& cols) const;
    DesignMatrix subset(const IndexList& cols) const;

    // Maps coefficients fitted on this design back to the raw column scale.
    Eigen::VectorXd to_original_scale(const Eigen::VectorXd& beta) const;

private:
    Eigen::MatrixXd data_;
    Eigen::VectorXd means_;
    Eigen::VectorXd norms_;
    bool centered_ = false;
    bool normalized_ = false;
};

struct StandardizedData {
    DesignMatrix X;
    Eigen::VectorXd y;
    double y_mean = 0.0;
};

// Centers every column of X and y; optionally rescales each column of X to
// unit squared norm. y is centered but never rescaled.
StandardizedData standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool normalize);

// Orthogonal projector onto span(X_M), backed by a thin Householder QR of X_M.
// An empty basis is allowed: P_M = 0 and the complement is the identity.
class Projector {
public:
    Projector(const DesignMatrix& X, IndexList basis, LinalgOptions options = {});
    explicit Projector(const Eigen::MatrixXd& XM, LinalgOptions options = {});

    const IndexList& basis() const { return basis_; }
    Eigen::Index dim() const { return n_; }
    Eigen::Index rank() const { return q_.cols(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply_complement(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd apply_complement(const Eigen::MatrixXd& V) const;

    // argmin_b ||v - X_M b||
    Eigen::VectorXd coefficients(const Eigen::VectorXd& v) const;
    // (X_M^T X_M)^{-1} s
    Eigen::VectorXd gram_solve(const Eigen::VectorXd& s) const;
    // (X_M^+)^T s = X_M (X_M^T X_M)^{-1} s
    Eigen::VectorXd pinv_transpose_apply(const Eigen::VectorXd& s) const;
    // X_M^+ as an m x n matrix.
    Eigen::MatrixXd pinv() const;

private:
    void factor(const Eigen::MatrixXd& XM, LinalgOptions options);

    IndexList basis_;
    Eigen::Index n_ = 0;
    Eigen::MatrixXd q_;
    Eigen::MatrixXd r_;
};

Eigen::VectorXd least_squares(const Eigen::MatrixXd& XM, const Eigen::VectorXd& y,
                              LinalgOptions options = {});
Eigen::VectorXd least_squares(const DesignMatrix& X, const IndexList& M, const Eigen::VectorXd& y,
                              LinalgOptions options = {});

Eigen::VectorXd project(const IndexList& M, const DesignMatrix& X, const Eigen::VectorXd& v,
                        bool complement, LinalgOptions options = {});

Eigen::VectorXd pinv_transpose_apply(const IndexList& M, const DesignMatrix& X,
                                     const Eigen::VectorXd& s, LinalgOptions options = {});

// Residual-variance estimate from the full least-squares fit:
// sqrt(RSS / (n - p - centered)). Only meaningful when sigma is unknown; the
// exact selective guarantees assume a known sigma.
double estimate_sigma(const DesignMatrix& X, const Eigen::VectorXd& y);

}  // namespace selinf
