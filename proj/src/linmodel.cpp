#include "selinf/linmodel.hpp"

#include "selinf/errors.hpp"

#include <cmath>
#include <string>

namespace selinf {

namespace {

void check_finite(const Eigen::MatrixXd& data) {
    if (data.rows() < 1 || data.cols() < 1) {
        fail(ErrorCode::InvalidArgument, "design matrix must have n >= 1 and p >= 1");
    }
    if (!data.allFinite()) {
        fail(ErrorCode::InvalidArgument, "design matrix contains non-finite entries");
    }
}

void check_flags(const Eigen::MatrixXd& data, bool centered, bool normalized) {
    const double n = static_cast<double>(data.rows());
    const double scale = data.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (centered && std::abs(data.col(j).sum()) > 1e-10 * n * std::max(scale, 1.0)) {
            fail(ErrorCode::InvalidArgument,
                 "column " + std::to_string(j) + " is flagged centered but does not sum to zero");
        }
        if (normalized && std::abs(data.col(j).squaredNorm() - 1.0) > 1e-10) {
            fail(ErrorCode::InvalidArgument,
                 "column " + std::to_string(j) + " is flagged normalized but lacks unit norm");
        }
    }
}

}  // namespace

DesignMatrix::DesignMatrix(Eigen::MatrixXd data, bool centered, bool normalized)
    : data_(std::move(data)), centered_(centered), normalized_(normalized) {
    check_finite(data_);
    check_flags(data_, centered_, normalized_);
    means_ = Eigen::VectorXd::Zero(data_.cols());
    norms_ = data_.colwise().norm().transpose();
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd data, Eigen::VectorXd column_means,
                           Eigen::VectorXd column_norms, bool centered, bool normalized)
    : data_(std::move(data)),
      means_(std::move(column_means)),
      norms_(std::move(column_norms)),
      centered_(centered),
      normalized_(normalized) {
    check_finite(data_);
    check_flags(data_, centered_, normalized_);
    if (means_.size() != data_.cols() || norms_.size() != data_.cols()) {
        fail(ErrorCode::InvalidArgument, "column metadata length does not match p");
    }
}

Eigen::MatrixXd DesignMatrix::select(const IndexList& cols) const {
    Eigen::MatrixXd out(data_.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const int j = cols[i];
        if (j < 0 || j >= data_.cols()) {
            fail(ErrorCode::InvalidArgument, "column index " + std::to_string(j) + " out of range");
        }
        out.col(static_cast<Eigen::Index>(i)) = data_.col(j);
    }
    return out;
}

DesignMatrix DesignMatrix::subset(const IndexList& cols) const {
    Eigen::VectorXd means(cols.size());
    Eigen::VectorXd norms(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        means(static_cast<Eigen::Index>(i)) = means_(cols[i]);
        norms(static_cast<Eigen::Index>(i)) = norms_(cols[i]);
    }
    return DesignMatrix(select(cols), std::move(means), std::move(norms), centered_, normalized_);
}

Eigen::VectorXd DesignMatrix::to_original_scale(const Eigen::VectorXd& beta) const {
    if (!normalized_) return beta;
    return beta.cwiseQuotient(norms_);
}

StandardizedData standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool normalize) {
    if (X.rows() < 2) fail(ErrorCode::InvalidArgument, "standardize needs n >= 2");
    if (y.size() != X.rows()) fail(ErrorCode::InvalidArgument, "y length does not match rows of X");
    if (!y.allFinite()) fail(ErrorCode::InvalidArgument, "y contains non-finite entries");
    check_finite(X);

    const Eigen::VectorXd means = X.colwise().mean().transpose();
    Eigen::MatrixXd centered = X.rowwise() - means.transpose();
    const double scale = X.cwiseAbs().maxCoeff();
    Eigen::VectorXd norms = centered.colwise().norm().transpose();

    if (normalize) {
        for (Eigen::Index j = 0; j < centered.cols(); ++j) {
            // Treat round-off left over from removing a constant as zero.
            if (norms(j) <= 1e-12 * std::max(scale, 1.0) * std::sqrt(static_cast<double>(X.rows()))) {
                fail(ErrorCode::ZeroVarianceColumn,
                     "column " + std::to_string(j) + " is constant and cannot be normalized");
            }
            centered.col(j) /= norms(j);
        }
    }

    const double y_mean = y.mean();
    Eigen::VectorXd yc = y.array() - y_mean;
    return StandardizedData{DesignMatrix(std::move(centered), means, norms, true, normalize),
                            std::move(yc), y_mean};
}

Projector::Projector(const DesignMatrix& X, IndexList basis, LinalgOptions options)
    : basis_(std::move(basis)), n_(X.rows()) {
    factor(X.select(basis_), options);
}

Projector::Projector(const Eigen::MatrixXd& XM, LinalgOptions options) : n_(XM.rows()) {
    basis_.resize(static_cast<std::size_t>(XM.cols()));
    for (std::size_t i = 0; i < basis_.size(); ++i) basis_[i] = static_cast<int>(i);
    factor(XM, options);
}

void Projector::factor(const Eigen::MatrixXd& XM, LinalgOptions options) {
    const Eigen::Index m = XM.cols();
    if (m == 0) {
        q_.resize(n_, 0);
        r_.resize(0, 0);
        return;
    }
    if (m > n_) {
        fail(ErrorCode::SingularDesign, "more columns than rows in X_M");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(XM);
    q_ = qr.householderQ() * Eigen::MatrixXd::Identity(n_, m);
    r_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r_).singularValues();
    if (!(sv(0) > 0.0) || sv(m - 1) <= options.rank_tol * sv(0)) {
        fail(ErrorCode::SingularDesign, "X_M is rank deficient beyond tolerance");
    }
}

Eigen::VectorXd Projector::apply(const Eigen::VectorXd& v) const {
    if (rank() == 0) return Eigen::VectorXd::Zero(v.size());
    return q_ * (q_.transpose() * v);
}

Eigen::VectorXd Projector::apply_complement(const Eigen::VectorXd& v) const {
    if (rank() == 0) return v;
    return v - q_ * (q_.transpose() * v);
}

Eigen::MatrixXd Projector::apply_complement(const Eigen::MatrixXd& V) const {
    if (rank() == 0) return V;
    return V - q_ * (q_.transpose() * V);
}

Eigen::VectorXd Projector::coefficients(const Eigen::VectorXd& v) const {
    if (rank() == 0) return Eigen::VectorXd(0);
    return r_.triangularView<Eigen::Upper>().solve(q_.transpose() * v);
}

Eigen::VectorXd Projector::gram_solve(const Eigen::VectorXd& s) const {
    if (rank() == 0) return Eigen::VectorXd(0);
    const Eigen::VectorXd w = r_.transpose().triangularView<Eigen::Lower>().solve(s);
    return r_.triangularView<Eigen::Upper>().solve(w);
}

Eigen::VectorXd Projector::pinv_transpose_apply(const Eigen::VectorXd& s) const {
    if (s.size() != rank()) {
        fail(ErrorCode::InvalidArgument, "sign vector length does not match |M|");
    }
    if (rank() == 0) return Eigen::VectorXd::Zero(n_);
    return q_ * r_.transpose().triangularView<Eigen::Lower>().solve(s);
}

Eigen::MatrixXd Projector::pinv() const {
    if (rank() == 0) return Eigen::MatrixXd(0, n_);
    return r_.triangularView<Eigen::Upper>().solve(q_.transpose());
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& XM, const Eigen::VectorXd& y,
                              LinalgOptions options) {
    return Projector(XM, options).coefficients(y);
}

Eigen::VectorXd least_squares(const DesignMatrix& X, const IndexList& M, const Eigen::VectorXd& y,
                              LinalgOptions options) {
    return Projector(X, M, options).coefficients(y);
}

Eigen::VectorXd project(const IndexList& M, const DesignMatrix& X, const Eigen::VectorXd& v,
                        bool complement, LinalgOptions options) {
    const Projector proj(X, M, options);
    return complement ? proj.apply_complement(v) : proj.apply(v);
}

Eigen::VectorXd pinv_transpose_apply(const IndexList& M, const DesignMatrix& X,
                                     const Eigen::VectorXd& s, LinalgOptions options) {
    return Projector(X, M, options).pinv_transpose_apply(s);
}

double estimate_sigma(const DesignMatrix& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const Eigen::Index dof = n - p - (X.centered() ? 1 : 0);
    if (dof < 1) {
        fail(ErrorCode::InvalidArgument, "sigma estimation needs n > p + 1");
    }
    const Projector full(X.data());
    const double rss = full.apply_complement(y).squaredNorm();
    return std::sqrt(rss / static_cast<double>(dof));
}

}  // namespace selinf
