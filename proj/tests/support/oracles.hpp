#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's own numerics: quadrature instead of Mills ratios, explicit
// inverses instead of QR.

#include "selinf/linmodel.hpp"
#include "selinf/region.hpp"
#include "selinf/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log of the integral of the standard normal density over [a, b], by
// adaptive Gauss-Kronrod on exp(-(t^2 - m^2)/2), where m is the point of the
// interval closest to zero. Far tails stay representable this way.
inline double log_std_mass(double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    const double m = (a <= 0.0 && b >= 0.0) ? 0.0 : (a > 0.0 ? a : b);
    // Beyond |t| = sqrt(m^2 + 90) the rescaled integrand is below e^-45.
    const double reach = std::sqrt(m * m + 90.0);
    const double lo = std::max(a, -reach);
    const double hi = std::min(b, reach);
    auto g = [m](double t) { return std::exp(-0.5 * (t - m) * (t + m)); };
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 15, 1e-13, &err);
    return std::log(integral) - 0.5 * m * m - kLogSqrt2Pi;
}

inline double log_mass(double a, double b, double mu, double sigma) {
    return log_std_mass((a - mu) / sigma, (b - mu) / sigma);
}

inline double log_sum_exp(const std::vector<double>& v) {
    double top = -std::numeric_limits<double>::infinity();
    for (double x : v) top = std::max(top, x);
    if (!std::isfinite(top)) return top;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - top);
    return top + std::log(acc);
}

// Truncated normal distribution function over a sorted union of intervals.
inline double tn_cdf(double x, double mu, double sigma, const std::vector<selinf::Interval>& region) {
    std::vector<double> left;
    std::vector<double> all;
    for (const auto& iv : region) {
        all.push_back(log_mass(iv.lo, iv.hi, mu, sigma));
        if (x > iv.lo) left.push_back(log_mass(iv.lo, std::min(x, iv.hi), mu, sigma));
    }
    if (left.empty()) return 0.0;
    return std::exp(log_sum_exp(left) - log_sum_exp(all));
}

inline Eigen::MatrixXd columns(const selinf::DesignMatrix& X, const selinf::IndexList& M) {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(M.size()));
    for (std::size_t i = 0; i < M.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = X.column(M[i]);
    return out;
}

// I - X_M (X_M^T X_M)^{-1} X_M^T with an explicit inverse.
inline Eigen::MatrixXd complement_projector(const selinf::DesignMatrix& X, const selinf::IndexList& M) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    if (M.empty()) return P;
    const Eigen::MatrixXd XM = columns(X, M);
    const Eigen::MatrixXd G = (XM.transpose() * XM).inverse();
    return P - XM * G * XM.transpose();
}

// X_M^+ = (X_M^T X_M)^{-1} X_M^T with an explicit inverse.
inline Eigen::MatrixXd pinv(const selinf::DesignMatrix& X, const selinf::IndexList& M) {
    const Eigen::MatrixXd XM = columns(X, M);
    return (XM.transpose() * XM).inverse() * XM.transpose();
}

inline Eigen::VectorXd sign_vector(const std::vector<int>& s) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

// s_M^T X_M^+ X_j, zero for the empty model.
inline double sign_projection(const selinf::DesignMatrix& X, const selinf::IndexList& M,
                              const std::vector<int>& s, int j) {
    if (M.empty()) return 0.0;
    return sign_vector(s).dot(pinv(X, M) * X.column(j));
}

// Candidate direction for (j, s) at step k+1, assembled from step-k
// quantities only: the previous model M, its signs, and the entering pair.
inline Eigen::VectorXd h_vector(const selinf::DesignMatrix& X, const selinf::IndexList& M,
                                const std::vector<int>& sM, int jk, int sk, int j, int s) {
    const Eigen::MatrixXd P = complement_projector(X, M);
    const Eigen::VectorXd pj = P * X.column(j);
    const Eigen::VectorXd pk = P * X.column(jk);
    const double theta = X.column(jk).dot(pj) / X.column(jk).dot(pk);
    const double den = (s - sign_projection(X, M, sM, j)) - theta * (sk - sign_projection(X, M, sM, jk));
    return (pj - theta * pk) / den;
}

// |s_k - s_M^T X_M^+ X_jk| / sqrt(X_jk^T P_M^perp X_jk).
inline double omega(const selinf::DesignMatrix& X, const selinf::IndexList& M, const std::vector<int>& sM,
                    int jk, int sk) {
    const Eigen::MatrixXd P = complement_projector(X, M);
    const double num = sk - sign_projection(X, M, sM, jk);
    return std::abs(num) / std::sqrt(X.column(jk).dot(P * X.column(jk)));
}

inline Eigen::MatrixXd gaussian_matrix(int n, int p, selinf::SplitMix64& rng) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd A(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) A(i, j) = z(rng);
    return A;
}

inline Eigen::VectorXd gaussian(int n, selinf::SplitMix64& rng, double sigma = 1.0) {
    std::normal_distribution<double> z(0.0, sigma);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

// Centered design with unit-norm columns.
inline selinf::DesignMatrix random_design(int n, int p, selinf::SplitMix64& rng) {
    Eigen::MatrixXd A = gaussian_matrix(n, p, rng);
    for (int j = 0; j < p; ++j) {
        A.col(j).array() -= A.col(j).mean();
        A.col(j).normalize();
    }
    return selinf::DesignMatrix(A, true, true);
}

// Centered design with orthonormal columns, via Gram-Schmidt on centered draws.
inline selinf::DesignMatrix orthonormal_design(int n, int p, selinf::SplitMix64& rng) {
    Eigen::MatrixXd A = gaussian_matrix(n, p, rng);
    for (int j = 0; j < p; ++j) {
        A.col(j).array() -= A.col(j).mean();
        for (int i = 0; i < j; ++i) A.col(j) -= A.col(i).dot(A.col(j)) * A.col(i);
        for (int i = 0; i < j; ++i) A.col(j) -= A.col(i).dot(A.col(j)) * A.col(i);
        A.col(j).normalize();
    }
    return selinf::DesignMatrix(A, true, true);
}

// Soft-thresholding, the Lasso solution for an orthonormal design.
inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& u, double lambda) {
    Eigen::VectorXd b(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u(i)) - lambda;
        b(i) = a > 0.0 ? std::copysign(a, u(i)) : 0.0;
    }
    return b;
}

// Asymptotic 1% critical value of the one-sample Kolmogorov-Smirnov distance.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

inline double ks_uniform(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = std::clamp(v[i], 0.0, 1.0);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

}  // namespace oracle
