#include "selinf/inference.hpp"

#include "selinf/errors.hpp"
#include "selinf/truncnorm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace selinf {

namespace {

double clip_p(double p) { return std::clamp(p, kMinPValue, 1.0); }

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
}

Eigen::VectorXd sign_vector(const std::vector<int>& s) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) out(static_cast<Eigen::Index>(i)) = s[i];
    return out;
}

Eigen::VectorXd equiangular(const DesignMatrix& X, const IndexList& M, const std::vector<int>& s) {
    if (M.empty()) return Eigen::VectorXd::Zero(X.rows());
    return pinv_transpose_apply(M, X, sign_vector(s));
}

// Coefficient direction of the i-th member of M: (X_M^+)^T e_i.
Eigen::VectorXd coefficient_direction(const DesignMatrix& X, const IndexList& M, std::size_t i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M.size()));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    return pinv_transpose_apply(M, X, e);
}

std::vector<std::pair<int, int>> signed_support(const IndexList& M, const std::vector<int>& s) {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < M.size(); ++i) out.emplace_back(M[i], s[i]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string to_string(InferenceMethod method) {
    switch (method) {
        case InferenceMethod::Polyhedral: return "polyhedral";
        case InferenceMethod::SpacingExact: return "spacing_exact";
        case InferenceMethod::SpacingSimplified: return "spacing_simplified";
        case InferenceMethod::Significance: return "significance";
        case InferenceMethod::Unconditional: return "unconditional";
    }
    return "unknown";
}

double selective_pvalue(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& eta, double sigma,
                        const TruncationRegion& region, double mu0, Sided sided) {
    check_sigma(sigma);
    if (eta.size() != y_obs.size()) fail(ErrorCode::InvalidArgument, "eta and y_obs differ in length");
    const double scale = sigma * eta.norm();
    if (!(scale > 0.0)) fail(ErrorCode::InvalidArgument, "eta must be nonzero");
    const double stat = eta.dot(y_obs);
    if (!region.contains(stat, 1e-9 * (scale + std::abs(stat)))) {
        fail(ErrorCode::OutsideRegion, "statistic " + std::to_string(stat) + " lies outside the truncation region");
    }
    const TruncatedGaussian tg{mu0, scale, region.intervals};
    const double upper = tn_sf(stat, tg);
    if (sided == Sided::One) return clip_p(upper);
    return clip_p(2.0 * std::min(upper, tn_cdf(stat, tg)));
}

ConfidenceInterval selective_ci(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& eta, double sigma,
                                const TruncationRegion& region, double alpha) {
    check_sigma(sigma);
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
    const double scale = sigma * eta.norm();
    const double stat = eta.dot(y_obs);
    return ConfidenceInterval{tn_root_mu(stat, 1.0 - alpha / 2.0, region.intervals, scale),
                              tn_root_mu(stat, alpha / 2.0, region.intervals, scale)};
}

InferenceReport selective_report(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& eta, double sigma,
                                 const TruncationRegion& region, double alpha, InferenceMethod method) {
    InferenceReport report;
    report.statistic = eta.dot(y_obs);
    report.eta = eta;
    report.scale = sigma * eta.norm();
    report.region = region;
    report.p_value = selective_pvalue(y_obs, eta, sigma, region, 0.0, Sided::Two);
    report.one_sided_p = selective_pvalue(y_obs, eta, sigma, region, 0.0, Sided::One);
    report.ci = selective_ci(y_obs, eta, sigma, region, alpha);
    report.method = method;
    return report;
}

double omega(const DesignMatrix& X, const IndexList& M_prev, const std::vector<int>& s_prev,
             const IndexList& M_cur, const std::vector<int>& s_cur) {
    if (M_prev.size() != s_prev.size() || M_cur.size() != s_cur.size()) {
        fail(ErrorCode::InvalidArgument, "models and sign vectors differ in length");
    }
    if (M_cur.size() != M_prev.size() + 1 || !std::equal(M_prev.begin(), M_prev.end(), M_cur.begin()) ||
        !std::equal(s_prev.begin(), s_prev.end(), s_cur.begin())) {
        fail(ErrorCode::InvalidArgument, "M_cur must extend M_prev by exactly one index");
    }
    return (equiangular(X, M_cur, s_cur) - equiangular(X, M_prev, s_prev)).norm();
}

double omega(const LarsPath& path, int k) {
    if (k < 1 || k > path.size()) fail(ErrorCode::InvalidArgument, "step outside the path");
    return omega(path.X, path.model(k - 1), path.model_signs(k - 1), path.model(k), path.model_signs(k));
}

double significance_statistic(const LarsPath& path, int k, double sigma, SignificanceMode mode) {
    check_sigma(sigma);
    if (k < 1 || k > path.size()) fail(ErrorCode::InvalidArgument, "step outside the path");
    if (k + 1 > path.size()) {
        fail(ErrorCode::MissingNextKnot, "the covariance statistic at step " + std::to_string(k) +
                                             " needs knot " + std::to_string(k + 1));
    }
    const double lambda_k = path.knot(k);
    const double lambda_next = path.knot(k + 1);
    if (mode == SignificanceMode::ClosedForm) {
        const double w = omega(path, k);
        return w * w * lambda_k * (lambda_k - lambda_next) / (sigma * sigma);
    }

    if (!(lambda_next > 0.0)) fail(ErrorCode::InvalidArgument, "direct evaluation needs lambda_{k+1} > 0");
    const Eigen::VectorXd& y = path.y;
    const LassoSolution full = lasso_fit(path.X, y, lambda_next);
    if (signed_support(full.active, full.signs) != signed_support(path.model(k), path.model_signs(k))) {
        fail(ErrorCode::ModelNotNested, "Lasso at lambda_{k+1} is not supported on M_k with the path signs");
    }
    const double full_term = y.dot(path.X.data() * full.beta_hat);

    double restricted_term = 0.0;
    const IndexList M_prev = path.model(k - 1);
    if (!M_prev.empty()) {
        const DesignMatrix XM = path.X.subset(M_prev);
        const LassoSolution restricted = lasso_fit(XM, y, lambda_next);
        IndexList expected(M_prev.size());
        for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = static_cast<int>(i);
        if (signed_support(restricted.active, restricted.signs) !=
            signed_support(expected, path.model_signs(k - 1))) {
            fail(ErrorCode::ModelNotNested, "restricted Lasso at lambda_{k+1} does not keep M_{k-1} and its signs");
        }
        restricted_term = y.dot(XM.data() * restricted.beta_hat);
    }
    return (full_term - restricted_term) / (sigma * sigma);
}

SignificanceResult significance_test(const LarsPath& path, int k, double sigma, SignificanceMode mode,
                                     int rate) {
    if (rate < 1) fail(ErrorCode::InvalidArgument, "rate must be a positive integer");
    SignificanceResult out;
    out.statistic = significance_statistic(path, k, sigma, mode);
    out.rate = rate;
    out.p_value = clip_p(std::exp(-rate * out.statistic));
    out.asymptotic = rate > 1;
    return out;
}

SpacingResult spacing_test(const LarsPath& path, int k, double sigma, SpacingVariant variant) {
    check_sigma(sigma);
    if (k < 1 || k > path.size()) fail(ErrorCode::InvalidArgument, "step outside the path");
    SpacingResult out;
    out.omega = omega(path, k);
    out.upper = path.knot(k - 1);
    if (variant == SpacingVariant::Exact) {
        out.lower = std::max(lars_cstar(path, k).value, 0.0);
    } else {
        if (k + 1 > path.size()) {
            fail(ErrorCode::MissingNextKnot, "the simplified spacing test at step " + std::to_string(k) +
                                                 " needs knot " + std::to_string(k + 1));
        }
        out.lower = path.knot(k + 1);
    }
    const TruncatedGaussian tg{0.0, sigma / out.omega, {Interval{out.lower, out.upper}}};
    const double lambda_k = path.knot(k);
    out.statistic = clip_p(tn_sf(lambda_k, tg));
    out.p_value = clip_p(2.0 * std::min(tn_sf(lambda_k, tg), tn_cdf(lambda_k, tg)));
    return out;
}

InferenceReport spacing_report(const LarsPath& path, int k, double sigma, SpacingVariant variant,
                               double alpha) {
    const SpacingResult sp = spacing_test(path, k, sigma, variant);
    const Eigen::VectorXd& eta = path.entry_c[static_cast<std::size_t>(k - 1)];
    InferenceReport report;
    report.statistic = eta.dot(path.y);
    report.eta = eta;
    report.scale = sigma * eta.norm();
    report.region = TruncationRegion::from_intervals({Interval{sp.lower, sp.upper}});
    report.region.eta = eta;
    report.p_value = sp.p_value;
    report.one_sided_p = sp.statistic;
    report.ci = selective_ci(path.y, eta, sigma, report.region, alpha);
    report.method = variant == SpacingVariant::Exact ? InferenceMethod::SpacingExact
                                                     : InferenceMethod::SpacingSimplified;
    report.k = k;
    report.variable = path.steps[static_cast<std::size_t>(k - 1)].j;
    return report;
}

InferenceReport fs_report(const DesignMatrix& X, const Eigen::VectorXd& y, const FSPath& path, int k,
                          double sigma, double alpha) {
    if (k < 1 || k > path.size()) fail(ErrorCode::InvalidArgument, "step outside the path");
    const IndexList M = path.model(k);
    const Eigen::VectorXd eta = coefficient_direction(X, M, M.size() - 1);
    const TruncationRegion region = slice(fs_polyhedron(X, path, k), eta, sigma * sigma, y);
    InferenceReport report = selective_report(y, eta, sigma, region, alpha, InferenceMethod::Polyhedral);
    report.k = k;
    report.variable = M.back();
    return report;
}

std::vector<InferenceReport> lasso_reports(const DesignMatrix& X, const Eigen::VectorXd& y,
                                           const LassoSolution& fit, double sigma, double alpha,
                                           LassoRegionMode mode, std::int64_t max_signs) {
    check_sigma(sigma);
    std::vector<InferenceReport> out;
    const IndexList& M = fit.active;
    if (M.empty()) return out;

    std::vector<Polyhedron> components;
    if (mode == LassoRegionMode::SignUnion) components = lasso_model_region(X, M, fit.lambda, max_signs);
    const double lambda = fit.lambda;
    const Selector selector = [&X, lambda](const Eigen::VectorXd& v) { return lasso_fit(X, v, lambda).active; };

    for (std::size_t i = 0; i < M.size(); ++i) {
        const Eigen::VectorXd eta = coefficient_direction(X, M, i);
        const TruncationRegion region = mode == LassoRegionMode::SignUnion
                                            ? slice_union(components, eta, sigma * sigma, y)
                                            : line_search_region(selector, y, eta, sigma * sigma);
        InferenceReport report = selective_report(y, eta, sigma, region, alpha, InferenceMethod::Polyhedral);
        report.variable = M[i];
        report.line_search = mode == LassoRegionMode::LineSearch;
        out.push_back(std::move(report));
    }
    return out;
}

}  // namespace selinf
