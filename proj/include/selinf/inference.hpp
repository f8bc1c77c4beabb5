#pragma once

#include "selinf/lars.hpp"
#include "selinf/lasso.hpp"
#include "selinf/linmodel.hpp"
#include "selinf/polytope.hpp"
#include "selinf/region.hpp"
#include "selinf/stepwise.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace selinf {

enum class InferenceMethod { Polyhedral, SpacingExact, SpacingSimplified, Significance, Unconditional };

std::string to_string(InferenceMethod method);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
};

struct InferenceReport {
    double statistic = 0.0;  // eta^T y_obs
    Eigen::VectorXd eta;
    double scale = 0.0;  // sigma ||eta||
    TruncationRegion region;
    double p_value = 1.0;
    // Right-tail probability of the statistic; for the spacing test this is T_k.
    double one_sided_p = 1.0;
    ConfidenceInterval ci;
    InferenceMethod method = InferenceMethod::Polyhedral;
    int k = 0;         // step index, 0 when not applicable
    int variable = -1;  // column index being tested
    bool line_search = false;
    bool asymptotic = false;
};

enum class Sided { Two, One };

// All p-values are clipped into [kMinPValue, 1].
inline constexpr double kMinPValue = 1e-300;

// nu = P(eta^T Y >= eta^T y_obs) under N(mu0, sigma^2 ||eta||^2) truncated to
// the region. One-sided returns nu, two-sided 2 min(nu, 1 - nu). Throws
// OutsideRegion when the statistic is not in the region.
double selective_pvalue(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& eta, double sigma,
                        const TruncationRegion& region, double mu0 = 0.0, Sided sided = Sided::Two);

// Equal-tailed interval: L solves F_L(eta^T y_obs) = 1 - alpha/2 and U solves
// F_U(eta^T y_obs) = alpha/2.
ConfidenceInterval selective_ci(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& eta, double sigma,
                                const TruncationRegion& region, double alpha);

// Builds the full report (statistic, p-value, interval) for one direction.
InferenceReport selective_report(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& eta, double sigma,
                                 const TruncationRegion& region, double alpha,
                                 InferenceMethod method = InferenceMethod::Polyhedral);

// ||(X_{M_cur}^+)^T s_cur - (X_{M_prev}^+)^T s_prev||. M_cur must be M_prev
// with exactly one index appended.
double omega(const DesignMatrix& X, const IndexList& M_prev, const std::vector<int>& s_prev,
             const IndexList& M_cur, const std::vector<int>& s_cur);

double omega(const LarsPath& path, int k);

enum class SignificanceMode { Direct, ClosedForm };

struct SignificanceResult {
    double statistic = 0.0;  // T_k
    double p_value = 1.0;    // exp(-rate T_k)
    double rate = 1.0;
    bool asymptotic = false;
};

// Covariance statistic at step k, which needs knot k+1. Direct mode solves
// the Lasso at lambda_{k+1} on the full design and on X_{M_{k-1}}; it throws
// ModelNotNested when the full fit is not supported on M_k with the path's
// signs or the restricted fit is not supported on M_{k-1}. Closed form uses
// omega_k^2 lambda_k (lambda_k - lambda_{k+1}) / sigma^2.
double significance_statistic(const LarsPath& path, int k, double sigma, SignificanceMode mode);

// rate r is the position of the step after the last signal variable
// (1 for the first null step). r > 1 is only justified asymptotically.
SignificanceResult significance_test(const LarsPath& path, int k, double sigma,
                                     SignificanceMode mode = SignificanceMode::ClosedForm, int rate = 1);

enum class SpacingVariant { Exact, Simplified };

struct SpacingResult {
    double statistic = 0.0;  // T_k in [0, 1]
    double p_value = 1.0;    // 2 min(T_k, 1 - T_k)
    double lower = 0.0;      // truncation lower limit used for lambda_k
    double upper = kInf;     // lambda_{k-1}
    double omega = 1.0;
};

// T_k = P(V >= lambda_k | lower <= V <= lambda_{k-1}) for V ~ N(0, sigma^2 /
// omega_k^2), with lambda_0 = +inf. The exact variant takes
// lower = max(c*_{k+1}, 0); the simplified variant takes lambda_{k+1} and
// throws MissingNextKnot at the last step of the path.
SpacingResult spacing_test(const LarsPath& path, int k, double sigma, SpacingVariant variant);

// Report for c_k^T theta = 0 with the spacing region; p_value is the two-sided
// spacing p-value and the interval covers c_k(j_k,s_k)^T theta.
InferenceReport spacing_report(const LarsPath& path, int k, double sigma, SpacingVariant variant,
                               double alpha);

// Selective test of the coefficient of the k-th forward-stepwise variable in
// the model M_k, conditioned on the first k steps.
InferenceReport fs_report(const DesignMatrix& X, const Eigen::VectorXd& y, const FSPath& path, int k,
                          double sigma, double alpha);

enum class LassoRegionMode { SignUnion, LineSearch };

// One report per active variable of the Lasso fit at lambda, testing its
// coefficient in the selected model, conditioned on the selected set.
std::vector<InferenceReport> lasso_reports(const DesignMatrix& X, const Eigen::VectorXd& y,
                                           const LassoSolution& fit, double sigma, double alpha,
                                           LassoRegionMode mode,
                                           std::int64_t max_signs = kDefaultMaxSignPatterns);

}  // namespace selinf
