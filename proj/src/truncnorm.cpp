#include "selinf/truncnorm.hpp"

#include "selinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace selinf {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
// Above this standardized value tail quantities go through the Mills ratio.
constexpr double kTailSwitch = 8.0;

// log(1 - exp(d)) for d <= 0.
double log1mexp(double d) {
    if (d == 0.0) return -kInf;
    if (d > -std::numbers::ln2) return std::log(-std::expm1(d));
    return std::log1p(-std::exp(d));
}

double logsumexp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log Q(beta) - log Q(alpha) for 0 <= alpha <= beta, width = beta - alpha
// supplied separately so it is not recomputed from large cancelling numbers.
double log_sf_ratio(double alpha, double beta, double width) {
    if (beta == kInf) return -kInf;
    if (alpha > 3.0) {
        return -0.5 * width * (2.0 * alpha + width) + std::log(mills_ratio(beta)) -
               std::log(mills_ratio(alpha));
    }
    return log_norm_sf(beta) - log_norm_sf(alpha);
}

// log P(alpha <= Z <= beta) for alpha >= 0.
double log_upper_mass(double alpha, double beta, double width) {
    return log_norm_sf(alpha) + log1mexp(log_sf_ratio(alpha, beta, width));
}

void validate(const TruncatedGaussian& tg) {
    if (!(tg.sigma > 0.0) || !std::isfinite(tg.sigma)) {
        fail(ErrorCode::InvalidArgument, "truncated Gaussian needs a positive finite sigma");
    }
    if (!std::isfinite(tg.mu)) fail(ErrorCode::InvalidArgument, "mu must be finite");
    if (tg.region.empty()) fail(ErrorCode::InvalidArgument, "truncation region is empty");
}

struct SplitMass {
    double log_left = -kInf;
    double log_right = -kInf;
};

SplitMass split_mass(double x, const TruncatedGaussian& tg) {
    SplitMass out;
    for (const Interval& iv : tg.region) {
        if (iv.hi <= x) {
            out.log_left = logsumexp(out.log_left, log_interval_mass(iv.lo, iv.hi, tg.mu, tg.sigma));
        } else if (iv.lo >= x) {
            out.log_right = logsumexp(out.log_right, log_interval_mass(iv.lo, iv.hi, tg.mu, tg.sigma));
        } else {
            out.log_left = logsumexp(out.log_left, log_interval_mass(iv.lo, x, tg.mu, tg.sigma));
            out.log_right = logsumexp(out.log_right, log_interval_mass(x, iv.hi, tg.mu, tg.sigma));
        }
    }
    if (out.log_left == -kInf && out.log_right == -kInf) {
        fail(ErrorCode::DegenerateMass, "truncation region carries no probability mass");
    }
    if (std::isnan(out.log_left) || std::isnan(out.log_right)) {
        fail(ErrorCode::DegenerateMass, "truncated mass evaluated to NaN");
    }
    return out;
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double mills_ratio(double t) {
    if (t < 0.0) fail(ErrorCode::InvalidArgument, "mills_ratio needs t >= 0");
    if (t == kInf) return 0.0;
    if (t < kTailSwitch) {
        return norm_sf(t) * std::exp(0.5 * t * t + kLogSqrt2Pi);
    }
    // Continued fraction Q/phi = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), modified Lentz.
    constexpr double tiny = 1e-300;
    double f = t;
    double C = t;
    double D = 0.0;
    for (int k = 1; k < 500; ++k) {
        D = t + k * D;
        if (D == 0.0) D = tiny;
        C = t + k / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

double log_norm_sf(double x) {
    if (x == kInf) return -kInf;
    if (x == -kInf) return 0.0;
    if (x <= 0.0) return std::log1p(-norm_cdf(x));
    if (x < kTailSwitch) return std::log(norm_sf(x));
    return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio(x));
}

double log_norm_cdf(double x) { return log_norm_sf(-x); }

double norm_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "probability outside [0,1]");
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    return tn_quantile(p, TruncatedGaussian{0.0, 1.0, {Interval{}}});
}

double log_interval_mass(double a, double b, double mu, double sigma) {
    if (std::isnan(a) || std::isnan(b)) fail(ErrorCode::InvalidArgument, "interval endpoint is NaN");
    if (!(a < b)) return -kInf;
    const double alpha = (a - mu) / sigma;
    const double beta = (b - mu) / sigma;
    const double width = (b - a) / sigma;
    if (alpha >= 0.0) return log_upper_mass(alpha, beta, width);
    if (beta <= 0.0) return log_upper_mass(-beta, -alpha, width);
    // Interval straddles the mean: both excluded tails are below one half.
    return std::log1p(-(norm_cdf(alpha) + norm_sf(beta)));
}

double tn_cdf(double x, const TruncatedGaussian& tg) {
    validate(tg);
    if (std::isnan(x)) fail(ErrorCode::InvalidArgument, "x is NaN");
    const SplitMass mass = split_mass(x, tg);
    return std::exp(mass.log_left - logsumexp(mass.log_left, mass.log_right));
}

double tn_sf(double x, const TruncatedGaussian& tg) {
    validate(tg);
    if (std::isnan(x)) fail(ErrorCode::InvalidArgument, "x is NaN");
    const SplitMass mass = split_mass(x, tg);
    return std::exp(mass.log_right - logsumexp(mass.log_left, mass.log_right));
}

double tn_quantile(double p, const TruncatedGaussian& tg) {
    validate(tg);
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "probability outside [0,1]");
    const Interval& first = tg.region.front();
    const Interval& last = tg.region.back();
    if (p == 0.0) return first.lo;
    if (p == 1.0) return last.hi;

    // Beyond 60 sigma from the nearest supported point the remaining mass is
    // below exp(-1800) relative to the rest.
    double lo = std::isfinite(first.lo) ? first.lo : std::min(tg.mu, first.hi) - 60.0 * tg.sigma;
    double hi = std::isfinite(last.hi) ? last.hi : std::max(tg.mu, last.lo) + 60.0 * tg.sigma;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (tn_cdf(mid, tg) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double tn_root_mu(double x, double target, const std::vector<Interval>& region, double sigma,
                  const RootOptions& options) {
    if (!(target > 0.0 && target < 1.0)) fail(ErrorCode::InvalidArgument, "target must lie in (0,1)");
    if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "x must be finite");
    TruncatedGaussian tg{x, sigma, region};
    validate(tg);

    auto excess = [&](double mu) {
        tg.mu = mu;
        return tn_cdf(x, tg) - target;
    };

    // excess() is strictly decreasing in mu.
    const double limit = options.max_span_sd * sigma;
    double lo = x - sigma;
    double hi = x + sigma;
    for (double d = sigma; excess(lo) < 0.0; lo = x - d) {
        d *= 2.0;
        if (d > limit) {
            fail(ErrorCode::BracketFailure, "no root below x within " + std::to_string(options.max_span_sd) +
                                                " sigma (x=" + std::to_string(x) +
                                                ", target=" + std::to_string(target) + ")");
        }
    }
    for (double d = sigma; excess(hi) > 0.0; hi = x + d) {
        d *= 2.0;
        if (d > limit) {
            fail(ErrorCode::BracketFailure, "no root above x within " + std::to_string(options.max_span_sd) +
                                                " sigma (x=" + std::to_string(x) +
                                                ", target=" + std::to_string(target) + ")");
        }
    }

    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = excess(mid);
        if (f == 0.0) return mid;
        (f > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace selinf
