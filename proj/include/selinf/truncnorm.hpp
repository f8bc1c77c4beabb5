#pragma once

#include "selinf/region.hpp"

#include <vector>

namespace selinf {

// Standard normal helpers. The log versions stay finite for any finite input.
double norm_cdf(double x);
double norm_sf(double x);
double log_norm_cdf(double x);
double log_norm_sf(double x);
// Mills ratio Q(t) / phi(t) for t >= 0.
double mills_ratio(double t);
// Standard normal quantile, accurate to ~1e-12 in probability.
double norm_quantile(double p);

// log P(a <= X <= b) for X ~ N(mu, sigma^2), a <= b. Far-tail intervals are
// handled through Mills-ratio differences so relative precision survives
// standardized endpoints in the hundreds or beyond.
double log_interval_mass(double a, double b, double mu, double sigma);

// N(mu, sigma^2) restricted to a sorted union of disjoint intervals.
struct TruncatedGaussian {
    double mu = 0.0;
    double sigma = 1.0;
    std::vector<Interval> region;
};

// Distribution function. For a union the mass is accumulated interval by
// interval; points inside a gap map to the mass of everything on their left.
// Throws DegenerateMass when the region carries no representable mass.
double tn_cdf(double x, const TruncatedGaussian& tg);
// 1 - tn_cdf(x), computed directly from the right-hand mass.
double tn_sf(double x, const TruncatedGaussian& tg);

// Smallest x with tn_cdf(x) >= p, by bisection over the support.
// p = 0 and p = 1 return the support endpoints (possibly infinite).
double tn_quantile(double p, const TruncatedGaussian& tg);

struct RootOptions {
    // Bracket expansion limit, in units of sigma away from x.
    double max_span_sd = 1e6;
};

// The unique mu with tn_cdf(x; mu, sigma, region) = target. The distribution
// function is strictly decreasing in mu, so a doubling bracket followed by
// bisection (run until the bracket collapses) always converges when x is
// interior. Throws BracketFailure when
// no sign change is found within max_span_sd * sigma of x.
double tn_root_mu(double x, double target, const std::vector<Interval>& region, double sigma,
                  const RootOptions& options = {});

}  // namespace selinf
