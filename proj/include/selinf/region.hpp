#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace selinf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
    bool empty() const { return lo > hi; }
};

// Set of admissible values of eta^T y given the selection event, together with
// the slicing geometry it was computed from. Intervals are sorted and disjoint.
struct TruncationRegion {
    std::vector<Interval> intervals;
    bool nu0_ok = true;
    double nu0 = kInf;
    Eigen::VectorXd eta;
    Eigen::VectorXd z0;

    static TruncationRegion whole_line() { return TruncationRegion{{Interval{}}, true, kInf, {}, {}}; }
    static TruncationRegion from_intervals(std::vector<Interval> intervals);

    bool contains(double x, double tol = 0.0) const;
    double lower() const { return intervals.empty() ? kInf : intervals.front().lo; }
    double upper() const { return intervals.empty() ? -kInf : intervals.back().hi; }
};

// Sorts intervals, drops empty ones and merges those that overlap or abut
// (gaps up to merge_tol * (1 + |endpoint|) are closed).
std::vector<Interval> merge_intervals(std::vector<Interval> intervals, double merge_tol = 1e-10);

}  // namespace selinf
