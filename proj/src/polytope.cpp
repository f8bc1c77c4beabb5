#include "selinf/polytope.hpp"

#include "selinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace selinf {

TruncationRegion TruncationRegion::from_intervals(std::vector<Interval> intervals) {
    TruncationRegion region;
    region.intervals = merge_intervals(std::move(intervals));
    return region;
}

bool TruncationRegion::contains(double x, double tol) const {
    return std::any_of(intervals.begin(), intervals.end(),
                       [&](const Interval& iv) { return iv.contains(x, tol); });
}

std::vector<Interval> merge_intervals(std::vector<Interval> intervals, double merge_tol) {
    std::erase_if(intervals, [](const Interval& iv) { return iv.empty(); });
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const Interval& iv : intervals) {
        if (!merged.empty()) {
            Interval& last = merged.back();
            const double gap_tol = std::isfinite(last.hi) ? merge_tol * (1.0 + std::abs(last.hi)) : 0.0;
            if (iv.lo <= last.hi + gap_tol) {
                last.hi = std::max(last.hi, iv.hi);
                continue;
            }
        }
        merged.push_back(iv);
    }
    return merged;
}

std::string to_string(const RowTag& tag) {
    switch (tag.kind) {
        case RowKind::LassoSign: return "lasso-sign";
        case RowKind::LassoInactive: return "lasso-inactive";
        case RowKind::FsStep: return "fs-step-" + std::to_string(tag.step);
        case RowKind::LarsOrder: return "lars-order-" + std::to_string(tag.step);
        case RowKind::LarsCompete: return "lars-compete-" + std::to_string(tag.step);
    }
    return "unknown";
}

Polyhedron::Polyhedron(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<RowTag> tags)
    : A_(std::move(A)), b_(std::move(b)), tags_(std::move(tags)) {
    if (A_.rows() != b_.size() || static_cast<std::size_t>(A_.rows()) != tags_.size()) {
        fail(ErrorCode::InvalidArgument, "polyhedron rows, offsets and tags disagree in length");
    }
    if (!A_.allFinite()) fail(ErrorCode::InvalidArgument, "polyhedron matrix has non-finite entries");
    // Offsets may be +inf (vacuous row) but never NaN or -inf.
    for (Eigen::Index i = 0; i < b_.size(); ++i) {
        if (std::isnan(b_(i)) || b_(i) == -kInf) {
            fail(ErrorCode::InvalidArgument, "polyhedron offset is NaN or -inf");
        }
    }
}

Eigen::VectorXd Polyhedron::slack(const Eigen::VectorXd& y) const {
    if (y.size() != dim()) fail(ErrorCode::InvalidArgument, "vector length does not match polyhedron");
    return b_ - A_ * y;
}

double Polyhedron::max_violation(const Eigen::VectorXd& y) const {
    if (rows() == 0) return 0.0;
    return std::max(0.0, (-slack(y)).maxCoeff());
}

bool Polyhedron::contains(const Eigen::VectorXd& y, double tol) const {
    return max_violation(y) <= tol;
}

void PolyhedronBuilder::add(const Eigen::VectorXd& row, double offset, RowTag tag) {
    if (row.size() != dim_) fail(ErrorCode::InvalidArgument, "row length does not match dimension");
    rows_.push_back(row);
    offsets_.push_back(offset);
    tags_.push_back(tag);
}

Polyhedron PolyhedronBuilder::build() const {
    Eigen::MatrixXd A(size(), dim_);
    Eigen::VectorXd b(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
        A.row(i) = rows_[static_cast<std::size_t>(i)].transpose();
        b(i) = offsets_[static_cast<std::size_t>(i)];
    }
    return Polyhedron(std::move(A), std::move(b), tags_);
}

namespace {

void check_direction(const Polyhedron& poly, const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    if (eta.size() != poly.dim() || y.size() != poly.dim()) {
        fail(ErrorCode::InvalidArgument, "eta and y must match the polyhedron dimension");
    }
    if (!(eta.norm() > 0.0)) fail(ErrorCode::InvalidArgument, "eta must be nonzero");
}

bool feasible_at(const Polyhedron& poly, const Eigen::VectorXd& y) {
    const Eigen::VectorXd residual = poly.A() * y - poly.b();
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
        if (residual(i) > 1e-7 * (1.0 + std::abs(poly.b()(i)))) return false;
    }
    return true;
}

Eigen::VectorXd orthogonal_part(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    const Eigen::VectorXd c = eta / eta.squaredNorm();
    return y - c * eta.dot(y);
}

}  // namespace

SliceBounds slice_bounds(const Polyhedron& poly, const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    check_direction(poly, eta, y);
    // Sigma = sigma^2 I, so c = Sigma eta (eta^T Sigma eta)^{-1} = eta / ||eta||^2.
    const Eigen::VectorXd c = eta / eta.squaredNorm();
    const Eigen::VectorXd z = y - c * eta.dot(y);
    const Eigen::VectorXd Ac = poly.A() * c;
    const Eigen::VectorXd residual = poly.b() - poly.A() * z;
    const double c_norm = c.norm();

    SliceBounds out;
    for (Eigen::Index j = 0; j < poly.rows(); ++j) {
        const double threshold = kSliceZeroTol * poly.A().row(j).norm() * c_norm;
        if (Ac(j) > threshold) {
            out.upper = std::min(out.upper, residual(j) / Ac(j));
        } else if (Ac(j) < -threshold) {
            out.lower = std::max(out.lower, residual(j) / Ac(j));
        } else {
            out.nu0 = std::min(out.nu0, residual(j));
        }
    }
    return out;
}

TruncationRegion slice(const Polyhedron& poly, const Eigen::VectorXd& eta, double sigma2,
                       const Eigen::VectorXd& y_obs) {
    if (!(sigma2 > 0.0)) fail(ErrorCode::InvalidArgument, "sigma2 must be positive");
    check_direction(poly, eta, y_obs);
    if (!feasible_at(poly, y_obs)) {
        fail(ErrorCode::InfeasibleAtObservation,
             "y_obs violates the polyhedron by " + std::to_string(poly.max_violation(y_obs)));
    }
    const SliceBounds bounds = slice_bounds(poly, eta, y_obs);
    TruncationRegion region;
    region.intervals = {Interval{bounds.lower, bounds.upper}};
    region.nu0 = bounds.nu0;
    region.nu0_ok = bounds.nu0 >= -1e-7;
    region.eta = eta;
    region.z0 = orthogonal_part(eta, y_obs);
    return region;
}

TruncationRegion slice_union(const std::vector<Polyhedron>& polys, const Eigen::VectorXd& eta,
                             double sigma2, const Eigen::VectorXd& y_obs) {
    if (!(sigma2 > 0.0)) fail(ErrorCode::InvalidArgument, "sigma2 must be positive");
    const bool any_contains = std::any_of(polys.begin(), polys.end(),
                                          [&](const Polyhedron& p) { return feasible_at(p, y_obs); });
    if (!any_contains) {
        fail(ErrorCode::NoFeasibleComponent, "no polyhedron in the union contains y_obs");
    }

    std::vector<Interval> pieces;
    double nu0 = -kInf;
    for (const Polyhedron& poly : polys) {
        const SliceBounds bounds = slice_bounds(poly, eta, y_obs);
        if (bounds.nu0 < -1e-9 || bounds.lower > bounds.upper) continue;
        pieces.push_back(Interval{bounds.lower, bounds.upper});
        nu0 = std::max(nu0, bounds.nu0);
    }

    TruncationRegion region;
    region.intervals = merge_intervals(std::move(pieces));
    region.nu0 = nu0;
    region.nu0_ok = !region.intervals.empty();
    region.eta = eta;
    region.z0 = orthogonal_part(eta, y_obs);
    return region;
}

TruncationRegion line_search_region(const Selector& selector, const Eigen::VectorXd& y_obs,
                                    const Eigen::VectorXd& eta, double sigma2,
                                    const LineSearchOptions& options) {
    if (!(sigma2 > 0.0)) fail(ErrorCode::InvalidArgument, "sigma2 must be positive");
    if (options.grid_points < 100) fail(ErrorCode::InvalidArgument, "line search needs >= 100 grid points");
    if (!(options.span > 0.0)) fail(ErrorCode::InvalidArgument, "line search span must be positive");
    if (eta.size() != y_obs.size() || !(eta.norm() > 0.0)) {
        fail(ErrorCode::InvalidArgument, "eta must be nonzero and match y_obs");
    }

    const Eigen::VectorXd c = eta / eta.squaredNorm();
    const Eigen::VectorXd z = y_obs - c * eta.dot(y_obs);
    const double center = eta.dot(y_obs);
    const double half_width = options.span * std::sqrt(sigma2) * eta.norm();
    const double lo = center - half_width;
    const double hi = center + half_width;

    auto select = [&](const Eigen::VectorXd& y) {
        try {
            return selector(y);
        } catch (const std::exception& e) {
            fail(ErrorCode::SelectorFailure, std::string("selector failed: ") + e.what());
        }
    };
    const std::vector<int> target = select(y_obs);
    auto matches = [&](double u) { return select(z + c * u) == target; };

    const int count = options.grid_points;
    const double step = (hi - lo) / (count - 1);
    std::vector<char> hit(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) hit[static_cast<std::size_t>(i)] = matches(lo + step * i) ? 1 : 0;

    // Bisect between a matching point and a non-matching one.
    auto refine = [&](double inside, double outside) {
        for (int it = 0; it < options.bisection_steps; ++it) {
            const double mid = 0.5 * (inside + outside);
            (matches(mid) ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };

    std::vector<Interval> runs;
    int i = 0;
    while (i < count) {
        if (!hit[static_cast<std::size_t>(i)]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < count && hit[static_cast<std::size_t>(j + 1)]) ++j;
        const double left = (i == 0) ? lo : refine(lo + step * i, lo + step * (i - 1));
        const double right = (j == count - 1) ? hi : refine(lo + step * j, lo + step * (j + 1));
        runs.push_back(Interval{left, right});
        i = j + 1;
    }

    TruncationRegion region;
    region.intervals = merge_intervals(std::move(runs));
    region.eta = eta;
    region.z0 = z;
    return region;
}

}  // namespace selinf
