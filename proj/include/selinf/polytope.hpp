#pragma once

#include "selinf/region.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace selinf {

enum class RowKind { LassoSign, LassoInactive, FsStep, LarsOrder, LarsCompete };

struct RowTag {
    RowKind kind;
    int step = 0;

    friend bool operator==(const RowTag&, const RowTag&) = default;
};

std::string to_string(const RowTag& tag);

// {y : A y <= b} with one provenance tag per row.
class Polyhedron {
public:
    Polyhedron(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<RowTag> tags);

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::VectorXd& b() const { return b_; }
    const std::vector<RowTag>& tags() const { return tags_; }
    Eigen::Index rows() const { return A_.rows(); }
    Eigen::Index dim() const { return A_.cols(); }

    // b - A y; nonnegative entries are satisfied rows.
    Eigen::VectorXd slack(const Eigen::VectorXd& y) const;
    // Largest positive part of A y - b (0 when y is inside).
    double max_violation(const Eigen::VectorXd& y) const;
    bool contains(const Eigen::VectorXd& y, double tol = 1e-9) const;

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    std::vector<RowTag> tags_;
};

// Row-at-a-time assembly for the selection-event constructions.
class PolyhedronBuilder {
public:
    explicit PolyhedronBuilder(Eigen::Index dim) : dim_(dim) {}

    void add(const Eigen::VectorXd& row, double offset, RowTag tag);
    Eigen::Index size() const { return static_cast<Eigen::Index>(offsets_.size()); }
    Polyhedron build() const;

private:
    Eigen::Index dim_;
    std::vector<Eigen::VectorXd> rows_;
    std::vector<double> offsets_;
    std::vector<RowTag> tags_;
};

struct SliceBounds {
    double lower = -kInf;
    double upper = kInf;
    double nu0 = kInf;

    bool feasible() const { return nu0 >= 0.0 && lower <= upper; }
};

// (A c)_j is treated as zero when |(A c)_j| <= this factor * ||A_j|| * ||c||.
inline constexpr double kSliceZeroTol = 1e-10;

// nu^-, nu^+, nu^0 along eta for the component z of y orthogonal to eta.
// Does not require y to lie in the polyhedron.
SliceBounds slice_bounds(const Polyhedron& poly, const Eigen::VectorXd& eta, const Eigen::VectorXd& y);

// Single-polyhedron truncation region. Throws InfeasibleAtObservation when
// y_obs violates the constraints by more than 1e-7.
TruncationRegion slice(const Polyhedron& poly, const Eigen::VectorXd& eta, double sigma2,
                       const Eigen::VectorXd& y_obs);

// Union of per-polyhedron slices along the same line. Components with
// nu0 < 0 or nu^- > nu^+ are dropped. At least one polyhedron must contain
// y_obs, otherwise NoFeasibleComponent is thrown.
TruncationRegion slice_union(const std::vector<Polyhedron>& polys, const Eigen::VectorXd& eta,
                             double sigma2, const Eigen::VectorXd& y_obs);

// Maps a response vector to the model it selects. Must be deterministic.
using Selector = std::function<std::vector<int>(const Eigen::VectorXd&)>;

struct LineSearchOptions {
    double span = 20.0;
    int grid_points = 10000;
    int bisection_steps = 40;
};

// Scans y(u) = z + c u over eta^T y_obs +/- span * sigma * ||eta|| and returns
// the maximal runs where the selector reproduces its choice at y_obs, with run
// boundaries refined by bisection. Components narrower than the grid spacing
// can be missed. Window edges are reported as finite endpoints.
TruncationRegion line_search_region(const Selector& selector, const Eigen::VectorXd& y_obs,
                                    const Eigen::VectorXd& eta, double sigma2,
                                    const LineSearchOptions& options = {});

}  // namespace selinf
