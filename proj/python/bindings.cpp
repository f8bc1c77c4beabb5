#include "selinf/errors.hpp"
#include "selinf/inference.hpp"
#include "selinf/lars.hpp"
#include "selinf/lasso.hpp"
#include "selinf/linmodel.hpp"
#include "selinf/polytope.hpp"
#include "selinf/stepwise.hpp"
#include "selinf/truncnorm.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;

namespace {

selinf::DesignMatrix design(const Eigen::MatrixXd& X) { return selinf::DesignMatrix(X); }

std::vector<std::pair<double, double>> intervals(const selinf::TruncationRegion& region) {
    std::vector<std::pair<double, double>> out;
    for (const auto& iv : region.intervals) out.emplace_back(iv.lo, iv.hi);
    return out;
}

std::vector<selinf::Interval> to_intervals(const std::vector<std::pair<double, double>>& region) {
    std::vector<selinf::Interval> out;
    for (const auto& [lo, hi] : region) out.push_back(selinf::Interval{lo, hi});
    return out;
}

selinf::SpacingVariant variant(const std::string& name) {
    if (name == "exact") return selinf::SpacingVariant::Exact;
    if (name == "simplified") return selinf::SpacingVariant::Simplified;
    selinf::fail(selinf::ErrorCode::InvalidArgument, "variant must be 'exact' or 'simplified'");
}

py::dict report_dict(const selinf::InferenceReport& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["scale"] = r.scale;
    d["region"] = intervals(r.region);
    d["p_value"] = r.p_value;
    d["one_sided_p"] = r.one_sided_p;
    d["ci"] = py::make_tuple(r.ci.lower, r.ci.upper);
    d["method"] = selinf::to_string(r.method);
    d["k"] = r.k;
    d["variable"] = r.variable;
    return d;
}

}  // namespace

PYBIND11_MODULE(_selinf, m) {
    m.doc() = "Selective inference for Lasso, LARS and forward stepwise selection";

    static py::exception<selinf::Error> error(m, "SelinfError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const selinf::Error& e) {
            const std::string msg = std::string(selinf::to_string(e.code())) + ": " + e.what();
            PyErr_SetString(error.ptr(), msg.c_str());
        }
    });

    m.def(
        "standardize",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool normalize) {
            auto s = selinf::standardize(X, y, normalize);
            return py::make_tuple(s.X.data(), s.y, s.y_mean);
        },
        py::arg("X"), py::arg("y"), py::arg("normalize") = true);

    m.def(
        "lasso_fit",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam) {
            const auto fit = selinf::lasso_fit(design(X), y, lam);
            py::dict d;
            d["beta"] = fit.beta_hat;
            d["active"] = fit.active;
            d["signs"] = fit.signs;
            d["dual_gap"] = fit.dual_gap;
            return d;
        },
        py::arg("X"), py::arg("y"), py::arg("lam"));

    m.def(
        "lars_path",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int steps) {
            const auto path = selinf::lars_path(design(X), y, steps);
            py::dict d;
            std::vector<double> knots;
            std::vector<int> order;
            std::vector<int> signs;
            for (const auto& st : path.steps) {
                knots.push_back(st.knot);
                order.push_back(st.j);
                signs.push_back(st.s);
            }
            d["knots"] = knots;
            d["order"] = order;
            d["signs"] = signs;
            d["beta_at_knots"] = path.beta_at_knots;
            return d;
        },
        py::arg("X"), py::arg("y"), py::arg("steps"));

    m.def(
        "fs_path",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int steps) {
            const auto path = selinf::fs_path(design(X), y, steps);
            py::dict d;
            d["order"] = path.order;
            d["signs"] = path.signs;
            d["rss"] = path.rss;
            return d;
        },
        py::arg("X"), py::arg("y"), py::arg("steps"));

    m.def(
        "spacing_test",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k, double sigma, const std::string& v) {
            const int limit = static_cast<int>(std::min<Eigen::Index>(X.rows() - 1, X.cols()));
            const auto path = selinf::lars_path(design(X), y, std::min(k + 1, limit));
            const auto r = selinf::spacing_test(path, k, sigma, variant(v));
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("X"), py::arg("y"), py::arg("k"), py::arg("sigma"), py::arg("variant") = "exact");

    m.def(
        "significance_test",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k, double sigma, bool direct) {
            const auto path = selinf::lars_path(design(X), y, k + 1);
            const auto r = selinf::significance_test(
                path, k, sigma, direct ? selinf::SignificanceMode::Direct : selinf::SignificanceMode::ClosedForm);
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("X"), py::arg("y"), py::arg("k"), py::arg("sigma"), py::arg("direct") = false);

    m.def(
        "lasso_inference",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam, double sigma, double alpha) {
            const selinf::DesignMatrix dm = design(X);
            const auto fit = selinf::lasso_fit(dm, y, lam);
            py::list out;
            for (const auto& r :
                 selinf::lasso_reports(dm, y, fit, sigma, alpha, selinf::LassoRegionMode::SignUnion)) {
                out.append(report_dict(r));
            }
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("sigma"), py::arg("alpha") = 0.05);

    m.def(
        "tn_cdf",
        [](double x, double mu, double sigma, const std::vector<std::pair<double, double>>& region) {
            return selinf::tn_cdf(x, selinf::TruncatedGaussian{mu, sigma, to_intervals(region)});
        },
        py::arg("x"), py::arg("mu"), py::arg("sigma"), py::arg("region"));

    m.def(
        "selective_pvalue",
        [](const Eigen::VectorXd& y, const Eigen::VectorXd& eta, double sigma,
           const std::vector<std::pair<double, double>>& region, double mu0, bool two_sided) {
            return selinf::selective_pvalue(y, eta, sigma, selinf::TruncationRegion::from_intervals(to_intervals(region)),
                                            mu0, two_sided ? selinf::Sided::Two : selinf::Sided::One);
        },
        py::arg("y"), py::arg("eta"), py::arg("sigma"), py::arg("region"), py::arg("mu0") = 0.0,
        py::arg("two_sided") = true);

    m.def(
        "selective_ci",
        [](const Eigen::VectorXd& y, const Eigen::VectorXd& eta, double sigma,
           const std::vector<std::pair<double, double>>& region, double alpha) {
            const auto ci = selinf::selective_ci(y, eta, sigma,
                                                 selinf::TruncationRegion::from_intervals(to_intervals(region)), alpha);
            return py::make_tuple(ci.lower, ci.upper);
        },
        py::arg("y"), py::arg("eta"), py::arg("sigma"), py::arg("region"), py::arg("alpha") = 0.05);
}
