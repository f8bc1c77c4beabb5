#include "selinf/simulate.hpp"

#include "selinf/errors.hpp"
#include "selinf/inference.hpp"
#include "selinf/lars.hpp"
#include "selinf/stepwise.hpp"
#include "selinf/truncnorm.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace selinf {

namespace {

constexpr std::array<double, 3> kAlphaGrid = {0.01, 0.05, 0.10};
// Stream index reserved for the fixed design of a run.
constexpr std::uint64_t kDesignStream = ~std::uint64_t{0};

struct Draw {
    bool ok = false;
    std::array<double, 3> values{};
    bool event_b = false;
};

Draw spacing_replicate(const DesignMatrix& X, const SimConfig& cfg, SplitMix64& rng) {
    const Eigen::VectorXd y = gaussian_vector(X.rows(), cfg.sigma, rng);
    const LarsPath path = lars_path(X, y, cfg.k + 1);
    Draw d;
    d.values[0] = spacing_test(path, cfg.k, cfg.sigma, SpacingVariant::Exact).statistic;
    d.values[1] = spacing_test(path, cfg.k, cfg.sigma, SpacingVariant::Simplified).statistic;
    d.values[2] = significance_statistic(path, cfg.k, cfg.sigma, SignificanceMode::ClosedForm);
    d.ok = true;
    return d;
}

// With orthonormal columns, X^T y ~ N(beta*, sigma^2 I) carries everything
// the LARS knots depend on, so it is drawn directly.
Draw signal_replicate(const SimConfig& cfg, double size, SplitMix64& rng) {
    Eigen::VectorXd u = gaussian_vector(cfg.p, cfg.sigma, rng);
    for (int j = 0; j < cfg.signals; ++j) u(j) += size;
    Eigen::VectorXd a = u.cwiseAbs();
    double min_signal = kInf;
    for (int j = 0; j < cfg.signals; ++j) min_signal = std::min(min_signal, a(j));
    double max_noise = 0.0;
    for (int j = cfg.signals; j < cfg.p; ++j) max_noise = std::max(max_noise, a(j));

    std::sort(a.data(), a.data() + a.size(), std::greater<>());
    const double v1 = a(cfg.signals);
    const double v2 = a(cfg.signals + 1);
    Draw d;
    d.values[0] = v1 * (v1 - v2) / (cfg.sigma * cfg.sigma);
    d.event_b = min_signal > max_noise;
    d.ok = true;
    return d;
}

Draw rss_replicate(const DesignMatrix& X, const SimConfig& cfg, SplitMix64& rng) {
    const Eigen::VectorXd y = gaussian_vector(X.rows(), cfg.sigma, rng);
    Draw d;
    d.values[0] = r_stat(fs_path(X, y, 1), 1, cfg.sigma);
    d.ok = true;
    return d;
}

void validate(const SimConfig& cfg) {
    if (cfg.replicates < 100) fail(ErrorCode::InvalidArgument, "simulate needs at least 100 replicates");
    if (!(cfg.sigma > 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
    if (cfg.p < 2) fail(ErrorCode::InvalidArgument, "simulate needs p >= 2");
    switch (cfg.scenario) {
        case Scenario::NullOrthonormal:
        case Scenario::NullGaussianDesign:
            if (cfg.k < 1 || cfg.k + 1 > std::min(cfg.n - 1, cfg.p)) {
                fail(ErrorCode::InvalidArgument, "spacing scenarios need 1 <= k and k + 1 <= min(n-1, p)");
            }
            break;
        case Scenario::SignalProp1:
            if (cfg.signals < 0 || cfg.signals + 2 > cfg.p) {
                fail(ErrorCode::InvalidArgument, "signal scenario needs 0 <= signals <= p - 2");
            }
            break;
        case Scenario::RssDrop:
            if (cfg.n < cfg.p + 1) fail(ErrorCode::InvalidArgument, "rss_drop needs n > p");
            break;
    }
}

}  // namespace

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::NullOrthonormal: return "null_orthonormal";
        case Scenario::NullGaussianDesign: return "null_gaussian_design";
        case Scenario::SignalProp1: return "signal_prop1";
        case Scenario::RssDrop: return "rss_drop";
    }
    return "unknown";
}

Scenario parse_scenario(const std::string& name) {
    for (Scenario s : {Scenario::NullOrthonormal, Scenario::NullGaussianDesign, Scenario::SignalProp1,
                       Scenario::RssDrop}) {
        if (to_string(s) == name) return s;
    }
    fail(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

std::string to_string(Reference reference) {
    switch (reference) {
        case Reference::Uniform: return "uniform";
        case Reference::Exponential: return "exp1";
        case Reference::ChiSquare1: return "chi2_1";
    }
    return "unknown";
}

double reference_cdf(Reference reference, double x) {
    switch (reference) {
        case Reference::Uniform: return std::clamp(x, 0.0, 1.0);
        case Reference::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-x);
        case Reference::ChiSquare1: return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x));
    }
    return 0.0;
}

double reference_quantile(Reference reference, double q) {
    switch (reference) {
        case Reference::Uniform: return q;
        case Reference::Exponential: return -std::log1p(-q);
        case Reference::ChiSquare1: {
            const double z = norm_quantile(0.5 + 0.5 * q);
            return z * z;
        }
    }
    return 0.0;
}

const Sample& SimReport::sample(const std::string& name) const {
    for (const Sample& s : samples) {
        if (s.name == name) return s;
    }
    fail(ErrorCode::InvalidArgument, "no sample named '" + name + "'");
}

Eigen::VectorXd gaussian_vector(Eigen::Index size, double sigma, SplitMix64& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
    return v;
}

Eigen::MatrixXd gaussian_design(int n, int p, SplitMix64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd G(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) G(i, j) = normal(rng);
    }
    G.rowwise() -= G.colwise().mean();
    G.array().rowwise() /= G.colwise().norm().array();
    return G;
}

Eigen::MatrixXd orthonormal_design(int n, int p, SplitMix64& rng) {
    if (n <= p) fail(ErrorCode::InvalidArgument, "an orthonormal centered design needs n > p");
    const Eigen::MatrixXd G = gaussian_design(n, p, rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
}

double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

Sample summarize(std::string name, Reference reference, std::vector<double> values) {
    Sample s;
    s.name = std::move(name);
    s.reference = reference;
    std::sort(values.begin(), values.end());
    s.values = std::move(values);
    const double n = static_cast<double>(s.values.size());
    if (s.values.empty()) return s;
    for (double v : s.values) s.mean += v;
    s.mean /= n;
    for (double v : s.values) s.variance += (v - s.mean) * (v - s.mean);
    s.variance = s.values.size() > 1 ? s.variance / (n - 1.0) : 0.0;
    s.ks = ks_statistic(s.values, [reference](double x) { return reference_cdf(reference, x); });
    if (reference == Reference::Uniform) {
        for (double alpha : kAlphaGrid) {
            const auto hits = std::upper_bound(s.values.begin(), s.values.end(), alpha) - s.values.begin();
            s.size.push_back(SizePoint{alpha, static_cast<double>(hits) / n, std::sqrt(alpha * (1.0 - alpha) / n)});
        }
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double q = (static_cast<double>(i) + 0.5) / n;
        s.qq.push_back(QQPair{reference_quantile(reference, q), s.values[i]});
    }
    return s;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SELINF_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    const int workers = std::max(1, std::min(worker_count(threads), count));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

SimReport simulate(const SimConfig& config) {
    validate(config);
    SimReport report;
    report.config = config;
    const int count = config.replicates;

    std::optional<DesignMatrix> X;
    if (config.scenario != Scenario::SignalProp1) {
        SplitMix64 design_rng = SplitMix64::stream(config.seed, kDesignStream);
        Eigen::MatrixXd data = config.scenario == Scenario::NullGaussianDesign
                                   ? gaussian_design(config.n, config.p, design_rng)
                                   : orthonormal_design(config.n, config.p, design_rng);
        X.emplace(std::move(data), true, true);
    }
    const double size = config.signal_size.value_or(10.0 * std::sqrt(2.0 * std::log(config.p)));

    std::vector<Draw> draws(static_cast<std::size_t>(count));
    parallel_for(count, config.threads, [&](int i) {
        SplitMix64 rng = SplitMix64::stream(config.seed, static_cast<std::uint64_t>(i));
        try {
            switch (config.scenario) {
                case Scenario::NullOrthonormal:
                case Scenario::NullGaussianDesign:
                    draws[static_cast<std::size_t>(i)] = spacing_replicate(*X, config, rng);
                    break;
                case Scenario::SignalProp1:
                    draws[static_cast<std::size_t>(i)] = signal_replicate(config, size, rng);
                    break;
                case Scenario::RssDrop:
                    draws[static_cast<std::size_t>(i)] = rss_replicate(*X, config, rng);
                    break;
            }
        } catch (const Error&) {
            draws[static_cast<std::size_t>(i)].ok = false;
        }
    });

    std::array<std::vector<double>, 3> columns;
    int event_b = 0;
    for (const Draw& d : draws) {
        if (!d.ok) {
            ++report.failures;
            continue;
        }
        for (std::size_t c = 0; c < columns.size(); ++c) columns[c].push_back(d.values[c]);
        event_b += d.event_b ? 1 : 0;
    }
    const std::size_t used = columns[0].size();
    report.ks_critical_1pct = used > 0 ? ks_critical_1pct(used) : 0.0;

    switch (config.scenario) {
        case Scenario::NullOrthonormal:
        case Scenario::NullGaussianDesign:
            report.samples.push_back(summarize("spacing_exact", Reference::Uniform, std::move(columns[0])));
            report.samples.push_back(summarize("spacing_simplified", Reference::Uniform, std::move(columns[1])));
            report.samples.push_back(summarize("significance", Reference::Exponential, std::move(columns[2])));
            break;
        case Scenario::SignalProp1:
            report.samples.push_back(summarize("significance_next", Reference::Exponential, std::move(columns[0])));
            report.event_b_frequency = used > 0 ? static_cast<double>(event_b) / static_cast<double>(used) : 0.0;
            break;
        case Scenario::RssDrop:
            report.samples.push_back(summarize("rss_drop", Reference::ChiSquare1, std::move(columns[0])));
            break;
    }
    return report;
}

}  // namespace selinf
