#pragma once

#include "selinf/linmodel.hpp"
#include "selinf/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace selinf {

enum class Scenario { NullOrthonormal, NullGaussianDesign, SignalProp1, RssDrop };

std::string to_string(Scenario scenario);
Scenario parse_scenario(const std::string& name);

enum class Reference { Uniform, Exponential, ChiSquare1 };

std::string to_string(Reference reference);
double reference_cdf(Reference reference, double x);
double reference_quantile(Reference reference, double q);

struct SimConfig {
    Scenario scenario = Scenario::NullOrthonormal;
    int n = 100;
    int p = 20;
    int replicates = 2000;
    double sigma = 1.0;
    std::uint64_t seed = 1;
    // Step tested by the spacing scenarios.
    int k = 1;
    // Number of signal variables k* and their common size (defaults to
    // 10 sqrt(2 log p) when not set) for the signal scenario.
    int signals = 0;
    std::optional<double> signal_size;
    // 0 means SELINF_THREADS or the hardware concurrency.
    int threads = 0;
};

struct SizePoint {
    double alpha = 0.0;
    double rejection_rate = 0.0;
    double standard_error = 0.0;
};

struct QQPair {
    double theoretical = 0.0;
    double empirical = 0.0;
};

struct Sample {
    std::string name;
    Reference reference = Reference::Uniform;
    std::vector<double> values;  // sorted ascending
    double mean = 0.0;
    double variance = 0.0;
    double ks = 0.0;
    std::vector<SizePoint> size;  // only for p-value samples
    std::vector<QQPair> qq;
};

struct SimReport {
    SimConfig config;
    std::vector<Sample> samples;
    std::optional<double> event_b_frequency;
    int failures = 0;
    double ks_critical_1pct = 0.0;

    const Sample& sample(const std::string& name) const;
};

// Centered n x p design with orthonormal columns (thin QR of centered
// Gaussian draws); needs n > p.
Eigen::MatrixXd orthonormal_design(int n, int p, SplitMix64& rng);
// Centered, unit-norm columns from i.i.d. Gaussian draws.
Eigen::MatrixXd gaussian_design(int n, int p, SplitMix64& rng);
Eigen::VectorXd gaussian_vector(Eigen::Index size, double sigma, SplitMix64& rng);

// Kolmogorov-Smirnov distance between the empirical distribution of a sorted
// sample and a reference distribution function.
double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf);
// Asymptotic 1% critical value 1.6276 / sqrt(N).
double ks_critical_1pct(std::size_t n);

Sample summarize(std::string name, Reference reference, std::vector<double> values);

// Worker count: the explicit request if positive, else SELINF_THREADS, else
// the hardware concurrency.
int worker_count(int requested);

// Runs body(i) for i in [0, count) on a pool of worker threads. Rethrows the
// first exception after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

SimReport simulate(const SimConfig& config);

}  // namespace selinf
