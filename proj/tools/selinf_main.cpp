#include "selinf/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;

struct Output {
    std::string path;
    bool compact = false;
};

int emit(const json& doc, const Output& out) {
    const std::string text = out.compact ? doc.dump() : doc.dump(2);
    if (out.path.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out.path, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write " << out.path << '\n';
            return 1;
        }
        f << text << '\n';
    }
    return doc.contains("error") ? 1 : 0;
}

template <typename Fn>
int run(const std::string& command, const json& config, const Output& out, Fn&& body) {
    try {
        return emit(selinf::envelope(command, config, body()), out);
    } catch (const selinf::Error& e) {
        return emit(selinf::error_json(command, config, e.code(), e.what()), out);
    } catch (const std::exception& e) {
        return emit(selinf::error_json(command, config, selinf::ErrorCode::InvalidArgument, e.what()), out);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective inference for Lasso, LARS and forward stepwise selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", selinf::kVersion);

    std::string data_path;
    std::string response;
    std::string method = "lars";
    std::optional<double> lambda;
    std::optional<int> steps;
    std::string sigma = "estimate";
    double alpha = 0.05;
    std::uint64_t seed = 0;
    bool normalize = true;
    bool line_search = false;
    bool no_condition = false;
    std::string variant = "exact";
    std::optional<int> variable;
    Output out;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Seed echoed in the report");
        cmd->add_option("--out", out.path, "Write JSON here instead of stdout");
        cmd->add_flag("--compact", out.compact, "Single-line JSON");
    };
    auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--data", data_path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
        cmd->add_option("--response", response, "Response column name or 0-based index")->required();
        cmd->add_option("--method", method, "lasso, lars or fs")->check(CLI::IsMember({"lasso", "lars", "fs"}));
        cmd->add_option("--lambda", lambda, "Penalty level (lasso)");
        cmd->add_option("--steps", steps, "Number of steps (lars, fs)");
        cmd->add_flag("--normalize,!--no-normalize", normalize, "Scale predictors to unit norm (default on)");
        add_common(cmd);
    };

    CLI::App* path_cmd = app.add_subcommand("path", "Fit a Lasso, LARS or forward stepwise path");
    add_data(path_cmd);

    CLI::App* infer_cmd = app.add_subcommand("infer", "Selective p-values and confidence intervals");
    add_data(infer_cmd);
    infer_cmd->add_option("--sigma", sigma, "Noise level, or 'estimate'");
    infer_cmd->add_option("--alpha", alpha, "Miscoverage of the intervals")->check(CLI::Range(0.0, 1.0));
    infer_cmd->add_flag("--line-search", line_search, "Lasso: find the region by scanning the selector");
    infer_cmd->add_flag("--no-condition", no_condition, "Classical z-tests, ignoring selection");
    infer_cmd->add_option("--variant", variant, "Spacing test variant")->check(CLI::IsMember({"exact", "simplified"}));
    infer_cmd->add_option("--variable", variable, "Lasso: report only this column index");

    selinf::SimConfig sim;
    std::string scenario = "null_orthonormal";
    std::string qq_path;
    std::optional<double> signal_size;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo calibration scenarios");
    sim_cmd->add_option("--scenario", scenario, "null_orthonormal, null_gaussian_design, signal_prop1 or rss_drop")
        ->check(CLI::IsMember({"null_orthonormal", "null_gaussian_design", "signal_prop1", "rss_drop"}));
    sim_cmd->add_option("-n,--n", sim.n, "Rows of the design");
    sim_cmd->add_option("-p,--p", sim.p, "Columns of the design");
    sim_cmd->add_option("-N,--replicates", sim.replicates, "Number of replicates");
    sim_cmd->add_option("--sigma", sim.sigma, "Noise level");
    sim_cmd->add_option("--k", sim.k, "Step tested by the spacing scenarios");
    sim_cmd->add_option("--signals", sim.signals, "Number of signal variables (signal_prop1)");
    sim_cmd->add_option("--signal-size", signal_size, "Signal size (default 10 sqrt(2 log p))");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (default SELINF_THREADS or all cores)");
    sim_cmd->add_option("--qq", qq_path, "Write Q-Q pairs as CSV");
    add_common(sim_cmd);

    CLI11_PARSE(app, argc, argv);

    if (*sim_cmd) {
        sim.seed = seed;
        sim.signal_size = signal_size;
        json config = {{"scenario", scenario},   {"n", sim.n},         {"p", sim.p},
                       {"replicates", sim.replicates}, {"sigma", sim.sigma}, {"seed", seed},
                       {"k", sim.k},             {"signals", sim.signals}};
        config["signal_size"] = signal_size ? json(*signal_size) : json(nullptr);
        return run("simulate", config, out, [&] {
            sim.scenario = selinf::parse_scenario(scenario);
            return selinf::cmd_simulate(sim, qq_path);
        });
    }

    selinf::RunConfig cfg;
    cfg.lambda = lambda;
    cfg.steps = steps;
    cfg.alpha = alpha;
    cfg.seed = seed;
    cfg.normalize = normalize;
    cfg.line_search = line_search;
    cfg.condition = !no_condition;
    cfg.variable = variable;
    cfg.variant = variant == "simplified" ? selinf::SpacingVariant::Simplified : selinf::SpacingVariant::Exact;
    const bool is_infer = static_cast<bool>(*infer_cmd);
    const std::string command = is_infer ? "infer" : "path";
    json config;
    return run(command, config, out, [&] {
        cfg.method = selinf::parse_method(method);
        if (sigma != "estimate") {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(sigma, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != sigma.size()) {
                selinf::fail(selinf::ErrorCode::InvalidArgument, "--sigma takes a positive number or 'estimate'");
            }
            cfg.sigma = value;
        }
        config = selinf::config_json(cfg);
        config["data"] = data_path;
        config["response"] = response;
        const selinf::Dataset data = selinf::ingest(data_path, response, cfg.normalize);
        return is_infer ? selinf::cmd_infer(cfg, data) : selinf::cmd_path(cfg, data);
    });
}
