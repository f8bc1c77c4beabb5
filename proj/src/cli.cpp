#include "selinf/cli.hpp"

#include "selinf/lars.hpp"
#include "selinf/lasso.hpp"
#include "selinf/stepwise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace selinf {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& cell) {
    const std::string t = trim(cell);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

json region_json(const TruncationRegion& region) {
    json out = json::array();
    for (const Interval& iv : region.intervals) out.push_back(json::array({number(iv.lo), number(iv.hi)}));
    return out;
}

std::string column_name(const Dataset& data, int j) { return data.columns[static_cast<std::size_t>(j)]; }

json report_json(const InferenceReport& r, const Dataset& data) {
    json out;
    if (r.k > 0) out["k"] = r.k;
    out["variable"] = r.variable;
    out["name"] = column_name(data, r.variable);
    out["method"] = to_string(r.method);
    out["statistic"] = number(r.statistic);
    out["scale"] = number(r.scale);
    out["region"] = region_json(r.region);
    out["p_value"] = number(r.p_value);
    out["one_sided_p"] = number(r.one_sided_p);
    out["ci"] = json::array({number(r.ci.lower), number(r.ci.upper)});
    out["line_search"] = r.line_search;
    return out;
}

InferenceReport unconditional(const Eigen::VectorXd& y, const Eigen::VectorXd& eta, double sigma, double alpha) {
    TruncationRegion region = TruncationRegion::whole_line();
    region.eta = eta;
    return selective_report(y, eta, sigma, region, alpha, InferenceMethod::Unconditional);
}

Eigen::VectorXd coefficient_direction(const DesignMatrix& X, const IndexList& M, std::size_t i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M.size()));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    return pinv_transpose_apply(M, X, e);
}

int max_steps(const Dataset& data) {
    return static_cast<int>(std::min<Eigen::Index>(data.X.rows() - 1, data.X.cols()));
}

double resolve_sigma(const RunConfig& config, const Dataset& data) {
    return config.sigma ? *config.sigma : estimate_sigma(data.X, data.y);
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::vector<std::vector<std::string>> records;
    std::vector<int> starts;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    int line = 1;
    int column = 1;
    int quote_line = 0;
    int quote_column = 0;
    int record_line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        quoted_field = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = record.size() == 1 && record[0].empty();
        if (!blank) {
            records.push_back(std::move(record));
            starts.push_back(record_line);
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                    ++column;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
                if (ch == '\n') {
                    ++line;
                    column = 0;
                }
            }
            ++column;
            continue;
        }
        switch (ch) {
            case '"':
                if (!trim(field).empty() || quoted_field) {
                    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                                    ": stray quote inside an unquoted field");
                }
                field.clear();
                in_quotes = true;
                quoted_field = true;
                quote_line = line;
                quote_column = column;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                end_record();
                ++line;
                column = 0;
                record_line = line;
                break;
            default:
                if (!quoted_field) {
                    field.push_back(ch);
                } else if (ch != ' ' && ch != '\t') {
                    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                                    ": text after a closing quote");
                }
        }
        ++column;
    }
    if (in_quotes) {
        fail(ErrorCode::ParseError, "line " + std::to_string(quote_line) + ", column " +
                                        std::to_string(quote_column) + ": unterminated quoted field");
    }
    if (!field.empty() || !record.empty()) end_record();

    if (records.empty()) fail(ErrorCode::ParseError, "line 1, column 1: empty input, a header row is required");
    table.header = std::move(records.front());
    for (std::string& h : table.header) h = trim(h);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            fail(ErrorCode::ParseError, "line " + std::to_string(starts[r]) + ", column 1: expected " +
                                            std::to_string(table.header.size()) + " fields, found " +
                                            std::to_string(records[r].size()));
        }
        table.rows.push_back(std::move(records[r]));
        table.lines.push_back(starts[r]);
    }
    return table;
}

Dataset ingest_text(const std::string& text, const std::string& response, bool normalize) {
    const CsvTable table = parse_csv(text);
    const auto& header = table.header;
    std::optional<std::size_t> target;
    if (const auto it = std::find(header.begin(), header.end(), response); it != header.end()) {
        target = static_cast<std::size_t>(it - header.begin());
    } else {
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(response.data(), response.data() + response.size(), index);
        if (ec == std::errc() && ptr == response.data() + response.size() && index < header.size()) target = index;
    }
    if (!target) fail(ErrorCode::MissingResponse, "response column '" + response + "' is not in the header");
    if (header.size() < 2) fail(ErrorCode::InvalidArgument, "need at least one predictor column");
    if (table.rows.size() < 3) fail(ErrorCode::InvalidArgument, "need at least 3 data rows");

    const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
    const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 1;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    std::vector<std::string> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != *target) columns.push_back(header[c]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::optional<double> v = parse_number(row[c]);
            if (!v) {
                fail(ErrorCode::NonNumericCell, "line " + std::to_string(table.lines[static_cast<std::size_t>(i)]) +
                                                    ", column " + std::to_string(c + 1) + " ('" + header[c] +
                                                    "'): cannot parse '" + row[c] + "' as a number");
            }
            if (c == *target) {
                y(i) = *v;
            } else {
                X(i, out_col++) = *v;
            }
        }
    }
    StandardizedData std_data = standardize(X, y, normalize);
    return Dataset{std::move(std_data.X), std::move(std_data.y), std_data.y_mean, std::move(columns),
                   header[*target]};
}

Dataset ingest(const std::string& csv_path, const std::string& response, bool normalize) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + csv_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ingest_text(buffer.str(), response, normalize);
}

std::string to_string(Method method) {
    switch (method) {
        case Method::Lasso: return "lasso";
        case Method::Lars: return "lars";
        case Method::Fs: return "fs";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "lasso") return Method::Lasso;
    if (name == "lars") return Method::Lars;
    if (name == "fs") return Method::Fs;
    fail(ErrorCode::InvalidArgument, "unknown method '" + name + "' (expected lasso, lars or fs)");
}

void RunConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
    if (sigma && !(*sigma > 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
    if (method == Method::Lasso) {
        if (!lambda || steps) fail(ErrorCode::InvalidArgument, "method lasso takes --lambda and no --steps");
        if (!(*lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    } else {
        if (!steps || lambda) {
            fail(ErrorCode::InvalidArgument, "method " + to_string(method) + " takes --steps and no --lambda");
        }
        if (*steps < 1) fail(ErrorCode::InvalidArgument, "steps must be at least 1");
    }
}

json config_json(const RunConfig& c) {
    json out;
    out["method"] = to_string(c.method);
    out["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
    out["steps"] = c.steps ? json(*c.steps) : json(nullptr);
    out["sigma"] = c.sigma ? json(*c.sigma) : json("estimate");
    out["alpha"] = c.alpha;
    out["seed"] = c.seed;
    out["normalize"] = c.normalize;
    out["line_search"] = c.line_search;
    out["variant"] = c.variant == SpacingVariant::Exact ? "exact" : "simplified";
    out["condition"] = c.condition;
    out["variable"] = c.variable ? json(*c.variable) : json(nullptr);
    return out;
}

json envelope(const std::string& command, const json& config, const json& result) {
    json out;
    out["schema"] = kSchema;
    out["version"] = kVersion;
    out["command"] = command;
    out["config"] = config;
    out["seed"] = config.contains("seed") ? config["seed"] : json(nullptr);
    out["result"] = result;
    return out;
}

json error_json(const std::string& command, const json& config, ErrorCode code, const std::string& message) {
    json out;
    out["schema"] = kSchema;
    out["version"] = kVersion;
    out["command"] = command;
    out["config"] = config;
    out["error"] = {{"code", std::string(to_string(code))}, {"message", message}};
    return out;
}

json cmd_path(const RunConfig& config, const Dataset& data) {
    config.validate();
    json out;
    out["n"] = data.X.rows();
    out["p"] = data.X.cols();
    out["columns"] = data.columns;
    out["response"] = data.response;
    out["method"] = to_string(config.method);
    switch (config.method) {
        case Method::Lasso: {
            const LassoSolution fit = lasso_fit(data.X, data.y, *config.lambda);
            json active = json::array();
            for (std::size_t i = 0; i < fit.active.size(); ++i) {
                active.push_back({{"variable", fit.active[i]},
                                  {"name", column_name(data, fit.active[i])},
                                  {"sign", fit.signs[i]}});
            }
            out["lambda"] = fit.lambda;
            out["active"] = active;
            out["coefficients"] = vector_json(fit.beta_hat);
            out["dual_gap"] = fit.dual_gap;
            out["kkt_violation"] = kkt_check(data.X, data.y, fit.lambda, fit.beta_hat).max_violation;
            break;
        }
        case Method::Lars: {
            if (*config.steps > max_steps(data)) {
                fail(ErrorCode::InvalidArgument, "steps must not exceed min(n-1, p) = " + std::to_string(max_steps(data)));
            }
            const LarsPath path = lars_path(data.X, data.y, *config.steps);
            json knots = json::array();
            json entries = json::array();
            json coefs = json::array();
            for (int k = 1; k <= path.size(); ++k) {
                const LarsStep& st = path.steps[static_cast<std::size_t>(k - 1)];
                knots.push_back(st.knot);
                entries.push_back({{"step", k},
                                   {"variable", st.j},
                                   {"name", column_name(data, st.j)},
                                   {"sign", st.s},
                                   {"knot", st.knot},
                                   {"competitors", st.competitors.size()},
                                   {"dominated", st.dominated.size()}});
                coefs.push_back(vector_json(path.beta_at_knots[static_cast<std::size_t>(k - 1)]));
            }
            out["knots"] = knots;
            out["entries"] = entries;
            out["coefficients_at_knots"] = coefs;
            break;
        }
        case Method::Fs: {
            if (*config.steps > max_steps(data)) {
                fail(ErrorCode::InvalidArgument, "steps must not exceed min(n-1, p) = " + std::to_string(max_steps(data)));
            }
            const FSPath path = fs_path(data.X, data.y, *config.steps);
            json entries = json::array();
            for (int k = 1; k <= path.size(); ++k) {
                const int j = path.order[static_cast<std::size_t>(k - 1)];
                entries.push_back({{"step", k},
                                   {"variable", j},
                                   {"name", column_name(data, j)},
                                   {"sign", path.signs[static_cast<std::size_t>(k - 1)]},
                                   {"rss", path.rss[static_cast<std::size_t>(k)]}});
            }
            out["rss0"] = path.rss.front();
            out["entries"] = entries;
            json coefs = json::array();
            for (int k = 1; k <= path.size(); ++k) {
                const IndexList M = path.model(k);
                const Eigen::VectorXd bm = least_squares(data.X, M, data.y);
                Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.X.cols());
                for (std::size_t i = 0; i < M.size(); ++i) beta(M[i]) = bm(static_cast<Eigen::Index>(i));
                coefs.push_back(vector_json(beta));
            }
            out["coefficients_at_steps"] = coefs;
            break;
        }
    }
    return out;
}

json cmd_infer(const RunConfig& config, const Dataset& data) {
    config.validate();
    const double sigma = resolve_sigma(config, data);
    json out;
    out["method"] = to_string(config.method);
    out["sigma"] = sigma;
    out["sigma_estimated"] = !config.sigma.has_value();
    out["alpha"] = config.alpha;
    out["conditioned"] = config.condition;
    json reports = json::array();

    switch (config.method) {
        case Method::Lasso: {
            const LassoSolution fit = lasso_fit(data.X, data.y, *config.lambda);
            out["lambda"] = fit.lambda;
            std::vector<InferenceReport> rs;
            if (!config.condition) {
                for (std::size_t i = 0; i < fit.active.size(); ++i) {
                    InferenceReport r = unconditional(data.y, coefficient_direction(data.X, fit.active, i), sigma,
                                                      config.alpha);
                    r.variable = fit.active[i];
                    rs.push_back(std::move(r));
                }
            } else {
                try {
                    rs = lasso_reports(data.X, data.y, fit, sigma, config.alpha,
                                       config.line_search ? LassoRegionMode::LineSearch : LassoRegionMode::SignUnion);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::TooManySignPatterns) throw;
                    fail(ErrorCode::TooManySignPatterns, std::string(e.what()) + "; rerun with --line-search");
                }
            }
            for (const InferenceReport& r : rs) {
                if (config.variable && r.variable != *config.variable) continue;
                reports.push_back(report_json(r, data));
            }
            break;
        }
        case Method::Fs: {
            if (*config.steps > max_steps(data)) {
                fail(ErrorCode::InvalidArgument, "steps must not exceed min(n-1, p) = " + std::to_string(max_steps(data)));
            }
            const FSPath path = fs_path(data.X, data.y, *config.steps);
            for (int k = 1; k <= path.size(); ++k) {
                InferenceReport r;
                if (config.condition) {
                    r = fs_report(data.X, data.y, path, k, sigma, config.alpha);
                } else {
                    const IndexList M = path.model(k);
                    r = unconditional(data.y, coefficient_direction(data.X, M, M.size() - 1), sigma, config.alpha);
                    r.k = k;
                    r.variable = M.back();
                }
                json entry = report_json(r, data);
                entry["r_stat"] = r_stat(path, k, sigma);
                reports.push_back(entry);
            }
            break;
        }
        case Method::Lars: {
            const int limit = max_steps(data);
            if (*config.steps > limit) {
                fail(ErrorCode::InvalidArgument, "steps must not exceed min(n-1, p) = " + std::to_string(limit));
            }
            const LarsPath path = lars_path(data.X, data.y, std::min(*config.steps + 1, limit));
            for (int k = 1; k <= *config.steps; ++k) {
                InferenceReport r;
                if (config.condition) {
                    r = spacing_report(path, k, sigma, config.variant, config.alpha);
                } else {
                    r = unconditional(data.y, path.entry_c[static_cast<std::size_t>(k - 1)], sigma, config.alpha);
                    r.k = k;
                    r.variable = path.steps[static_cast<std::size_t>(k - 1)].j;
                }
                json entry = report_json(r, data);
                entry["knot"] = path.knot(k);
                entry["omega"] = omega(path, k);
                if (k + 1 <= path.size()) {
                    const SignificanceResult sig = significance_test(path, k, sigma);
                    entry["significance"] = {{"statistic", sig.statistic}, {"p_value", sig.p_value}};
                }
                reports.push_back(entry);
            }
            break;
        }
    }
    out["reports"] = reports;
    return out;
}

std::string qq_csv(const SimReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "sample,reference,theoretical,empirical\n";
    for (const Sample& s : report.samples) {
        for (const QQPair& q : s.qq) {
            os << s.name << ',' << to_string(s.reference) << ',' << q.theoretical << ',' << q.empirical << '\n';
        }
    }
    return os.str();
}

json cmd_simulate(const SimConfig& config, const std::string& qq_csv_path) {
    const SimReport report = simulate(config);
    json out;
    out["scenario"] = to_string(config.scenario);
    out["replicates"] = config.replicates;
    out["failures"] = report.failures;
    out["ks_critical_1pct"] = report.ks_critical_1pct;
    if (report.event_b_frequency) out["event_b_frequency"] = *report.event_b_frequency;
    json samples = json::array();
    for (const Sample& s : report.samples) {
        json size = json::array();
        for (const SizePoint& sp : s.size) {
            size.push_back({{"alpha", sp.alpha}, {"rejection_rate", sp.rejection_rate}, {"standard_error", sp.standard_error}});
        }
        samples.push_back({{"name", s.name},
                           {"reference", to_string(s.reference)},
                           {"mean", s.mean},
                           {"variance", s.variance},
                           {"ks", s.ks},
                           {"ks_below_1pct_critical", s.ks < report.ks_critical_1pct},
                           {"size", size},
                           {"values", s.values}});
    }
    out["samples"] = samples;
    if (!qq_csv_path.empty()) {
        std::ofstream f(qq_csv_path, std::ios::binary);
        if (!f) fail(ErrorCode::InvalidArgument, "cannot write '" + qq_csv_path + "'");
        f << qq_csv(report);
        out["qq_csv"] = qq_csv_path;
    }
    return out;
}

}  // namespace selinf
