#pragma once

#include "selinf/errors.hpp"
#include "selinf/inference.hpp"
#include "selinf/linmodel.hpp"
#include "selinf/simulate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace selinf {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "selinf/1";

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number on which each row starts.
    std::vector<int> lines;
};

// RFC 4180: comma separated, optional double-quoted fields with "" escapes,
// CRLF or LF line ends, header row required. Ragged rows and unterminated
// quotes raise ParseError with the line and column.
CsvTable parse_csv(const std::string& text);

struct Dataset {
    DesignMatrix X;
    Eigen::VectorXd y;
    double y_mean = 0.0;
    std::vector<std::string> columns;  // names of the design columns
    std::string response;
};

// The response is matched by header name first, then as a 0-based column
// index. Every other column becomes a predictor; the design is centered (and
// normalized when asked) and y is centered.
Dataset ingest_text(const std::string& text, const std::string& response, bool normalize = true);
Dataset ingest(const std::string& csv_path, const std::string& response, bool normalize = true);

enum class Method { Lasso, Lars, Fs };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct RunConfig {
    Method method = Method::Lars;
    std::optional<double> lambda;
    std::optional<int> steps;
    std::optional<double> sigma;  // empty: estimate from the full least-squares fit
    double alpha = 0.05;
    std::uint64_t seed = 0;
    bool normalize = true;
    bool line_search = false;
    SpacingVariant variant = SpacingVariant::Exact;
    bool condition = true;
    std::optional<int> variable;  // restrict lasso inference to one column

    // Exactly one of lambda (lasso) or steps (lars, fs) and alpha in (0,1).
    void validate() const;
};

nlohmann::json config_json(const RunConfig& config);

nlohmann::json cmd_path(const RunConfig& config, const Dataset& data);
nlohmann::json cmd_infer(const RunConfig& config, const Dataset& data);
// Writes Q-Q pairs to qq_csv_path when it is not empty.
nlohmann::json cmd_simulate(const SimConfig& config, const std::string& qq_csv_path = {});

// Envelope with schema, version, command and config echo around a result or
// an error object.
nlohmann::json envelope(const std::string& command, const nlohmann::json& config, const nlohmann::json& result);
nlohmann::json error_json(const std::string& command, const nlohmann::json& config, ErrorCode code,
                          const std::string& message);

std::string qq_csv(const SimReport& report);

}  // namespace selinf
