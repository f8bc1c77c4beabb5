#include "selinf/cli.hpp"
#include "selinf/lars.hpp"
#include "selinf/stepwise.hpp"
#include "selinf/truncnorm.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <sstream>

using namespace selinf;
using nlohmann::json;

namespace {

struct RunResult {
    std::string out;
    int status = 0;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(SELINF_EXE) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::string csv_from(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    std::ostringstream os;
    os.precision(17);
    os << "y";
    for (Eigen::Index j = 0; j < X.cols(); ++j) os << ",x" << j;
    os << "\n";
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        os << y(i);
        for (Eigen::Index j = 0; j < X.cols(); ++j) os << ',' << X(i, j);
        os << "\n";
    }
    return os.str();
}

}  // namespace

TEST_CASE("CSV parsing") {
    const CsvTable t = parse_csv("a,\"b,c\"\r\n1,\"say \"\"hi\"\"\"\n2,3\n");
    CHECK(t.header == std::vector<std::string>{"a", "b,c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "say \"hi\"");
    CHECK(t.lines[1] == 3);
    CHECK(code_of([] { parse_csv("a,b\n1,\"2\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_csv("a,b\n1,2,3\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_csv("a,b\n1,\"2\"x\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("ingestion") {
    const Dataset d = ingest_text("y,x\n1,2\n2,4\n6,9\n", "y", false);
    CHECK(d.X.rows() == 3);
    CHECK(d.X.cols() == 1);
    CHECK(d.y.size() == 3);
    CHECK(d.y_mean == doctest::Approx(3.0));
    CHECK(d.columns == std::vector<std::string>{"x"});
    CHECK(std::abs(d.X.data().col(0).sum()) < 1e-12);

    const Dataset by_index = ingest_text("y,x\n1,2\n2,4\n6,9\n", "1", true);
    CHECK(by_index.response == "x");
    CHECK(by_index.X.data().col(0).norm() == doctest::Approx(1.0));

    try {
        ingest_text("y,x\n1,2\n2,abc\n6,9\n", "y");
        FAIL("expected NonNumericCell");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonNumericCell);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(code_of([] { ingest_text("y,x\n1,2\n2,4\n6,9\n", "z"); }) == ErrorCode::MissingResponse);
}

TEST_CASE("path on an orthonormal design returns the sorted scores") {
    SplitMix64 rng(1);
    const DesignMatrix X = oracle::orthonormal_design(12, 4, rng);
    const Eigen::VectorXd y = oracle::gaussian(12, rng);
    const Dataset d = ingest_text(csv_from(X.data(), y), "y", false);
    RunConfig cfg;
    cfg.method = Method::Lars;
    cfg.steps = 4;
    const json out = cmd_path(cfg, d);
    Eigen::VectorXd u = (X.data().transpose() * (y.array() - y.mean()).matrix()).cwiseAbs();
    std::sort(u.data(), u.data() + u.size(), std::greater<>());
    REQUIRE(out["knots"].size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(out["knots"][k].get<double>() == doctest::Approx(u(k)).epsilon(1e-9));
}

TEST_CASE("stepwise path matches the library") {
    const Dataset d = ingest(SELINF_FIXTURE, "crime");
    RunConfig cfg;
    cfg.method = Method::Fs;
    cfg.steps = 2;
    const json out = cmd_path(cfg, d);
    const FSPath path = fs_path(d.X, d.y, 2);
    REQUIRE(out["entries"].size() == 2);
    for (int k = 0; k < 2; ++k) CHECK(out["entries"][k]["variable"].get<int>() == path.order[k]);

    cfg.steps = 99;
    CHECK(code_of([&] { cmd_path(cfg, d); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("configuration validation") {
    RunConfig cfg;
    cfg.method = Method::Lasso;
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
    cfg.lambda = 1.0;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha = 1.5;
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("unconditioned reports are classical z-tests") {
    const Dataset d = ingest(SELINF_FIXTURE, "crime");
    RunConfig cfg;
    cfg.method = Method::Fs;
    cfg.steps = 1;
    cfg.sigma = 50.0;
    cfg.condition = false;
    const json out = cmd_infer(cfg, d);
    const json& r = out["reports"][0];
    const double z = r["statistic"].get<double>() / r["scale"].get<double>();
    CHECK(r["p_value"].get<double>() == doctest::Approx(2.0 * norm_sf(std::abs(z))).epsilon(1e-10));
    CHECK(r["method"] == "unconditional");
}

TEST_CASE("exact spacing never exceeds the simplified one") {
    const Dataset d = ingest(SELINF_FIXTURE, "crime");
    RunConfig cfg;
    cfg.method = Method::Lars;
    cfg.steps = 3;
    cfg.sigma = 50.0;
    const json exact = cmd_infer(cfg, d);
    cfg.variant = SpacingVariant::Simplified;
    const json simple = cmd_infer(cfg, d);
    for (int k = 0; k < 3; ++k) {
        CHECK(exact["reports"][k]["one_sided_p"].get<double>() <=
              simple["reports"][k]["one_sided_p"].get<double>() + 1e-12);
    }
}

TEST_CASE("too many sign patterns suggests the line search") {
    SplitMix64 rng(3);
    const DesignMatrix X = oracle::random_design(60, 22, rng);
    const Eigen::VectorXd y = X.data() * Eigen::VectorXd::Constant(22, 3.0) + oracle::gaussian(60, rng);
    const Dataset d = ingest_text(csv_from(X.data(), y), "y", true);
    RunConfig cfg;
    cfg.method = Method::Lasso;
    cfg.lambda = 1e-3;
    cfg.sigma = 1.0;
    try {
        cmd_infer(cfg, d);
        FAIL("expected TooManySignPatterns");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManySignPatterns);
        CHECK(std::string(e.what()).find("--line-search") != std::string::npos);
    }
}

TEST_CASE("envelope") {
    const json env = envelope("path", json{{"seed", 7}}, json{{"x", 1}});
    CHECK(env["schema"] == kSchema);
    CHECK(env["version"] == kVersion);
    CHECK(env["seed"] == 7);
    const json err = error_json("infer", json::object(), ErrorCode::MissingResponse, "nope");
    CHECK(err["error"]["code"] == "MissingResponse");
    CHECK(!err.contains("result"));
}

TEST_CASE("executable: determinism and exit codes") {
    const std::string fixture = SELINF_FIXTURE;
    const std::string args = "infer --data " + fixture + " --response crime --method lars --steps 3 --sigma 50 --seed 4";
    const RunResult a = run(args);
    const RunResult b = run(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    const json doc = json::parse(a.out);
    CHECK(doc["schema"] == "selinf/1");
    CHECK(doc["seed"] == 4);
    CHECK(doc["result"]["reports"].size() == 3);

    const RunResult bad = run("path --data " + fixture + " --response nothing --steps 2");
    CHECK(bad.status == 1);
    CHECK(json::parse(bad.out)["error"]["code"] == "MissingResponse");

    const RunResult sim = run("simulate --scenario rss_drop -n 30 -p 5 -N 200 --seed 9 --compact");
    const RunResult sim2 = run("simulate --scenario rss_drop -n 30 -p 5 -N 200 --seed 9 --compact --threads 1");
    CHECK(sim.status == 0);
    CHECK(sim.out == sim2.out);
}
