#include <doctest.h>

#include "off/error.hpp"
#include "off/experiments.hpp"
#include "off/parallel.hpp"

#include <fstream>
#include <sstream>

using namespace off;
using namespace off::experiments;
using nlohmann::json;

namespace {

json penalization_config()
{
    return json::parse(R"({
      "experiment": "penalization",
      "data": {"source": "family", "rows": 3000, "full_availability": true,
               "family": {"w": [0.5], "u": [[0.0]], "lambda": [0.0], "v": [[0.0]],
                          "tau0": [-1.5], "tau1": [1.5]}},
      "injection": [{"feature": "z1", "sign": -1}],
      "seeds": [1, 2, 3]
    })");
}

ErrorCode config_code(const json& j)
{
    try {
        ExperimentConfig::from_json(j);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("config accepted");
    return ErrorCode::InvalidArgument;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing")
{
    auto cfg = ExperimentConfig::from_json(penalization_config(), "/data/cfg");
    CHECK(cfg.kind == Kind::penalization);
    CHECK(cfg.data.type == DataSource::Type::family);
    CHECK(cfg.data.rows == 3000);
    CHECK(cfg.injection.size() == 1);
    CHECK(cfg.injection[0].sign == -1);
    CHECK_FALSE(cfg.injection[0].slope.has_value());
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.output_dir == "off_report");

    auto csv = json::parse(R"({"experiment": "cost_of_fairness",
        "data": {"source": "csv", "path": "x.csv", "schema": {"base": ["a"], "optional": ["z"], "label": "y"}},
        "output_dir": "out"})");
    auto c2 = ExperimentConfig::from_json(csv, "/data/cfg");
    CHECK(c2.data.path == std::filesystem::path("/data/cfg/x.csv"));
    CHECK(c2.output_dir == std::filesystem::path("/data/cfg/out"));
}

TEST_CASE("config errors")
{
    auto j = penalization_config();
    j["experiment"] = "tables";
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["models"] = {"csp"};
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["seeds"] = json::array();
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["split_fraction"] = 1.5;
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["injection"][0]["sign"] = 2;
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["data"].erase("family");
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["fit"] = {{"max_iters", 0}};
    CHECK(config_code(j) == ErrorCode::Config);

    j = penalization_config();
    j["data"]["source"] = "counterexample";
    j["data"]["alpha"] = 1.0;
    CHECK(config_code(j) == ErrorCode::Config);
}

TEST_CASE("penalization run")
{
    auto cfg = ExperimentConfig::from_json(penalization_config());
    auto result = run_experiment(cfg);
    CHECK(result.kind == Kind::penalization);
    CHECK(result.config_hash.size() == 16);
    // six rows per seed, in seed order
    REQUIRE(result.rows.size() == 18);
    CHECK(result.rows.front().seed == 1);
    CHECK(result.rows.back().seed == 3);
    for (const auto& row : result.rows) {
        if (row.model == "off_multi" && row.metric == "change") {
            CHECK(row.value == 0.0);
        }
        if (row.model == "imputed" && row.metric == "change") {
            CHECK(row.value < -0.05);
        }
    }
    const auto csv = result.csv();
    CHECK(csv.rfind("experiment,seed,sample_size,model,metric,value\n", 0) == 0);
    const auto summary = result.summary();
    CHECK(summary["experiment"] == "penalization");
    CHECK(summary["seeds"] == json::array({1, 2, 3}));
    CHECK(summary["results"].size() == 6);
    CHECK(summary["results"][0]["n"] == 3);
    CHECK(summary["results"][0].contains("display"));
}

TEST_CASE("thread count does not change reports")
{
    auto cfg = ExperimentConfig::from_json(penalization_config());
    parallel::set_max_threads(1);
    const auto one = run_experiment(cfg);
    parallel::set_max_threads(8);
    const auto eight = run_experiment(cfg);
    parallel::set_max_threads(0);
    CHECK(one.csv() == eight.csv());
    CHECK(one.summary().dump() == eight.summary().dump());
}

TEST_CASE("convergence and cost of fairness runs")
{
    auto conv = ExperimentConfig::from_json(json::parse(R"({
        "experiment": "synthetic_convergence", "data": {"source": "paper_synthetic"},
        "grid": [500, 2000], "test_rows": 2000, "seeds": [7]})"));
    auto r = run_experiment(conv);
    CHECK(r.rows.size() == 6);
    CHECK(r.rows[0].sample_size == 500);
    CHECK(r.summary()["results"][0]["sample_size"] == 500);

    auto cost = ExperimentConfig::from_json(json::parse(R"({
        "experiment": "cost_of_fairness", "data": {"source": "counterexample", "rows": 4000},
        "submodel": "group_mean", "seeds": [1]})"));
    auto rc = run_experiment(cost);
    bool saw_csp = false;
    for (const auto& row : rc.rows) {
        if (row.model == "csp" && row.metric == "mse") {
            saw_csp = true;
            CHECK(std::abs(row.value - 0.5) < 0.05);
        }
    }
    CHECK(saw_csp);

    auto bad = ExperimentConfig::from_json(json::parse(R"({
        "experiment": "cost_of_fairness", "data": {"source": "paper_synthetic", "rows": 2000}, "seeds": [1]})"));
    CHECK_THROWS_AS(run_experiment(bad), Error);
}

TEST_CASE("multi optional with feature selection from csv")
{
    const auto dir = std::filesystem::temp_directory_path() / "off_test_selection";
    std::filesystem::create_directories(dir);
    {
        synthetic::FamilyParams p;
        p.w = Vector{{2.0, -1.0, 0.0, 0.5}};
        p.u = Matrix::Zero(1, 4);
        p.v = Matrix::Zero(1, 4);
        p.lambda = Vector::Zero(1);
        p.tau0 = Vector{{-0.5}};
        p.tau1 = Vector{{0.5}};
        save_csv(synthetic::sample_family(p, 1300, 3, {true}), dir / "data.csv");
    }
    json j = json::parse(R"({
        "experiment": "multi_optional",
        "data": {"source": "csv", "path": "data.csv",
                 "schema": {"base": ["b1", "b2", "b3", "b4", "z1"], "optional": [], "label": "y"}},
        "selection": {"min_samples": 250, "signs": {"b1": -1}},
        "seeds": [1, 2]
    })");
    auto cfg = ExperimentConfig::from_json(j, dir);
    auto result = run_experiment(cfg);
    // train split of 1040 rows: 1040 / 4 >= 250 > 1040 / 8
    int fits_multi = 0;
    for (const auto& row : result.rows) {
        if (row.model == "data") {
            CHECK(row.metric == "selected_r");
            CHECK(row.value == 2.0);
        }
        if (row.model == "multi" && row.metric == "fits") {
            fits_multi = static_cast<int>(row.value);
        }
        if (row.model == "off_lr" && row.metric == "fits") {
            CHECK(row.value == 3.0);
        }
    }
    CHECK(fits_multi == 4);
}

TEST_CASE("reports on disk")
{
    auto cfg = ExperimentConfig::from_json(penalization_config());
    cfg.seeds = {4};
    const auto result = run_experiment(cfg);
    const auto dir = std::filesystem::temp_directory_path() / "off_test_reports";
    std::filesystem::remove_all(dir);
    write_reports(result, dir, true);
    CHECK(slurp(dir / "report.csv") == result.csv());
    CHECK(json::parse(slurp(dir / "summary.json")) == result.summary());
    CHECK(slurp(dir / "plot.csv") == result.plot_csv());
    CHECK(config_hash(json{{"a", 1}}) == config_hash(json{{"a", 1}}));
    CHECK(config_hash(json{{"a", 1}}) != config_hash(json{{"a", 2}}));
}
