#include "support.hpp"

#include "tapelab/cli.hpp"
#include "tapelab/digest.hpp"
#include "tapelab/scenario.hpp"
#include "tapelab/tape_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

using namespace tapelab;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

const char* kScenario = R"(scenario_name = cli_small
seed = 11
session_start_us = 36000000000
session_end_us = 36300000000

[symbols]
ticker,listing,rate_per_s,price0,step_ticks,quote_ratio,lot,mean_lots,sweep_extra,trf_fraction,shape,venues
BIG,NASDAQ,12,116.00,100,10,100,2,3,0.15,constant,default
MID,NYSE,3,17.50,100,10,100,2,1,0.15,constant,default
LOW,NYSE_ARCA_MKT_BATS_REGIONAL,0.3,17.00,100,10,100,2,0,0.15,constant,default
)";

struct Run {
    int code = -1;
    std::string out, err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tapelab");
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_scenario(const TempDir& dir, const std::string& text, const std::string& name = "s.cfg") {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("simulate is deterministic and writes a manifest") {
    TempDir dir("cli_sim");
    const auto cfg = write_scenario(dir, kScenario);
    const auto a = cli({"simulate", "--config", cfg.string(), "--out", (dir / "a").string()});
    REQUIRE(a.code == 0);
    const auto b = cli({"simulate", "--config", cfg.string(), "--out", (dir / "b").string()});
    REQUIRE(b.code == 0);
    const auto ma = a.json(), mb = b.json();
    CHECK(ma["scenario_hash"] == mb["scenario_hash"]);
    REQUIRE(ma["tapes"].size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ma["tapes"][i]["sha256"] == mb["tapes"][i]["sha256"]);
        const auto path = dir / "a" / ma["tapes"][i]["path"].get<std::string>();
        CHECK(to_hex(sha256_file(path)) == ma["tapes"][i]["sha256"]);
        CHECK(read_tape(path).records.size() == ma["tapes"][i]["records"].get<std::size_t>());
    }
    CHECK(ma["seed"] == 11);
    CHECK(fs::exists(dir / "a" / "symbols.csv"));
    CHECK(parse_scenario(read_file(dir / "a" / "scenario.cfg")) == parse_scenario(kScenario));

    const auto c = cli({"simulate", "--config", cfg.string(), "--seed", "12", "--out", (dir / "c").string()});
    REQUIRE(c.code == 0);
    CHECK(c.json()["scenario_hash"] != ma["scenario_hash"]);
    CHECK(c.json()["tapes"][0]["sha256"] != ma["tapes"][0]["sha256"]);
}

TEST_CASE("usage and config errors exit 2") {
    TempDir dir("cli_usage");
    const auto empty = write_scenario(dir, "scenario_name = nothing\nseed = 1\n");
    auto r = cli({"simulate", "--config", empty.string(), "--out", (dir / "x").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("symbols") != std::string::npos);
    CHECK(r.out.empty());

    CHECK(cli({"simulate", "--out", (dir / "x").string()}).code == 2);
    CHECK(cli({"simulate", "--preset", "typical_day"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"simulate", "--preset", "weird", "--out", (dir / "x").string()}).code == 2);
    CHECK(cli({"analyze", "oos", "--symbol", "BIG"}).code == 2);
    CHECK(cli({"simulate", "--config", (dir / "missing.cfg").string(), "--out", (dir / "x").string()}).code == 3);
}

TEST_CASE("analyze subcommands") {
    TempDir dir("cli_analyze");
    auto zero_text = std::string(kScenario);
    zero_text.replace(zero_text.find("[symbols]"), 0, "[latency]\nmedian_us = 0\nsigma = 0\n\n");
    const auto zero_cfg = write_scenario(dir, zero_text, "zero.cfg");
    const auto cfg = write_scenario(dir, kScenario);
    REQUIRE(cli({"simulate", "--config", zero_cfg.string(), "--out", (dir / "zero").string()}).code == 0);
    REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", (dir / "run").string()}).code == 0);
    const auto out = dir / "out";

    SUBCASE("oos on a zero-latency tape") {
        const auto r = cli({"analyze", "oos", "--tape", (dir / "zero" / "sip_C.nms").string(), "--symbol", "BIG",
                            "--out", out.string()});
        REQUIRE(r.code == 0);
        const auto j = r.json();
        CHECK(j["oos_percent"] == 0.0);
        CHECK(j["total_trades"].get<int>() > 100);
        CHECK(fs::exists(out / "oos_BIG.csv"));
    }

    SUBCASE("oos under default latency") {
        const auto r = cli({"analyze", "oos", "--run", (dir / "run").string(), "--symbol", "BIG", "--ex-trf",
                            "--out", out.string()});
        REQUIRE(r.code == 0);
        const auto j = r.json();
        CHECK(j["oos_count"].get<int>() > 0);
        CHECK(j["ex_trf"] == true);
        CHECK(j["without_trf"]["total_trades"] == j["total_trades"]);
        CHECK(j["with_trf"]["total_trades"].get<int>() > j["total_trades"].get<int>());
    }

    SUBCASE("unknown ticker exits 4 and names it") {
        const auto r = cli({"analyze", "oos", "--run", (dir / "run").string(), "--symbol", "NOPE", "--out",
                            out.string()});
        CHECK(r.code == 4);
        CHECK(r.err.find("NOPE") != std::string::npos);
    }

    SUBCASE("missing tape") {
        const auto r = cli({"analyze", "latency", "--tape", (dir / "run" / "sip_Z.nms").string(), "--out",
                            out.string()});
        CHECK(r.code != 0);
        CHECK(r.err.find("sip_Z.nms") != std::string::npos);
    }

    SUBCASE("every subcommand produces a summary and CSVs") {
        const std::vector<std::pair<std::string, std::string>> cases{
            {"latency", "latency_all.csv"},   {"oos", "oos_BIG.csv"},         {"nbbo", "nbbo_BIG.csv"},
            {"windows", "windows_events_BIG.csv"},   {"descriptive", "descriptive_all.csv"},
            {"trend", "trend_all.csv"},       {"returns", "returns_BIG.csv"}, {"scatter", "scatter_all.csv"}};
        for (const auto& [sub, file] : cases) {
            std::vector<std::string> args{"analyze", sub, "--run", (dir / "run").string(), "--out", out.string()};
            if (sub == "oos" || sub == "nbbo" || sub == "windows" || sub == "returns") {
                args.push_back("--symbol");
                args.push_back("BIG");
            }
            const auto r = cli(args);
            INFO(sub << ": " << r.err);
            REQUIRE(r.code == 0);
            CHECK(r.json()["subcommand"] == sub);
            CHECK(fs::exists(out / file));
        }
        // Same keys on a second run.
        const auto t1 = cli({"analyze", "trend", "--run", (dir / "run").string(), "--out", out.string()}).json();
        const auto t2 = cli({"analyze", "trend", "--run", (dir / "zero").string(), "--out", out.string()}).json();
        std::vector<std::string> k1, k2;
        for (auto it = t1.begin(); it != t1.end(); ++it) k1.push_back(it.key());
        for (auto it = t2.begin(); it != t2.end(); ++it) k2.push_back(it.key());
        CHECK(k1 == k2);
        CHECK(t1.contains("slope"));
        CHECK(t1.contains("r_squared"));
        CHECK(cli({"analyze", "nbbo", "--run", (dir / "run").string(), "--symbol", "BIG", "--ordering", "sideways",
                   "--out", out.string()})
                  .code == 2);
    }

    SUBCASE("inputs are left untouched") {
        const auto before = read_file(dir / "run" / "sip_C.nms");
        REQUIRE(cli({"analyze", "nbbo", "--tape", (dir / "run" / "sip_C.nms").string(), "--symbol", "BIG", "--out",
                     out.string()})
                    .code == 0);
        CHECK(read_file(dir / "run" / "sip_C.nms") == before);
    }
}

TEST_CASE("report") {
    TempDir dir("cli_report");
    const auto cfg = write_scenario(dir, kScenario);
    const auto run = dir / "run";
    REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", run.string()}).code == 0);
    const auto r1 = cli({"report", run.string()});
    REQUIRE(r1.code == 0);
    std::map<std::string, std::string> first;
    for (const auto& e : fs::directory_iterator(run / "report")) first[e.path().filename().string()] = read_file(e.path());
    CHECK(first.count("table1.csv"));
    CHECK(first.count("summary.json"));
    const auto r2 = cli({"report", run.string()});
    REQUIRE(r2.code == 0);
    CHECK(r1.out == r2.out);
    for (const auto& e : fs::directory_iterator(run / "report"))
        CHECK(first[e.path().filename().string()] == read_file(e.path()));

    // The manifest lists every report CSV with its data-row count.
    const auto manifest = nlohmann::json::parse(read_file(run / "manifest.json"));
    std::size_t csvs = 0;
    for (const auto& [name, entry] : first) csvs += name.size() > 4 && name.substr(name.size() - 4) == ".csv";
    REQUIRE(manifest["analysis_outputs"].size() == csvs);
    for (auto it = manifest["analysis_outputs"].begin(); it != manifest["analysis_outputs"].end(); ++it) {
        const auto content = read_file(run / it.key());
        const auto rows = static_cast<long>(std::count(content.begin(), content.end(), '\n')) - 1;
        CHECK(it.value()["rows"].get<long>() == rows);
    }
    CHECK(manifest["tapes"].size() == 4);

    std::istringstream table(first["table1.csv"]);
    std::string line;
    std::getline(table, line);
    CHECK(line == "ticker,percent_out_of_sequence,total_trades,listing");
    std::vector<std::string> tickers;
    long prev = -1;
    while (std::getline(table, line)) {
        tickers.push_back(line.substr(0, line.find(',')));
        const auto cells = split_csv_line(line);
        const long trades = std::stol(std::string(cells[2]));
        if (prev >= 0) CHECK(trades <= prev);
        prev = trades;
    }
    CHECK(tickers == std::vector<std::string>{"BIG", "MID", "LOW"});

    fs::remove(run / "sip_B.nms");
    const auto missing = cli({"report", run.string()});
    CHECK(missing.code == 4);
    CHECK(missing.err.find("sip_B.nms") != std::string::npos);
    CHECK(cli({"report", (dir / "nowhere").string()}).code == 4);
}

TEST_CASE("stress_open manifest has stage timings") {
    TempDir dir("cli_stress");
    auto cfg = scenario_preset("stress_open");
    // Two light names keep the run quick; shapes and latencies stay those of the preset.
    cfg.symbols.erase(cfg.symbols.begin(), cfg.symbols.end() - 2);
    std::ostringstream log;
    const auto m = cmd_simulate(cfg, dir / "run", log);
    CHECK(m["scenario_name"] == "stress_open");
    CHECK(m["timings_s"].contains("generate"));
    CHECK(m["timings_s"].contains("consolidate"));
    CHECK(m["timings_s"]["generate"].get<double>() >= 0.0);
}

TEST_CASE("scenario subcommand prints a parseable preset") {
    const auto r = cli({"scenario", "--preset", "typical_day"});
    REQUIRE(r.code == 0);
    CHECK(parse_scenario(r.out) == scenario_preset("typical_day"));
}
