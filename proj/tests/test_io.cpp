#include "doctest.h"

#include "uavqoe/config_io.hpp"
#include "uavqoe/report.hpp"
#include "uavqoe/slot_csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sys/wait.h>
#include <sstream>

using namespace uavqoe;
namespace fs = std::filesystem;

namespace
{

std::string read_file(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string &line, char sep = ',')
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line)
        if (c == sep)
        {
            out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string &text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

fs::path scratch(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("uavqoe_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string &args)
{
    const std::string cmd = std::string(UAVQOE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunResult short_run(PolicyKind kind, int T, std::uint64_t seed)
{
    WorldConfig cfg;
    cfg.horizon_T = T;
    return run_policy(PolicySpec::of(kind), cfg, seed);
}

} // namespace

TEST_SUITE("io")
{
    TEST_CASE("nine significant digits")
    {
        CHECK(format_sig9(1.0) == "1.00000000");
        CHECK(format_sig9(33.473277620766254) == "33.4732776");
        CHECK(format_sig9(-189.15512345) == "-189.155123");
        CHECK(format_sig9(0.0316) == "0.0316000000");
        CHECK(format_sig9(0.0) == "0.00000000");
        CHECK(format_sig9(2000.0) == "2000.00000");
        CHECK(format_sig9(9.9999999999) == "10.0000000");
        CHECK(format_sig9(1e12) == "1000000000000");
        CHECK(format_sig9(std::numeric_limits<double>::infinity()) == "inf");
        CHECK(format_sig9(-std::numeric_limits<double>::infinity()) == "-inf");
        CHECK(format_sig9(std::nan("")) == "nan");
    }

    TEST_CASE("slot rows layout")
    {
        const auto run = short_run(PolicyKind::SUMTP, 3, 1);
        std::ostringstream out;
        write_slot_rows(out, run);
        const auto rows = lines_of(out.str());
        const std::size_t M = run.subscribers.size(), N = run.records[0].powers.size();
        REQUIRE(rows.size() == 3 * (M + N));
        const auto header = split(kSlotCsvHeader);
        for (std::size_t r = 0; r < rows.size(); ++r)
        {
            const auto f = split(rows[r]);
            REQUIRE(f.size() == header.size());
            const std::size_t slot = r / (M + N), within = r % (M + N);
            CHECK(f[0] == std::to_string(slot + 1));
            CHECK(f[1] == "SUMTP");
            CHECK(f[2] == "1");
            if (within < M)
            {
                CHECK(f[3] == std::to_string(within));
                CHECK(f[4] == "subscriber");
                CHECK(f[7].empty());
                CHECK(f[11].empty());
                const int a = run.records[slot].assoc.uav_of[within];
                CHECK(f[8] == std::to_string(a));
                if (a < 0)
                {
                    CHECK(f[5] == "0.00000000");
                    CHECK(f[6] == "2.00000000");
                }
            }
            else
            {
                CHECK(f[3] == std::to_string(within - M));
                CHECK(f[4] == "uav");
                CHECK(f[5].empty());
                CHECK(f[8].empty());
                CHECK(f[7] == "480.000000");
            }
        }
        CHECK_THROWS_AS(write_slot_rows(out, RunResult{}), std::invalid_argument);
    }

    TEST_CASE("csv output is byte-identical across repeats")
    {
        const fs::path dir = scratch("csv");
        const auto a = short_run(PolicyKind::EMUO, 4, 2);
        const auto b = short_run(PolicyKind::EMUO, 4, 2);
        write_slot_csv((dir / "a.csv").string(), {&a});
        write_slot_csv((dir / "b.csv").string(), {&b});
        const std::string ta = read_file(dir / "a.csv");
        CHECK(ta == read_file(dir / "b.csv"));
        CHECK(lines_of(ta).front() == kSlotCsvHeader);
        CHECK_THROWS_AS(write_slot_csv((dir / "missing" / "x.csv").string(), {&a}), std::runtime_error);
    }

    TEST_CASE("config round trip")
    {
        WorldConfig c;
        c.n_uavs = 6;
        c.rho1 = 3.5;
        c.bitrate_unit_mode = BitrateUnitMode::Literal;
        c.noise_reference = NoiseReference::Density;
        c.required_bitrates = {0.02};
        c.rng_seed = 77;
        CHECK(config_from_json(config_to_json(c)) == c);
        CHECK(config_from_json(config_to_json(WorldConfig{})) == WorldConfig{});
        CHECK(config_from_json(nlohmann::json::object()) == WorldConfig{});
    }

    TEST_CASE("config errors")
    {
        CHECK_THROWS_AS(config_from_json({{"no_such_key", 1}}), ConfigError);
        CHECK_THROWS_AS(config_from_json({{"n_uavs", "four"}}), ConfigError);
        CHECK_THROWS_AS(config_from_json({{"n_uavs", 0}}), ConfigError);
        CHECK_THROWS_AS(config_from_json({{"noise_power_dbm", -174.0}, {"noise_power_sigma2", 1e-17}}), ConfigError);
        CHECK_THROWS_AS(config_from_json({{"bitrate_unit_mode", "bits"}}), ConfigError);
        CHECK_THROWS_AS(load_config("/nonexistent/uavqoe.json"), ConfigError);

        const fs::path dir = scratch("cfg");
        std::ofstream(dir / "bad.json") << "{ not json";
        CHECK_THROWS_AS(load_config((dir / "bad.json").string()), ConfigError);
    }

    TEST_CASE("noise in dBm")
    {
        const auto c = config_from_json({{"noise_power_dbm", -174.0}});
        CHECK(c.noise_power_sigma2 == doctest::Approx(3.981071705534985e-18).epsilon(1e-12));
        const auto d = config_from_json({{"noise_power_dbm", 0.0}});
        CHECK(d.noise_power_sigma2 == doctest::Approx(1.0));
    }

    TEST_CASE("summary json has one block per policy")
    {
        WorldConfig cfg;
        cfg.horizon_T = 3;
        std::vector<PolicySpec> specs;
        for (PolicyKind k : all_policies())
            specs.push_back(PolicySpec::of(k));
        const auto res = run_experiment(specs, cfg, 1, 1);
        const auto j = experiment_to_json(res, cfg);
        REQUIRE(j["policies"].size() == 6);
        std::set<std::string> names;
        for (const auto &p : j["policies"])
        {
            names.insert(p["algorithm"].get<std::string>());
            for (const char *key : {"NP", "TL", "QoE", "TP", "EE", "RF"})
                CHECK(p["mean"].contains(key));
            CHECK(p["runs"].size() == 1);
        }
        CHECK(names.size() == 6);
        CHECK(j["config"]["n_uavs"] == 4);
        CHECK(j["ee_improvement_percent"].contains("SUMTP"));
    }

    TEST_CASE("cli writes outputs and reports errors through exit codes")
    {
        const fs::path dir = scratch("cli");
        CHECK(run_cli("--algorithm sumtp --runs 2 --out " + (dir / "out").string()) == 0);
        const auto rows = lines_of(read_file(dir / "out" / "slots.csv"));
        REQUIRE(!rows.empty());
        CHECK(rows.front() == kSlotCsvHeader);
        std::set<std::pair<std::string, std::string>> slots;
        for (std::size_t r = 1; r < rows.size(); ++r)
        {
            const auto f = split(rows[r]);
            slots.insert({f[2], f[0]});
        }
        CHECK(slots.size() == 2 * 200);
        const auto j = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
        CHECK(j["policies"].size() == 1);

        CHECK(run_cli("--algorithm sude --runs 1 --slots 2 --dump-conic " + (dir / "cbf").string() + " --out " +
                      (dir / "o2").string()) == 0);
        int dumped = 0;
        for (const auto &e : fs::directory_iterator(dir / "cbf"))
        {
            CHECK(e.path().extension() == ".cbf");
            const std::string name = e.path().filename().string();
            CHECK(name.rfind("SUDE_seed", 0) == 0);
            CHECK(name.find("_t1_") != std::string::npos);
            ++dumped;
        }
        CHECK(dumped > 0);

        std::ofstream(dir / "bad.json") << R"({"unknown_field": 1})";
        CHECK(run_cli("--config " + (dir / "bad.json").string() + " --out " + (dir / "o3").string()) == 2);
        CHECK(run_cli("--config " + (dir / "missing.json").string()) == 2);
        CHECK(run_cli("--algorithm nope") == 2);
        CHECK(run_cli("--sweep-rho1 1,2") == 2);
        CHECK(run_cli("--algorithm emuo --slots 2 --sweep-rho1 5,15 --sweep-rho2 0.05 --out " +
                      (dir / "o4").string()) == 0);
        const auto pj = nlohmann::json::parse(read_file(dir / "o4" / "summary.json"));
        CHECK(pj["pareto"].size() == 2);
    }
}
