#include "uavqoe/config_io.hpp"
#include "uavqoe/conic.hpp"
#include "uavqoe/log.hpp"
#include "uavqoe/report.hpp"
#include "uavqoe/runner.hpp"
#include "uavqoe/slot_csv.hpp"

#include "CLI11.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace uavqoe;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::vector<PolicySpec> policies_for(const std::string &name)
{
    std::vector<PolicySpec> specs;
    if (name == "all")
    {
        for (PolicyKind k : all_policies())
            specs.push_back(PolicySpec::of(k));
        return specs;
    }
    const auto kind = parse_policy(name);
    if (!kind)
        throw ConfigError("unknown algorithm '" + name + "'");
    specs.push_back(PolicySpec::of(*kind));
    return specs;
}

void write_json(const fs::path &path, const nlohmann::json &j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace

int main(int argc, char **argv)
{
    init_logging();

    CLI::App app{"Multi-UAV video delivery simulator"};
    std::string config_path;
    std::string algorithm = "all";
    int runs = 10;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::vector<double> sweep_rho1, sweep_rho2;
    std::optional<int> uavs, subscribers, slots;
    std::string dump_dir;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--algorithm", algorithm, "emuo|nnas|sude|sumtp|cutr|cumtp|all")
        ->check(CLI::IsMember({"emuo", "nnas", "sude", "sumtp", "cutr", "cumtp", "all"}, CLI::ignore_case));
    app.add_option("--runs", runs, "runs per algorithm")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "base seed (default: rng_seed from the config)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--sweep-rho1", sweep_rho1, "rho1 values for the Pareto sweep")->delimiter(',');
    app.add_option("--sweep-rho2", sweep_rho2, "rho2 values for the Pareto sweep")->delimiter(',');
    app.add_option("--uavs", uavs, "number of UAVs");
    app.add_option("--subscribers", subscribers, "number of subscribers");
    app.add_option("--slots", slots, "horizon T");
    app.add_option("--dump-conic", dump_dir, "write the slot-1 conic programs of every run to this directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kExitConfig;
    }

    try
    {
        WorldConfig cfg = config_path.empty() ? WorldConfig{} : load_config(config_path);
        if (uavs)
            cfg.n_uavs = *uavs;
        if (subscribers)
            cfg.n_subscribers = *subscribers;
        if (slots)
            cfg.horizon_T = *slots;
        if (seed)
            cfg.rng_seed = *seed;
        validate(cfg);
        if (sweep_rho1.empty() != sweep_rho2.empty())
            throw ConfigError("--sweep-rho1 and --sweep-rho2 must be given together");
        const std::vector<PolicySpec> specs = policies_for(algorithm);

        fs::create_directories(out_dir);
        RunHooks hooks;
        if (!dump_dir.empty())
        {
            fs::create_directories(dump_dir);
            hooks.on_program = [dump_dir](PolicyKind kind, std::uint64_t s, int t, const std::string &tag,
                                          const conic::ConicProgram &prog) {
                if (t != 1)
                    return;
                const fs::path p = fs::path(dump_dir) / (std::string(to_string(kind)) + "_seed" + std::to_string(s) +
                                                         "_t1_" + tag + ".cbf");
                std::ofstream f(p);
                conic::write_cbf(prog, f);
            };
        }

        const ExperimentResult res = run_experiment(specs, cfg, runs, cfg.rng_seed, hooks);
        std::vector<const RunResult *> all;
        for (const auto &p : res.policies)
            for (const auto &r : p.runs)
                all.push_back(&r);
        const fs::path csv = fs::path(out_dir) / "slots.csv";
        write_slot_csv(csv.string(), all);

        nlohmann::json summary = experiment_to_json(res, cfg);
        if (!sweep_rho1.empty())
            summary["pareto"] = pareto_to_json(pareto_sweep(cfg, sweep_rho1, sweep_rho2, cfg.rng_seed));
        const fs::path json_path = fs::path(out_dir) / "summary.json";
        write_json(json_path, summary);

        for (const auto &p : res.policies)
            std::cout << to_string(p.kind) << ": QoE " << p.mean.QoE << "  EE " << p.mean.EE << "  NP " << p.mean.NP
                      << "  TL " << p.mean.TL << "  TP " << p.mean.TP << "  RF " << p.mean.RF << '\n';
        std::cout << "wrote " << csv.string() << " and " << json_path.string() << '\n';
        return 0;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const SolverFailure &e)
    {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
