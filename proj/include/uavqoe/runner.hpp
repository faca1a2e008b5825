#pragma once

#include "uavqoe/conic.hpp"
#include "uavqoe/qoe_metrics.hpp"
#include "uavqoe/resource_opt.hpp"
#include "uavqoe/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace uavqoe
{

enum class PolicyKind
{
    EMUO,
    NNAS,
    SUDE,
    SUMTP,
    CUTR,
    CUMTP,
};

const char *to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy(const std::string &name);
const std::vector<PolicyKind> &all_policies();

/// Which sub-solvers a policy runs each slot.
struct PolicySpec
{
    PolicyKind kind = PolicyKind::EMUO;

    static PolicySpec of(PolicyKind kind) { return PolicySpec{kind}; }
    bool selects() const;
    bool optimizes_power() const;
    bool optimizes_trajectory() const;
    bool max_power() const;
    bool circular() const;
    bool fixed_positions() const;
};

struct RunHooks
{
    /// Receives every conic program built during a run with the run's policy and seed, the slot and a
    /// stage tag. Called concurrently from parallel runs.
    std::function<void(PolicyKind, std::uint64_t seed, int t, const std::string &tag, const conic::ConicProgram &)>
        on_program;
    conic::SolverSettings solver;
};

struct RunResult
{
    PolicyKind kind = PolicyKind::EMUO;
    std::uint64_t seed = 0;
    std::vector<SubscriberState> subscribers; // initial placement and bitrates
    std::vector<SlotRecord> records;
    RunSummary summary;
};

RunResult run_policy(const PolicySpec &spec, const WorldConfig &cfg, std::uint64_t seed, const RunHooks &hooks = {});

struct CircleLayout
{
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
    std::vector<double> start_angles;
    double arc_per_slot = 0.0;
};

CircleLayout circle_layout(const WorldConfig &cfg);
/// Advances `pos` by `arc` metres counter-clockwise along the circle through it.
Vec2 circular_step(const Vec2 &pos, const Vec2 &center, double radius, double arc);

/// Greedy nearest-subscriber association, UAVs in id order, line of sight required.
Association nearest_association(const std::vector<UavState> &uavs, const std::vector<SubscriberState> &subs,
                                const WorldConfig &cfg);

struct MetricMeans
{
    double NP = 0.0;
    double TL = 0.0;
    double QoE = 0.0;
    double TP = 0.0;
    double EE = 0.0;
    double RF = 0.0;
};

MetricMeans mean_metrics(const std::vector<RunResult> &runs);

struct PolicyRuns
{
    PolicyKind kind = PolicyKind::EMUO;
    std::vector<RunResult> runs; // seed order
    MetricMeans mean;
};

struct ExperimentResult
{
    std::vector<PolicyRuns> policies; // in the order requested
    const PolicyRuns *find(PolicyKind kind) const;
};

/// Runs each policy on seeds base_seed .. base_seed + n_runs - 1; runs execute in parallel.
ExperimentResult run_experiment(const std::vector<PolicySpec> &specs, const WorldConfig &cfg, int n_runs,
                                std::uint64_t base_seed, const RunHooks &hooks = {});
/// Same as run_experiment on one thread; kept as the reference for the parallel version.
ExperimentResult run_experiment_serial(const std::vector<PolicySpec> &specs, const WorldConfig &cfg, int n_runs,
                                       std::uint64_t base_seed, const RunHooks &hooks = {});

/// Relative EE gain of EMUO over `other`, in percent of |EE(other)|.
double ee_improvement_percent(const ExperimentResult &res, PolicyKind other);

struct ParetoPoint
{
    double rho1 = 0.0;
    double rho2 = 0.0;
    double NP = 0.0;
    double TL = 0.0;
    double TP = 0.0;
};

/// One EMUO run per (rho1, rho2) pair, rho1 major. Throws std::invalid_argument on empty lists.
std::vector<ParetoPoint> pareto_sweep(const WorldConfig &cfg, const std::vector<double> &rho1_values,
                                      const std::vector<double> &rho2_values, std::uint64_t seed);

/// Thrown when a slot cannot produce a valid decision even after the fallback.
struct SolverFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace uavqoe
