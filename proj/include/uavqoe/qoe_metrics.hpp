#pragma once

#include "uavqoe/lyapunov.hpp"
#include "uavqoe/scenario.hpp"

#include <vector>

namespace uavqoe
{

/// Normalized bitrate term inside the utility, per bitrate_unit_mode.
double bitrate_ratio(double rate, double R, const WorldConfig &cfg);

/// alpha * sum log2(beta (1 + ratio_i)). Throws std::domain_error on a nonpositive log argument.
double utility_phi(const std::vector<double> &mean_rates, const std::vector<SubscriberState> &subs,
                   const WorldConfig &cfg);

/// L / (B r); infinite at r = 0.
double served_latency(double rate, const WorldConfig &cfg);

/// Served latency capped at dt; dt when unassociated.
double latency_d_i(int i, const Association &assoc, const std::vector<UavState> &uavs,
                   const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

double total_power(const std::vector<UavState> &uavs, const WorldConfig &cfg);

/// Jain index over the given ratios; 0 when all are zero.
double jain_index(const std::vector<double> &x);

struct ScaStats
{
    int iterations = 0;
    std::vector<double> trace;      // accepted objective values, first entry is the starting point
    int rejected_steps = 0;         // sub-steps discarded for raising the objective or failing checks
    int solver_failures = 0;
    int newton_steps = 0;
    double max_rate_violation = 0.0;    // exact rate below its slack, accepted steps
    double max_kinematic_violation = 0.0;
    bool fallback = false;          // slot reused the previous decision
    bool converged = false;
};

struct SlotRecord
{
    int t = 0;
    std::vector<double> rates;
    std::vector<double> latencies; // capped at dt
    std::vector<double> powers;    // transmit
    std::vector<double> p_tot;
    std::vector<Vec2> positions;
    std::vector<Vec2> sub_positions;
    Association assoc;
    VirtualQueues queues;      // observed at the start of the slot
    VirtualQueues queues_next; // after the update
    std::vector<double> lambda;
    double phi_obj = 0.0;
    ScaStats sca;
};

struct RunSummary
{
    std::vector<double> mean_rates;
    std::vector<double> mean_p_tot;
    double NP = 0.0;
    double TL = 0.0;
    double QoE = 0.0;
    double TP = 0.0;
    double EE = 0.0;
    double RF = 0.0;
    std::vector<Stability> stability; // per slot, from the post-update queues
    double mean_aux_utility = 0.0;    // time average of phi(lambda(t))
    double utility_of_mean_lambda = 0.0;
};

/// Throws std::invalid_argument on an empty record list.
RunSummary run_metrics(const std::vector<SlotRecord> &records, const std::vector<SubscriberState> &subs,
                       const WorldConfig &cfg);

} // namespace uavqoe
