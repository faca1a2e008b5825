#pragma once

#include "uavqoe/scenario.hpp"

#include <vector>

namespace uavqoe
{

/// Stored unclamped; readers apply [.]^+ where needed.
struct VirtualQueues
{
    std::vector<double> X; // per subscriber
    std::vector<double> Z; // per subscriber
    std::vector<double> Y; // per UAV

    static VirtualQueues filled(int n_subscribers, int n_uavs, double value);
    bool operator==(const VirtualQueues &) const = default;
};

inline double pos(double x)
{
    return x > 0.0 ? x : 0.0;
}

VirtualQueues update_queues(const VirtualQueues &q, const std::vector<double> &rates,
                            const std::vector<double> &lambda, const std::vector<double> &p_tot,
                            const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

struct Stability
{
    double S_X = 0.0;
    double S_Z = 0.0;
    double S_Y = 0.0;
};

/// max [Q(t)]^+ / t per queue family.
Stability stability_metrics(const VirtualQueues &q, int t);
/// One entry per slot: history[t-1] holds the queues at slot t.
std::vector<Stability> stability_metrics(const std::vector<VirtualQueues> &history);

/// The per-subscriber convex objective minimized by the auxiliary layer.
double auxiliary_objective(double lambda, double z, double R, const WorldConfig &cfg);
double solve_auxiliary(double z, double R, const WorldConfig &cfg);
std::vector<double> solve_auxiliary(const VirtualQueues &q, const std::vector<SubscriberState> &subs,
                                    const WorldConfig &cfg);

/// a(t) = phi(lambda(t)).
double auxiliary_utility(const std::vector<double> &lambda, const std::vector<SubscriberState> &subs,
                         const WorldConfig &cfg);

/// L(t) = 1/2 sum of squared clamped queues.
double lyapunov_function(const VirtualQueues &q);

/// Drift-plus-penalty L(t+1) - L(t) - V (a - rho1 sum d - rho2 sum p_tot) for one slot.
/// `powers` are transmit powers; circuit power is added internally.
double dpp_value(const VirtualQueues &q, const std::vector<double> &rates, const std::vector<double> &lambda,
                 const std::vector<double> &powers, const std::vector<double> &latencies,
                 const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

/// Upper bound of the drift-plus-penalty term.
double dpp_bound_rhs(const VirtualQueues &q, const std::vector<double> &rates, const std::vector<double> &lambda,
                     const std::vector<double> &powers, const std::vector<double> &latencies,
                     const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

} // namespace uavqoe
