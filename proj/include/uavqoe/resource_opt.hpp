#pragma once

#include "uavqoe/conic.hpp"
#include "uavqoe/lyapunov.hpp"
#include "uavqoe/qoe_metrics.hpp"
#include "uavqoe/scenario.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace uavqoe
{

/// [X_i]^+ + [Z_i]^+, the rate weight of subscriber i.
double rate_weight(const VirtualQueues &q, int i);

struct SelectionWeights
{
    Eigen::MatrixXd weight;   // M x N, -inf for excluded pairs
    Eigen::VectorXd unassigned; // per subscriber
};

SelectionWeights selection_weights(const VirtualQueues &q, const std::vector<UavState> &uavs,
                                   const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

/// Exact maximizer of assigned weights plus unassigned penalties over at-most-one matchings.
Association solve_selection(const SelectionWeights &w);
double selection_value(const SelectionWeights &w, const Association &assoc);

/// Resource-layer objective: sum (V rho2 + [Y]^+) p - sum ([X]^+ + [Z]^+) r + V rho1 sum d,
/// with uncapped served latency L / (B r) and dt for unassociated subscribers.
double resource_objective(const VirtualQueues &q, const Association &assoc, const std::vector<UavState> &uavs,
                          const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

/// Linearization of the interference log for one served subscriber around p^(r).
struct PowerTerm
{
    int i = -1;
    int k = -1;
    double F = 0.0;          // log2(sigma2 + sum_{j != k} p_j^(r) h_ij)
    double scale = 1.0;      // sigma2 + sum_j p_j^(r) h_ij, normalizes the cone argument
    std::vector<double> G;   // h_ij / (2^F ln2), zero at j = k
    std::vector<double> h;   // gains to every UAV
    std::vector<double> p_r;
};

std::vector<PowerTerm> taylor_power_coeffs(const std::vector<double> &p_r, const Association &assoc,
                                           const std::vector<UavState> &uavs,
                                           const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

/// Concave surrogate of the rate: log2(sigma2 + sum p h) - F - sum G (p - p^(r)).
double power_rate_surrogate(const PowerTerm &term, const std::vector<double> &p, const WorldConfig &cfg);
/// Exact rate of the term's subscriber under powers p.
double power_rate_exact(const PowerTerm &term, const std::vector<double> &p, const WorldConfig &cfg);

struct PowerProgram
{
    conic::ConicProgram prog;
    std::vector<int> p_var;
    std::vector<PowerTerm> terms;
    std::vector<int> eta_var; // per term
    std::vector<int> xi_var;
};

/// Uses the current UAV powers as the expansion point. Throws std::invalid_argument when the
/// association serves a pair without line of sight.
PowerProgram build_power_program(const VirtualQueues &q, const Association &assoc, const std::vector<UavState> &uavs,
                                 const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

/// Linearization of the total-received-power log in the squared distances around q^(r).
struct TrajectoryTerm
{
    int i = -1;
    int k = -1;
    double D = 0.0;           // log2(sigma2 + sum_j p_j w / (H^2 + u_j^(r)))
    std::vector<double> E;    // per UAV
    std::vector<double> u_r;  // squared horizontal distances at q^(r)
};

std::vector<TrajectoryTerm> taylor_trajectory_coeffs(const std::vector<Vec2> &q_r, const std::vector<double> &powers,
                                                     const Association &assoc,
                                                     const std::vector<SubscriberState> &subs,
                                                     const WorldConfig &cfg);

/// log2(sigma2 + sum_j p_j h_ij) at positions q.
double received_log(int i, const std::vector<Vec2> &q, const std::vector<double> &powers,
                    const std::vector<SubscriberState> &subs, const WorldConfig &cfg, int skip = -1);
double received_log_linearized(const TrajectoryTerm &term, const std::vector<Vec2> &q,
                               const std::vector<SubscriberState> &subs);

/// -||q_k^r - q_j^r||^2 + 2 (q_k^r - q_j^r)'(q_k - q_j), a lower bound on ||q_k - q_j||^2.
double collision_linearized(const Vec2 &qk_r, const Vec2 &qj_r, const Vec2 &qk, const Vec2 &qj);

struct TrajectoryProgram
{
    conic::ConicProgram prog;
    std::vector<int> qx_var; // -1 for UAVs held in place
    std::vector<int> qy_var;
    std::vector<TrajectoryTerm> terms;
    std::vector<int> eta_var;
    std::vector<int> xi_var;
};

/// LoS radius shrunk by one subscriber step, so a served pair stays in line of sight after the
/// subscriber moves. Used by the trajectory step.
double tracking_radius(const WorldConfig &cfg);

/// Expansion point is the current UAV positions; `prev_positions` anchor the speed limit.
/// UAVs serving nobody are held in place. Throws std::invalid_argument when two UAVs are closer
/// than d_min at the expansion point or a served pair lacks line of sight.
TrajectoryProgram build_trajectory_program(const VirtualQueues &q, const Association &assoc,
                                           const std::vector<UavState> &uavs,
                                           const std::vector<Vec2> &prev_positions,
                                           const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

struct Algorithm1Options
{
    bool optimize_selection = true;
    bool optimize_power = true;
    bool optimize_trajectory = true;
    conic::SolverSettings solver;
    /// Called with each program before it is solved, tagged by stage and iteration.
    std::function<void(const std::string &, const conic::ConicProgram &)> on_program;
};

struct Algorithm1Result
{
    Association assoc;
    std::vector<UavState> uavs;
    ScaStats stats;
};

/// Alternates selection, power and trajectory steps from the given starting decision.
/// With selection disabled, `start_assoc` is kept as the association.
Algorithm1Result algorithm1(const VirtualQueues &q, const Association &start_assoc,
                            const std::vector<UavState> &start, const std::vector<Vec2> &prev_positions,
                            const std::vector<SubscriberState> &subs, const WorldConfig &cfg,
                            const Algorithm1Options &opts = {});

/// Drops pairs that lack line of sight or have zero rate.
Association filter_association(const Association &assoc, const std::vector<UavState> &uavs,
                               const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

} // namespace uavqoe
