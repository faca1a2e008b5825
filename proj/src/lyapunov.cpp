#include "uavqoe/lyapunov.hpp"

#include "uavqoe/qoe_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavqoe
{

VirtualQueues VirtualQueues::filled(int n_subscribers, int n_uavs, double value)
{
    VirtualQueues q;
    q.X.assign(static_cast<std::size_t>(n_subscribers), value);
    q.Z.assign(static_cast<std::size_t>(n_subscribers), value);
    q.Y.assign(static_cast<std::size_t>(n_uavs), value);
    return q;
}

VirtualQueues update_queues(const VirtualQueues &q, const std::vector<double> &rates,
                            const std::vector<double> &lambda, const std::vector<double> &p_tot,
                            const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    VirtualQueues out = q;
    for (std::size_t i = 0; i < q.X.size(); ++i)
    {
        out.X[i] = q.X[i] + subs[i].r_th - rates[i];
        out.Z[i] = q.Z[i] + lambda[i] - rates[i];
    }
    for (std::size_t k = 0; k < q.Y.size(); ++k)
        out.Y[k] = q.Y[k] + p_tot[k] - cfg.p_tilde;
    return out;
}

Stability stability_metrics(const VirtualQueues &q, int t)
{
    auto worst = [](const std::vector<double> &v) {
        double m = 0.0;
        for (double x : v)
            m = std::max(m, pos(x));
        return m;
    };
    const double td = static_cast<double>(t);
    return {worst(q.X) / td, worst(q.Z) / td, worst(q.Y) / td};
}

std::vector<Stability> stability_metrics(const std::vector<VirtualQueues> &history)
{
    std::vector<Stability> out;
    out.reserve(history.size());
    for (std::size_t t = 0; t < history.size(); ++t)
        out.push_back(stability_metrics(history[t], static_cast<int>(t + 1)));
    return out;
}

double auxiliary_objective(double lambda, double z, double R, const WorldConfig &cfg)
{
    return -cfg.V * cfg.alpha * std::log2(cfg.beta * (1.0 + bitrate_ratio(lambda, R, cfg))) + pos(z) * lambda;
}

double solve_auxiliary(double z, double R, const WorldConfig &cfg)
{
    const double r_max = rate_max(cfg);
    if (pos(z) == 0.0)
        return r_max;
    // beta only shifts the log, so it drops out of the stationarity condition.
    const double offset = cfg.bitrate_unit_mode == BitrateUnitMode::Literal ? R / cfg.bandwidth_B : R;
    return std::min(pos(cfg.V * cfg.alpha / (pos(z) * std::numbers::ln2) - offset), r_max);
}

std::vector<double> solve_auxiliary(const VirtualQueues &q, const std::vector<SubscriberState> &subs,
                                    const WorldConfig &cfg)
{
    std::vector<double> lambda(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i)
        lambda[i] = solve_auxiliary(q.Z[i], subs[i].R, cfg);
    return lambda;
}

double auxiliary_utility(const std::vector<double> &lambda, const std::vector<SubscriberState> &subs,
                         const WorldConfig &cfg)
{
    return utility_phi(lambda, subs, cfg);
}

double lyapunov_function(const VirtualQueues &q)
{
    double s = 0.0;
    for (double x : q.X)
        s += pos(x) * pos(x);
    for (double x : q.Z)
        s += pos(x) * pos(x);
    for (double x : q.Y)
        s += pos(x) * pos(x);
    return 0.5 * s;
}

double dpp_value(const VirtualQueues &q, const std::vector<double> &rates, const std::vector<double> &lambda,
                 const std::vector<double> &powers, const std::vector<double> &latencies,
                 const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    std::vector<double> p_tot(powers.size());
    double sum_p_tot = 0.0;
    for (std::size_t k = 0; k < powers.size(); ++k)
    {
        p_tot[k] = powers[k] + cfg.p_circuit;
        sum_p_tot += p_tot[k];
    }
    double sum_d = 0.0;
    for (double d : latencies)
        sum_d += d;
    const VirtualQueues next = update_queues(q, rates, lambda, p_tot, subs, cfg);
    const double a = auxiliary_utility(lambda, subs, cfg);
    return lyapunov_function(next) - lyapunov_function(q) - cfg.V * (a - cfg.rho1 * sum_d - cfg.rho2 * sum_p_tot);
}

double dpp_bound_rhs(const VirtualQueues &q, const std::vector<double> &rates, const std::vector<double> &lambda,
                     const std::vector<double> &powers, const std::vector<double> &latencies,
                     const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    const double r_max = rate_max(cfg);
    double rhs = 0.0;
    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        rhs += r_max * r_max;
        rhs += pos(q.X[i]) * subs[i].r_th;
        rhs += pos(q.Z[i]) * lambda[i];
        rhs -= (pos(q.X[i]) + pos(q.Z[i])) * rates[i];
        rhs += cfg.V * cfg.rho1 * latencies[i];
    }
    for (std::size_t k = 0; k < q.Y.size(); ++k)
    {
        rhs += cfg.p_hat * cfg.p_hat / 2.0;
        rhs -= pos(q.Y[k]) * (cfg.p_tilde - cfg.p_circuit);
        rhs += cfg.V * cfg.rho2 * cfg.p_circuit;
        rhs += (cfg.V * cfg.rho2 + pos(q.Y[k])) * powers[k];
    }
    rhs -= cfg.V * auxiliary_utility(lambda, subs, cfg);
    return rhs;
}

} // namespace uavqoe
