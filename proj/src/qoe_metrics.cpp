#include "uavqoe/qoe_metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavqoe
{

double bitrate_ratio(double rate, double R, const WorldConfig &cfg)
{
    return cfg.bitrate_unit_mode == BitrateUnitMode::Literal ? cfg.bandwidth_B * rate / R : rate / R;
}

double utility_phi(const std::vector<double> &mean_rates, const std::vector<SubscriberState> &subs,
                   const WorldConfig &cfg)
{
    double u = 0.0;
    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        const double arg = cfg.beta * (1.0 + bitrate_ratio(mean_rates[i], subs[i].R, cfg));
        if (!(arg > 0.0))
            throw std::domain_error("utility_phi: nonpositive log argument for subscriber " + std::to_string(i));
        u += std::log2(arg);
    }
    return cfg.alpha * u;
}

double served_latency(double rate, const WorldConfig &cfg)
{
    if (rate <= 0.0)
        return std::numeric_limits<double>::infinity();
    return cfg.video_chunk_L / (cfg.bandwidth_B * rate);
}

double latency_d_i(int i, const Association &assoc, const std::vector<UavState> &uavs,
                   const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    if (assoc.uav_of[static_cast<std::size_t>(i)] < 0)
        return cfg.slot_duration_dt;
    return std::min(served_latency(achievable_rate(i, assoc, uavs, subs, cfg), cfg), cfg.slot_duration_dt);
}

double total_power(const std::vector<UavState> &uavs, const WorldConfig &cfg)
{
    double s = 0.0;
    for (const auto &u : uavs)
        s += u.p + cfg.p_circuit;
    return s;
}

double jain_index(const std::vector<double> &x)
{
    double s = 0.0, s2 = 0.0;
    for (double v : x)
    {
        s += v;
        s2 += v * v;
    }
    if (s2 == 0.0)
        return 0.0;
    return s * s / (static_cast<double>(x.size()) * s2);
}

RunSummary run_metrics(const std::vector<SlotRecord> &records, const std::vector<SubscriberState> &subs,
                       const WorldConfig &cfg)
{
    if (records.empty())
        throw std::invalid_argument("run_metrics: no slot records");
    const std::size_t M = subs.size();
    const std::size_t N = records.front().p_tot.size();
    const double T = static_cast<double>(records.size());

    RunSummary out;
    out.mean_rates.assign(M, 0.0);
    out.mean_p_tot.assign(N, 0.0);
    std::vector<double> mean_lambda(M, 0.0);
    double sum_latency = 0.0, sum_aux = 0.0;
    for (const auto &rec : records)
    {
        for (std::size_t i = 0; i < M; ++i)
        {
            out.mean_rates[i] += rec.rates[i];
            sum_latency += rec.latencies[i];
            if (!rec.lambda.empty())
                mean_lambda[i] += rec.lambda[i];
        }
        for (std::size_t k = 0; k < N; ++k)
            out.mean_p_tot[k] += rec.p_tot[k];
        if (!rec.lambda.empty())
            sum_aux += utility_phi(rec.lambda, subs, cfg);
        out.stability.push_back(stability_metrics(rec.queues_next, rec.t));
    }
    for (auto &r : out.mean_rates)
        r /= T;
    for (auto &p : out.mean_p_tot)
        p /= T;
    for (auto &l : mean_lambda)
        l /= T;

    out.NP = utility_phi(out.mean_rates, subs, cfg);
    out.TL = sum_latency / T;
    out.QoE = out.NP - cfg.rho1 * out.TL;
    out.TP = 0.0;
    for (double p : out.mean_p_tot)
        out.TP += p;
    out.EE = out.QoE - cfg.rho2 * out.TP;
    std::vector<double> ratios(M);
    for (std::size_t i = 0; i < M; ++i)
        ratios[i] = out.mean_rates[i] / subs[i].R;
    out.RF = jain_index(ratios);
    out.mean_aux_utility = sum_aux / T;
    out.utility_of_mean_lambda = utility_phi(mean_lambda, subs, cfg);
    return out;
}

} // namespace uavqoe
