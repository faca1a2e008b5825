#include "uavqoe/scenario.hpp"

#include <cmath>
#include <numbers>

namespace uavqoe
{

double dbm_to_mw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
    return 10.0 * std::log10(mw);
}

double WorldConfig::sigma2() const
{
    return noise_reference == NoiseReference::Density ? noise_power_sigma2 * bandwidth_B : noise_power_sigma2;
}

void validate(const WorldConfig &cfg)
{
    auto require = [](bool ok, const std::string &what) {
        if (!ok)
            throw ConfigError("invalid config: " + what);
    };
    auto positive = [&](double v, const char *name) { require(v > 0.0 && std::isfinite(v), std::string(name) + " must be > 0"); };
    positive(cfg.area_width_m, "area_width_m");
    positive(cfg.area_height_m, "area_height_m");
    require(cfg.n_uavs >= 1, "n_uavs must be >= 1");
    require(cfg.n_subscribers >= 1, "n_subscribers must be >= 1");
    positive(cfg.altitude_H, "altitude_H");
    positive(cfg.carrier_freq_fc, "carrier_freq_fc");
    positive(cfg.light_speed_c, "light_speed_c");
    positive(cfg.ref_dist_D0, "ref_dist_D0");
    positive(cfg.tx_gain, "tx_gain");
    positive(cfg.rx_gain, "rx_gain");
    positive(cfg.noise_power_sigma2, "noise_power");
    positive(cfg.bandwidth_B, "bandwidth_B");
    positive(cfg.slot_duration_dt, "slot_duration_dt");
    positive(cfg.video_chunk_L, "video_chunk_L");
    require(cfg.elevation_threshold_theta > 0.0 && cfg.elevation_threshold_theta < 90.0,
            "elevation_threshold_theta must lie in (0, 90) degrees");
    positive(cfg.d_min, "d_min");
    positive(cfg.s_max, "s_max");
    positive(cfg.p_hat, "p_hat");
    positive(cfg.p_tilde, "p_tilde");
    positive(cfg.p_circuit, "p_circuit");
    require(cfg.p_min >= 0.0, "p_min must be >= 0");
    require(cfg.p_circuit + cfg.p_min <= cfg.p_tilde && cfg.p_tilde <= cfg.p_hat,
            "need p_circuit + p_min <= p_tilde <= p_hat");
    positive(cfg.alpha, "alpha");
    positive(cfg.beta, "beta");
    require(cfg.V >= 0.0, "V must be >= 0");
    require(cfg.rho1 >= 0.0, "rho1 must be >= 0");
    require(cfg.rho2 >= 0.0, "rho2 must be >= 0");
    require(cfg.horizon_T >= 1, "horizon_T must be >= 1");
    require(cfg.sca_max_iter_rmax >= 1, "sca_max_iter_rmax must be >= 1");
    positive(cfg.sca_tolerance, "sca_tolerance");
    require(cfg.subscriber_step_m >= 0.0, "subscriber_step_m must be >= 0");
    require(!cfg.required_bitrates.empty(), "required_bitrates must not be empty");
    for (double r : cfg.required_bitrates)
        positive(r, "required_bitrates entries");
    require(cfg.initial_queue >= 0.0, "initial_queue must be >= 0");
    require(cfg.circle_speed_mps >= 0.0, "circle_speed_mps must be >= 0");
    require(cfg.circle_spacing_m >= 0.0, "circle_spacing_m must be >= 0");
}

double omega(const WorldConfig &cfg)
{
    const double num = cfg.tx_gain * cfg.rx_gain * cfg.light_speed_c * cfg.light_speed_c * cfg.ref_dist_D0 *
                       cfg.ref_dist_D0;
    const double den = 4.0 * std::numbers::pi * cfg.carrier_freq_fc;
    return num / (den * den);
}

double los_radius(const WorldConfig &cfg)
{
    return cfg.altitude_H / std::tan(cfg.elevation_threshold_theta * std::numbers::pi / 180.0);
}

double rate_max(const WorldConfig &cfg)
{
    return std::log2(1.0 + cfg.p_hat * omega(cfg) / (cfg.sigma2() * cfg.altitude_H * cfg.altitude_H));
}

int Association::served_count() const
{
    int n = 0;
    for (int k : uav_of)
        n += k >= 0 ? 1 : 0;
    return n;
}

int Association::subscriber_of(int k) const
{
    for (std::size_t i = 0; i < uav_of.size(); ++i)
        if (uav_of[i] == k)
            return static_cast<int>(i);
    return -1;
}

bool is_valid(const Association &assoc, const std::vector<UavState> &uavs,
              const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    if (assoc.uav_of.size() != subs.size())
        return false;
    std::vector<int> load(uavs.size(), 0);
    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        const int k = assoc.uav_of[i];
        if (k < 0)
            continue;
        if (k >= static_cast<int>(uavs.size()))
            return false;
        if (++load[static_cast<std::size_t>(k)] > 1)
            return false;
        if (!los_feasible(uavs[static_cast<std::size_t>(k)].q, subs[i].s, cfg))
            return false;
    }
    return true;
}

double channel_gain(const Vec2 &uav_pos, const Vec2 &sub_pos, const WorldConfig &cfg)
{
    return omega(cfg) / (cfg.altitude_H * cfg.altitude_H + (uav_pos - sub_pos).squaredNorm());
}

bool los_feasible(const Vec2 &uav_pos, const Vec2 &sub_pos, const WorldConfig &cfg)
{
    return (uav_pos - sub_pos).norm() <= los_radius(cfg);
}

double sinr(int i, int k, const std::vector<UavState> &uavs, const std::vector<SubscriberState> &subs,
            const WorldConfig &cfg)
{
    const Vec2 &s = subs[static_cast<std::size_t>(i)].s;
    double interference = cfg.sigma2();
    for (std::size_t j = 0; j < uavs.size(); ++j)
        if (static_cast<int>(j) != k)
            interference += uavs[j].p * channel_gain(uavs[j].q, s, cfg);
    const auto &u = uavs[static_cast<std::size_t>(k)];
    return u.p * channel_gain(u.q, s, cfg) / interference;
}

double achievable_rate(int i, const Association &assoc, const std::vector<UavState> &uavs,
                       const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    const int k = assoc.uav_of[static_cast<std::size_t>(i)];
    if (k < 0)
        return 0.0;
    return std::log2(1.0 + sinr(i, k, uavs, subs, cfg));
}

std::vector<double> achievable_rates(const Association &assoc, const std::vector<UavState> &uavs,
                                     const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    std::vector<double> r(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i)
        r[i] = achievable_rate(static_cast<int>(i), assoc, uavs, subs, cfg);
    return r;
}

double reflect_into(double x, double extent)
{
    // Fold onto a period of 2 * extent, then mirror the upper half.
    const double period = 2.0 * extent;
    double y = std::fmod(x, period);
    if (y < 0.0)
        y += period;
    return y > extent ? period - y : y;
}

void step_subscriber_mobility(std::vector<SubscriberState> &subs, const WorldConfig &cfg, Rng &rng)
{
    std::uniform_real_distribution<double> heading(0.0, 2.0 * std::numbers::pi);
    for (auto &sub : subs)
    {
        const double a = heading(rng);
        const double x = sub.s.x() + cfg.subscriber_step_m * std::cos(a);
        const double y = sub.s.y() + cfg.subscriber_step_m * std::sin(a);
        sub.s = Vec2(reflect_into(x, cfg.area_width_m), reflect_into(y, cfg.area_height_m));
    }
}

std::vector<KinematicViolation> validate_kinematics(const std::vector<UavState> &prev,
                                                   const std::vector<UavState> &next, const WorldConfig &cfg,
                                                   double tol)
{
    if (prev.size() != next.size())
        throw std::invalid_argument("validate_kinematics: UAV lists differ in length");
    std::vector<KinematicViolation> out;
    for (std::size_t a = 0; a < next.size(); ++a)
    {
        const double moved = (next[a].q - prev[a].q).norm();
        if (moved > cfg.s_max + tol)
            out.push_back({KinematicViolation::Kind::Speed, static_cast<int>(a), -1, moved});
        const Vec2 &q = next[a].q;
        if (q.x() < -tol || q.y() < -tol || q.x() > cfg.area_width_m + tol || q.y() > cfg.area_height_m + tol)
            out.push_back({KinematicViolation::Kind::Bounds, static_cast<int>(a), -1, 0.0});
        for (std::size_t b = a + 1; b < next.size(); ++b)
        {
            const double d = (next[a].q - next[b].q).norm();
            if (d < cfg.d_min - tol)
                out.push_back({KinematicViolation::Kind::Collision, static_cast<int>(a), static_cast<int>(b), d});
        }
    }
    return out;
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

std::vector<SubscriberState> random_subscribers(const WorldConfig &cfg, Rng &rng)
{
    std::uniform_real_distribution<double> ux(0.0, cfg.area_width_m), uy(0.0, cfg.area_height_m);
    std::uniform_int_distribution<std::size_t> pick(0, cfg.required_bitrates.size() - 1);
    std::vector<SubscriberState> subs(static_cast<std::size_t>(cfg.n_subscribers));
    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        subs[i].id = static_cast<int>(i);
        const double x = ux(rng);
        subs[i].s = Vec2(x, uy(rng));
        subs[i].R = cfg.required_bitrates[pick(rng)];
        subs[i].r_th = subs[i].R;
    }
    return subs;
}

std::vector<UavState> random_uavs(const WorldConfig &cfg, Rng &rng)
{
    std::uniform_real_distribution<double> ux(0.0, cfg.area_width_m), uy(0.0, cfg.area_height_m);
    std::uniform_real_distribution<double> up(cfg.p_min, cfg.p_hat - cfg.p_circuit);
    std::vector<UavState> uavs(static_cast<std::size_t>(cfg.n_uavs));
    for (std::size_t k = 0; k < uavs.size(); ++k)
    {
        uavs[k].id = static_cast<int>(k);
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt)
        {
            const double x = ux(rng);
            const Vec2 q(x, uy(rng));
            placed = true;
            for (std::size_t j = 0; j < k; ++j)
                if ((uavs[j].q - q).norm() < cfg.d_min)
                    placed = false;
            if (placed)
                uavs[k].q = q;
        }
        if (!placed)
            throw ConfigError("cannot place " + std::to_string(cfg.n_uavs) + " UAVs at spacing d_min = " +
                              std::to_string(cfg.d_min) + " m in the area");
    }
    for (auto &u : uavs)
        u.p = up(rng);
    return uavs;
}

} // namespace uavqoe
