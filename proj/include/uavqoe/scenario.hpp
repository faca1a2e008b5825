#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavqoe
{

using Vec2 = Eigen::Vector2d;
using Rng = std::mt19937_64;

enum class BitrateUnitMode
{
    Literal,            // B * r / R with R in bps/Hz as written
    SpectralNormalized, // r / R
};

enum class NoiseReference
{
    Total,   // noise_power_sigma2 is the receiver noise power
    Density, // noise_power_sigma2 is per Hz and gets multiplied by bandwidth_B
};

struct ConfigError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

struct WorldConfig
{
    double area_width_m = 500.0;
    double area_height_m = 500.0;
    int n_uavs = 4;
    int n_subscribers = 10;
    double altitude_H = 500.0;
    double carrier_freq_fc = 4.9e9;
    double light_speed_c = 3.0e8;
    double ref_dist_D0 = 1.0;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double noise_power_sigma2 = dbm_to_mw(-174.0); // mW
    NoiseReference noise_reference = NoiseReference::Total;
    double bandwidth_B = 100e6;
    double slot_duration_dt = 2.0;
    double video_chunk_L = 10e6;
    double elevation_threshold_theta = 77.0; // degrees
    double d_min = 50.0;
    double s_max = 250.0;
    double p_hat = 500.0;
    double p_tilde = 450.0;
    double p_circuit = 20.0;
    double p_min = 0.0;
    double alpha = 1.0;
    double beta = 1.0;
    double V = 10.0;
    double rho1 = 15.0;
    double rho2 = 0.05;
    int horizon_T = 200;
    int sca_max_iter_rmax = 60;
    double sca_tolerance = 1e-6;
    std::uint64_t rng_seed = 1;
    double subscriber_step_m = 1.0;
    BitrateUnitMode bitrate_unit_mode = BitrateUnitMode::SpectralNormalized;
    // Each subscriber draws its required bitrate R_i from this set; r_th = R_i.
    std::vector<double> required_bitrates = {0.0316, 0.0154};
    double initial_queue = 1.0;
    double circle_speed_mps = 2.0;
    double circle_spacing_m = 0.0; // 0: 250 / N m

    /// Noise power in mW as used by the SINR.
    double sigma2() const;
    bool operator==(const WorldConfig &) const = default;
};

/// Throws ConfigError when an invariant fails.
void validate(const WorldConfig &cfg);

double omega(const WorldConfig &cfg);
double los_radius(const WorldConfig &cfg);
/// Interference-free rate at nadir with maximum power; bounds every achievable rate.
double rate_max(const WorldConfig &cfg);

struct UavState
{
    int id = 0;
    Vec2 q = Vec2::Zero();
    double p = 0.0;
};

struct SubscriberState
{
    int id = 0;
    Vec2 s = Vec2::Zero();
    double R = 0.0;
    double r_th = 0.0;
};

/// Serving UAV per subscriber (-1 when unassociated). Rows sum to at most one by construction.
struct Association
{
    std::vector<int> uav_of;

    Association() = default;
    explicit Association(int n_subscribers) : uav_of(static_cast<std::size_t>(n_subscribers), -1) {}

    int subscribers() const { return static_cast<int>(uav_of.size()); }
    bool c(int i, int k) const { return uav_of[static_cast<std::size_t>(i)] == k; }
    int served_count() const;
    /// -1 when UAV k serves nobody.
    int subscriber_of(int k) const;
    bool operator==(const Association &) const = default;
};

/// Checks column sums (one subscriber per UAV), index ranges, and the LoS gate.
bool is_valid(const Association &assoc, const std::vector<UavState> &uavs,
              const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

double channel_gain(const Vec2 &uav_pos, const Vec2 &sub_pos, const WorldConfig &cfg);
bool los_feasible(const Vec2 &uav_pos, const Vec2 &sub_pos, const WorldConfig &cfg);
double sinr(int i, int k, const std::vector<UavState> &uavs, const std::vector<SubscriberState> &subs,
            const WorldConfig &cfg);
double achievable_rate(int i, const Association &assoc, const std::vector<UavState> &uavs,
                       const std::vector<SubscriberState> &subs, const WorldConfig &cfg);
std::vector<double> achievable_rates(const Association &assoc, const std::vector<UavState> &uavs,
                                     const std::vector<SubscriberState> &subs, const WorldConfig &cfg);

/// Reflects a coordinate back into [0, extent].
double reflect_into(double x, double extent);

void step_subscriber_mobility(std::vector<SubscriberState> &subs, const WorldConfig &cfg, Rng &rng);

struct KinematicViolation
{
    enum class Kind
    {
        Collision,
        Speed,
        Bounds,
    } kind;
    int a = 0;
    int b = -1;
    double value = 0.0; // offending distance or displacement
};

std::vector<KinematicViolation> validate_kinematics(const std::vector<UavState> &prev,
                                                   const std::vector<UavState> &next, const WorldConfig &cfg,
                                                   double tol = 1e-6);

/// Seeded stream for one purpose of one run. Distinct streams stay independent across policies.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

std::vector<SubscriberState> random_subscribers(const WorldConfig &cfg, Rng &rng);
/// Uniform positions respecting d_min (rejection sampling) and uniform powers in [p_min, p_hat - p_c].
std::vector<UavState> random_uavs(const WorldConfig &cfg, Rng &rng);

} // namespace uavqoe
