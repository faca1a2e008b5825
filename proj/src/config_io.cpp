#include "uavqoe/config_io.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace uavqoe
{

namespace
{

using json = nlohmann::json;

struct Field
{
    std::function<void(WorldConfig &, const json &)> read;
    std::function<json(const WorldConfig &)> write;
};

double as_number(const std::string &key, const json &v)
{
    if (!v.is_number())
        throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

template <class Int> Int as_integer(const std::string &key, const json &v)
{
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError("config key '" + key + "' must be an integer");
    if constexpr (std::is_unsigned_v<Int>)
        if (v.is_number_integer() && v.get<long long>() < 0)
            throw ConfigError("config key '" + key + "' must be nonnegative");
    return v.get<Int>();
}

template <class T> Field number(T WorldConfig::*m, const std::string &key)
{
    return Field{[m, key](WorldConfig &c, const json &v) {
                     if constexpr (std::is_floating_point_v<T>)
                         c.*m = as_number(key, v);
                     else
                         c.*m = as_integer<T>(key, v);
                 },
                 [m](const WorldConfig &c) { return json(c.*m); }};
}

const std::map<std::string, Field> &fields()
{
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        const auto add = [&t](const std::string &k, Field f) { t.emplace(k, std::move(f)); };
        add("area_width_m", number(&WorldConfig::area_width_m, "area_width_m"));
        add("area_height_m", number(&WorldConfig::area_height_m, "area_height_m"));
        add("n_uavs", number(&WorldConfig::n_uavs, "n_uavs"));
        add("n_subscribers", number(&WorldConfig::n_subscribers, "n_subscribers"));
        add("altitude_H", number(&WorldConfig::altitude_H, "altitude_H"));
        add("carrier_freq_fc", number(&WorldConfig::carrier_freq_fc, "carrier_freq_fc"));
        add("light_speed_c", number(&WorldConfig::light_speed_c, "light_speed_c"));
        add("ref_dist_D0", number(&WorldConfig::ref_dist_D0, "ref_dist_D0"));
        add("tx_gain", number(&WorldConfig::tx_gain, "tx_gain"));
        add("rx_gain", number(&WorldConfig::rx_gain, "rx_gain"));
        add("noise_power_sigma2", number(&WorldConfig::noise_power_sigma2, "noise_power_sigma2"));
        add("bandwidth_B", number(&WorldConfig::bandwidth_B, "bandwidth_B"));
        add("slot_duration_dt", number(&WorldConfig::slot_duration_dt, "slot_duration_dt"));
        add("video_chunk_L", number(&WorldConfig::video_chunk_L, "video_chunk_L"));
        add("elevation_threshold_theta", number(&WorldConfig::elevation_threshold_theta, "elevation_threshold_theta"));
        add("d_min", number(&WorldConfig::d_min, "d_min"));
        add("s_max", number(&WorldConfig::s_max, "s_max"));
        add("p_hat", number(&WorldConfig::p_hat, "p_hat"));
        add("p_tilde", number(&WorldConfig::p_tilde, "p_tilde"));
        add("p_circuit", number(&WorldConfig::p_circuit, "p_circuit"));
        add("p_min", number(&WorldConfig::p_min, "p_min"));
        add("alpha", number(&WorldConfig::alpha, "alpha"));
        add("beta", number(&WorldConfig::beta, "beta"));
        add("V", number(&WorldConfig::V, "V"));
        add("rho1", number(&WorldConfig::rho1, "rho1"));
        add("rho2", number(&WorldConfig::rho2, "rho2"));
        add("horizon_T", number(&WorldConfig::horizon_T, "horizon_T"));
        add("sca_max_iter_rmax", number(&WorldConfig::sca_max_iter_rmax, "sca_max_iter_rmax"));
        add("sca_tolerance", number(&WorldConfig::sca_tolerance, "sca_tolerance"));
        add("rng_seed", number(&WorldConfig::rng_seed, "rng_seed"));
        add("subscriber_step_m", number(&WorldConfig::subscriber_step_m, "subscriber_step_m"));
        add("initial_queue", number(&WorldConfig::initial_queue, "initial_queue"));
        add("circle_speed_mps", number(&WorldConfig::circle_speed_mps, "circle_speed_mps"));
        add("circle_spacing_m", number(&WorldConfig::circle_spacing_m, "circle_spacing_m"));
        add("bitrate_unit_mode",
            Field{[](WorldConfig &c, const json &v) {
                      const std::string s = v.is_string() ? v.get<std::string>() : "";
                      if (s == to_string(BitrateUnitMode::Literal))
                          c.bitrate_unit_mode = BitrateUnitMode::Literal;
                      else if (s == to_string(BitrateUnitMode::SpectralNormalized))
                          c.bitrate_unit_mode = BitrateUnitMode::SpectralNormalized;
                      else
                          throw ConfigError("config key 'bitrate_unit_mode' must be \"literal\" or "
                                            "\"spectral-normalized\"");
                  },
                  [](const WorldConfig &c) { return json(to_string(c.bitrate_unit_mode)); }});
        add("noise_reference",
            Field{[](WorldConfig &c, const json &v) {
                      const std::string s = v.is_string() ? v.get<std::string>() : "";
                      if (s == to_string(NoiseReference::Total))
                          c.noise_reference = NoiseReference::Total;
                      else if (s == to_string(NoiseReference::Density))
                          c.noise_reference = NoiseReference::Density;
                      else
                          throw ConfigError("config key 'noise_reference' must be \"total\" or \"density\"");
                  },
                  [](const WorldConfig &c) { return json(to_string(c.noise_reference)); }});
        add("required_bitrates",
            Field{[](WorldConfig &c, const json &v) {
                      if (!v.is_array() || v.empty())
                          throw ConfigError("config key 'required_bitrates' must be a nonempty array of numbers");
                      c.required_bitrates.clear();
                      for (const auto &x : v)
                          c.required_bitrates.push_back(as_number("required_bitrates", x));
                  },
                  [](const WorldConfig &c) { return json(c.required_bitrates); }});
        return t;
    }();
    return table;
}

} // namespace

const char *to_string(BitrateUnitMode mode)
{
    return mode == BitrateUnitMode::Literal ? "literal" : "spectral-normalized";
}

const char *to_string(NoiseReference ref)
{
    return ref == NoiseReference::Total ? "total" : "density";
}

WorldConfig config_from_json(const json &j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    if (j.contains("noise_power_dbm") && j.contains("noise_power_sigma2"))
        throw ConfigError("config sets both 'noise_power_dbm' and 'noise_power_sigma2'");
    WorldConfig cfg;
    for (const auto &[key, value] : j.items())
    {
        if (key == "noise_power_dbm")
        {
            cfg.noise_power_sigma2 = dbm_to_mw(as_number(key, value));
            continue;
        }
        const auto it = fields().find(key);
        if (it == fields().end())
            throw ConfigError("unknown config key '" + key + "'");
        it->second.read(cfg, value);
    }
    validate(cfg);
    return cfg;
}

WorldConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    try
    {
        return config_from_json(j);
    }
    catch (const ConfigError &e)
    {
        throw ConfigError(path + ": " + e.what());
    }
}

json config_to_json(const WorldConfig &cfg)
{
    json j = json::object();
    for (const auto &[key, f] : fields())
        j[key] = f.write(cfg);
    return j;
}

} // namespace uavqoe
