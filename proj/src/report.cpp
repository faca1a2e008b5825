#include "uavqoe/report.hpp"

#include "uavqoe/config_io.hpp"

namespace uavqoe
{

using json = nlohmann::json;

json means_to_json(const MetricMeans &m)
{
    return json{{"NP", m.NP}, {"TL", m.TL}, {"QoE", m.QoE}, {"TP", m.TP}, {"EE", m.EE}, {"RF", m.RF}};
}

json run_to_json(const RunResult &run)
{
    const RunSummary &s = run.summary;
    json stab = {{"S_X", json::array()}, {"S_Z", json::array()}, {"S_Y", json::array()}};
    for (const auto &st : s.stability)
    {
        stab["S_X"].push_back(st.S_X);
        stab["S_Z"].push_back(st.S_Z);
        stab["S_Y"].push_back(st.S_Y);
    }
    int iterations = 0, newton = 0, rejected = 0, failures = 0, fallbacks = 0, unconverged = 0;
    double rate_viol = 0.0, kin_viol = 0.0;
    for (const auto &r : run.records)
    {
        iterations += r.sca.iterations;
        newton += r.sca.newton_steps;
        rejected += r.sca.rejected_steps;
        failures += r.sca.solver_failures;
        fallbacks += r.sca.fallback ? 1 : 0;
        unconverged += r.sca.converged ? 0 : 1;
        rate_viol = std::max(rate_viol, r.sca.max_rate_violation);
        kin_viol = std::max(kin_viol, r.sca.max_kinematic_violation);
    }
    return json{{"seed", run.seed},
                {"slots", run.records.size()},
                {"NP", s.NP},
                {"TL", s.TL},
                {"QoE", s.QoE},
                {"TP", s.TP},
                {"EE", s.EE},
                {"RF", s.RF},
                {"mean_rates", s.mean_rates},
                {"mean_p_tot", s.mean_p_tot},
                {"stability", stab},
                {"mean_aux_utility", s.mean_aux_utility},
                {"utility_of_mean_lambda", s.utility_of_mean_lambda},
                {"sca",
                 {{"iterations", iterations},
                  {"newton_steps", newton},
                  {"rejected_steps", rejected},
                  {"solver_failures", failures},
                  {"fallback_slots", fallbacks},
                  {"unconverged_slots", unconverged},
                  {"max_rate_violation", rate_viol},
                  {"max_kinematic_violation", kin_viol}}}};
}

json experiment_to_json(const ExperimentResult &res, const WorldConfig &cfg)
{
    json out = {{"config", config_to_json(cfg)}, {"policies", json::array()}};
    for (const auto &p : res.policies)
    {
        json block = {{"algorithm", to_string(p.kind)}, {"mean", means_to_json(p.mean)}, {"runs", json::array()}};
        for (const auto &r : p.runs)
            block["runs"].push_back(run_to_json(r));
        out["policies"].push_back(std::move(block));
    }
    if (res.find(PolicyKind::EMUO))
    {
        json gain = json::object();
        for (const auto &p : res.policies)
            if (p.kind != PolicyKind::EMUO)
                gain[to_string(p.kind)] = ee_improvement_percent(res, p.kind);
        out["ee_improvement_percent"] = gain;
    }
    return out;
}

json pareto_to_json(const std::vector<ParetoPoint> &points)
{
    json arr = json::array();
    for (const auto &p : points)
        arr.push_back({{"rho1", p.rho1}, {"rho2", p.rho2}, {"NP", p.NP}, {"TL", p.TL}, {"TP", p.TP}});
    return arr;
}

} // namespace uavqoe
