#include "uavqoe/runner.hpp"

#include "uavqoe/lyapunov.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavqoe
{

namespace
{

constexpr std::uint64_t kScenarioStream = 1;
constexpr std::uint64_t kMobilityStream = 2;

// Moves each UAV that served a subscriber last slot radially toward it until the pair sits inside the
// tracking radius, provided d_min still holds. The move is at most one subscriber step.
void pull_into_tracking(std::vector<UavState> &uavs, const Association &assoc,
                        const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    const double r = tracking_radius(cfg);
    for (std::size_t k = 0; k < uavs.size(); ++k)
    {
        const int i = assoc.subscriber_of(static_cast<int>(k));
        if (i < 0)
            continue;
        const Vec2 &s = subs[static_cast<std::size_t>(i)].s;
        const Vec2 d = uavs[k].q - s;
        const double dist = d.norm();
        if (dist <= r)
            continue;
        const Vec2 cand = s + d * (r / dist);
        bool clear = true;
        for (std::size_t j = 0; j < uavs.size() && clear; ++j)
            clear = j == k || (cand - uavs[j].q).norm() >= cfg.d_min;
        if (clear)
            uavs[k].q = cand;
    }
}

} // namespace

const char *to_string(PolicyKind kind)
{
    switch (kind)
    {
    case PolicyKind::EMUO:
        return "EMUO";
    case PolicyKind::NNAS:
        return "NNAS";
    case PolicyKind::SUDE:
        return "SUDE";
    case PolicyKind::SUMTP:
        return "SUMTP";
    case PolicyKind::CUTR:
        return "CUTR";
    case PolicyKind::CUMTP:
        return "CUMTP";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy(const std::string &name)
{
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (PolicyKind k : all_policies())
        if (up == to_string(k))
            return k;
    return std::nullopt;
}

const std::vector<PolicyKind> &all_policies()
{
    static const std::vector<PolicyKind> kinds = {PolicyKind::EMUO, PolicyKind::NNAS, PolicyKind::SUDE,
                                                  PolicyKind::SUMTP, PolicyKind::CUTR, PolicyKind::CUMTP};
    return kinds;
}

bool PolicySpec::selects() const
{
    return kind != PolicyKind::NNAS;
}

bool PolicySpec::optimizes_power() const
{
    return kind == PolicyKind::EMUO || kind == PolicyKind::NNAS || kind == PolicyKind::SUDE ||
           kind == PolicyKind::CUTR;
}

bool PolicySpec::optimizes_trajectory() const
{
    return kind == PolicyKind::EMUO || kind == PolicyKind::NNAS;
}

bool PolicySpec::max_power() const
{
    return kind == PolicyKind::SUMTP || kind == PolicyKind::CUMTP;
}

bool PolicySpec::circular() const
{
    return kind == PolicyKind::CUTR || kind == PolicyKind::CUMTP;
}

bool PolicySpec::fixed_positions() const
{
    return kind == PolicyKind::SUDE || kind == PolicyKind::SUMTP;
}

CircleLayout circle_layout(const WorldConfig &cfg)
{
    CircleLayout c;
    const int n = cfg.n_uavs;
    c.center = Vec2(cfg.area_width_m / 2.0, cfg.area_height_m / 2.0);
    double chord = cfg.circle_spacing_m > 0.0 ? cfg.circle_spacing_m : 250.0 / n;
    chord = std::max(chord, cfg.d_min);
    c.radius = n == 1 ? chord : chord / (2.0 * std::sin(std::numbers::pi / n));
    for (int k = 0; k < n; ++k)
        c.start_angles.push_back(2.0 * std::numbers::pi * k / n);
    c.arc_per_slot = cfg.circle_speed_mps * cfg.slot_duration_dt;
    return c;
}

Vec2 circular_step(const Vec2 &pos, const Vec2 &center, double radius, double arc)
{
    if (radius <= 0.0)
        throw std::invalid_argument("circular_step: radius must be positive");
    const Vec2 d = pos - center;
    const double angle = std::atan2(d.y(), d.x()) + arc / radius;
    return center + radius * Vec2(std::cos(angle), std::sin(angle));
}

Association nearest_association(const std::vector<UavState> &uavs, const std::vector<SubscriberState> &subs,
                                const WorldConfig &cfg)
{
    Association a(static_cast<int>(subs.size()));
    for (std::size_t k = 0; k < uavs.size(); ++k)
    {
        int best = -1;
        double best_d = 0.0;
        for (std::size_t i = 0; i < subs.size(); ++i)
        {
            if (a.uav_of[i] >= 0 || !los_feasible(uavs[k].q, subs[i].s, cfg))
                continue;
            const double d = (uavs[k].q - subs[i].s).norm();
            if (best < 0 || d < best_d)
            {
                best = static_cast<int>(i);
                best_d = d;
            }
        }
        if (best >= 0)
            a.uav_of[static_cast<std::size_t>(best)] = static_cast<int>(k);
    }
    return a;
}

RunResult run_policy(const PolicySpec &spec, const WorldConfig &cfg, std::uint64_t seed, const RunHooks &hooks)
{
    validate(cfg);
    RunResult out;
    out.kind = spec.kind;
    out.seed = seed;

    Rng scen = make_stream(seed, kScenarioStream);
    Rng mob = make_stream(seed, kMobilityStream);
    std::vector<SubscriberState> subs = random_subscribers(cfg, scen);
    std::vector<UavState> uavs = random_uavs(cfg, scen);
    out.subscribers = subs;

    const double p_hi = cfg.p_hat - cfg.p_circuit;
    const CircleLayout circle = circle_layout(cfg);
    if (spec.circular())
        for (std::size_t k = 0; k < uavs.size(); ++k)
            uavs[k].q = circle.center + circle.radius * Vec2(std::cos(circle.start_angles[k]),
                                                             std::sin(circle.start_angles[k]));
    if (spec.max_power())
        for (auto &u : uavs)
            u.p = p_hi;

    const int M = cfg.n_subscribers;
    const int N = cfg.n_uavs;
    VirtualQueues queues = VirtualQueues::filled(M, N, cfg.initial_queue);
    Association assoc(M);
    out.records.reserve(static_cast<std::size_t>(cfg.horizon_T));

    for (int t = 1; t <= cfg.horizon_T; ++t)
    {
        const std::vector<double> lambda = solve_auxiliary(queues, subs, cfg);
        std::vector<Vec2> prev_positions(uavs.size());
        for (std::size_t k = 0; k < uavs.size(); ++k)
            prev_positions[k] = uavs[k].q;
        const std::vector<UavState> prev_uavs = uavs;

        std::vector<UavState> start = uavs;
        if (spec.optimizes_trajectory())
            pull_into_tracking(start, assoc, subs, cfg);
        if (spec.circular())
            for (auto &u : start)
                u.q = circular_step(u.q, circle.center, circle.radius, circle.arc_per_slot);
        // A UAV left idle at the power floor would never be selected again, so its expansion point is
        // lifted to the strongest serving power (SINR depends only on power ratios).
        if (spec.optimizes_power() && t > 1)
        {
            double ref = -1.0;
            for (int k = 0; k < N; ++k)
                if (assoc.subscriber_of(k) >= 0)
                    ref = std::max(ref, start[static_cast<std::size_t>(k)].p);
            if (ref <= cfg.p_min)
                ref = 0.5 * (cfg.p_min + p_hi);
            for (int k = 0; k < N; ++k)
                if (assoc.subscriber_of(k) < 0)
                    start[static_cast<std::size_t>(k)].p = ref;
        }

        Algorithm1Options opts;
        opts.optimize_selection = spec.selects();
        opts.optimize_power = spec.optimizes_power();
        opts.optimize_trajectory = spec.optimizes_trajectory();
        opts.solver = hooks.solver;
        if (hooks.on_program)
            opts.on_program = [&hooks, &spec, seed, t](const std::string &tag, const conic::ConicProgram &p) {
                hooks.on_program(spec.kind, seed, t, tag, p);
            };
        const Association seed_assoc =
            spec.kind == PolicyKind::NNAS ? nearest_association(start, subs, cfg) : assoc;
        Algorithm1Result res = algorithm1(queues, seed_assoc, start, prev_positions, subs, cfg, opts);

        if (res.stats.fallback)
        {
            for (std::size_t k = 0; k < res.uavs.size(); ++k)
                res.uavs[k].p = prev_uavs[k].p;
            res.assoc = filter_association(res.assoc, res.uavs, subs, cfg);
            spdlog::warn("{} seed {} slot {}: solver failure, previous decision reused", to_string(spec.kind), seed,
                         t);
        }
        if (!is_valid(res.assoc, res.uavs, subs, cfg))
            throw SolverFailure(std::string(to_string(spec.kind)) + ": invalid decision at slot " +
                                std::to_string(t));

        uavs = std::move(res.uavs);
        assoc = std::move(res.assoc);

        SlotRecord rec;
        rec.t = t;
        rec.rates = achievable_rates(assoc, uavs, subs, cfg);
        rec.latencies.resize(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i)
            rec.latencies[static_cast<std::size_t>(i)] = latency_d_i(i, assoc, uavs, subs, cfg);
        for (const auto &u : uavs)
        {
            rec.powers.push_back(u.p);
            rec.p_tot.push_back(u.p + cfg.p_circuit);
            rec.positions.push_back(u.q);
        }
        for (const auto &s : subs)
            rec.sub_positions.push_back(s.s);
        rec.assoc = assoc;
        rec.queues = queues;
        rec.lambda = lambda;
        rec.phi_obj = resource_objective(queues, assoc, uavs, subs, cfg);
        rec.sca = std::move(res.stats);
        rec.queues_next = update_queues(queues, rec.rates, lambda, rec.p_tot, subs, cfg);
        queues = rec.queues_next;
        spdlog::debug("{} seed {} slot {}: served {} phi {:.6g} iters {} newton {}", to_string(spec.kind), seed, t,
                      assoc.served_count(), rec.phi_obj, rec.sca.iterations, rec.sca.newton_steps);
        out.records.push_back(std::move(rec));

        step_subscriber_mobility(subs, cfg, mob);
    }
    out.summary = run_metrics(out.records, out.subscribers, cfg);
    spdlog::info("{} seed {}: QoE {:.6g} EE {:.6g} TP {:.6g}", to_string(spec.kind), seed, out.summary.QoE,
                 out.summary.EE, out.summary.TP);
    return out;
}

MetricMeans mean_metrics(const std::vector<RunResult> &runs)
{
    MetricMeans m;
    if (runs.empty())
        return m;
    for (const auto &r : runs)
    {
        m.NP += r.summary.NP;
        m.TL += r.summary.TL;
        m.QoE += r.summary.QoE;
        m.TP += r.summary.TP;
        m.EE += r.summary.EE;
        m.RF += r.summary.RF;
    }
    const double n = static_cast<double>(runs.size());
    m.NP /= n;
    m.TL /= n;
    m.QoE /= n;
    m.TP /= n;
    m.EE /= n;
    m.RF /= n;
    return m;
}

const PolicyRuns *ExperimentResult::find(PolicyKind kind) const
{
    for (const auto &p : policies)
        if (p.kind == kind)
            return &p;
    return nullptr;
}

namespace
{

ExperimentResult experiment_shell(const std::vector<PolicySpec> &specs, int n_runs)
{
    if (n_runs < 1)
        throw std::invalid_argument("run_experiment: n_runs must be at least 1");
    ExperimentResult res;
    for (const auto &s : specs)
    {
        PolicyRuns pr;
        pr.kind = s.kind;
        pr.runs.resize(static_cast<std::size_t>(n_runs));
        res.policies.push_back(std::move(pr));
    }
    return res;
}

void finish_means(ExperimentResult &res)
{
    for (auto &p : res.policies)
        p.mean = mean_metrics(p.runs);
}

} // namespace

ExperimentResult run_experiment(const std::vector<PolicySpec> &specs, const WorldConfig &cfg, int n_runs,
                                std::uint64_t base_seed, const RunHooks &hooks)
{
    validate(cfg);
    ExperimentResult res = experiment_shell(specs, n_runs);
    const int n_specs = static_cast<int>(specs.size());
    const int jobs = n_specs * n_runs;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic, 1)
    for (int job = 0; job < jobs; ++job)
    {
        const int s = job / n_runs;
        const int r = job % n_runs;
        try
        {
            res.policies[static_cast<std::size_t>(s)].runs[static_cast<std::size_t>(r)] =
                run_policy(specs[static_cast<std::size_t>(s)], cfg, base_seed + static_cast<std::uint64_t>(r), hooks);
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(job)] = std::current_exception();
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    finish_means(res);
    return res;
}

ExperimentResult run_experiment_serial(const std::vector<PolicySpec> &specs, const WorldConfig &cfg, int n_runs,
                                       std::uint64_t base_seed, const RunHooks &hooks)
{
    validate(cfg);
    ExperimentResult res = experiment_shell(specs, n_runs);
    for (std::size_t s = 0; s < specs.size(); ++s)
        for (int r = 0; r < n_runs; ++r)
            res.policies[s].runs[static_cast<std::size_t>(r)] =
                run_policy(specs[s], cfg, base_seed + static_cast<std::uint64_t>(r), hooks);
    finish_means(res);
    return res;
}

double ee_improvement_percent(const ExperimentResult &res, PolicyKind other)
{
    const PolicyRuns *e = res.find(PolicyKind::EMUO);
    const PolicyRuns *o = res.find(other);
    if (!e || !o)
        throw std::invalid_argument("ee_improvement_percent: policy missing from the experiment");
    return 100.0 * (e->mean.EE - o->mean.EE) / std::abs(o->mean.EE);
}

std::vector<ParetoPoint> pareto_sweep(const WorldConfig &cfg, const std::vector<double> &rho1_values,
                                      const std::vector<double> &rho2_values, std::uint64_t seed)
{
    if (rho1_values.empty() || rho2_values.empty())
        throw std::invalid_argument("pareto_sweep: value lists must be nonempty");
    const int n1 = static_cast<int>(rho1_values.size());
    const int n2 = static_cast<int>(rho2_values.size());
    std::vector<ParetoPoint> pts(static_cast<std::size_t>(n1 * n2));
    std::vector<std::exception_ptr> errors(pts.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int job = 0; job < n1 * n2; ++job)
    {
        try
        {
            WorldConfig c = cfg;
            c.rho1 = rho1_values[static_cast<std::size_t>(job / n2)];
            c.rho2 = rho2_values[static_cast<std::size_t>(job % n2)];
            const RunResult r = run_policy(PolicySpec::of(PolicyKind::EMUO), c, seed);
            pts[static_cast<std::size_t>(job)] = ParetoPoint{c.rho1, c.rho2, r.summary.NP, r.summary.TL, r.summary.TP};
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(job)] = std::current_exception();
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return pts;
}

} // namespace uavqoe
