#include "uavqoe/log.hpp"
#include "uavqoe/lyapunov.hpp"
#include "uavqoe/qoe_metrics.hpp"
#include "uavqoe/resource_opt.hpp"
#include "uavqoe/runner.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

using namespace uavqoe;

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSeeds = 10;

int failures = 0;

void report(int n, bool ok, const std::string &name, const std::string &detail)
{
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

UavState make_uav(int id, Vec2 q, double p)
{
    UavState u;
    u.id = id;
    u.q = q;
    u.p = p;
    return u;
}

SubscriberState make_sub(int id, Vec2 s, double R)
{
    SubscriberState x;
    x.id = id;
    x.s = s;
    x.R = R;
    x.r_th = R;
    return x;
}

std::vector<UavState> uavs_at(const SlotRecord &r)
{
    std::vector<UavState> u;
    for (std::size_t k = 0; k < r.positions.size(); ++k)
        u.push_back(make_uav(static_cast<int>(k), r.positions[k], r.powers[k]));
    return u;
}

std::vector<SubscriberState> subs_at(const RunResult &run, const SlotRecord &r)
{
    auto s = run.subscribers;
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i].s = r.sub_positions[i];
    return s;
}

// Criterion 1: virtual queues shrink over the horizon in every EMUO run.
void queue_stability(const PolicyRuns &emuo, const WorldConfig &cfg)
{
    bool ok = true;
    double worst = 0.0, worst_sy = 0.0;
    for (const auto &run : emuo.runs)
    {
        const auto &st = run.summary.stability;
        const Stability &end = st.back();
        const Stability &early = st[static_cast<std::size_t>(std::max(1, cfg.horizon_T / 10) - 1)];
        const auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? kInf : 0.0); };
        for (double r : {ratio(end.S_X, early.S_X), ratio(end.S_Z, early.S_Z), ratio(end.S_Y, early.S_Y)})
        {
            worst = std::max(worst, r);
            ok = ok && r <= 0.5;
        }
        worst_sy = std::max(worst_sy, end.S_Y);
        ok = ok && end.S_Y <= 0.05 * cfg.p_hat;
    }
    report(1, ok, "queue stability",
           fmt("worst S(T)/S(T/10) = %.4f, worst S_Y(T) = %.4f <= %.1f", worst, worst_sy, 0.05 * cfg.p_hat));
}

// Criterion 2: the slot objective never increases across SCA iterations.
void sca_convergence(const PolicyRuns &emuo, const WorldConfig &cfg)
{
    long slots = 0, bad = 0;
    int max_iter = 0;
    for (const auto &run : emuo.runs)
        for (const auto &r : run.records)
        {
            ++slots;
            bool mono = r.sca.iterations <= cfg.sca_max_iter_rmax;
            for (std::size_t j = 1; j < r.sca.trace.size(); ++j)
                mono = mono && r.sca.trace[j] <= r.sca.trace[j - 1] + 1e-9;
            bad += !mono;
            max_iter = std::max(max_iter, r.sca.iterations);
        }
    report(2, bad == 0, "SCA objective trace non-increasing",
           fmt("%.0f of %.0f slots violate, max iterations %.0f", static_cast<double>(bad),
               static_cast<double>(slots), max_iter));
}

// Criterion 3: accepted decisions satisfy the exact rate, LoS and kinematic constraints.
void restriction_soundness(const ExperimentResult &res, const WorldConfig &cfg)
{
    double rate_v = 0.0, kin_v = 0.0;
    long invalid = 0, kin_bad = 0;
    for (PolicyKind k : {PolicyKind::EMUO, PolicyKind::NNAS, PolicyKind::SUDE, PolicyKind::CUTR})
        for (const auto &run : res.find(k)->runs)
            for (std::size_t t = 0; t < run.records.size(); ++t)
            {
                const auto &r = run.records[t];
                rate_v = std::max(rate_v, r.sca.max_rate_violation);
                kin_v = std::max(kin_v, r.sca.max_kinematic_violation);
                invalid += !is_valid(r.assoc, uavs_at(r), subs_at(run, r), cfg);
                if (t > 0 && PolicySpec::of(k).optimizes_trajectory())
                    kin_bad += !validate_kinematics(uavs_at(run.records[t - 1]), uavs_at(r), cfg).empty();
            }
    const bool ok = rate_v <= 1e-6 && kin_v <= 1e-6 && invalid == 0 && kin_bad == 0;
    report(3, ok, "restriction soundness",
           fmt("max rate violation %.3g, max kinematic violation %.3g, invalid slots %.0f", rate_v, kin_v,
               static_cast<double>(invalid + kin_bad)));
}

// Criterion 4: closed-form auxiliary decision against a 1e-4 grid.
void auxiliary_closed_form()
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> Z(0.0, 20.0);
    std::bernoulli_distribution rsel(0.5);
    WorldConfig cfg;
    const double step = 1e-4, r_max = rate_max(cfg);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n)
    {
        const double z = Z(rng), R = rsel(rng) ? 0.0316 : 0.0154;
        double best_x = 0.0, best_f = auxiliary_objective(0.0, z, R, cfg);
        for (double x = step; x <= r_max; x += step)
        {
            const double f = auxiliary_objective(x, z, R, cfg);
            if (f < best_f)
            {
                best_f = f;
                best_x = x;
            }
        }
        worst = std::max(worst, std::abs(solve_auxiliary(z, R, cfg) - best_x));
    }
    report(4, worst <= step, "auxiliary closed form vs grid", fmt("max |lambda - grid argmin| = %.3g", worst));
}

double brute_force_selection(const SelectionWeights &w)
{
    const int M = static_cast<int>(w.weight.rows()), N = static_cast<int>(w.weight.cols());
    std::vector<char> used(static_cast<std::size_t>(N), 0);
    double best = -kInf;
    std::function<void(int, double)> rec = [&](int i, double acc) {
        if (i == M)
        {
            best = std::max(best, acc);
            return;
        }
        rec(i + 1, acc + w.unassigned[i]);
        for (int k = 0; k < N; ++k)
            if (!used[static_cast<std::size_t>(k)] && std::isfinite(w.weight(i, k)))
            {
                used[static_cast<std::size_t>(k)] = 1;
                rec(i + 1, acc + w.weight(i, k));
                used[static_cast<std::size_t>(k)] = 0;
            }
    };
    rec(0, 0.0);
    return best;
}

// Criterion 5: selection against enumeration on instances built from the channel model.
void selection_exactness()
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> D(1, 5);
    std::uniform_real_distribution<double> U(0.0, 1.0), Q(-5.0, 20.0);
    int mismatches = 0;
    for (int n = 0; n < 200; ++n)
    {
        WorldConfig cfg;
        cfg.n_uavs = D(rng);
        cfg.n_subscribers = D(rng);
        Rng r(rng());
        const auto uavs = random_uavs(cfg, r);
        std::vector<SubscriberState> subs;
        for (int i = 0; i < cfg.n_subscribers; ++i)
        {
            // Half the subscribers sit inside some UAV's coverage disc.
            Vec2 s(U(rng) * 500.0, U(rng) * 500.0);
            if (U(rng) < 0.5)
            {
                const Vec2 c = uavs[static_cast<std::size_t>(i % cfg.n_uavs)].q;
                s = c + 100.0 * U(rng) * Vec2(std::cos(6.3 * U(rng)), std::sin(6.3 * U(rng)));
                s = s.cwiseMax(0.0).cwiseMin(500.0);
            }
            subs.push_back(make_sub(i, s, U(rng) < 0.5 ? 0.0316 : 0.0154));
        }
        VirtualQueues q = VirtualQueues::filled(cfg.n_subscribers, cfg.n_uavs, 0.0);
        for (auto &x : q.X)
            x = Q(rng);
        for (auto &z : q.Z)
            z = Q(rng);
        const auto w = selection_weights(q, uavs, subs, cfg);
        mismatches += selection_value(w, solve_selection(w)) != brute_force_selection(w);
    }
    report(5, mismatches == 0, "selection vs brute force", fmt("%.0f of 200 instances differ", mismatches));
}

// Criterion 6: the drift-plus-penalty bound holds.
void dpp_bound()
{
    std::mt19937_64 rng(6);
    WorldConfig cfg;
    const double r_max = rate_max(cfg);
    std::uniform_real_distribution<double> Q(-50.0, 200.0), U(0.0, 1.0);
    double min_slack = kInf;
    for (int n = 0; n < 1000; ++n)
    {
        const int M = 1 + static_cast<int>(U(rng) * 10), N = 1 + static_cast<int>(U(rng) * 4);
        std::vector<SubscriberState> s;
        VirtualQueues q = VirtualQueues::filled(M, N, 0.0);
        std::vector<double> rates, lam, d, p;
        for (int i = 0; i < M; ++i)
        {
            s.push_back(make_sub(i, Vec2::Zero(), U(rng) < 0.5 ? 0.0316 : 0.0154));
            q.X[static_cast<std::size_t>(i)] = Q(rng);
            q.Z[static_cast<std::size_t>(i)] = Q(rng);
            rates.push_back(U(rng) * r_max);
            lam.push_back(U(rng) * r_max);
            d.push_back(0.001 + U(rng) * (cfg.slot_duration_dt - 0.001));
        }
        for (int k = 0; k < N; ++k)
        {
            q.Y[static_cast<std::size_t>(k)] = Q(rng) * 10;
            p.push_back(cfg.p_min + U(rng) * (cfg.p_hat - cfg.p_circuit - cfg.p_min));
        }
        min_slack = std::min(min_slack, dpp_bound_rhs(q, rates, lam, p, d, s, cfg) - dpp_value(q, rates, lam, p, d, s, cfg));
    }
    report(6, min_slack >= 0.0, "drift-plus-penalty bound", fmt("min slack %.6g over 1000 states", min_slack));
}

// Criterion 7: time-averaged auxiliary utility stays below the utility of the averaged lambda.
void jensen(const ExperimentResult &res)
{
    double worst = -kInf;
    for (const auto &p : res.policies)
        for (const auto &run : p.runs)
            worst = std::max(worst, run.summary.mean_aux_utility - run.summary.utility_of_mean_lambda);
    report(7, worst <= 1e-9, "Jensen property", fmt("max a_bar - phi(lambda_bar) = %.3g", worst));
}

// Criterion 8: both Taylor families are tangent and lower bounds.
void taylor_families()
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> P(0.0, 480.0), D(-250.0, 250.0), U(0.0, 1.0);
    double tangency = 0.0;
    long power_bad = 0, traj_bad = 0, power_n = 0, traj_n = 0;
    while (power_n < 1000 || traj_n < 1000)
    {
        WorldConfig cfg;
        cfg.n_uavs = 3;
        Rng r(rng());
        const auto uavs = random_uavs(cfg, r);
        std::vector<SubscriberState> subs;
        Association a(3);
        for (int i = 0; i < 3; ++i)
        {
            const Vec2 c = uavs[static_cast<std::size_t>(i)].q;
            const double ang = 6.3 * U(rng);
            subs.push_back(make_sub(i, (c + 100.0 * U(rng) * Vec2(std::cos(ang), std::sin(ang))).cwiseMax(0.0).cwiseMin(500.0), 0.0316));
            if (los_feasible(c, subs.back().s, cfg))
                a.uav_of[static_cast<std::size_t>(i)] = i;
        }
        std::vector<double> pr;
        std::vector<Vec2> qr;
        for (const auto &u : uavs)
        {
            pr.push_back(u.p);
            qr.push_back(u.q);
        }
        for (const auto &t : taylor_power_coeffs(pr, a, uavs, subs, cfg))
        {
            const double exact = power_rate_exact(t, pr, cfg);
            tangency = std::max(tangency, std::abs(power_rate_surrogate(t, pr, cfg) - exact) / std::max(1.0, std::abs(exact)));
            for (int m = 0; m < 20; ++m, ++power_n)
            {
                std::vector<double> p(pr.size());
                for (auto &x : p)
                    x = P(rng);
                power_bad += power_rate_surrogate(t, p, cfg) > power_rate_exact(t, p, cfg) + 1e-12;
            }
        }
        for (const auto &t : taylor_trajectory_coeffs(qr, pr, a, subs, cfg))
        {
            const double exact = received_log(t.i, qr, pr, subs, cfg);
            tangency = std::max(tangency, std::abs(received_log_linearized(t, qr, subs) - exact) / std::max(1.0, std::abs(exact)));
            for (int m = 0; m < 20; ++m, ++traj_n)
            {
                auto q = qr;
                for (auto &v : q)
                    v += Vec2(D(rng), D(rng));
                traj_bad += received_log_linearized(t, q, subs) > received_log(t.i, q, pr, subs, cfg) + 1e-12;
            }
        }
    }
    report(8, tangency <= 1e-9 && power_bad == 0 && traj_bad == 0, "Taylor tangency and lower bounds",
           fmt("max relative tangency gap %.3g, dominance failures %.0f power / %.0f trajectory", tangency,
               static_cast<double>(power_bad), static_cast<double>(traj_bad)));
}

// Criterion 9: EMUO against the five benchmarks.
void ordering(const ExperimentResult &res)
{
    const MetricMeans &e = res.find(PolicyKind::EMUO)->mean;
    bool ok = true;
    std::string detail = fmt("EMUO QoE %.3f EE %.3f;", e.QoE, e.EE);
    for (PolicyKind k : all_policies())
    {
        if (k == PolicyKind::EMUO)
            continue;
        const MetricMeans &o = res.find(k)->mean;
        const bool qoe_ok = e.QoE >= o.QoE;
        ok = ok && qoe_ok;
        detail += std::string(" ") + to_string(k) + fmt(" QoE %.3f", o.QoE) + (qoe_ok ? "" : " (above EMUO)");
        if (k == PolicyKind::SUMTP || k == PolicyKind::CUMTP)
        {
            ok = ok && e.EE >= o.EE;
            detail += fmt(" EE %.3f, EE gain %.2f%%", o.EE, ee_improvement_percent(res, k));
        }
        detail += ";";
    }
    detail.pop_back();
    report(9, ok, "ordering against benchmarks", detail);
}

// Criterion 10: single-link power and trajectory steps against grid searches.
void subsolver_oracles()
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double power_gap = 0.0, traj_gap = -kInf, phi_excess = -kInf;
    for (int n = 0; n < 5; ++n)
    {
        WorldConfig cfg;
        const Vec2 c(150.0 + 200.0 * U(rng), 150.0 + 200.0 * U(rng));
        const double ang = 6.3 * U(rng);
        const Vec2 s = c + (20.0 + 80.0 * U(rng)) * Vec2(std::cos(ang), std::sin(ang));
        std::vector<UavState> u = {make_uav(0, c, 10.0 + 400.0 * U(rng))};
        std::vector<SubscriberState> subs = {make_sub(0, s, 0.0316)};
        VirtualQueues q = VirtualQueues::filled(1, 1, 0.0);
        q.X[0] = 5.0 * U(rng);
        q.Z[0] = 5.0 * U(rng);
        q.Y[0] = 2.0 * U(rng);
        Association a(1);
        a.uav_of[0] = 0;

        const auto pp = build_power_program(q, a, u, subs, cfg);
        const auto sol = conic::solve(pp.prog);
        const double p_conic = sol.primal[pp.p_var[0]];
        auto g = u;
        double best_p = 0.0, best_f = kInf;
        const long steps = std::lround((cfg.p_hat - cfg.p_circuit - cfg.p_min) / 1e-3);
        for (long m = 1; m <= steps; ++m)
        {
            g[0].p = cfg.p_min + 1e-3 * static_cast<double>(m);
            const double f = resource_objective(q, a, g, subs, cfg);
            if (f < best_f)
            {
                best_f = f;
                best_p = g[0].p;
            }
        }
        power_gap = std::max(power_gap, std::abs(p_conic - best_p));

        cfg.s_max = 30.0;
        Algorithm1Options opts;
        opts.optimize_selection = false;
        opts.optimize_power = false;
        const Vec2 got = algorithm1(q, a, u, {c}, subs, cfg, opts).uavs[0].q;
        const auto phi = [&](const Vec2 &p) {
            auto v = u;
            v[0].q = p;
            return resource_objective(q, a, v, subs, cfg);
        };
        const auto feasible = [&](const Vec2 &p) {
            return (p - c).norm() <= cfg.s_max && (p - s).norm() <= tracking_radius(cfg) && p.x() >= 0.0 &&
                   p.y() >= 0.0 && p.x() <= cfg.area_width_m && p.y() <= cfg.area_height_m;
        };
        Vec2 best = c;
        double best_phi = phi(c);
        const auto scan = [&](Vec2 centre, double half, double h) {
            for (double dx = -half; dx <= half; dx += h)
                for (double dy = -half; dy <= half; dy += h)
                {
                    const Vec2 p = centre + Vec2(dx, dy);
                    if (feasible(p) && phi(p) < best_phi)
                    {
                        best_phi = phi(p);
                        best = p;
                    }
                }
        };
        scan(c, 30.0, 0.25);
        scan(best, 1.0, 0.005);
        const double h = 1e-4;
        const Vec2 grad((phi(best + Vec2(h, 0)) - phi(best - Vec2(h, 0))) / (2 * h),
                        (phi(best + Vec2(0, h)) - phi(best - Vec2(0, h))) / (2 * h));
        // Objective excess expressed as the distance along the gradient that produces it.
        traj_gap = std::max(traj_gap, (phi(got) - best_phi) / grad.norm());
        phi_excess = std::max(phi_excess, phi(got) - best_phi);
    }
    report(10, power_gap <= 1e-3 && traj_gap <= 1e-2, "sub-solver grid oracles",
           fmt("max power gap %.3g mW, trajectory objective excess %.3g m-equivalent (%.3g)", power_gap, traj_gap,
               phi_excess));
}

// Criterion 11: physical constraints on every slot of every policy.
void physics(const ExperimentResult &res, const WorldConfig &cfg)
{
    long bad = 0, slots = 0;
    double min_sep = kInf, max_move = 0.0;
    for (const auto &p : res.policies)
        for (const auto &run : p.runs)
            for (std::size_t t = 0; t < run.records.size(); ++t)
            {
                const auto &r = run.records[t];
                ++slots;
                bool ok = true;
                for (double x : r.powers)
                    ok = ok && x >= cfg.p_min - 1e-9 && x <= cfg.p_hat - cfg.p_circuit + 1e-9;
                for (std::size_t k = 0; k < r.positions.size(); ++k)
                {
                    for (std::size_t j = k + 1; j < r.positions.size(); ++j)
                        min_sep = std::min(min_sep, (r.positions[k] - r.positions[j]).norm());
                    if (t > 0)
                        max_move = std::max(max_move, (r.positions[k] - run.records[t - 1].positions[k]).norm());
                }
                for (std::size_t i = 0; i < r.latencies.size(); ++i)
                    if (r.assoc.uav_of[i] < 0)
                        ok = ok && r.latencies[i] == cfg.slot_duration_dt;
                bad += !ok;
            }
    const bool ok = bad == 0 && min_sep >= cfg.d_min - 1e-6 && max_move <= cfg.s_max + 1e-6;
    report(11, ok, "physics constraints",
           fmt("%.0f bad slots, min separation %.6f m, max move %.6f m", static_cast<double>(bad), min_sep, max_move));
}

} // namespace

int main()
{
    init_logging("warn");
    const WorldConfig cfg;
    std::vector<PolicySpec> specs;
    for (PolicyKind k : all_policies())
        specs.push_back(PolicySpec::of(k));

    const auto start = std::chrono::steady_clock::now();
    const ExperimentResult res = run_experiment(specs, cfg, kSeeds, cfg.rng_seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("experiment: %zu policies x %d seeds, T = %d, %.1f s\n", specs.size(), kSeeds, cfg.horizon_T, secs);

    const PolicyRuns &emuo = *res.find(PolicyKind::EMUO);
    queue_stability(emuo, cfg);
    sca_convergence(emuo, cfg);
    restriction_soundness(res, cfg);
    auxiliary_closed_form();
    selection_exactness();
    dpp_bound();
    jensen(res);
    taylor_families();
    ordering(res);
    subsolver_oracles();
    physics(res, cfg);

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
