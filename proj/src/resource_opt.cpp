#include "uavqoe/resource_opt.hpp"

#include "uavqoe/assignment.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uavqoe
{

using conic::AffineExpr;
using conic::ConeKind;

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> powers_of(const std::vector<UavState> &uavs)
{
    std::vector<double> p(uavs.size());
    for (std::size_t k = 0; k < uavs.size(); ++k)
        p[k] = uavs[k].p;
    return p;
}

std::vector<Vec2> positions_of(const std::vector<UavState> &uavs)
{
    std::vector<Vec2> q(uavs.size());
    for (std::size_t k = 0; k < uavs.size(); ++k)
        q[k] = uavs[k].q;
    return q;
}

double latency_coeff(const WorldConfig &cfg)
{
    return std::sqrt(2.0 * cfg.video_chunk_L / cfg.bandwidth_B);
}

} // namespace

double tracking_radius(const WorldConfig &cfg)
{
    const double r = los_radius(cfg);
    return cfg.subscriber_step_m < r ? r - cfg.subscriber_step_m : r;
}

double rate_weight(const VirtualQueues &q, int i)
{
    return pos(q.X[static_cast<std::size_t>(i)]) + pos(q.Z[static_cast<std::size_t>(i)]);
}

SelectionWeights selection_weights(const VirtualQueues &q, const std::vector<UavState> &uavs,
                                   const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    const int M = static_cast<int>(subs.size());
    const int N = static_cast<int>(uavs.size());
    SelectionWeights w;
    w.weight.resize(M, N);
    w.unassigned = Eigen::VectorXd::Constant(M, -cfg.V * cfg.rho1 * cfg.slot_duration_dt);
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < N; ++k)
        {
            w.weight(i, k) = -kInf;
            if (!los_feasible(uavs[static_cast<std::size_t>(k)].q, subs[static_cast<std::size_t>(i)].s, cfg))
                continue;
            const double r = std::log2(1.0 + sinr(i, k, uavs, subs, cfg));
            if (!(r > 0.0))
                continue;
            w.weight(i, k) = rate_weight(q, i) * r - cfg.V * cfg.rho1 * served_latency(r, cfg);
        }
    return w;
}

Association solve_selection(const SelectionWeights &w)
{
    const auto M = w.weight.rows();
    const auto N = w.weight.cols();
    double scale = 1.0;
    for (Eigen::Index i = 0; i < M; ++i)
    {
        scale += std::abs(w.unassigned[i]);
        for (Eigen::Index k = 0; k < N; ++k)
            if (std::isfinite(w.weight(i, k)))
                scale += std::abs(w.weight(i, k));
    }
    // Forbidden cells cost more than any assignment that avoids them.
    const double forbidden = 4.0 * scale;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(M, N + M, forbidden);
    for (Eigen::Index i = 0; i < M; ++i)
    {
        for (Eigen::Index k = 0; k < N; ++k)
            if (std::isfinite(w.weight(i, k)))
                cost(i, k) = -w.weight(i, k);
        cost(i, N + i) = -w.unassigned[i];
    }
    const auto cols = hungarian_min_cost(cost);
    Association assoc(static_cast<int>(M));
    for (Eigen::Index i = 0; i < M; ++i)
    {
        const int c = cols[static_cast<std::size_t>(i)];
        if (c < N && std::isfinite(w.weight(i, c)))
            assoc.uav_of[static_cast<std::size_t>(i)] = c;
    }
    return assoc;
}

double selection_value(const SelectionWeights &w, const Association &assoc)
{
    double v = 0.0;
    for (Eigen::Index i = 0; i < w.weight.rows(); ++i)
    {
        const int k = assoc.uav_of[static_cast<std::size_t>(i)];
        v += k < 0 ? w.unassigned[i] : w.weight(i, k);
    }
    return v;
}

double resource_objective(const VirtualQueues &q, const Association &assoc, const std::vector<UavState> &uavs,
                          const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    double phi = 0.0;
    for (std::size_t k = 0; k < uavs.size(); ++k)
        phi += (cfg.V * cfg.rho2 + pos(q.Y[k])) * uavs[k].p;
    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        if (assoc.uav_of[i] < 0)
        {
            phi += cfg.V * cfg.rho1 * cfg.slot_duration_dt;
            continue;
        }
        const double r = achievable_rate(static_cast<int>(i), assoc, uavs, subs, cfg);
        phi += -rate_weight(q, static_cast<int>(i)) * r + cfg.V * cfg.rho1 * served_latency(r, cfg);
    }
    return phi;
}

Association filter_association(const Association &assoc, const std::vector<UavState> &uavs,
                               const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    Association out(assoc.subscribers());
    std::vector<char> taken(uavs.size(), 0);
    for (int i = 0; i < assoc.subscribers(); ++i)
    {
        const int k = assoc.uav_of[static_cast<std::size_t>(i)];
        if (k < 0 || k >= static_cast<int>(uavs.size()) || taken[static_cast<std::size_t>(k)])
            continue;
        if (!los_feasible(uavs[static_cast<std::size_t>(k)].q, subs[static_cast<std::size_t>(i)].s, cfg))
            continue;
        if (!(sinr(i, k, uavs, subs, cfg) > 0.0))
            continue;
        out.uav_of[static_cast<std::size_t>(i)] = k;
        taken[static_cast<std::size_t>(k)] = 1;
    }
    return out;
}

// ---------------------------------------------------------------- power

std::vector<PowerTerm> taylor_power_coeffs(const std::vector<double> &p_r, const Association &assoc,
                                           const std::vector<UavState> &uavs,
                                           const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    const double sigma2 = cfg.sigma2();
    std::vector<PowerTerm> out;
    for (int i = 0; i < assoc.subscribers(); ++i)
    {
        const int k = assoc.uav_of[static_cast<std::size_t>(i)];
        if (k < 0)
            continue;
        PowerTerm t;
        t.i = i;
        t.k = k;
        t.p_r = p_r;
        t.h.resize(uavs.size());
        double others = sigma2;
        for (std::size_t j = 0; j < uavs.size(); ++j)
        {
            t.h[j] = channel_gain(uavs[j].q, subs[static_cast<std::size_t>(i)].s, cfg);
            if (static_cast<int>(j) != k)
                others += p_r[j] * t.h[j];
        }
        t.F = std::log2(others);
        t.scale = others + p_r[static_cast<std::size_t>(k)] * t.h[static_cast<std::size_t>(k)];
        t.G.assign(uavs.size(), 0.0);
        for (std::size_t j = 0; j < uavs.size(); ++j)
            if (static_cast<int>(j) != k)
                t.G[j] = t.h[j] / (std::exp2(t.F) * std::numbers::ln2);
        out.push_back(std::move(t));
    }
    return out;
}

double power_rate_surrogate(const PowerTerm &term, const std::vector<double> &p, const WorldConfig &cfg)
{
    double total = cfg.sigma2();
    double lin = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
    {
        total += p[j] * term.h[j];
        lin += term.G[j] * (p[j] - term.p_r[j]);
    }
    return std::log2(total) - term.F - lin;
}

double power_rate_exact(const PowerTerm &term, const std::vector<double> &p, const WorldConfig &cfg)
{
    double others = cfg.sigma2();
    for (std::size_t j = 0; j < p.size(); ++j)
        if (static_cast<int>(j) != term.k)
            others += p[j] * term.h[j];
    return std::log2(1.0 + p[static_cast<std::size_t>(term.k)] * term.h[static_cast<std::size_t>(term.k)] / others);
}

PowerProgram build_power_program(const VirtualQueues &q, const Association &assoc, const std::vector<UavState> &uavs,
                                 const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    for (int i = 0; i < assoc.subscribers(); ++i)
    {
        const int k = assoc.uav_of[static_cast<std::size_t>(i)];
        if (k >= 0 && !los_feasible(uavs[static_cast<std::size_t>(k)].q, subs[static_cast<std::size_t>(i)].s, cfg))
            throw std::invalid_argument("build_power_program: subscriber " + std::to_string(i) +
                                        " is served by UAV " + std::to_string(k) + " without line of sight");
    }
    PowerProgram out;
    auto &prog = out.prog;
    const double p_hi = cfg.p_hat - cfg.p_circuit;
    for (std::size_t k = 0; k < uavs.size(); ++k)
    {
        const int v = prog.add_variable("p" + std::to_string(k));
        out.p_var.push_back(v);
        prog.set_objective(v, cfg.V * cfg.rho2 + pos(q.Y[k]));
        prog.add_bounds(v, cfg.p_min, p_hi);
    }
    out.terms = taylor_power_coeffs(powers_of(uavs), assoc, uavs, subs, cfg);
    const double sigma2 = cfg.sigma2();
    for (const auto &t : out.terms)
    {
        const std::string tag = std::to_string(t.i);
        const int eta = prog.add_variable("eta" + tag);
        const int xi = prog.add_variable("xi" + tag);
        const int z1 = prog.add_variable("Z1_" + tag);
        const int z2 = prog.add_variable("Z2_" + tag);
        const int z3 = prog.add_variable("Z3_" + tag);
        out.eta_var.push_back(eta);
        out.xi_var.push_back(xi);
        prog.set_objective(eta, -rate_weight(q, t.i));
        prog.set_objective(xi, cfg.V * cfg.rho1);

        // Z1 = (sigma2 + sum p h) / scale
        AffineExpr e1(-sigma2 / t.scale);
        e1.add(z1, 1.0);
        for (std::size_t j = 0; j < uavs.size(); ++j)
            e1.add(out.p_var[j], -t.h[j] / t.scale);
        prog.add_equality(std::move(e1), "Z1_" + tag);
        prog.add_equality(AffineExpr(-1.0).add(z2, 1.0), "Z2_" + tag);
        // Z3 = (eta + F + sum G (p - p^r)) ln2 - ln scale
        double c3 = t.F * std::numbers::ln2 - std::log(t.scale);
        AffineExpr e3;
        e3.add(z3, 1.0).add(eta, -std::numbers::ln2);
        for (std::size_t j = 0; j < uavs.size(); ++j)
            if (t.G[j] != 0.0)
            {
                e3.add(out.p_var[j], -t.G[j] * std::numbers::ln2);
                c3 -= t.G[j] * t.p_r[j] * std::numbers::ln2;
            }
        e3.constant = -c3;
        prog.add_equality(std::move(e3), "Z3_" + tag);
        prog.add_cone(ConeKind::Exponential,
                      {AffineExpr().add(z1, 1.0), AffineExpr().add(z2, 1.0), AffineExpr().add(z3, 1.0)},
                      "rate" + tag);
        prog.add_cone(ConeKind::Rotated,
                      {AffineExpr().add(xi, 1.0), AffineExpr().add(eta, 1.0), AffineExpr(latency_coeff(cfg))},
                      "latency" + tag);
    }
    return out;
}

namespace
{

// Strictly interior point for the power program near the expansion point.
Eigen::VectorXd power_hint(const PowerProgram &pp, const std::vector<UavState> &uavs, const WorldConfig &cfg)
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(pp.prog.n_vars());
    const double lo = cfg.p_min, hi = cfg.p_hat - cfg.p_circuit;
    const double margin = 1e-3 * (hi - lo);
    std::vector<double> p(uavs.size());
    for (std::size_t k = 0; k < uavs.size(); ++k)
    {
        p[k] = std::clamp(uavs[k].p, lo + margin, hi - margin);
        x[pp.p_var[k]] = p[k];
    }
    const double L_over_B = cfg.video_chunk_L / cfg.bandwidth_B;
    for (std::size_t n = 0; n < pp.terms.size(); ++n)
    {
        const auto &t = pp.terms[n];
        const double surrogate = power_rate_surrogate(t, p, cfg);
        const double eta = surrogate > 0.0 ? 0.99 * surrogate : 1e-9;
        const int eta_v = pp.eta_var[n];
        x[eta_v] = eta;
        x[pp.xi_var[n]] = 1.01 * L_over_B / eta;
        // Z1..Z3 follow from the equality rows.
        double total = cfg.sigma2(), lin = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
        {
            total += p[j] * t.h[j];
            lin += t.G[j] * (p[j] - t.p_r[j]);
        }
        x[eta_v + 2] = total / t.scale;
        x[eta_v + 3] = 1.0;
        x[eta_v + 4] = (eta + t.F + lin) * std::numbers::ln2 - std::log(t.scale);
    }
    return x;
}

} // namespace

// ---------------------------------------------------------------- trajectory

std::vector<TrajectoryTerm> taylor_trajectory_coeffs(const std::vector<Vec2> &q_r, const std::vector<double> &powers,
                                                     const Association &assoc,
                                                     const std::vector<SubscriberState> &subs,
                                                     const WorldConfig &cfg)
{
    const double H2 = cfg.altitude_H * cfg.altitude_H;
    const double w = omega(cfg);
    std::vector<TrajectoryTerm> out;
    for (int i = 0; i < assoc.subscribers(); ++i)
    {
        const int k = assoc.uav_of[static_cast<std::size_t>(i)];
        if (k < 0)
            continue;
        TrajectoryTerm t;
        t.i = i;
        t.k = k;
        t.u_r.resize(q_r.size());
        double total = cfg.sigma2();
        for (std::size_t j = 0; j < q_r.size(); ++j)
        {
            t.u_r[j] = (q_r[j] - subs[static_cast<std::size_t>(i)].s).squaredNorm();
            total += powers[j] * w / (H2 + t.u_r[j]);
        }
        t.D = std::log2(total);
        t.E.resize(q_r.size());
        for (std::size_t j = 0; j < q_r.size(); ++j)
        {
            const double den = H2 + t.u_r[j];
            t.E[j] = powers[j] * w / (den * den * total * std::numbers::ln2);
        }
        out.push_back(std::move(t));
    }
    return out;
}

double received_log(int i, const std::vector<Vec2> &q, const std::vector<double> &powers,
                    const std::vector<SubscriberState> &subs, const WorldConfig &cfg, int skip)
{
    double total = cfg.sigma2();
    for (std::size_t j = 0; j < q.size(); ++j)
        if (static_cast<int>(j) != skip)
            total += powers[j] * channel_gain(q[j], subs[static_cast<std::size_t>(i)].s, cfg);
    return std::log2(total);
}

double received_log_linearized(const TrajectoryTerm &term, const std::vector<Vec2> &q,
                               const std::vector<SubscriberState> &subs)
{
    double v = term.D;
    for (std::size_t j = 0; j < q.size(); ++j)
        v -= term.E[j] * ((q[j] - subs[static_cast<std::size_t>(term.i)].s).squaredNorm() - term.u_r[j]);
    return v;
}

double collision_linearized(const Vec2 &qk_r, const Vec2 &qj_r, const Vec2 &qk, const Vec2 &qj)
{
    const Vec2 d = qk_r - qj_r;
    return -d.squaredNorm() + 2.0 * d.dot(qk - qj);
}

TrajectoryProgram build_trajectory_program(const VirtualQueues &q, const Association &assoc,
                                           const std::vector<UavState> &uavs,
                                           const std::vector<Vec2> &prev_positions,
                                           const std::vector<SubscriberState> &subs, const WorldConfig &cfg)
{
    const std::size_t N = uavs.size();
    const double H = cfg.altitude_H;
    const double H2 = H * H;
    const auto q_r = positions_of(uavs);
    const auto p = powers_of(uavs);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b)
            if ((q_r[a] - q_r[b]).norm() < cfg.d_min * (1.0 - 1e-9))
                throw std::invalid_argument("build_trajectory_program: UAVs " + std::to_string(a) + " and " +
                                            std::to_string(b) + " are closer than d_min at the local point");
    for (int i = 0; i < assoc.subscribers(); ++i)
    {
        const int k = assoc.uav_of[static_cast<std::size_t>(i)];
        if (k >= 0 && !los_feasible(q_r[static_cast<std::size_t>(k)], subs[static_cast<std::size_t>(i)].s, cfg))
            throw std::invalid_argument("build_trajectory_program: served pair without line of sight");
    }

    TrajectoryProgram out;
    auto &prog = out.prog;
    out.qx_var.assign(N, -1);
    out.qy_var.assign(N, -1);
    for (std::size_t k = 0; k < N; ++k)
    {
        if (assoc.subscriber_of(static_cast<int>(k)) < 0)
            continue;
        out.qx_var[k] = prog.add_variable("qx" + std::to_string(k));
        out.qy_var[k] = prog.add_variable("qy" + std::to_string(k));
    }
    auto coord = [&](std::size_t k, int axis, double coef, double offset) {
        const int v = axis == 0 ? out.qx_var[k] : out.qy_var[k];
        AffineExpr e(offset);
        if (v >= 0)
            e.add(v, coef);
        else
            e.constant += coef * q_r[k][axis];
        return e;
    };
    // Linear form  c0 + g'(q_k - anchor)  with q_k possibly fixed.
    auto linear_in_q = [&](AffineExpr &e, std::size_t k, const Vec2 &g, const Vec2 &anchor) {
        for (int axis = 0; axis < 2; ++axis)
        {
            const int v = axis == 0 ? out.qx_var[k] : out.qy_var[k];
            if (v >= 0)
            {
                e.add(v, g[axis]);
                e.constant -= g[axis] * anchor[axis];
            }
            else
            {
                e.constant += g[axis] * (q_r[k][axis] - anchor[axis]);
            }
        }
    };

    for (std::size_t k = 0; k < N; ++k)
    {
        if (out.qx_var[k] < 0)
            continue;
        prog.add_bounds(out.qx_var[k], 0.0, cfg.area_width_m);
        prog.add_bounds(out.qy_var[k], 0.0, cfg.area_height_m);
        prog.add_cone(ConeKind::Quadratic,
                      {AffineExpr(cfg.s_max), coord(k, 0, 1.0, -prev_positions[k].x()),
                       coord(k, 1, 1.0, -prev_positions[k].y())},
                      "speed" + std::to_string(k));
    }
    const double dmin2 = cfg.d_min * cfg.d_min;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b)
        {
            if (out.qx_var[a] < 0 && out.qx_var[b] < 0)
                continue;
            const Vec2 d = q_r[a] - q_r[b];
            // (-|d|^2 + 2 d'(q_a - q_b) - dmin^2) / dmin^2 >= 0
            AffineExpr e((-d.squaredNorm() - dmin2) / dmin2);
            linear_in_q(e, a, 2.0 * d / dmin2, Vec2::Zero());
            linear_in_q(e, b, -2.0 * d / dmin2, Vec2::Zero());
            prog.add_nonneg(std::move(e), "collision" + std::to_string(a) + "_" + std::to_string(b));
        }

    out.terms = taylor_trajectory_coeffs(q_r, p, assoc, subs, cfg);
    const double wgain = omega(cfg);
    const double log_sigma2 = std::log(cfg.sigma2());
    for (const auto &t : out.terms)
    {
        const std::string tag = std::to_string(t.i);
        const Vec2 &s = subs[static_cast<std::size_t>(t.i)].s;
        const auto k = static_cast<std::size_t>(t.k);
        const int eta = prog.add_variable("eta" + tag);
        const int xi = prog.add_variable("xi" + tag);
        const int phi = prog.add_variable("phi" + tag);
        const int mu0 = prog.add_variable("mu" + tag);
        out.eta_var.push_back(eta);
        out.xi_var.push_back(xi);
        prog.set_objective(eta, -rate_weight(q, t.i));
        prog.set_objective(xi, cfg.V * cfg.rho1);
        prog.add_cone(ConeKind::Rotated,
                      {AffineExpr().add(xi, 1.0), AffineExpr().add(eta, 1.0), AffineExpr(latency_coeff(cfg))},
                      "latency" + tag);
        prog.add_cone(ConeKind::Quadratic,
                      {AffineExpr(tracking_radius(cfg)), coord(k, 0, 1.0, -s.x()), coord(k, 1, 1.0, -s.y())},
                      "los" + tag);

        // D - sum_j E_j (zeta_j - u_j^r) - phi - eta >= 0, zeta normalized by H^2.
        AffineExpr rate(t.D);
        rate.add(phi, -1.0).add(eta, -1.0);
        AffineExpr budget(1.0); // 1 - mu0 - sum mu_j >= 0
        budget.add(mu0, -1.0);
        for (std::size_t j = 0; j < N; ++j)
        {
            if (!(p[j] > 0.0))
                continue;
            const std::string jt = tag + "_" + std::to_string(j);
            const int zeta = prog.add_variable("zeta" + jt);
            rate.add(zeta, -t.E[j] * H2);
            rate.constant += t.E[j] * t.u_r[j];
            prog.add_cone(ConeKind::Rotated,
                          {AffineExpr().add(zeta, 1.0), AffineExpr(0.5), coord(j, 0, 1.0 / H, -s.x() / H),
                           coord(j, 1, 1.0 / H, -s.y() / H)},
                          "zeta" + jt);
            if (j == k)
                continue;
            const int b = prog.add_variable("B" + jt);
            const int m = prog.add_variable("m" + jt);
            const int f = prog.add_variable("f" + jt);
            const int mu = prog.add_variable("mu" + jt);
            // B <= (-|q^r - s|^2 + 2 (q^r - s)'(q - s)) / H^2
            AffineExpr lin(-t.u_r[j] / H2);
            linear_in_q(lin, j, 2.0 * (q_r[j] - s) / H2, s);
            lin.add(b, -1.0);
            prog.add_nonneg(std::move(lin), "B" + jt);
            // f <= 1 + B
            prog.add_nonneg(AffineExpr(1.0).add(b, 1.0).add(f, -1.0), "f" + jt);
            prog.add_cone(ConeKind::Exponential,
                          {AffineExpr().add(f, 1.0), AffineExpr(1.0), AffineExpr().add(m, -1.0)}, "fm" + jt);
            prog.add_cone(ConeKind::Exponential,
                          {AffineExpr().add(mu, 1.0), AffineExpr(1.0),
                           AffineExpr(std::log(p[j] * wgain / H2)).add(m, 1.0).add(phi, -std::numbers::ln2)},
                          "interference" + jt);
            budget.add(mu, -1.0);
        }
        prog.add_nonneg(std::move(rate), "rate" + tag);
        prog.add_cone(ConeKind::Exponential,
                      {AffineExpr().add(mu0, 1.0), AffineExpr(1.0),
                       AffineExpr(log_sigma2).add(phi, -std::numbers::ln2)},
                      "noise" + tag);
        prog.add_nonneg(std::move(budget), "logsumexp" + tag);
    }
    return out;
}

namespace
{

// Interior point guess for the trajectory program, built from the expansion point pulled slightly
// toward the previous position.
Eigen::VectorXd trajectory_hint(const TrajectoryProgram &tp, const std::vector<UavState> &uavs,
                                const std::vector<Vec2> &prev_positions, const std::vector<SubscriberState> &subs,
                                const WorldConfig &cfg)
{
    const auto &prog = tp.prog;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.n_vars());
    const std::size_t N = uavs.size();
    const double H2 = cfg.altitude_H * cfg.altitude_H;
    std::vector<Vec2> q(N);
    for (std::size_t k = 0; k < N; ++k)
    {
        q[k] = uavs[k].q;
        if (tp.qx_var[k] < 0)
            continue;
        q[k] = prev_positions[k] + (1.0 - 1e-6) * (uavs[k].q - prev_positions[k]);
        x[tp.qx_var[k]] = q[k].x();
        x[tp.qy_var[k]] = q[k].y();
    }
    const double w = omega(cfg);
    const double L_over_B = cfg.video_chunk_L / cfg.bandwidth_B;
    // Variables of a term are laid out contiguously: eta, xi, phi, mu0, then per UAV j with p_j > 0:
    // zeta, and for interferers B, m, f, mu.
    for (std::size_t n = 0; n < tp.terms.size(); ++n)
    {
        const auto &t = tp.terms[n];
        const Vec2 &s = subs[static_cast<std::size_t>(t.i)].s;
        int v = tp.eta_var[n];
        const int eta_v = v++, xi_v = v++, phi_v = v++, mu0_v = v++;
        double acc = cfg.sigma2();
        double rate = t.D;
        struct Slot
        {
            int mu;
            double log_amp;
        };
        std::vector<Slot> mus;
        for (std::size_t j = 0; j < N; ++j)
        {
            if (!(uavs[j].p > 0.0))
                continue;
            const double u = (q[j] - s).squaredNorm();
            const double zeta = u / H2 * (1.0 + 1e-6) + 1e-9;
            x[v] = zeta;
            rate -= t.E[j] * (zeta * H2 - t.u_r[j]);
            ++v;
            if (static_cast<int>(j) == t.k)
                continue;
            const double lin = -t.u_r[j] + 2.0 * (uavs[j].q - s).dot(q[j] - s);
            const double b = lin / H2 - 1e-7;
            const double f = (1.0 + b) * (1.0 - 1e-7);
            const double m = -std::log(f) + 1e-7;
            x[v++] = b;
            x[v++] = m;
            x[v++] = f;
            const double log_amp = std::log(uavs[j].p * w / H2) + m;
            acc += std::exp(log_amp);
            mus.push_back({v++, log_amp});
        }
        const double phi = std::log2(acc) + 1e-3;
        x[phi_v] = phi;
        const double shrink = std::exp2(-phi);
        x[mu0_v] = cfg.sigma2() * shrink * (1.0 + 1e-4);
        for (const auto &sl : mus)
            x[sl.mu] = std::exp(sl.log_amp) * shrink * (1.0 + 1e-4);
        const double room = rate - phi;
        const double eta = room > 0.0 ? 0.99 * room : 1e-9;
        x[eta_v] = eta;
        x[xi_v] = 1.01 * L_over_B / eta;
    }
    return x;
}

struct StepCheck
{
    double rate_violation = 0.0;
    double kinematic_violation = 0.0;
};

} // namespace

Algorithm1Result algorithm1(const VirtualQueues &q, const Association &start_assoc,
                            const std::vector<UavState> &start, const std::vector<Vec2> &prev_positions,
                            const std::vector<SubscriberState> &subs, const WorldConfig &cfg,
                            const Algorithm1Options &opts)
{
    constexpr double kSafety = 1e-6;
    Algorithm1Result res;
    res.uavs = start;
    res.assoc = filter_association(start_assoc, start, subs, cfg);
    double phi = resource_objective(q, res.assoc, res.uavs, subs, cfg);
    auto &st = res.stats;
    st.trace.push_back(phi);
    const double p_lo = cfg.p_min, p_hi = cfg.p_hat - cfg.p_circuit;
    bool any_accepted_resource = false;
    // A non-improving step within the SCA tolerance means the iteration has settled.
    const auto settled = [&](double cand) { return cand - phi <= cfg.sca_tolerance * std::max(1.0, std::abs(phi)); };

    for (int r = 1; r <= cfg.sca_max_iter_rmax; ++r)
    {
        const double phi_start = phi;
        bool stop = false;
        const std::string iter = std::to_string(r);

        if (opts.optimize_selection)
        {
            const auto w = selection_weights(q, res.uavs, subs, cfg);
            Association a = solve_selection(w);
            const double cand = resource_objective(q, a, res.uavs, subs, cfg);
            if (cand <= phi)
            {
                res.assoc = std::move(a);
                phi = cand;
            }
            else if (settled(cand))
            {
                st.converged = true;
                stop = true;
            }
            else
            {
                spdlog::debug("selection rejected at iteration {}: {} > {}", r, cand, phi);
                ++st.rejected_steps;
                stop = true;
            }
        }

        if (!stop && opts.optimize_power)
        {
            auto pp = build_power_program(q, res.assoc, res.uavs, subs, cfg);
            if (opts.on_program)
                opts.on_program("power_iter" + iter, pp.prog);
            const Eigen::VectorXd hint = power_hint(pp, res.uavs, cfg);
            const auto sol = conic::solve(pp.prog, opts.solver, &hint);
            st.newton_steps += sol.newton_steps;
            if (sol.status != conic::SolveStatus::Optimal)
            {
                ++st.solver_failures;
                stop = true;
            }
            else
            {
                auto cand_uavs = res.uavs;
                std::vector<double> p(cand_uavs.size());
                for (std::size_t k = 0; k < cand_uavs.size(); ++k)
                {
                    double v = std::clamp(sol.primal[pp.p_var[k]], p_lo, p_hi);
                    if (v - p_lo <= 1e-6)
                        v = p_lo;
                    cand_uavs[k].p = v;
                    p[k] = v;
                }
                double viol = 0.0;
                for (std::size_t n = 0; n < pp.terms.size(); ++n)
                    viol = std::max(viol, sol.primal[pp.eta_var[n]] - power_rate_exact(pp.terms[n], p, cfg));
                const double cand = resource_objective(q, res.assoc, cand_uavs, subs, cfg);
                if (viol <= kSafety && cand <= phi)
                {
                    st.max_rate_violation = std::max(st.max_rate_violation, viol);
                    res.uavs = std::move(cand_uavs);
                    phi = cand;
                    any_accepted_resource = true;
                }
                else if (viol <= kSafety && settled(cand))
                {
                    st.converged = true;
                    stop = true;
                }
                else
                {
                    spdlog::debug("power step rejected at iteration {}: objective {} vs {}, rate violation {}", r,
                                  cand, phi, viol);
                    ++st.rejected_steps;
                    stop = true;
                }
            }
        }

        if (!stop && opts.optimize_trajectory && res.assoc.served_count() > 0)
        {
            auto tp = build_trajectory_program(q, res.assoc, res.uavs, prev_positions, subs, cfg);
            if (opts.on_program)
                opts.on_program("trajectory_iter" + iter, tp.prog);
            const Eigen::VectorXd hint = trajectory_hint(tp, res.uavs, prev_positions, subs, cfg);
            const auto sol = conic::solve(tp.prog, opts.solver, &hint);
            st.newton_steps += sol.newton_steps;
            if (sol.status != conic::SolveStatus::Optimal)
            {
                ++st.solver_failures;
                stop = true;
            }
            else
            {
                auto cand_uavs = res.uavs;
                for (std::size_t k = 0; k < cand_uavs.size(); ++k)
                    if (tp.qx_var[k] >= 0)
                        cand_uavs[k].q = Vec2(sol.primal[tp.qx_var[k]], sol.primal[tp.qy_var[k]]);
                StepCheck chk;
                std::vector<UavState> prev(cand_uavs);
                for (std::size_t k = 0; k < prev.size(); ++k)
                    prev[k].q = prev_positions[k];
                for (const auto &v : validate_kinematics(prev, cand_uavs, cfg, 0.0))
                {
                    double amount = 0.0;
                    if (v.kind == KinematicViolation::Kind::Speed)
                        amount = v.value - cfg.s_max;
                    else if (v.kind == KinematicViolation::Kind::Collision)
                        amount = cfg.d_min - v.value;
                    else
                    {
                        const Vec2 &pq = cand_uavs[static_cast<std::size_t>(v.a)].q;
                        amount = std::max({-pq.x(), -pq.y(), pq.x() - cfg.area_width_m, pq.y() - cfg.area_height_m});
                    }
                    chk.kinematic_violation = std::max(chk.kinematic_violation, amount);
                }
                for (std::size_t n = 0; n < tp.terms.size(); ++n)
                {
                    const auto &t = tp.terms[n];
                    const double los_excess = (cand_uavs[static_cast<std::size_t>(t.k)].q -
                                               subs[static_cast<std::size_t>(t.i)].s).norm() - los_radius(cfg);
                    chk.kinematic_violation = std::max(chk.kinematic_violation, los_excess);
                    const double rate = achievable_rate(t.i, res.assoc, cand_uavs, subs, cfg);
                    chk.rate_violation = std::max(chk.rate_violation, sol.primal[tp.eta_var[n]] - rate);
                }
                const double cand = resource_objective(q, res.assoc, cand_uavs, subs, cfg);
                if (chk.rate_violation <= kSafety && chk.kinematic_violation <= kSafety && cand <= phi)
                {
                    st.max_rate_violation = std::max(st.max_rate_violation, chk.rate_violation);
                    st.max_kinematic_violation = std::max(st.max_kinematic_violation, chk.kinematic_violation);
                    res.uavs = std::move(cand_uavs);
                    phi = cand;
                    any_accepted_resource = true;
                }
                else if (chk.rate_violation <= kSafety && chk.kinematic_violation <= kSafety && settled(cand))
                {
                    st.converged = true;
                    stop = true;
                }
                else
                {
                    spdlog::debug("trajectory step rejected at iteration {}: objective {} vs {}, rate violation {}, "
                                  "kinematic violation {}",
                                  r, cand, phi, chk.rate_violation, chk.kinematic_violation);
                    ++st.rejected_steps;
                    stop = true;
                }
            }
        }

        st.iterations = r;
        st.trace.push_back(phi);
        if (stop)
            break;
        if (std::abs(phi - phi_start) <= cfg.sca_tolerance * std::max(1.0, std::abs(phi)))
        {
            st.converged = true;
            break;
        }
    }
    st.fallback = st.solver_failures > 0 && !any_accepted_resource && (opts.optimize_power || opts.optimize_trajectory);
    return res;
}

} // namespace uavqoe
