#include "uavqoe/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavqoe::conic
{

namespace
{

void check_expr(const AffineExpr &e, int n_vars)
{
    for (const auto &[j, a] : e.terms)
    {
        if (j < 0 || j >= n_vars)
            throw std::invalid_argument("affine expression references unknown variable");
        if (!std::isfinite(a))
            throw std::invalid_argument("non-finite coefficient");
    }
    if (!std::isfinite(e.constant))
        throw std::invalid_argument("non-finite constant");
}

void check_cone(ConeKind kind, const std::vector<AffineExpr> &rows, int n_vars)
{
    const auto dim = rows.size();
    switch (kind)
    {
    case ConeKind::Nonnegative:
        if (dim < 1)
            throw std::invalid_argument("nonnegative cone needs dimension >= 1");
        break;
    case ConeKind::Quadratic:
        if (dim < 2)
            throw std::invalid_argument("quadratic cone needs dimension >= 2");
        break;
    case ConeKind::Rotated:
        if (dim < 3)
            throw std::invalid_argument("rotated quadratic cone needs dimension >= 3");
        break;
    case ConeKind::Exponential:
        if (dim != 3)
            throw std::invalid_argument("exponential cone needs dimension 3");
        break;
    }
    for (const auto &r : rows)
        check_expr(r, n_vars);
}

} // namespace


double AffineExpr::eval(const Eigen::VectorXd &x) const
{
    double v = constant;
    for (const auto &[j, a] : terms)
        v += a * x[j];
    return v;
}

const char *to_string(ConeKind kind)
{
    switch (kind)
    {
    case ConeKind::Nonnegative: return "nonnegative";
    case ConeKind::Quadratic: return "quadratic";
    case ConeKind::Rotated: return "rotated";
    case ConeKind::Exponential: return "exponential";
    }
    return "?";
}

const char *to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "?";
}

ConicProgram::ConicProgram(int n_vars) : n_vars_(0), objective_(Eigen::VectorXd::Zero(0))
{
    for (int i = 0; i < n_vars; ++i)
        add_variable();
}

int ConicProgram::add_variable(std::string name)
{
    if (name.empty())
        name = "x" + std::to_string(n_vars_);
    names_.push_back(std::move(name));
    objective_.conservativeResize(n_vars_ + 1);
    objective_[n_vars_] = 0.0;
    return n_vars_++;
}

void ConicProgram::set_objective(int var, double coef)
{
    if (var < 0 || var >= n_vars_)
        throw std::invalid_argument("objective variable out of range");
    objective_[var] = coef;
}

void ConicProgram::add_equality(AffineExpr row, std::string label)
{
    eqs_.push_back({std::move(row), std::move(label)});
}

void ConicProgram::add_cone(ConeKind kind, std::vector<AffineExpr> rows, std::string label)
{
    check_cone(kind, rows, n_vars_);
    cones_.push_back({kind, std::move(rows), std::move(label)});
}

void ConicProgram::add_nonneg(AffineExpr expr, std::string label)
{
    add_cone(ConeKind::Nonnegative, {std::move(expr)}, std::move(label));
}

void ConicProgram::add_bounds(int var, std::optional<double> lower, std::optional<double> upper)
{
    if (lower)
        add_nonneg(AffineExpr(-*lower).add(var, 1.0), names_.at(var) + ">=lb");
    if (upper)
        add_nonneg(AffineExpr(*upper).add(var, -1.0), names_.at(var) + "<=ub");
}

std::size_t ConicProgram::count_cones(ConeKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(cones_.begin(), cones_.end(), [kind](const auto &c) { return c.kind == kind; }));
}

void ConicProgram::validate() const
{
    for (const auto &e : eqs_)
        check_expr(e.row, n_vars_);
    for (const auto &c : cones_)
        check_cone(c.kind, c.rows, n_vars_);
    if (!objective_.allFinite())
        throw std::invalid_argument("non-finite objective");
}

double ConicProgram::objective_value(const Eigen::VectorXd &x) const
{
    return objective_.dot(x) + objective_constant_;
}

double cone_violation(ConeKind kind, const Eigen::VectorXd &s)
{
    switch (kind)
    {
    case ConeKind::Nonnegative:
        return -s.minCoeff();
    case ConeKind::Quadratic:
        return s.tail(s.size() - 1).norm() - s[0];
    case ConeKind::Rotated:
    {
        const double u = s[0], v = s[1];
        const double tail = s.tail(s.size() - 2).norm();
        const double core = tail - std::sqrt(2.0 * std::max(u, 0.0) * std::max(v, 0.0));
        return std::max({core, -u, -v});
    }
    case ConeKind::Exponential:
    {
        const double x1 = s[0], x2 = s[1], x3 = s[2];
        if (x2 > 0.0)
            return std::max(x2 * std::exp(x3 / x2) - x1, -x1);
        if (x2 == 0.0)
            return std::max(-x1, x3);
        return std::max({-x2, -x1, x3});
    }
    }
    return 0.0;
}

Eigen::VectorXd residuals(const ConicProgram &prog, const Eigen::VectorXd &x)
{
    if (x.size() != prog.n_vars())
        throw std::invalid_argument("point dimension does not match program");
    Eigen::VectorXd out(prog.equalities().size() + prog.cones().size());
    Eigen::Index k = 0;
    for (const auto &e : prog.equalities())
        out[k++] = std::abs(e.row.eval(x));
    for (const auto &c : prog.cones())
    {
        Eigen::VectorXd s(c.rows.size());
        for (std::size_t r = 0; r < c.rows.size(); ++r)
            s[static_cast<Eigen::Index>(r)] = c.rows[r].eval(x);
        out[k++] = cone_violation(c.kind, s);
    }
    return out;
}

namespace
{

// One cone argument restricted to the variables it touches: s = A * x[vars] + b.
struct Block
{
    ConeKind kind;
    std::vector<int> vars;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd e; // interior direction used by phase I

    int dim() const { return static_cast<int>(b.size()); }
    double nu() const
    {
        switch (kind)
        {
        case ConeKind::Nonnegative: return 1.0;
        case ConeKind::Quadratic:
        case ConeKind::Rotated: return 2.0;
        case ConeKind::Exponential: return 3.0;
        }
        return 0.0;
    }
};

Eigen::VectorXd interior_direction(ConeKind kind, int dim)
{
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    switch (kind)
    {
    case ConeKind::Nonnegative: e.setOnes(); break;
    case ConeKind::Quadratic: e[0] = 1.0; break;
    case ConeKind::Rotated: e[0] = e[1] = 1.0; break;
    case ConeKind::Exponential: e << 1.0, 1.0, -1.0; break;
    }
    return e;
}

bool in_interior(ConeKind kind, const Eigen::VectorXd &s)
{
    switch (kind)
    {
    case ConeKind::Nonnegative:
        return s[0] > 0.0;
    case ConeKind::Quadratic:
        return s[0] > 0.0 && s[0] * s[0] - s.tail(s.size() - 1).squaredNorm() > 0.0;
    case ConeKind::Rotated:
        return s[0] > 0.0 && s[1] > 0.0 && 2.0 * s[0] * s[1] - s.tail(s.size() - 2).squaredNorm() > 0.0;
    case ConeKind::Exponential:
        return s[0] > 0.0 && s[1] > 0.0 && s[1] * std::log(s[0] / s[1]) - s[2] > 0.0;
    }
    return false;
}

// Logarithmically homogeneous barrier value, gradient and Hessian in cone coordinates.
double barrier(ConeKind kind, const Eigen::VectorXd &s, Eigen::VectorXd *grad, Eigen::MatrixXd *hess)
{
    const auto n = s.size();
    switch (kind)
    {
    case ConeKind::Nonnegative:
    {
        if (grad)
            (*grad)[0] = -1.0 / s[0];
        if (hess)
            (*hess)(0, 0) = 1.0 / (s[0] * s[0]);
        return -std::log(s[0]);
    }
    case ConeKind::Quadratic:
    case ConeKind::Rotated:
    {
        Eigen::VectorXd dpsi(n);
        double psi;
        if (kind == ConeKind::Quadratic)
        {
            psi = s[0] * s[0] - s.tail(n - 1).squaredNorm();
            dpsi[0] = 2.0 * s[0];
            dpsi.tail(n - 1) = -2.0 * s.tail(n - 1);
        }
        else
        {
            psi = 2.0 * s[0] * s[1] - s.tail(n - 2).squaredNorm();
            dpsi[0] = 2.0 * s[1];
            dpsi[1] = 2.0 * s[0];
            dpsi.tail(n - 2) = -2.0 * s.tail(n - 2);
        }
        if (grad)
            *grad = -dpsi / psi;
        if (hess)
        {
            *hess = dpsi * dpsi.transpose() / (psi * psi);
            if (kind == ConeKind::Quadratic)
            {
                (*hess)(0, 0) -= 2.0 / psi;
                for (Eigen::Index i = 1; i < n; ++i)
                    (*hess)(i, i) += 2.0 / psi;
            }
            else
            {
                (*hess)(0, 1) -= 2.0 / psi;
                (*hess)(1, 0) -= 2.0 / psi;
                for (Eigen::Index i = 2; i < n; ++i)
                    (*hess)(i, i) += 2.0 / psi;
            }
        }
        return -std::log(psi);
    }
    case ConeKind::Exponential:
    {
        const double x1 = s[0], x2 = s[1], x3 = s[2];
        const double lr = std::log(x1 / x2);
        const double psi = x2 * lr - x3;
        Eigen::Vector3d dpsi(x2 / x1, lr - 1.0, -1.0);
        if (grad)
        {
            *grad = -dpsi / psi;
            (*grad)[0] -= 1.0 / x1;
            (*grad)[1] -= 1.0 / x2;
        }
        if (hess)
        {
            Eigen::Matrix3d d2psi = Eigen::Matrix3d::Zero();
            d2psi(0, 0) = -x2 / (x1 * x1);
            d2psi(0, 1) = d2psi(1, 0) = 1.0 / x1;
            d2psi(1, 1) = -1.0 / x2;
            Eigen::Matrix3d h = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
            h(0, 0) += 1.0 / (x1 * x1);
            h(1, 1) += 1.0 / (x2 * x2);
            *hess = h;
        }
        return -std::log(psi) - std::log(x1) - std::log(x2);
    }
    }
    return 0.0;
}

// Smallest shift along e that puts s + shift*e in the cone interior (may be negative).
double interior_shift(const Block &blk, const Eigen::VectorXd &s)
{
    const auto n = s.size();
    switch (blk.kind)
    {
    case ConeKind::Nonnegative:
        return -s[0];
    case ConeKind::Quadratic:
        return s.tail(n - 1).norm() - s[0];
    case ConeKind::Rotated:
    {
        const double u = s[0], v = s[1], w2 = s.tail(n - 2).squaredNorm();
        const double root = 0.5 * (-(u + v) + std::sqrt((u - v) * (u - v) + 2.0 * w2));
        return std::max({root, -u, -v});
    }
    case ConeKind::Exponential:
    {
        auto inside = [&](double shift) { return in_interior(blk.kind, s + shift * blk.e); };
        double lo = -std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2]), 1.0});
        if (inside(lo))
            return lo;
        double hi = 1.0;
        while (!inside(hi))
        {
            hi *= 2.0;
            if (hi > 1e30)
                return hi;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (inside(mid) ? hi : lo) = mid;
        }
        return hi;
    }
    }
    return 0.0;
}

// Barrier problem  minimize t*c'x + sum_b F_b(A_b x + b_b) + prox/2*||x - anchor||^2  s.t.  E x = f.
class BarrierSolver
{
public:
    BarrierSolver(int n, std::vector<Block> blocks, const Eigen::MatrixXd &eq) : n_(n), blocks_(std::move(blocks))
    {
        nu_ = 0.0;
        for (const auto &b : blocks_)
            nu_ += b.nu();
        if (eq.rows() == 0)
        {
            null_ = Eigen::MatrixXd::Identity(n_, n_);
        }
        else
        {
            Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(eq.transpose());
            const auto rank = qr.rank();
            const Eigen::MatrixXd Q = qr.matrixQ();
            null_ = Q.rightCols(n_ - rank);
        }
    }

    double nu() const { return nu_; }
    const std::vector<Block> &blocks() const { return blocks_; }

    Eigen::VectorXd slack(const Block &blk, const Eigen::VectorXd &x) const
    {
        Eigen::VectorXd xl(blk.vars.size());
        for (std::size_t j = 0; j < blk.vars.size(); ++j)
            xl[static_cast<Eigen::Index>(j)] = x[blk.vars[j]];
        return blk.A * xl + blk.b;
    }

    bool feasible(const Eigen::VectorXd &x) const
    {
        for (const auto &blk : blocks_)
            if (!in_interior(blk.kind, slack(blk, x)))
                return false;
        return true;
    }

    double value(const Eigen::VectorXd &x, const Eigen::VectorXd &c, double t) const
    {
        double v = t * c.dot(x);
        for (const auto &blk : blocks_)
            v += barrier(blk.kind, slack(blk, x), nullptr, nullptr);
        if (prox_ > 0.0)
            v += 0.5 * prox_ * (x - anchor_).squaredNorm();
        return v;
    }

    void set_prox(double weight, Eigen::VectorXd anchor)
    {
        prox_ = weight;
        anchor_ = std::move(anchor);
    }

    // Gradient and Hessian of t*c'x + barrier + prox at x.
    void assemble(const Eigen::VectorXd &x, const Eigen::VectorXd &c, double t, Eigen::VectorXd &g,
                  Eigen::MatrixXd &H) const
    {
        H.setZero(n_, n_);
        g = t * c;
        for (const auto &blk : blocks_)
        {
            const Eigen::VectorXd s = slack(blk, x);
            if (blk.kind == ConeKind::Nonnegative)
            {
                // Rank-one update, the common case.
                const double inv = 1.0 / s[0];
                const auto row = blk.A.row(0);
                for (std::size_t a = 0; a < blk.vars.size(); ++a)
                {
                    const double ra = row[static_cast<Eigen::Index>(a)];
                    g[blk.vars[a]] -= inv * ra;
                    for (std::size_t b = 0; b < blk.vars.size(); ++b)
                        H(blk.vars[a], blk.vars[b]) += inv * inv * ra * row[static_cast<Eigen::Index>(b)];
                }
                continue;
            }
            const int d = blk.dim();
            Eigen::VectorXd bg(d);
            Eigen::MatrixXd bh(d, d);
            barrier(blk.kind, s, &bg, &bh);
            const Eigen::VectorXd gl = blk.A.transpose() * bg;
            const Eigen::MatrixXd hl = blk.A.transpose() * bh * blk.A;
            for (std::size_t a = 0; a < blk.vars.size(); ++a)
            {
                const int ia = blk.vars[a];
                g[ia] += gl[static_cast<Eigen::Index>(a)];
                for (std::size_t b = 0; b < blk.vars.size(); ++b)
                    H(ia, blk.vars[b]) += hl(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
        if (prox_ > 0.0)
        {
            g += prox_ * (x - anchor_);
            H.diagonal().array() += prox_;
        }
        const double reg = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        H.diagonal().array() += reg;
    }

    // Solves the reduced Newton system; returns false when the Hessian is not positive definite.
    bool newton_direction(const Eigen::MatrixXd &H, const Eigen::VectorXd &g, Eigen::VectorXd &dx) const
    {
        if (null_.cols() == n_)
        {
            Eigen::LLT<Eigen::MatrixXd> llt(H);
            if (llt.info() != Eigen::Success)
                return false;
            dx = -llt.solve(g);
        }
        else
        {
            // Newton in the null space of the equality rows keeps E x = f exactly.
            Eigen::MatrixXd Hz = null_.transpose() * H * null_;
            Hz.diagonal().array() += 1e-13 * std::max(1.0, Hz.diagonal().cwiseAbs().maxCoeff());
            Eigen::LLT<Eigen::MatrixXd> llt(Hz);
            if (llt.info() != Eigen::Success)
                return false;
            dx = -null_ * llt.solve(null_.transpose() * g);
        }
        return dx.allFinite();
    }

    // Barrier weight whose central-path gradient best matches the point x.
    double best_t(const Eigen::VectorXd &x, const Eigen::VectorXd &c) const
    {
        Eigen::VectorXd g;
        Eigen::MatrixXd H;
        assemble(x, c, 0.0, g, H);
        Eigen::VectorXd hc, hg;
        if (!newton_direction(H, c, hc) || !newton_direction(H, g, hg))
            return 0.0;
        const double den = c.dot(-hc);
        if (!(den > 0.0))
            return 0.0;
        return c.dot(hg) / den;
    }

    enum class CenterResult
    {
        Converged,
        StepLimit,
        Failed,
        EarlyStop,
    };

    // Damped Newton centering. `stop` lets phase I bail out once the point is good enough.
    template <typename StopFn>
    CenterResult center(Eigen::VectorXd &x, const Eigen::VectorXd &c, double t, int max_steps, int &steps,
                        StopFn &&stop) const
    {
        Eigen::MatrixXd H(n_, n_);
        Eigen::VectorXd g(n_), dx;
        double f0 = value(x, c, t);
        for (int it = 0; it < max_steps; ++it)
        {
            assemble(x, c, t, g, H);
            if (!newton_direction(H, g, dx))
                return CenterResult::Failed;
            ++steps;
            const double slope = g.dot(dx);
            if (-slope * 0.5 <= 1e-8 || slope >= 0.0)
                return CenterResult::Converged;

            double alpha = 1.0;
            Eigen::VectorXd xn = x + dx;
            int guard = 0;
            while (!feasible(xn) && guard++ < 80)
            {
                alpha *= 0.5;
                xn = x + alpha * dx;
            }
            if (guard >= 80)
                return CenterResult::Failed;
            double f1 = value(xn, c, t);
            guard = 0;
            while ((!std::isfinite(f1) || f1 > f0 + 0.01 * alpha * slope) && guard++ < 60)
            {
                alpha *= 0.5;
                xn = x + alpha * dx;
                f1 = value(xn, c, t);
            }
            if (guard >= 60)
                return CenterResult::Converged; // no further decrease available at this precision
            const bool stalled = f0 - f1 <= 1e-14 * std::max(1.0, std::abs(f0));
            x = xn;
            f0 = f1;
            if (stop(x))
                return CenterResult::EarlyStop;
            if (stalled)
                return CenterResult::Converged;
        }
        return CenterResult::StepLimit;
    }

private:
    int n_;
    std::vector<Block> blocks_;
    double nu_;
    Eigen::MatrixXd null_;
    double prox_ = 0.0;
    Eigen::VectorXd anchor_;
};

std::vector<Block> lower_blocks(const ConicProgram &prog, bool with_shift_column)
{
    const int shift_col = prog.n_vars();
    std::vector<Block> out;
    auto build = [&](ConeKind kind, const std::vector<const AffineExpr *> &rows) {
        Block blk;
        blk.kind = kind;
        for (const auto *r : rows)
            for (const auto &[j, a] : r->terms)
                if (std::find(blk.vars.begin(), blk.vars.end(), j) == blk.vars.end())
                    blk.vars.push_back(j);
        if (with_shift_column)
            blk.vars.push_back(shift_col);
        const auto d = static_cast<Eigen::Index>(rows.size());
        blk.A = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(blk.vars.size()));
        blk.b.resize(d);
        blk.e = interior_direction(kind, static_cast<int>(d));
        for (Eigen::Index r = 0; r < d; ++r)
        {
            blk.b[r] = rows[static_cast<std::size_t>(r)]->constant;
            for (const auto &[j, a] : rows[static_cast<std::size_t>(r)]->terms)
            {
                const auto pos = std::find(blk.vars.begin(), blk.vars.end(), j) - blk.vars.begin();
                blk.A(r, pos) += a;
            }
            if (with_shift_column)
                blk.A(r, blk.A.cols() - 1) = blk.e[r];
        }
        out.push_back(std::move(blk));
    };
    for (const auto &c : prog.cones())
    {
        if (c.kind == ConeKind::Nonnegative)
        {
            for (const auto &r : c.rows)
                build(ConeKind::Nonnegative, {&r});
        }
        else
        {
            std::vector<const AffineExpr *> rows;
            for (const auto &r : c.rows)
                rows.push_back(&r);
            build(c.kind, rows);
        }
    }
    return out;
}

void dense_equalities(const ConicProgram &prog, int n_cols, Eigen::MatrixXd &E, Eigen::VectorXd &f)
{
    const auto p = static_cast<Eigen::Index>(prog.equalities().size());
    E = Eigen::MatrixXd::Zero(p, n_cols);
    f.resize(p);
    for (Eigen::Index i = 0; i < p; ++i)
    {
        const auto &row = prog.equalities()[static_cast<std::size_t>(i)].row;
        for (const auto &[j, a] : row.terms)
            E(i, j) += a;
        f[i] = -row.constant;
    }
}

double max_residual(const ConicProgram &prog, const Eigen::VectorXd &x)
{
    double worst = 0.0;
    for (const auto &e : prog.equalities())
    {
        double mag = std::abs(e.row.constant);
        for (const auto &[j, a] : e.row.terms)
            mag += std::abs(a * x[j]);
        worst = std::max(worst, std::abs(e.row.eval(x)) / std::max(1.0, mag));
    }
    for (const auto &c : prog.cones())
    {
        Eigen::VectorXd s(c.rows.size());
        for (std::size_t r = 0; r < c.rows.size(); ++r)
            s[static_cast<Eigen::Index>(r)] = c.rows[r].eval(x);
        worst = std::max(worst, cone_violation(c.kind, s));
    }
    return worst;
}

} // namespace

ConicSolution solve(const ConicProgram &prog, const SolverSettings &settings, const Eigen::VectorXd *start)
{
    prog.validate();
    const int n = prog.n_vars();
    ConicSolution sol;
    sol.primal = Eigen::VectorXd::Zero(n);

    if (n == 0)
    {
        sol.status = prog.cones().empty() && prog.equalities().empty() ? SolveStatus::Optimal
                                                                        : SolveStatus::Infeasible;
        if (sol.status == SolveStatus::Optimal)
            sol.objective_value = prog.objective_constant();
        return sol;
    }

    Eigen::MatrixXd E;
    Eigen::VectorXd f;
    dense_equalities(prog, n, E, f);

    // Project the hint onto the equality manifold.
    Eigen::VectorXd x = (start && start->size() == n) ? *start : Eigen::VectorXd::Zero(n);
    if (E.rows() > 0)
    {
        const Eigen::VectorXd r = E * x - f;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(E);
        x -= cod.solve(r);
        const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
        if ((E * x - f).cwiseAbs().maxCoeff() > 1e-9 * scale)
        {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
    }

    // Phase I: minimize a common shift s along interior directions until s < 0.
    {
        auto blocks = lower_blocks(prog, true);
        double need = -std::numeric_limits<double>::infinity();
        bool interior = true;
        for (const auto &blk : blocks)
        {
            Eigen::VectorXd xl(blk.vars.size() - 1);
            for (std::size_t j = 0; j + 1 < blk.vars.size(); ++j)
                xl[static_cast<Eigen::Index>(j)] = x[blk.vars[j]];
            const Eigen::VectorXd s = blk.A.leftCols(blk.A.cols() - 1) * xl + blk.b;
            need = std::max(need, interior_shift(blk, s));
            interior = interior && in_interior(blk.kind, s);
        }
        if (!interior)
        {
            const double s0 = (std::isfinite(need) ? need : 0.0) + 1.0 + 0.1 * std::abs(std::isfinite(need) ? need : 0.0);
            Eigen::MatrixXd E1 = Eigen::MatrixXd::Zero(E.rows(), n + 1);
            E1.leftCols(n) = E;
            BarrierSolver phase1(n + 1, std::move(blocks), E1);
            Eigen::VectorXd z(n + 1);
            z << x, s0;
            Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + 1);
            c1[n] = 1.0;
            phase1.set_prox(1e-8, z);
            double t = 1.0;
            bool found = false;
            for (int outer = 0; outer < settings.max_outer && !found; ++outer)
            {
                auto res = phase1.center(z, c1, t, settings.max_newton_per_center, sol.newton_steps,
                                         [n](const Eigen::VectorXd &v) { return v[n] < 0.0; });
                if (res == BarrierSolver::CenterResult::Failed)
                {
                    sol.status = SolveStatus::NumericalFailure;
                    return sol;
                }
                if (z[n] < 0.0)
                {
                    found = true;
                    break;
                }
                if (phase1.nu() / t < settings.feasibility_tol * 1e-2)
                    break;
                t *= settings.barrier_growth;
            }
            if (!found)
            {
                sol.status = SolveStatus::Infeasible;
                sol.primal = z.head(n);
                return sol;
            }
            x = z.head(n);
        }
    }

    // Phase II.
    BarrierSolver phase2(n, lower_blocks(prog, false), E);
    const Eigen::VectorXd &c = prog.objective();
    if (!phase2.feasible(x))
    {
        sol.status = SolveStatus::NumericalFailure;
        return sol;
    }
    const double nu = std::max(phase2.nu(), 1.0);
    double t = nu / std::max(1.0, std::abs(prog.objective_value(x)));
    const double t_fit = phase2.best_t(x, c);
    if (std::isfinite(t_fit) && t_fit > t)
        t = std::min(t_fit, 1e6 * t);
    bool converged = false;
    for (int outer = 0; outer < settings.max_outer; ++outer)
    {
        auto res = phase2.center(x, c, t, settings.max_newton_per_center, sol.newton_steps,
                                 [](const Eigen::VectorXd &) { return false; });
        if (res == BarrierSolver::CenterResult::Failed)
        {
            if (outer == 0)
            {
                sol.status = SolveStatus::NumericalFailure;
                return sol;
            }
            // Loss of precision deep in the path: keep the last centred point.
            converged = nu / t <= 1e3 * settings.relative_gap * std::max(1.0, std::abs(prog.objective_value(x)));
            break;
        }
        if (nu / t <= settings.relative_gap * std::max(1.0, std::abs(prog.objective_value(x))))
        {
            converged = true;
            break;
        }
        t *= settings.barrier_growth;
    }

    sol.primal = x;
    sol.objective_value = prog.objective_value(x);
    sol.max_residual = max_residual(prog, x);
    if (!x.allFinite())
        sol.status = SolveStatus::NumericalFailure;
    else if (!converged)
        sol.status = SolveStatus::IterationLimit;
    else if (sol.max_residual > settings.feasibility_tol)
        sol.status = SolveStatus::NumericalFailure;
    else
        sol.status = SolveStatus::Optimal;
    return sol;
}

} // namespace uavqoe::conic
