#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace uavqoe::conic
{

/// Sparse affine expression  sum_j coef_j * x[var_j] + constant.
struct AffineExpr
{
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    AffineExpr() = default;
    explicit AffineExpr(double c) : constant(c) {}

    AffineExpr &add(int var, double coef)
    {
        if (coef != 0.0)
            terms.emplace_back(var, coef);
        return *this;
    }
    double eval(const Eigen::VectorXd &x) const;
};

enum class ConeKind
{
    Nonnegative, // every component >= 0
    Quadratic,   // x1 >= ||x_{2:n}||
    Rotated,     // 2 x1 x2 >= ||x_{3:n}||^2, x1, x2 >= 0
    Exponential, // x1 >= x2 exp(x3 / x2), x1, x2 >= 0 (closure at x2 = 0)
};

const char *to_string(ConeKind kind);

struct ConeConstraint
{
    ConeKind kind;
    std::vector<AffineExpr> rows; // the cone argument, one expression per component
    std::string label;
};

struct EqConstraint
{
    AffineExpr row; // row == 0
    std::string label;
};

/// minimize c'x + c0  s.t.  eq rows == 0,  cone arguments in their cones.
/// Variable bounds are lowered to Nonnegative cones when added.
class ConicProgram
{
public:
    explicit ConicProgram(int n_vars = 0);

    int add_variable(std::string name = {});
    int n_vars() const { return n_vars_; }
    const std::vector<std::string> &var_names() const { return names_; }

    void set_objective(int var, double coef);
    void add_objective_constant(double c) { objective_constant_ += c; }
    const Eigen::VectorXd &objective() const { return objective_; }
    double objective_constant() const { return objective_constant_; }

    void add_equality(AffineExpr row, std::string label = {});
    void add_cone(ConeKind kind, std::vector<AffineExpr> rows, std::string label = {});
    /// expr >= 0
    void add_nonneg(AffineExpr expr, std::string label = {});
    void add_bounds(int var, std::optional<double> lower, std::optional<double> upper);

    const std::vector<EqConstraint> &equalities() const { return eqs_; }
    const std::vector<ConeConstraint> &cones() const { return cones_; }
    std::size_t count_cones(ConeKind kind) const;

    /// Throws std::invalid_argument on dimension or index errors.
    void validate() const;

    double objective_value(const Eigen::VectorXd &x) const;

private:
    int n_vars_;
    std::vector<std::string> names_;
    Eigen::VectorXd objective_;
    double objective_constant_ = 0.0;
    std::vector<EqConstraint> eqs_;
    std::vector<ConeConstraint> cones_;
};

enum class SolveStatus
{
    Optimal,
    Infeasible,
    IterationLimit,
    NumericalFailure,
};

const char *to_string(SolveStatus status);

struct ConicSolution
{
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd primal;
    double objective_value = 0.0;
    double max_residual = 0.0;
    int newton_steps = 0;
};

struct SolverSettings
{
    double feasibility_tol = 1e-8;
    double relative_gap = 1e-7;
    double barrier_growth = 50.0;
    int max_newton_per_center = 200;
    int max_outer = 100;
};

/// Signed violation of each constraint at `x`: equalities first (|row|), then one entry per cone
/// (<= 0 iff the cone argument is a member). Throws std::invalid_argument on dimension mismatch.
Eigen::VectorXd residuals(const ConicProgram &prog, const Eigen::VectorXd &x);

/// Signed distance-to-satisfaction of a single cone argument.
double cone_violation(ConeKind kind, const Eigen::VectorXd &s);

/// Interior-point solve. `start` (optional) is a hint; it needs no feasibility.
ConicSolution solve(const ConicProgram &prog, const SolverSettings &settings = {},
                    const Eigen::VectorXd *start = nullptr);

inline ConicSolution solve(const ConicProgram &prog, double tol)
{
    SolverSettings s;
    s.feasibility_tol = tol;
    return solve(prog, s);
}

/// Plain-text conic benchmark format (CBF version 3) dump.
void write_cbf(const ConicProgram &prog, std::ostream &out);

} // namespace uavqoe::conic
