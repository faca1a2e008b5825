#include "uavqoe/conic.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace uavqoe::conic
{

namespace
{

const char *cbf_domain(ConeKind kind)
{
    switch (kind)
    {
    case ConeKind::Nonnegative: return "L+";
    case ConeKind::Quadratic: return "Q";
    case ConeKind::Rotated: return "QR";
    case ConeKind::Exponential: return "EXP";
    }
    return "F";
}

} // namespace

// Exponential cones are written in (x1, x2, x3) order with x1 >= x2 exp(x3 / x2).
void write_cbf(const ConicProgram &prog, std::ostream &out)
{
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << "# uavqoe conic program dump\n";
    out << "VER\n3\n\n";
    out << "OBJSENSE\nMIN\n\n";
    out << "VAR\n" << prog.n_vars() << " 1\nF " << prog.n_vars() << "\n\n";

    std::size_t n_rows = prog.equalities().size();
    std::size_t n_blocks = prog.equalities().empty() ? 0 : 1;
    for (const auto &c : prog.cones())
    {
        n_rows += c.rows.size();
        ++n_blocks;
    }
    out << "CON\n" << n_rows << ' ' << n_blocks << '\n';
    if (!prog.equalities().empty())
        out << "L= " << prog.equalities().size() << '\n';
    for (const auto &c : prog.cones())
        out << cbf_domain(c.kind) << ' ' << c.rows.size() << '\n';
    out << '\n';

    std::ostringstream obja;
    obja.precision(17);
    std::size_t obj_nnz = 0;
    for (int j = 0; j < prog.n_vars(); ++j)
        if (prog.objective()[j] != 0.0)
        {
            obja << j << ' ' << prog.objective()[j] << '\n';
            ++obj_nnz;
        }
    out << "OBJACOORD\n" << obj_nnz << '\n' << obja.str() << '\n';
    if (prog.objective_constant() != 0.0)
        out << "OBJBCOORD\n" << prog.objective_constant() << "\n\n";

    std::ostringstream acoord, bcoord;
    acoord.precision(17);
    bcoord.precision(17);
    std::size_t a_nnz = 0, b_nnz = 0, row = 0;
    auto emit = [&](const AffineExpr &e) {
        for (const auto &[j, a] : e.terms)
        {
            acoord << row << ' ' << j << ' ' << a << '\n';
            ++a_nnz;
        }
        if (e.constant != 0.0)
        {
            bcoord << row << ' ' << e.constant << '\n';
            ++b_nnz;
        }
        ++row;
    };
    for (const auto &e : prog.equalities())
        emit(e.row);
    for (const auto &c : prog.cones())
        for (const auto &r : c.rows)
            emit(r);
    out << "ACOORD\n" << a_nnz << '\n' << acoord.str() << '\n';
    out << "BCOORD\n" << b_nnz << '\n' << bcoord.str();
    out.precision(old_precision);
}

} // namespace uavqoe::conic
