#include "uavqoe/slot_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uavqoe
{

std::string format_sig9(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    int decimals = 8;
    if (x != 0.0)
    {
        const int exponent = static_cast<int>(std::floor(std::log10(std::abs(x))));
        decimals = std::max(0, 8 - exponent);
    }
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    std::string s(buf);
    // Rounding can carry into a new leading digit; drop the surplus decimal.
    if (decimals > 0)
    {
        std::size_t digits = 0;
        bool leading = true;
        for (char c : s)
            if (c >= '0' && c <= '9')
            {
                if (leading && c == '0')
                    continue;
                leading = false;
                ++digits;
            }
        if (digits > 9 && x != 0.0)
        {
            std::snprintf(buf, sizeof buf, "%.*f", decimals - 1, x);
            s = buf;
        }
    }
    return s;
}

void write_slot_rows(std::ostream &out, const RunResult &run)
{
    if (run.records.empty())
        throw std::invalid_argument("write_slot_rows: run has no records");
    const std::string alg = to_string(run.kind);
    const std::string seed = std::to_string(run.seed);
    for (const auto &r : run.records)
    {
        const std::string head = std::to_string(r.t) + "," + alg + "," + seed + ",";
        const std::string phi = format_sig9(r.phi_obj);
        for (std::size_t i = 0; i < r.rates.size(); ++i)
            out << head << i << ",subscriber," << format_sig9(r.rates[i]) << ',' << format_sig9(r.latencies[i])
                << ",," << r.assoc.uav_of[i] << ',' << format_sig9(r.queues.X[i]) << ','
                << format_sig9(r.queues.Z[i]) << ",," << phi << '\n';
        for (std::size_t k = 0; k < r.powers.size(); ++k)
            out << head << k << ",uav,,," << format_sig9(r.powers[k]) << ",,,," << format_sig9(r.queues.Y[k]) << ','
                << phi << '\n';
    }
}

void write_slot_csv(const std::string &path, const std::vector<const RunResult *> &runs)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << kSlotCsvHeader << '\n';
    for (const RunResult *r : runs)
        write_slot_rows(out, *r);
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace uavqoe
