#pragma once

#include "uavqoe/runner.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace uavqoe
{

inline constexpr const char *kSlotCsvHeader =
    "t,algorithm,seed,i_or_k,kind,rate_bpshz,latency_s,power_mw,assoc_uav,qX,qZ,qY,phi_obj";

/// Fixed-point decimal with 9 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_sig9(double x);

/// Rows ordered by slot, then kind (subscriber before uav), then id. Fields that do not apply to a
/// row's kind are left empty. Throws std::invalid_argument on a run without records.
void write_slot_rows(std::ostream &out, const RunResult &run);
/// Header plus the rows of every run, in the given order. Throws std::runtime_error naming the path
/// on I/O failure.
void write_slot_csv(const std::string &path, const std::vector<const RunResult *> &runs);

} // namespace uavqoe
