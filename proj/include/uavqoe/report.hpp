#pragma once

#include "uavqoe/runner.hpp"

#include "json.hpp"

#include <vector>

namespace uavqoe
{

/// Every RunSummary field plus per-run solver statistics.
nlohmann::json run_to_json(const RunResult &run);
nlohmann::json means_to_json(const MetricMeans &m);

/// {"config": echo, "policies": [...], "ee_improvement_percent": {...}} with one block per policy.
nlohmann::json experiment_to_json(const ExperimentResult &res, const WorldConfig &cfg);
nlohmann::json pareto_to_json(const std::vector<ParetoPoint> &points);

} // namespace uavqoe
