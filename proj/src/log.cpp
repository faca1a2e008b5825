#include "uavqoe/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

namespace uavqoe
{

bool init_logging(const std::string &level)
{
    auto logger = spdlog::get("uavqoe");
    if (!logger)
        logger = spdlog::stderr_color_mt("uavqoe");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    bool known = true;
    if (level == "error")
        spdlog::set_level(spdlog::level::err);
    else if (level == "warn")
        spdlog::set_level(spdlog::level::warn);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
    {
        known = level.empty() || level == "info";
        spdlog::set_level(spdlog::level::info);
    }
    return known;
}

bool init_logging()
{
    const char *env = std::getenv("UQN_LOG");
    const bool ok = init_logging(env ? env : "");
    if (!ok)
        spdlog::warn("UQN_LOG='{}' not recognized, using info", env);
    return ok;
}

} // namespace uavqoe
