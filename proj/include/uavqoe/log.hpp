#pragma once

#include <string>

namespace uavqoe
{

/// Routes diagnostics to stderr at the level named by UQN_LOG (error, warn, info, debug; default info).
/// Returns false when UQN_LOG holds an unrecognized value, which falls back to info.
bool init_logging();
bool init_logging(const std::string &level);

} // namespace uavqoe
