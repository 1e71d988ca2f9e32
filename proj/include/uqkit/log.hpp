#pragma once

#include <functional>
#include <string_view>

namespace uqkit {

using WarningHandler = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (default: one line on stderr).
/// Passing an empty handler silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace uqkit
