#include "uqkit/log.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace uqkit {
namespace {

std::mutex& handler_mutex() {
  static std::mutex mutex;
  return mutex;
}

WarningHandler& current_handler() {
  static WarningHandler handler = [](std::string_view message) {
    std::fprintf(stderr, "uqkit: warning: %.*s\n", static_cast<int>(message.size()),
                 message.data());
  };
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(handler_mutex());
  return std::exchange(current_handler(), std::move(handler));
}

void warn(std::string_view message) {
  std::lock_guard<std::mutex> lock(handler_mutex());
  if (current_handler()) current_handler()(message);
}

}  // namespace uqkit
