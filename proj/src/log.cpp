#include "xrai/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace xrai::log {

namespace {
std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;
}  // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

void info(std::string_view message) {
  if (g_level < Level::info) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[xrai] " << message << '\n';
}

void warn(std::string_view message) {
  if (g_level < Level::warn) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[xrai] warning: " << message << '\n';
}

}  // namespace xrai::log
