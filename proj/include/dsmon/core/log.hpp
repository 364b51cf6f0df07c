#pragma once

#include <functional>
#include <string>

namespace dsmon::log {

using Sink = std::function<void(const std::string&)>;

// Warnings go to stderr unless a sink is installed. Thread-safe.
void warn(const std::string& message);
void set_sink(Sink sink);
void reset_sink();

}  // namespace dsmon::log
