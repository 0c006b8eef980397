// Copyright 2026 The Coref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coref/log.hpp"

#include <iostream>
#include <mutex>

namespace coref::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

const char* level_name(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarning: return "warning";
    case Level::kError: return "error";
  }
  return "info";
}

void stderr_sink(Level level, std::string_view msg, const nlohmann::json& fields) {
  nlohmann::json line = {{"level", level_name(level)}, {"msg", std::string(msg)}};
  if (fields.is_object()) {
    for (auto& [k, v] : fields.items()) line[k] = v;
  }
  std::cerr << line.dump() << '\n';
}

Sink& current_sink() {
  static Sink sink = stderr_sink;
  return sink;
}

Level& min_level() {
  static Level level = Level::kInfo;
  return level;
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void reset_sink() { set_sink(stderr_sink); }

void set_min_level(Level level) {
  std::lock_guard lock(sink_mutex());
  min_level() = level;
}

void write(Level level, std::string_view msg, nlohmann::json fields) {
  std::lock_guard lock(sink_mutex());
  if (level < min_level()) return;
  current_sink()(level, msg, fields);
}

}  // namespace coref::log
