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

#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace coref::log {

enum class Level { kDebug, kInfo, kWarning, kError };

using Sink = std::function<void(Level, std::string_view, const nlohmann::json&)>;

// Default sink writes one JSON object per line to stderr.
void set_sink(Sink sink);
void reset_sink();
void set_min_level(Level level);

void write(Level level, std::string_view msg, nlohmann::json fields = {});

inline void debug(std::string_view msg, nlohmann::json fields = {}) {
  write(Level::kDebug, msg, std::move(fields));
}
inline void info(std::string_view msg, nlohmann::json fields = {}) {
  write(Level::kInfo, msg, std::move(fields));
}
inline void warning(std::string_view msg, nlohmann::json fields = {}) {
  write(Level::kWarning, msg, std::move(fields));
}
inline void error(std::string_view msg, nlohmann::json fields = {}) {
  write(Level::kError, msg, std::move(fields));
}

}  // namespace coref::log
