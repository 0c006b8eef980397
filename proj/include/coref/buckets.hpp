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

namespace coref {

inline constexpr int kNumDistanceBuckets = 9;
inline constexpr int kNumClusterSizeBuckets = 6;

// {1, 2, 3, 4, 5-7, 8-15, 16-31, 32-63, 64+} -> 0..8. Values below 1
// land in the first bucket. Shared by span widths and distances.
constexpr int distance_bucket(long d) {
  if (d <= 1) return 0;
  if (d <= 4) return static_cast<int>(d - 1);
  if (d <= 7) return 4;
  if (d <= 15) return 5;
  if (d <= 31) return 6;
  if (d <= 63) return 7;
  return 8;
}

// {1, 2, 3, 4, 5-7, 8+} -> 0..5.
constexpr int cluster_size_bucket(long n) {
  if (n <= 1) return 0;
  if (n <= 4) return static_cast<int>(n - 1);
  if (n <= 7) return 4;
  return 5;
}

}  // namespace coref
