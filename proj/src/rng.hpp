/*
  Copyright (c) SDBE project contributors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sdbe {

/* SplitMix64 (Steele, Lea, Flood; public domain reference constants).
   A 64-bit counter generator: state advances by the golden-gamma Weyl
   increment and each output is a finalizer of the counter value, so the
   stream is reproducible from (seed, draw index) in any language.

   Constants:
     increment  0x9E3779B97F4A7C15
     mix 1      0xBF58476D1CE4E5B9  (xor-shift 30 before, 27 after)
     mix 2      0x94D049BB133111EB  (final xor-shift 31)
*/
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1): the top 53 bits scaled by 2^-53.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two uniforms; the log argument is
  // shifted into (0, 1] so it never sees an exact zero.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Independent deterministic substream for a (seed, tag) pair: the tag is
// mixed through the SplitMix64 finalizer before xor-ing with the seed, so
// distinct tags give uncorrelated starting states.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = tag + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return SplitMix64(seed ^ z);
}

}  // namespace sdbe
