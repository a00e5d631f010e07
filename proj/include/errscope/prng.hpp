// Copyright 2026 The errscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ERRSCOPE_PRNG_HPP_
#define ERRSCOPE_PRNG_HPP_

#include <cstdint>

namespace errscope {

// Deterministic stream used for typo perturbations. The exact bit sequence is
// a file-format contract: perturbed-prediction files produced outside the
// engine key their rows on texts generated with this stream.
//
//   golden    = 0x9E3779B97F4A7C15
//   mix(z)    : z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//               z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//               return z ^ (z >> 31)
//   init      : s = mix(seed + golden * (id + 1))
//               s = mix(s + golden * (variant + 1))
//   next()    : s += golden; return mix(s)
//   below(n)  : next() % n
//
// All arithmetic is modulo 2^64.
class PerturbationStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr PerturbationStream(std::uint64_t seed, std::uint64_t id, std::uint64_t variant)
      : state_(mix(mix(seed + kGolden * (id + 1)) + kGolden * (variant + 1))) {}

  constexpr std::uint64_t next() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform-ish draw in [0, n); n must be positive.
  constexpr std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace errscope

#endif  // ERRSCOPE_PRNG_HPP_
