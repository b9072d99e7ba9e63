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

#include "core.hpp"

#include "doctest.h"
#include "rng.hpp"
#include "test_util.hpp"

using namespace sdbe;
using sdbe::testing::throws_code;

TEST_CASE("normalize_l2 produces unit vectors and is idempotent") {
  SplitMix64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Vector v(5);
    for (Index i = 0; i < v.size(); ++i) v[i] = 10.0 * rng.next_gaussian();
    const Vector u = normalize_l2(v);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
    // Direction is preserved.
    CHECK((u * v.norm() - v).norm() <= 1e-12 * v.norm());
    // Idempotent up to roundoff.
    CHECK((normalize_l2(u) - u).norm() <= 1e-15);
  }
}

TEST_CASE("normalize_l2 is scale invariant") {
  Vector v(3);
  v << 3.0, -4.0, 12.0;
  const Vector a = normalize_l2(v);
  const Vector b = normalize_l2(Vector(1e200 * v));
  const Vector c = normalize_l2(Vector(1e-200 * v));
  CHECK((a - b).norm() <= 1e-15);
  CHECK((a - c).norm() <= 1e-15);
}

TEST_CASE("normalize_l2 rejects zero and empty input") {
  CHECK(throws_code(ErrorCode::ZeroVector,
                    [] { normalize_l2(Vector::Zero(4)); }));
  CHECK(throws_code(ErrorCode::EmptyInput, [] { normalize_l2(Vector()); }));
}

TEST_CASE("oev returns the difference and keeps the pattern id") {
  Vector occluded(3), clean(3);
  occluded << 1.0, 2.0, 3.0;
  clean << 0.5, 2.0, -1.0;
  const OcclusionErrorVector e = oev(occluded, clean, 7);
  Vector expected(3);
  expected << 0.5, 0.0, 4.0;
  CHECK(e.values == expected);
  CHECK(e.pattern_id == 7);

  // Anti-symmetry: swapping the pair negates the error.
  CHECK(Vector(oev(clean, occluded).values + e.values).norm() == 0.0);
}

TEST_CASE("oev validates shapes") {
  CHECK(throws_code(ErrorCode::EmptyInput, [] { oev(Vector(), Vector()); }));
  CHECK(throws_code(ErrorCode::DimensionMismatch,
                    [] { oev(Vector::Zero(3), Vector::Zero(4)); }));
}

TEST_CASE("occlusion_error_stats hand-checked values") {
  Vector v0(4), v(4);
  v0 << 1.0, 0.0, 2.0, -2.0;  // |v0| = 3
  v = v0;
  v[0] += 0.6;
  v[2] -= 0.8;  // |v - v0| = 1.0, two entries touched
  const ErrorStats stats = occlusion_error_stats(v, v0);
  CHECK(stats.rel_l2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(stats.rel_l0 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(stats.dim == 4);
}

TEST_CASE("occlusion_error_stats compares tau strictly") {
  Vector v0 = Vector::Zero(2);
  v0[0] = 1.0;
  Vector v = v0;
  v[1] = 0.25;
  // Entry difference exactly equal to tau does not count.
  CHECK(occlusion_error_stats(v, v0, 0.25).rel_l0 == 0.0);
  CHECK(occlusion_error_stats(v, v0, 0.2499).rel_l0 == 0.5);
  // tau = 0 counts any nonzero difference but never exact zeros.
  CHECK(occlusion_error_stats(v, v0, 0.0).rel_l0 == 0.5);
  CHECK(occlusion_error_stats(v0, v0, 0.0).rel_l0 == 0.0);
}

TEST_CASE("occlusion_error_stats validates input") {
  CHECK(throws_code(ErrorCode::EmptyInput,
                    [] { occlusion_error_stats(Vector(), Vector()); }));
  CHECK(throws_code(ErrorCode::DimensionMismatch, [] {
    occlusion_error_stats(Vector::Zero(2), Vector::Zero(3));
  }));
  CHECK(throws_code(ErrorCode::ZeroVector, [] {
    occlusion_error_stats(Vector::Ones(2), Vector::Zero(2));
  }));
  CHECK(throws_code(ErrorCode::InvalidArgument, [] {
    occlusion_error_stats(Vector::Ones(2), Vector::Ones(2), -1.0);
  }));
}

TEST_CASE("counter rng reproduces the published stream") {
  // Reference SplitMix64 outputs for seed 0 (public test vector).
  SplitMix64 rng(0);
  CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next_u64() == 0x06C45D188009454FULL);
}

TEST_CASE("rng substreams differ and are reproducible") {
  SplitMix64 a = substream(42, 1);
  SplitMix64 b = substream(42, 2);
  SplitMix64 a2 = substream(42, 1);
  const std::uint64_t first_a = a.next_u64();
  CHECK(first_a != b.next_u64());
  CHECK(first_a == a2.next_u64());
}

TEST_CASE("rng unit draws stay in range and gaussians have sane moments") {
  SplitMix64 rng(123);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.next_gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}
