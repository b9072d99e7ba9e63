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

#include "synth.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "error.hpp"
#include "rng.hpp"

namespace sdbe {

namespace {

// Substream tags. Each consumer owns a tag so adding draws to one stage never
// shifts another stage's values. Tag 1 is reserved.
constexpr std::uint64_t kTagBank = 0;
constexpr std::uint64_t kTagTrain = 2;
constexpr std::uint64_t kTagQuery = 3;
constexpr std::uint64_t kTagPairs = 4;
constexpr std::uint64_t kTagQueryEps = 5;
constexpr std::uint64_t kTagPairEps = 6;
constexpr std::uint64_t kTagQueryNoise = 7;
constexpr std::uint64_t kTagPairNoise = 8;

// Default-world geometry. Classes are coded two ways at once: an activation
// level along the shared constant direction (equally spaced per class, the
// dominant separator), and a faint per-class anchor direction. The first
// column of every pattern basis leaks onto the constant direction
// (kPatternLeak), so an occlusion shifts the level a raw nearest-neighbor
// rule keys on; the per-class anchors are strong enough to separate clean
// queries but deliberately too weak to pin an occluded one, so a shift of a
// few level spacings lands nearer to another class. Pearson correlation is
// computed over centered entries, which removes constant-direction content
// exactly, so the level coupling stays invisible to the cross-correlation
// diagnostic and the spans stay linearly independent. kSharedMix puts most
// of the anchors' visible mass on a common direction: that keeps the
// per-class components faint, and it makes a planted shared direction
// correlate with every class, not just one, for the overlap diagnostic.
constexpr double kAnchorMix = 0.90;    // constant-direction weight in anchors
constexpr double kSharedMix = 0.94;    // shared visible fraction of anchors
constexpr double kPatternLeak = 0.95;  // constant-direction weight in patterns
constexpr double kLevelLo = 0.80;      // lowest class activation level
constexpr double kLevelHi = 2.00;      // highest class activation level
constexpr double kAnchorJitter = 0.03; // relative per-sample level jitter
constexpr double kScatter = 0.15;      // within-class spread off the anchor
constexpr double kNonnegShift = 1.0;   // entry shift of kNonnegShift/sqrt(m)

constexpr double kRankTol = 1e-8;

// Modified Gram-Schmidt with one reorthogonalization pass; columns come out
// orthonormal to ~1e-14 even for nearly dependent random draws.
void orthonormalize_columns(Matrix& q) {
  for (Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      }
    }
    const double norm = q.col(j).norm();
    if (norm < kRankTol) {
      fail(ErrorCode::NumericalFailure,
           "direction bank draw is rank deficient");
    }
    q.col(j) /= norm;
  }
}

Vector gaussian_vector(SplitMix64& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  return v;
}

void validate(const WorldSpec& s) {
  if (s.m < 1) fail(ErrorCode::InvalidArgument, "feature dimension must be positive");
  if (s.k_classes < 1) fail(ErrorCode::InvalidArgument, "need at least one class");
  if (s.class_dim < 1) fail(ErrorCode::InvalidArgument, "class_dim must be positive");
  if (s.k_patterns < 1) fail(ErrorCode::InvalidArgument, "need at least one pattern");
  if (s.pattern_dim < 1) fail(ErrorCode::InvalidArgument, "pattern_dim must be positive");
  if (s.train_per_class < 1) {
    fail(ErrorCode::InvalidArgument, "train_per_class must be positive");
  }
  if (s.queries_per_class < 0 || s.pairs_per_pattern < 0) {
    fail(ErrorCode::InvalidArgument, "sample counts must be nonnegative");
  }
  if (s.occlusion_energy < 0.0) {
    fail(ErrorCode::InvalidArgument, "occlusion_energy must be nonnegative");
  }
  if (s.noise_sigma < 0.0) {
    fail(ErrorCode::InvalidArgument, "noise_sigma must be nonnegative");
  }
  if (!(s.overlap >= 0.0 && s.overlap <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "overlap must lie in [0, 1]");
  }
  // The default world spends two extra directions: the constant direction
  // and the shared anchor component.
  const Index extra = s.idealized ? 0 : 2;
  const Index budget =
      s.k_classes * s.class_dim + s.k_patterns * s.pattern_dim + extra;
  if (budget > s.m) {
    fail(ErrorCode::InfeasibleSpec,
         "subspace dimensions exceed the ambient feature dimension");
  }
}

}  // namespace

SynthWorld generate(const WorldSpec& spec) {
  validate(spec);

  SynthWorld w;
  w.spec = spec;
  const Index m = spec.m;
  const Index ka = spec.k_classes;
  const Index kb = spec.k_patterns;
  const Index da = spec.class_dim;
  const Index db = spec.pattern_dim;

  // Direction bank: in the default world the first column is pinned to the
  // normalized all-ones direction, the second to the shared anchor
  // component, and everything else is orthonormalized against them; the
  // idealized world is plain orthonormalized Gaussian blocks.
  SplitMix64 bank_rng = substream(spec.seed, kTagBank);
  const Index n_random =
      ka * da + kb * db + (spec.idealized ? 0 : 1);  // +1: shared direction
  const Index bank_cols = n_random + (spec.idealized ? 0 : 1);
  Matrix bank(m, bank_cols);
  Index col = 0;
  if (!spec.idealized) {
    bank.col(col++) = Vector::Constant(m, 1.0 / std::sqrt(double(m)));
  }
  for (Index j = 0; j < n_random; ++j) {
    bank.col(col++) = gaussian_vector(bank_rng, m);
  }
  orthonormalize_columns(bank);

  const Vector onedir = spec.idealized ? Vector() : Vector(bank.col(0));
  const Vector shared_dir = spec.idealized ? Vector() : Vector(bank.col(1));
  const Index class_block = spec.idealized ? 0 : 2;
  const Index pattern_block = class_block + ka * da;

  w.class_bases.reserve(std::size_t(ka));
  for (Index i = 0; i < ka; ++i) {
    Matrix basis = bank.middleCols(class_block + i * da, da);
    if (!spec.idealized) {
      // Anchor column: constant-direction level carrier plus a visible part
      // split between a shared and a private direction. Unit norm because
      // all three ingredients are orthonormal.
      const double vis = std::sqrt(1.0 - kAnchorMix * kAnchorMix);
      basis.col(0) = kAnchorMix * onedir +
                     vis * std::sqrt(1.0 - kSharedMix * kSharedMix) *
                         basis.col(0) +
                     vis * kSharedMix * shared_dir;
    }
    w.class_bases.push_back(std::move(basis));
  }

  w.pattern_bases.reserve(std::size_t(kb));
  for (Index k = 0; k < kb; ++k) {
    Matrix basis = bank.middleCols(pattern_block + k * db, db);
    if (!spec.idealized) {
      basis.col(0) =
          std::sqrt(1.0 - kPatternLeak * kPatternLeak) * basis.col(0) -
          kPatternLeak * onedir;
    }
    w.pattern_bases.push_back(std::move(basis));
  }

  if (spec.overlap > 0.0) {
    // Diagnostic knob: slide every pattern direction toward the first class
    // anchor. At 1.0 the pattern spans collapse onto a direction the class
    // span contains exactly.
    const Vector shared = w.class_bases[0].col(0);
    for (auto& basis : w.pattern_bases) {
      for (Index j = 0; j < basis.cols(); ++j) {
        Vector mixed =
            (1.0 - spec.overlap) * basis.col(j) + spec.overlap * shared;
        const double norm = mixed.norm();
        basis.col(j) = norm > 0.0 ? Vector(mixed / norm) : shared;
      }
    }
  }

  // Equally spaced activation levels, one per class.
  Vector level(ka);
  for (Index i = 0; i < ka; ++i) {
    level[i] = ka == 1 ? kLevelLo
                       : kLevelLo + (kLevelHi - kLevelLo) * double(i) /
                                        double(ka - 1);
  }

  const double shift = kNonnegShift / std::sqrt(double(m));
  const auto finalize_clean = [&](Vector v) {
    if (spec.nonneg_features) {
      v = (v.array() + shift).max(0.0).matrix();
    }
    return v;
  };

  const auto draw_clean = [&](Index cls, SplitMix64& rng) {
    Vector coeff(da);
    if (spec.idealized) {
      for (Index j = 0; j < da; ++j) coeff[j] = rng.next_gaussian();
    } else {
      coeff[0] = level[cls] * (1.0 + kAnchorJitter * rng.next_gaussian());
      for (Index j = 1; j < da; ++j) coeff[j] = kScatter * rng.next_gaussian();
    }
    return Vector(w.class_bases[std::size_t(cls)] * coeff);
  };

  const auto draw_eps = [&](Index pattern, double ref_norm, SplitMix64& rng) {
    Vector d = gaussian_vector(rng, db);
    Vector dir = w.pattern_bases[std::size_t(pattern)] * d;
    if (dir.norm() <= 1e-12) dir = w.pattern_bases[std::size_t(pattern)].col(0);
    return Vector(spec.occlusion_energy * ref_norm / dir.norm() * dir);
  };

  // Training features.
  {
    SplitMix64 rng = substream(spec.seed, kTagTrain);
    const Index n = ka * spec.train_per_class;
    w.train.features.resize(m, n);
    w.train.labels.reserve(std::size_t(n));
    Index c = 0;
    for (Index i = 0; i < ka; ++i) {
      for (Index t = 0; t < spec.train_per_class; ++t) {
        w.train.features.col(c++) = finalize_clean(draw_clean(i, rng));
        w.train.labels.push_back(std::int32_t(i));
      }
    }
  }

  // Queries: clean ground truth plus an occluded observation. Patterns cycle
  // round-robin over the global query index so every pattern is exercised.
  {
    SplitMix64 rng = substream(spec.seed, kTagQuery);
    SplitMix64 eps_rng = substream(spec.seed, kTagQueryEps);
    SplitMix64 noise_rng = substream(spec.seed, kTagQueryNoise);
    const Index n = ka * spec.queries_per_class;
    w.queries_clean.features.resize(m, n);
    w.queries_occluded.features.resize(m, n);
    w.query_eps.resize(m, n);
    w.queries_clean.labels.reserve(std::size_t(n));
    w.query_pattern_ids.reserve(std::size_t(n));
    Index c = 0;
    for (Index i = 0; i < ka; ++i) {
      for (Index t = 0; t < spec.queries_per_class; ++t) {
        const Vector clean = finalize_clean(draw_clean(i, rng));
        const Index pattern = c % kb;
        const Vector eps = spec.occlusion_energy > 0.0
                               ? draw_eps(pattern, clean.norm(), eps_rng)
                               : Vector(Vector::Zero(m));
        Vector occluded = clean + eps;
        if (spec.noise_sigma > 0.0) {
          occluded += spec.noise_sigma * gaussian_vector(noise_rng, m);
        }
        w.queries_clean.features.col(c) = clean;
        w.queries_occluded.features.col(c) = occluded;
        w.query_eps.col(c) = eps;
        w.queries_clean.labels.push_back(std::int32_t(i));
        w.query_pattern_ids.push_back(std::int32_t(pattern));
        ++c;
      }
    }
    w.queries_occluded.labels = w.queries_clean.labels;
  }

  // Occluded/occlusion-free observation pairs for the error dictionary. Both
  // members of a pair carry observation noise; their difference is the
  // occlusion error plus a small noise residual, exactly as in measured data.
  {
    SplitMix64 rng = substream(spec.seed, kTagPairs);
    SplitMix64 eps_rng = substream(spec.seed, kTagPairEps);
    SplitMix64 noise_rng = substream(spec.seed, kTagPairNoise);
    const Index n = kb * spec.pairs_per_pattern;
    w.pairs_free.features.resize(m, n);
    w.pairs_occluded.features.resize(m, n);
    w.pairs_free.labels.reserve(std::size_t(n));
    Index c = 0;
    for (Index k = 0; k < kb; ++k) {
      for (Index t = 0; t < spec.pairs_per_pattern; ++t) {
        const Index cls = Index(rng.next_u64() % std::uint64_t(ka));
        const Vector clean = finalize_clean(draw_clean(cls, rng));
        const Vector eps = spec.occlusion_energy > 0.0
                               ? draw_eps(k, clean.norm(), eps_rng)
                               : Vector(Vector::Zero(m));
        Vector free_obs = clean;
        Vector occ_obs = clean + eps;
        if (spec.noise_sigma > 0.0) {
          free_obs += spec.noise_sigma * gaussian_vector(noise_rng, m);
          occ_obs += spec.noise_sigma * gaussian_vector(noise_rng, m);
        }
        w.pairs_free.features.col(c) = free_obs;
        w.pairs_occluded.features.col(c) = occ_obs;
        w.pairs_free.labels.push_back(std::int32_t(k));
        ++c;
      }
    }
    w.pairs_occluded.labels = w.pairs_free.labels;
  }

  return w;
}

AngleReport subspace_angle_report(const SynthWorld& world) {
  const Index m = world.spec.m;
  Matrix ma(m, world.spec.k_classes * world.spec.class_dim);
  Index col = 0;
  for (const auto& basis : world.class_bases) {
    ma.middleCols(col, basis.cols()) = basis;
    col += basis.cols();
  }
  Matrix mb(m, world.spec.k_patterns * world.spec.pattern_dim);
  col = 0;
  for (const auto& basis : world.pattern_bases) {
    mb.middleCols(col, basis.cols()) = basis;
    col += basis.cols();
  }

  // Rank-revealing QR tolerates the deliberately degenerate overlap=1 case.
  Eigen::ColPivHouseholderQR<Matrix> qra(ma);
  Eigen::ColPivHouseholderQR<Matrix> qrb(mb);
  qra.setThreshold(1e-10);
  qrb.setThreshold(1e-10);
  const Index ra = qra.rank();
  const Index rb = qrb.rank();
  const Matrix qa = Matrix(qra.householderQ() * Matrix::Identity(m, ra));
  const Matrix qb = Matrix(qrb.householderQ() * Matrix::Identity(m, rb));

  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  const Vector sv = svd.singularValues();

  AngleReport report;
  report.count = sv.size();
  if (report.count == 0) return report;
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    const double c = std::clamp(sv[i], 0.0, 1.0);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c;
  }
  report.min_cosine = lo;
  report.max_cosine = hi;
  report.mean_cosine = sum / double(report.count);
  return report;
}

}  // namespace sdbe
