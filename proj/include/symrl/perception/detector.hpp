#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "symrl/gridworld/env.hpp"
#include "symrl/gridworld/shapes.hpp"
#include "symrl/gridworld/types.hpp"
#include "symrl/numcore/tensor.hpp"

namespace symrl::percept {

inline constexpr int kNumChannels = 4;  // circle, square, cross, agent
inline constexpr int kAgentChannel = 3;

// 5x5x4 per-cell detection scores in [0,1].
using ObjectMaps = num::Tensor;

struct PatchTemplate {
  std::string predicate;
  gw::ShapeBitmap mask;
};

inline std::array<PatchTemplate, kNumChannels> default_templates() {
  return {PatchTemplate{"circle", gw::kCircleBitmap}, PatchTemplate{"square", gw::kSquareBitmap},
          PatchTemplate{"cross", gw::kCrossBitmap}, PatchTemplate{"agent", gw::kAgentBitmap}};
}

namespace detail {

inline constexpr int kPatchPixels = gw::kPatchSize * gw::kPatchSize;

// Cross-correlations between the shipped shapes reach ~0.78 (circle vs
// square), so raw correlation scores cannot separate types cleanly. The
// calibration threshold maps that residual cross-talk to 0 while an exact
// match stays at 1.
inline constexpr double kCalibration = 0.9;

inline std::array<double, kPatchPixels> zscore_bitmap(const gw::ShapeBitmap& b) {
  std::array<double, kPatchPixels> out{};
  double mean = 0.0;
  for (int i = 0; i < gw::kPatchSize; ++i)
    for (int j = 0; j < gw::kPatchSize; ++j) mean += b[i][j] ? 1.0 : 0.0;
  mean /= kPatchPixels;
  double var = 0.0;
  for (int i = 0; i < gw::kPatchSize; ++i) {
    for (int j = 0; j < gw::kPatchSize; ++j) {
      const double d = (b[i][j] ? 1.0 : 0.0) - mean;
      out[i * gw::kPatchSize + j] = d;
      var += d * d;
    }
  }
  const double sd = std::sqrt(var / kPatchPixels);
  for (auto& v : out) v /= sd;
  return out;
}

inline const std::array<std::array<double, kPatchPixels>, kNumChannels>& zscored_templates() {
  static const std::array<std::array<double, kPatchPixels>, kNumChannels> t = [] {
    const auto tpl = default_templates();
    std::array<std::array<double, kPatchPixels>, kNumChannels> z{};
    for (int k = 0; k < kNumChannels; ++k) z[k] = zscore_bitmap(tpl[k].mask);
    return z;
  }();
  return t;
}

}  // namespace detail

// Splits a 50x50x3 observation into the 25 cell patches, row-major.
inline std::vector<num::Tensor> extract_patches(const gw::Observation& obs) {
  const std::vector<int> want = {gw::kImageSize, gw::kImageSize, 3};
  if (obs.shape() != want) {
    throw std::invalid_argument("extract_patches: expected observation " + num::shape_str(want) +
                                ", got " + num::shape_str(obs.shape()));
  }
  std::vector<num::Tensor> patches;
  patches.reserve(gw::kGridSize * gw::kGridSize);
  for (int pr = 0; pr < gw::kGridSize; ++pr) {
    for (int pc = 0; pc < gw::kGridSize; ++pc) {
      num::Tensor p({gw::kPatchSize, gw::kPatchSize, 3});
      for (int i = 0; i < gw::kPatchSize; ++i) {
        const double* src = obs.data() +
            ((static_cast<std::size_t>(pr * gw::kPatchSize + i) * gw::kImageSize) +
             pc * gw::kPatchSize) * 3;
        std::copy(src, src + gw::kPatchSize * 3, p.data() + static_cast<std::size_t>(i) * gw::kPatchSize * 3);
      }
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

// Luma + per-patch standardization. Uniform patches (sd ~ 0) map to zeros.
//
// Rec.601 luma weights rather than a plain channel mean: the red/blue color
// pairs have equal channel means, which would collapse those renders to a
// constant patch.
inline num::Tensor normalize_patch(const num::Tensor& patch) {
  const std::vector<int> want = {gw::kPatchSize, gw::kPatchSize, 3};
  if (patch.shape() != want) {
    throw std::invalid_argument("normalize_patch: expected patch " + num::shape_str(want) +
                                ", got " + num::shape_str(patch.shape()));
  }
  num::Tensor lum({gw::kPatchSize, gw::kPatchSize});
  double mean = 0.0;
  for (int i = 0; i < detail::kPatchPixels; ++i) {
    const double* px = patch.data() + static_cast<std::size_t>(i) * 3;
    lum[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
    mean += lum[i];
  }
  mean /= detail::kPatchPixels;
  double var = 0.0;
  for (int i = 0; i < detail::kPatchPixels; ++i) {
    lum[i] -= mean;
    var += lum[i] * lum[i];
  }
  const double sd = std::sqrt(var / detail::kPatchPixels);
  if (sd <= 1e-6) {
    std::fill(lum.values().begin(), lum.values().end(), 0.0);
    return lum;
  }
  for (int i = 0; i < detail::kPatchPixels; ++i) lum[i] /= sd;
  return lum;
}

// Normalized cross-correlation against each template, polarity-invariant via
// the absolute value, then calibrated to [0,1].
inline std::array<double, kNumChannels> classify_patch(const num::Tensor& patch) {
  const num::Tensor z = normalize_patch(patch);
  const auto& templates = detail::zscored_templates();
  std::array<double, kNumChannels> scores{};
  for (int k = 0; k < kNumChannels; ++k) {
    double corr = 0.0;
    for (int i = 0; i < detail::kPatchPixels; ++i) corr += z[i] * templates[k][i];
    corr = std::abs(corr / detail::kPatchPixels);
    double s = (corr - detail::kCalibration) / (1.0 - detail::kCalibration);
    if (s < 0.0) s = 0.0;
    if (s > 1.0) s = 1.0;
    scores[k] = s;
  }
  return scores;
}

inline ObjectMaps build_object_maps(const gw::Observation& obs) {
  const auto patches = extract_patches(obs);
  ObjectMaps maps({gw::kGridSize, gw::kGridSize, kNumChannels});
  for (int cell = 0; cell < gw::kGridSize * gw::kGridSize; ++cell) {
    const auto scores = classify_patch(patches[cell]);
    for (int k = 0; k < kNumChannels; ++k) maps[cell * kNumChannels + k] = scores[k];
  }
  return maps;
}

// Nearest-neighbor block replication of an HxWxK map onto a larger grid.
inline num::Tensor upsample_maps(const num::Tensor& maps, int target_h, int target_w) {
  if (maps.rank() != 3) {
    throw std::invalid_argument("upsample_maps: expected rank-3 maps, got " +
                                num::shape_str(maps.shape()));
  }
  const int h = maps.dim(0), w = maps.dim(1), k = maps.dim(2);
  if (target_h <= 0 || target_w <= 0 || target_h % h != 0 || target_w % w != 0) {
    throw std::invalid_argument("upsample_maps: target " + std::to_string(target_h) + "x" +
                                std::to_string(target_w) + " is not a multiple of source " +
                                std::to_string(h) + "x" + std::to_string(w));
  }
  const int fh = target_h / h, fw = target_w / w;
  num::Tensor out({target_h, target_w, k});
  for (int r = 0; r < target_h; ++r) {
    for (int c = 0; c < target_w; ++c) {
      const double* src = maps.data() + (static_cast<std::size_t>(r / fh) * w + c / fw) * k;
      double* dst = out.data() + (static_cast<std::size_t>(r) * target_w + c) * k;
      std::copy(src, src + k, dst);
    }
  }
  return out;
}

// Test/debug helper: per-cell argmax with an empty threshold of 0.5.
// Returns -1 for empty, otherwise the winning channel.
inline std::array<int, gw::kGridSize * gw::kGridSize> reconstruct_symbols(const ObjectMaps& maps) {
  std::array<int, gw::kGridSize * gw::kGridSize> out{};
  for (int cell = 0; cell < gw::kGridSize * gw::kGridSize; ++cell) {
    int best = 0;
    double best_score = maps[cell * kNumChannels];
    for (int k = 1; k < kNumChannels; ++k) {
      const double s = maps[cell * kNumChannels + k];
      if (s > best_score) {
        best_score = s;
        best = k;
      }
    }
    out[cell] = best_score < 0.5 ? -1 : best;
  }
  return out;
}

}  // namespace symrl::percept
