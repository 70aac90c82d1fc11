#pragma once

#include <array>

namespace symrl::gw {

inline constexpr int kGridSize = 5;
inline constexpr int kPatchSize = 10;
inline constexpr int kImageSize = kGridSize * kPatchSize;

using ShapeBitmap = std::array<std::array<bool, kPatchSize>, kPatchSize>;

// The renderer and the patch detectors share these bitmaps; detection
// correctness depends on the two sides matching bit for bit.
namespace detail {

constexpr ShapeBitmap make_circle() {
  ShapeBitmap b{};
  for (int i = 0; i < kPatchSize; ++i) {
    for (int j = 0; j < kPatchSize; ++j) {
      const double di = i - 4.5, dj = j - 4.5;
      b[i][j] = di * di + dj * dj <= 16.0;  // filled disk, radius 4
    }
  }
  return b;
}

constexpr ShapeBitmap make_square() {
  ShapeBitmap b{};
  for (int i = 1; i <= 8; ++i)
    for (int j = 1; j <= 8; ++j) b[i][j] = true;  // centered 8x8 block
  return b;
}

constexpr ShapeBitmap make_cross() {
  ShapeBitmap b{};
  for (int i = 0; i < kPatchSize; ++i) {
    for (int j = 0; j < kPatchSize; ++j) {
      const int d1 = i - j, d2 = i + j - (kPatchSize - 1);
      // An "X": both diagonals, one pixel either side of the center lines.
      b[i][j] = (d1 >= -1 && d1 <= 1) || (d2 >= -1 && d2 <= 1);
    }
  }
  return b;
}

constexpr ShapeBitmap make_plus() {
  ShapeBitmap b{};
  for (int i = 0; i < kPatchSize; ++i) {
    for (int j = 0; j < kPatchSize; ++j) {
      b[i][j] = (i == 4 || i == 5) || (j == 4 || j == 5);  // 2 px bars
    }
  }
  return b;
}

}  // namespace detail

inline constexpr ShapeBitmap kCircleBitmap = detail::make_circle();
inline constexpr ShapeBitmap kSquareBitmap = detail::make_square();
inline constexpr ShapeBitmap kCrossBitmap = detail::make_cross();
inline constexpr ShapeBitmap kAgentBitmap = detail::make_plus();

constexpr int bitmap_pixel_count(const ShapeBitmap& b) {
  int n = 0;
  for (const auto& row : b)
    for (bool v : row) n += v ? 1 : 0;
  return n;
}

}  // namespace symrl::gw
