#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "symrl/gridworld/types.hpp"
#include "symrl/numcore/tensor.hpp"
#include "symrl/rng.hpp"

namespace symrl::gw {

// 50x50x3 image, row-major HWC, channel order R,G,B, values in [0,1].
using Observation = num::Tensor;

// Draws 1..4 objects of each type into distinct empty cells, then places the
// agent in a remaining empty cell. Worst case fills 13 of 25 cells.
inline GridState reset(Rng& rng, const Scenario& scenario) {
  scenario.validate();
  GridState s;
  std::vector<int> empty;
  empty.reserve(kGridSize * kGridSize);
  for (int i = 0; i < kGridSize * kGridSize; ++i) empty.push_back(i);

  const auto take_cell = [&]() {
    const int k = rng.uniform_int(0, static_cast<int>(empty.size()) - 1);
    const int cell = empty[k];
    empty[k] = empty.back();
    empty.pop_back();
    return cell;
  };

  for (int t = 0; t < kNumObjectTypes; ++t) {
    const int count = rng.uniform_int(1, 4);
    for (int i = 0; i < count; ++i) s.cells[take_cell()] = static_cast<ObjectType>(t);
  }
  const int agent_cell = take_cell();
  s.agent_row = agent_cell / kGridSize;
  s.agent_col = agent_cell % kGridSize;
  s.steps = 0;
  s.initial_target_count = s.remaining_targets(scenario);
  return s;
}

inline bool is_done(const GridState& s, const Scenario& scenario) {
  return s.remaining_targets(scenario) == 0 || s.steps >= kMaxSteps;
}

// Moves one cell in the given direction, clamped at the borders (bumping a
// wall still consumes a step). Entering an occupied cell collects the object.
inline StepResult step(GridState& s, Action a, const Scenario& scenario) {
  if (is_done(s, scenario)) {
    throw std::logic_error("step: episode already finished");
  }
  int r = s.agent_row, c = s.agent_col;
  switch (a) {
    case Action::kUp: r -= 1; break;
    case Action::kDown: r += 1; break;
    case Action::kLeft: c -= 1; break;
    case Action::kRight: c += 1; break;
  }
  r = r < 0 ? 0 : (r >= kGridSize ? kGridSize - 1 : r);
  c = c < 0 ? 0 : (c >= kGridSize ? kGridSize - 1 : c);
  s.agent_row = r;
  s.agent_col = c;

  int reward = 0;
  auto& cell = s.cell(r, c);
  if (cell) {
    reward = scenario.reward_for(*cell);
    cell.reset();
  }
  s.steps += 1;
  return {reward, is_done(s, scenario)};
}

// Normalization constant for episode scores: the number of target-type
// objects present right after reset.
inline int max_potential_reward(const GridState& s) { return s.initial_target_count; }

inline void paint_patch(Observation& img, int cell_row, int cell_col, const ShapeBitmap& bmp,
                        const Rgb& fg) {
  for (int i = 0; i < kPatchSize; ++i) {
    for (int j = 0; j < kPatchSize; ++j) {
      if (!bmp[i][j]) continue;
      const int r = cell_row * kPatchSize + i;
      const int c = cell_col * kPatchSize + j;
      double* px = img.data() + (static_cast<std::size_t>(r) * kImageSize + c) * 3;
      px[0] = fg[0];
      px[1] = fg[1];
      px[2] = fg[2];
    }
  }
}

inline Observation render(const GridState& s, const Setting& setting) {
  setting.validate();
  Observation img({kImageSize, kImageSize, 3});
  for (int i = 0; i < kImageSize * kImageSize; ++i) {
    img[i * 3 + 0] = setting.background_color[0];
    img[i * 3 + 1] = setting.background_color[1];
    img[i * 3 + 2] = setting.background_color[2];
  }
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c) {
      if (s.cell(r, c)) paint_patch(img, r, c, bitmap_for(*s.cell(r, c)), setting.object_color);
    }
  }
  paint_patch(img, s.agent_row, s.agent_col, kAgentBitmap, setting.object_color);
  return img;
}

// Plain-text debug form: one row per line, '.'=empty, 'o'/'s'/'x' objects,
// '+' agent.
inline std::string to_text(const GridState& s) {
  std::string out;
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c) {
      if (r == s.agent_row && c == s.agent_col) {
        out += '+';
      } else if (s.cell(r, c)) {
        out += symbol_for(*s.cell(r, c));
      } else {
        out += '.';
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace symrl::gw
