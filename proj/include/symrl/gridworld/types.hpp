#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "symrl/gridworld/shapes.hpp"

namespace symrl::gw {

enum class ObjectType : int { kCircle = 0, kSquare = 1, kCross = 2 };
inline constexpr int kNumObjectTypes = 3;

inline const ShapeBitmap& bitmap_for(ObjectType t) {
  switch (t) {
    case ObjectType::kCircle: return kCircleBitmap;
    case ObjectType::kSquare: return kSquareBitmap;
    case ObjectType::kCross: return kCrossBitmap;
  }
  throw std::logic_error("unknown object type");
}

inline char symbol_for(ObjectType t) {
  switch (t) {
    case ObjectType::kCircle: return 'o';
    case ObjectType::kSquare: return 's';
    case ObjectType::kCross: return 'x';
  }
  throw std::logic_error("unknown object type");
}

// A small set over the three object types.
class TypeSet {
 public:
  constexpr TypeSet() = default;
  constexpr TypeSet(std::initializer_list<ObjectType> ts) {
    for (auto t : ts) insert(t);
  }

  constexpr void insert(ObjectType t) { mask_ |= 1u << static_cast<int>(t); }
  constexpr bool contains(ObjectType t) const { return mask_ & (1u << static_cast<int>(t)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool intersects(TypeSet o) const { return (mask_ & o.mask_) != 0; }

 private:
  unsigned mask_ = 0;
};

// Reward roles for the three object types: collecting a target type pays +1,
// an avoid type -1, anything else 0.
struct Scenario {
  TypeSet target;
  TypeSet avoid;

  void validate() const {
    if (target.empty()) throw std::invalid_argument("scenario: target set must not be empty");
    if (target.intersects(avoid)) {
      throw std::invalid_argument("scenario: target and avoid sets must be disjoint");
    }
  }

  int reward_for(ObjectType t) const {
    if (target.contains(t)) return 1;
    if (avoid.contains(t)) return -1;
    return 0;
  }

  static Scenario numbered(int id) {
    using OT = ObjectType;
    Scenario s;
    switch (id) {
      case 1: s = {{OT::kCircle}, {OT::kCross}}; break;
      case 2: s = {{OT::kCross}, {OT::kCircle}}; break;
      case 3: s = {{OT::kSquare}, {OT::kCross}}; break;
      case 4: s = {{OT::kCross}, {OT::kSquare, OT::kCircle}}; break;
      default: throw std::invalid_argument("scenario: id must be 1..4, got " + std::to_string(id));
    }
    s.validate();
    return s;
  }
};

using Rgb = std::array<double, 3>;

// Rendering colors: every pixel is either the object color or background.
struct Setting {
  Rgb object_color;
  Rgb background_color;

  void validate() const {
    if (object_color == background_color) {
      throw std::invalid_argument("setting: object and background colors must differ");
    }
  }

  static Setting numbered(int id) {
    Setting s;
    switch (id) {
      case 1: s = {{0, 0, 0}, {1, 1, 1}}; break;  // black objects, white background
      case 2: s = {{1, 1, 1}, {0, 0, 0}}; break;  // white objects, black background
      case 3: s = {{1, 0, 0}, {0, 0, 1}}; break;  // red objects, blue background
      case 4: s = {{0, 0, 1}, {1, 0, 0}}; break;  // blue objects, red background
      default: throw std::invalid_argument("setting: id must be 1..4, got " + std::to_string(id));
    }
    s.validate();
    return s;
  }
};

enum class Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumActions = 4;

inline constexpr int kMaxSteps = 50;

// The MDP state. The agent's cell never holds an object (collection is
// immediate on entry).
struct GridState {
  int agent_row = 0;
  int agent_col = 0;
  std::array<std::optional<ObjectType>, kGridSize * kGridSize> cells{};
  int steps = 0;
  int initial_target_count = 0;

  std::optional<ObjectType>& cell(int r, int c) { return cells[r * kGridSize + c]; }
  const std::optional<ObjectType>& cell(int r, int c) const { return cells[r * kGridSize + c]; }

  int count_of(ObjectType t) const {
    int n = 0;
    for (const auto& c : cells) n += (c && *c == t) ? 1 : 0;
    return n;
  }

  int remaining_targets(const Scenario& sc) const {
    int n = 0;
    for (const auto& c : cells) n += (c && sc.target.contains(*c)) ? 1 : 0;
    return n;
  }

  int total_objects() const {
    int n = 0;
    for (const auto& c : cells) n += c ? 1 : 0;
    return n;
  }
};

struct StepResult {
  int reward = 0;
  bool done = false;
};

}  // namespace symrl::gw
