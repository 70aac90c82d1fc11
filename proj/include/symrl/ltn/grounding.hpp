#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symrl/gridworld/env.hpp"
#include "symrl/ltn/formula.hpp"
#include "symrl/numcore/layers.hpp"
#include "symrl/numcore/optim.hpp"
#include "symrl/numcore/tape.hpp"
#include "symrl/perception/detector.hpp"
#include "symrl/rng.hpp"

namespace symrl::ltn {

// 5x5x2 derived-predicate scores; channel 0 = goto, channel 1 = avoid.
using FactMaps = num::Tensor;
inline constexpr int kGotoChannel = 0;
inline constexpr int kAvoidChannel = 1;
inline constexpr int kNumFactChannels = 2;

// Neural grounding for a latent predicate: dense(4->16), tanh, dense(16->1),
// sigmoid, so outputs always land in (0,1).
class LearnableGrounding {
 public:
  explicit LearnableGrounding(Rng& rng)
      : l1_(num::Layer::make(num::LayerSpec::dense(4, 16), rng)),
        l2_(num::Layer::make(num::LayerSpec::dense(16, 1), rng)) {}

  double value(const DomainSample& x) const {
    std::array<double, 16> h{};
    const auto& w1 = l1_.weight;
    for (int i = 0; i < 16; ++i) {
      double s = l1_.bias[i];
      for (int j = 0; j < 4; ++j) s += w1[i * 4 + j] * x[j];
      h[i] = std::tanh(s);
    }
    double s = l2_.bias[0];
    for (int i = 0; i < 16; ++i) s += l2_.weight[i] * h[i];
    return 1.0 / (1.0 + std::exp(-s));
  }

  // Records the batched forward for samples x:[N,4]; returns scores [N].
  num::Tape::Ref record(num::Tape& tape, num::Tape::Ref x) {
    auto h = tape.tanh_act(l1_.forward(tape, x));
    auto y = tape.sigmoid(l2_.forward(tape, h));
    const int n = tape.value(x).dim(0);
    return tape.reshape(y, {n});
  }

  std::vector<num::Tensor*> params() {
    return {&l1_.weight, &l1_.bias, &l2_.weight, &l2_.bias};
  }

  bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }

 private:
  num::Layer l1_, l2_;
  bool trained_ = false;
};

// Resolves predicate names: built-in type predicates read their object-map
// channel, learnable ones run their network.
class GroundingSet {
 public:
  static GroundingSet for_theory(const Theory& theory, Rng& rng) {
    GroundingSet g;
    for (const auto& name : theory.learnable) {
      g.learnables_.emplace_back(name, LearnableGrounding(rng));
    }
    return g;
  }

  bool is_learnable(const std::string& name) const {
    return find(name) != nullptr;
  }

  LearnableGrounding& learnable(const std::string& name) {
    auto* g = find(name);
    if (!g) throw std::invalid_argument("grounding: no learnable predicate '" + name + "'");
    return *g;
  }

  const LearnableGrounding& learnable(const std::string& name) const {
    const auto* g = find(name);
    if (!g) throw std::invalid_argument("grounding: no learnable predicate '" + name + "'");
    return *g;
  }

  double predicate_value(const std::string& name, const DomainSample& x) const {
    const int ch = type_predicate_channel(name);
    if (ch >= 0) return x[ch];
    return learnable(name).value(x);
  }

  std::vector<std::pair<std::string, LearnableGrounding*>> learnables() {
    std::vector<std::pair<std::string, LearnableGrounding*>> out;
    for (auto& [name, g] : learnables_) out.emplace_back(name, &g);
    return out;
  }

  std::vector<num::Tensor*> params() {
    std::vector<num::Tensor*> out;
    for (auto& [name, g] : learnables_) {
      for (auto* p : g.params()) out.push_back(p);
    }
    return out;
  }

  bool all_trained() const {
    for (const auto& [name, g] : learnables_) {
      if (!g.trained()) return false;
    }
    return !learnables_.empty();
  }

 private:
  LearnableGrounding* find(const std::string& name) {
    for (auto& [n, g] : learnables_) {
      if (n == name) return &g;
    }
    return nullptr;
  }
  const LearnableGrounding* find(const std::string& name) const {
    for (const auto& [n, g] : learnables_) {
      if (n == name) return &g;
    }
    return nullptr;
  }

  std::vector<std::pair<std::string, LearnableGrounding>> learnables_;
};

// Truth of a single formula on a single domain sample.
inline double eval_formula(const Formula& f, const GroundingSet& groundings,
                           const DomainSample& x) {
  ScalarAlgebra alg{[&](const std::string& name) { return groundings.predicate_value(name, x); }};
  return eval_formula(f, alg);
}

// Mean over axioms of the mean truth over the sample set.
inline double satisfaction(const Theory& theory, const GroundingSet& groundings,
                           const std::vector<DomainSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("satisfaction: sample set must not be empty");
  if (theory.axioms.empty()) throw std::invalid_argument("satisfaction: theory has no axioms");
  double total = 0.0;
  for (const auto& axiom : theory.axioms) {
    double acc = 0.0;
    for (const auto& x : samples) acc += eval_formula(*axiom, groundings, x);
    total += acc / static_cast<double>(samples.size());
  }
  return total / static_cast<double>(theory.axioms.size());
}

using SampleSource = std::function<std::vector<DomainSample>(Rng&)>;

// The four one-hot type vectors plus the all-zero (empty cell) vector.
inline std::vector<DomainSample> canonical_samples() {
  std::vector<DomainSample> out;
  for (int i = 0; i < 4; ++i) {
    DomainSample s{};
    s[i] = 1.0;
    out.push_back(s);
  }
  out.push_back(DomainSample{});
  return out;
}

// Per-iteration batch: the 25 cell score vectors of a freshly reset and
// rendered random state, plus the canonical vectors for coverage.
inline SampleSource grid_sample_source(const gw::Scenario& scenario, const gw::Setting& setting) {
  return [scenario, setting](Rng& rng) {
    const auto state = gw::reset(rng, scenario);
    const auto maps = percept::build_object_maps(gw::render(state, setting));
    std::vector<DomainSample> out;
    out.reserve(30);
    for (int cell = 0; cell < gw::kGridSize * gw::kGridSize; ++cell) {
      DomainSample s;
      for (int k = 0; k < 4; ++k) s[k] = maps[cell * percept::kNumChannels + k];
      out.push_back(s);
    }
    for (const auto& s : canonical_samples()) out.push_back(s);
    return out;
  };
}

struct TrainOptions {
  int iterations = 2000;
  num::AdamConfig adam{0.01, 0.9, 0.999, 1e-8};
};

struct TrainResult {
  std::vector<double> satisfaction_trace;

  double final_satisfaction() const {
    return satisfaction_trace.empty() ? 0.0 : satisfaction_trace.back();
  }
  double best_satisfaction() const {
    double best = 0.0;
    for (double v : satisfaction_trace) best = std::max(best, v);
    return best;
  }
};

namespace detail {

// Tape-valued algebra over per-sample truth vectors [N].
struct TapeAlgebra {
  using Value = num::Tape::Ref;
  num::Tape& tape;
  int n;
  std::map<std::string, num::Tape::Ref>& atoms;
  num::Tape::Ref one_ref = -1, zero_ref = -1;

  Value one() {
    if (one_ref < 0) one_ref = tape.constant(num::Tensor::full({n}, 1.0));
    return one_ref;
  }
  Value zero() {
    if (zero_ref < 0) zero_ref = tape.constant(num::Tensor::full({n}, 0.0));
    return zero_ref;
  }
  Value add(Value a, Value b) { return tape.add(a, b); }
  Value sub(Value a, Value b) { return tape.sub(a, b); }
  Value min(Value a, Value b) { return tape.minimum(a, b); }
  Value max(Value a, Value b) { return tape.maximum(a, b); }
  Value atom(const std::string& name) { return atoms.at(name); }
};

}  // namespace detail

// Maximizes axiom satisfaction (loss = 1 - satisfaction) over the learnable
// grounding parameters. Returns the per-iteration satisfaction trace.
inline TrainResult train_groundings(const Theory& theory, GroundingSet& groundings,
                                    const SampleSource& source, const TrainOptions& opts,
                                    Rng& rng) {
  if (theory.learnable.empty()) {
    throw std::invalid_argument("train_groundings: theory has no learnable predicates");
  }
  if (theory.axioms.empty()) {
    throw std::invalid_argument("train_groundings: theory has no axioms");
  }
  num::Adam opt(groundings.params(), opts.adam);
  TrainResult result;
  result.satisfaction_trace.reserve(opts.iterations);

  std::vector<std::string> predicates;
  for (const auto& axiom : theory.axioms) axiom->collect_predicates(predicates);

  for (int iter = 0; iter < opts.iterations; ++iter) {
    const auto samples = source(rng);
    if (samples.empty()) {
      throw std::invalid_argument("train_groundings: sample source produced no samples");
    }
    const int n = static_cast<int>(samples.size());

    num::Tape tape;
    num::Tensor xs({n, 4});
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 4; ++k) xs[i * 4 + k] = samples[i][k];
    const auto x = tape.constant(std::move(xs));

    std::map<std::string, num::Tape::Ref> atoms;
    for (const auto& name : predicates) {
      const int ch = type_predicate_channel(name);
      if (ch >= 0) {
        num::Tensor col({n});
        for (int i = 0; i < n; ++i) col[i] = samples[i][ch];
        atoms.emplace(name, tape.constant(std::move(col)));
      } else {
        atoms.emplace(name, groundings.learnable(name).record(tape, x));
      }
    }

    detail::TapeAlgebra alg{tape, n, atoms};
    num::Tape::Ref sat_sum = -1;
    for (const auto& axiom : theory.axioms) {
      const auto mean = tape.mean_all(eval_formula(*axiom, alg));
      sat_sum = sat_sum < 0 ? mean : tape.add(sat_sum, mean);
    }
    const auto sat = tape.affine(sat_sum, 1.0 / static_cast<double>(theory.axioms.size()), 0.0);
    const auto loss = tape.affine(sat, -1.0, 1.0);

    opt.zero_grad();
    tape.backward(loss);
    opt.step();
    result.satisfaction_trace.push_back(tape.value(sat)[0]);
  }

  for (auto& [name, g] : groundings.learnables()) g->mark_trained();
  return result;
}

// Applies the trained goto/avoid groundings to every cell of the object maps.
inline FactMaps derive_fact_maps(const percept::ObjectMaps& object_maps,
                                 const GroundingSet& groundings) {
  const std::vector<int> want = {gw::kGridSize, gw::kGridSize, percept::kNumChannels};
  if (object_maps.shape() != want) {
    throw std::invalid_argument("derive_fact_maps: expected object maps " + num::shape_str(want) +
                                ", got " + num::shape_str(object_maps.shape()));
  }
  const std::array<const char*, 2> facts = {"goto", "avoid"};
  for (const char* name : facts) {
    if (!groundings.is_learnable(name)) {
      throw std::logic_error(std::string("derive_fact_maps: grounding for '") + name +
                             "' is missing");
    }
    if (!groundings.learnable(name).trained()) {
      throw std::logic_error(std::string("derive_fact_maps: grounding for '") + name +
                             "' has not been trained");
    }
  }
  FactMaps out({gw::kGridSize, gw::kGridSize, kNumFactChannels});
  for (int cell = 0; cell < gw::kGridSize * gw::kGridSize; ++cell) {
    DomainSample x;
    for (int k = 0; k < 4; ++k) x[k] = object_maps[cell * percept::kNumChannels + k];
    out[cell * kNumFactChannels + kGotoChannel] = groundings.learnable("goto").value(x);
    out[cell * kNumFactChannels + kAvoidChannel] = groundings.learnable("avoid").value(x);
  }
  return out;
}

// The per-scenario background knowledge shipped with the workbench; the
// files under theories/ carry the same text.
inline std::string default_theory_text(int scenario_id) {
  switch (scenario_id) {
    case 1:
      return "learnable goto\nlearnable avoid\n"
             "forall x: circle(x) <-> goto(x)\n"
             "forall x: cross(x) <-> avoid(x)\n";
    case 2:
      return "learnable goto\nlearnable avoid\n"
             "forall x: cross(x) <-> goto(x)\n"
             "forall x: circle(x) <-> avoid(x)\n";
    case 3:
      return "learnable goto\nlearnable avoid\n"
             "forall x: square(x) <-> goto(x)\n"
             "forall x: cross(x) <-> avoid(x)\n";
    case 4:
      return "learnable goto\nlearnable avoid\n"
             "forall x: cross(x) <-> goto(x)\n"
             "forall x: (square(x) | circle(x)) <-> avoid(x)\n";
    default:
      throw std::invalid_argument("default_theory_text: scenario id must be 1..4");
  }
}

}  // namespace symrl::ltn
