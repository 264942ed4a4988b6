#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dfsim/types.hpp"

namespace dfsim {

// Portable uniform double in [0, 1) built from the top 53 bits of the
// generator output; identical across standard libraries for a given seed.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Decides which measurement outcome a block takes, given the Born
// probabilities of all outcomes at that site.
class OutcomeSource {
 public:
  virtual ~OutcomeSource() = default;
  virtual std::size_t choose(const std::vector<double>& probs) = 0;
};

// Samples outcomes from the Born distribution.
class SampledOutcomes final : public OutcomeSource {
 public:
  explicit SampledOutcomes(std::uint64_t seed) : rng_(seed) {}
  explicit SampledOutcomes(std::mt19937_64 rng) : rng_(std::move(rng)) {}

  std::size_t choose(const std::vector<double>& probs) override {
    const double u = uniform01(rng_);
    double acc = 0.0;
    std::size_t last_live = 0;
    bool seen_live = false;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] >= tol::kBranchCutoff) { last_live = k; seen_live = true; }
      acc += probs[k];
      if (u < acc && probs[k] >= tol::kBranchCutoff) return k;
    }
    if (!seen_live)
      throw InvalidArgumentError("no outcome has nonzero probability");
    return last_live;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Forces a fixed prefix of outcomes (for branch replay / enumeration); beyond
// the prefix it takes the first outcome above the branch cutoff. Records the
// probability vector and the taken outcome at every site.
class ScriptedOutcomes final : public OutcomeSource {
 public:
  ScriptedOutcomes() = default;
  explicit ScriptedOutcomes(std::vector<std::size_t> script)
      : script_(std::move(script)) {}

  std::size_t choose(const std::vector<double>& probs) override {
    const std::size_t site = taken_.size();
    std::size_t k;
    if (site < script_.size()) {
      k = script_[site];
      if (k >= probs.size())
        throw InvalidArgumentError("scripted outcome index out of range");
    } else {
      k = probs.size();
      for (std::size_t i = 0; i < probs.size(); ++i)
        if (probs[i] >= tol::kBranchCutoff) { k = i; break; }
      if (k == probs.size())
        throw InvalidArgumentError("no outcome has nonzero probability");
    }
    site_probs_.push_back(probs);
    taken_.push_back(k);
    return k;
  }

  const std::vector<std::vector<double>>& site_probs() const { return site_probs_; }
  const std::vector<std::size_t>& taken() const { return taken_; }

 private:
  std::vector<std::size_t> script_;
  std::vector<std::vector<double>> site_probs_;
  std::vector<std::size_t> taken_;
};

}  // namespace dfsim
