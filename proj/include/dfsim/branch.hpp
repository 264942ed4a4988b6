#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "dfsim/outcomes.hpp"
#include "dfsim/protocols.hpp"

namespace dfsim {

struct Branch {
  MeasurementRecord record;
  double probability;  // product of site probabilities
  PureState state;
  std::vector<AppliedCorrection> corrections;
  std::vector<LogicalQubit> output_pairs;
};

struct BranchTree {
  std::vector<Branch> branches;

  double probability_sum() const {
    double s = 0.0;
    for (const Branch& b : branches) s += b.probability;
    return s;
  }
};

// Exhaustively enumerates every measurement-outcome branch of a protocol on a
// fixed input by script replay: each run forces a prefix of outcomes, records
// the per-site probability vectors, and queues one new script per untaken
// outcome above the branch cutoff. Branches come back sorted by outcome key.
inline BranchTree enumerate_branches(const ProtocolDescriptor& d,
                                     const PureState& initial,
                                     std::size_t max_branches = (1u << 15),
                                     const ProtocolOptions* opts = nullptr) {
  BranchTree tree;
  std::vector<std::vector<std::size_t>> work;
  work.push_back({});
  while (!work.empty()) {
    std::vector<std::size_t> script = std::move(work.back());
    work.pop_back();
    ScriptedOutcomes src(script);
    ProtocolResult r = run_protocol(d, initial, src, opts);
    if (tree.branches.size() >= max_branches)
      throw BranchLimitError("branch enumeration exceeded the configured limit");
    tree.branches.push_back(Branch{std::move(r.record),
                                   0.0,
                                   std::move(r.state),
                                   std::move(r.corrections),
                                   std::move(r.output_pairs)});
    {
      Branch& b = tree.branches.back();
      b.probability = b.record.branch_probability();
    }
    const std::vector<std::size_t>& taken = src.taken();
    const std::vector<std::vector<double>>& site_probs = src.site_probs();
    for (std::size_t site = script.size(); site < taken.size(); ++site) {
      const std::vector<double>& probs = site_probs[site];
      for (std::size_t k = 0; k < probs.size(); ++k) {
        if (k == taken[site] || probs[k] < tol::kBranchCutoff) continue;
        std::vector<std::size_t> next(taken.begin(),
                                      taken.begin() + static_cast<long>(site));
        next.push_back(k);
        work.push_back(std::move(next));
      }
    }
  }
  std::sort(tree.branches.begin(), tree.branches.end(),
            [](const Branch& a, const Branch& b) {
              return a.record.key() < b.record.key();
            });
  return tree;
}

}  // namespace dfsim
