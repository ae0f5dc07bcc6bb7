#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "yarbus/belief.hpp"
#include "yarbus/ingest.hpp"
#include "yarbus/ontology.hpp"

namespace yarbus {

// Per-slot distributions over value indices, with Goal::kUnknown carrying the
// residual "not informed yet" mass. Each slot sums to 1.
struct MarginalBelief {
  std::vector<std::map<std::uint32_t, double>> per_slot;

  static MarginalBelief initial(const Ontology& onto);
  double slot_mass(std::size_t s) const;
};

// Per turn, the slot-wise SLU-informed marginal mass q(v) over legal values.
std::vector<std::map<std::uint32_t, double>> informed_marginals(const SluHypotheses& slu,
                                                                const Ontology& onto);

// Decays each slot's previous distribution by the uninformed mass and adds
// the turn's informed marginals.
MarginalBelief focus_update(const MarginalBelief& prev, const SluHypotheses& slu,
                            const Ontology& onto);

// The `top_k` most probable joint assignments under the product of the
// per-slot distributions, ranked descending. Zero-probability joints are
// never emitted.
std::vector<std::pair<Goal, double>> top_joints(const MarginalBelief& mb, std::size_t top_k);

// Keeps, per slot, the most recently informed value from each turn's single
// best SLU hypothesis, emitted with confidence 1. Shares the preprocessing
// stack; `resolve_this` opts out of reference resolution.
std::vector<OutputTurn> tophyp_track_session(const DialogSession& session, const Ontology& onto,
                                             bool resolve_this = true);

// The focus baseline: per-slot marginal tracking with evidence-weighted
// decay, joints formed as the product of marginals truncated to `top_k`.
std::vector<OutputTurn> focus_track_session(const DialogSession& session, const Ontology& onto,
                                            std::size_t top_k = 20, bool resolve_this = true);

}  // namespace yarbus
