#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "yarbus/acts.hpp"
#include "yarbus/ontology.hpp"

namespace yarbus {

// Slots the machine explicitly asked the user about in one utterance:
// the slot of expl-conf/select args plus the value of request args.
struct ReferentSlots {
  std::vector<std::string> slots;  // sorted, unique, all ontology slots
  bool operator==(const ReferentSlots&) const = default;
};

struct PreprocessStats {
  // this-pairs other than (this, dontcare), dropped with their act
  std::uint64_t odd_this_pairs = 0;
  void merge(const PreprocessStats& other) { odd_this_pairs += other.odd_this_pairs; }
};

// Replaces every machine utterance containing a repeat act by the previous
// (already resolved) utterance; a repeat in turn 0 becomes the empty
// utterance.
std::vector<Utterance> resolve_repeat(const std::vector<Utterance>& machine_turns);

ReferentSlots referent_slots(const Utterance& machine, const Ontology& onto);

// Rewrites one user act carrying (this, dontcare): resolves to the single
// referent slot when there is exactly one, otherwise the act vanishes.
std::optional<DialogAct> unthis_act(const DialogAct& act, const ReferentSlots& referents);

// Keeps the acts without a this-pair and adds the rewritten ones.
Utterance unthis_utterance(const Utterance& user, const Utterance& machine, const Ontology& onto,
                           PreprocessStats* stats = nullptr);

// Rewrites every hypothesis and merges utterances that became equal, summing
// their probabilities. Total mass is preserved exactly.
SluHypotheses unthis_hyps(const SluHypotheses& hyps, const Utterance& machine,
                          const Ontology& onto, PreprocessStats* stats = nullptr);

}  // namespace yarbus
