#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "yarbus/acts.hpp"
#include "yarbus/extract.hpp"
#include "yarbus/ontology.hpp"

namespace yarbus {

// A total assignment of every slot to a value index, dontcare included, or
// the unknown sentinel. Ordering is lexicographic over the canonical slot
// order with unknown sorting last.
struct Goal {
  static constexpr std::uint32_t kUnknown = 0xffffffffu;

  std::vector<std::uint32_t> values;

  static Goal all_unknown(const Ontology& onto);
  bool is_all_unknown() const;

  auto operator<=>(const Goal&) const = default;
};

// Slot->value map with unknown slots omitted (the serialized form) and back.
std::map<std::string, std::string> goal_to_slots(const Goal& g, const Ontology& onto);
Goal goal_from_slots(const std::map<std::string, std::string>& slots, const Ontology& onto);

// Sparse distribution over goals: entries carry strictly positive
// probability and sum to 1.
class Belief {
 public:
  using Map = std::map<Goal, double>;

  Belief() = default;
  explicit Belief(Map entries);

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double mass() const;

  bool operator==(const Belief&) const = default;

 private:
  Map entries_;
};

// All probability mass on the all-unknown goal.
Belief initial_belief(const Ontology& onto);

// The deterministic per-slot transition: unknown info keeps the slot, a
// positive overwrites it, a negation of the current value resets it to
// unknown, any other negated set keeps it.
Goal transition(const Goal& g, const Info& info);

// One turn of the tracker: each hypothesis' probability is split uniformly
// across its extracted informations and pushed through `transition`.
// `machine` must be repeat-resolved and `hyps` this-resolved.
Belief update(const Belief& b, const Utterance& machine, const SluHypotheses& hyps,
              const Ontology& onto, const RuleMask& mask, ExtractStats* stats = nullptr);

// Removes entries with probability < theta and rescales the rest. If every
// entry falls below theta, or nothing is removed, the belief is returned
// unchanged.
Belief prune(const Belief& b, double theta);

// Entries sorted by descending probability, ties broken by goal order.
std::vector<std::pair<Goal, double>> ranked(const Belief& b);

}  // namespace yarbus
