#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "yarbus/acts.hpp"
#include "yarbus/ontology.hpp"

namespace yarbus {

// Which of the five evidence rules are enabled:
//   rule 0  inform(s=v) in the user utterance        -> positive v
//   rule 1  expl-conf(s=v) in m, affirm in u         -> positive v
//   rule 2  impl-conf(s=v) in m, no negate in u      -> positive v
//   rule 3  expl-conf(s=v) in m, negate in u         -> negative v
//   rule 4  deny(s=v) in the user utterance          -> negative v
struct RuleMask {
  bool inform = true;
  bool expl_conf = true;
  bool impl_conf = true;
  bool negate = true;
  bool deny = true;

  static RuleMask all() { return RuleMask{}; }
  static RuleMask none() { return RuleMask{false, false, false, false, false}; }

  // 5-character binary string, leftmost = rule 0, e.g. "11011".
  static RuleMask parse(std::string_view s);
  std::string str() const;

  bool operator==(const RuleMask&) const = default;
};

// Per-slot evidence of one (machine utterance, user utterance) pair:
// value indices asserted positively and value indices negated.
struct SlotEvidence {
  std::vector<std::uint32_t> positives;
  std::vector<std::uint32_t> negatives;
  bool operator==(const SlotEvidence&) const = default;
};

// One slot's component of an extracted information: exactly one of the three
// shapes. `value` is meaningful for positive, `negated` for negated.
struct SlotInfo {
  enum class Kind : std::uint8_t { unknown = 0, positive = 1, negated = 2 };

  Kind kind = Kind::unknown;
  std::uint32_t value = 0;
  std::vector<std::uint32_t> negated;

  static SlotInfo make_unknown() { return SlotInfo{}; }
  static SlotInfo make_positive(std::uint32_t v) { return SlotInfo{Kind::positive, v, {}}; }
  static SlotInfo make_negated(std::vector<std::uint32_t> vs);

  bool negates(std::uint32_t v) const;

  auto operator<=>(const SlotInfo&) const = default;
};

// A per-slot information tuple over the canonical slot order.
struct Info {
  std::vector<SlotInfo> slots;
  auto operator<=>(const Info&) const = default;
};

// Counters for evidence discarded as noise (values absent from the ontology).
struct ExtractStats {
  std::uint64_t out_of_ontology = 0;
  void merge(const ExtractStats& other) { out_of_ontology += other.out_of_ontology; }
};

// Applies the enabled rules to one slot. `machine` must be repeat-resolved
// and `user` this-resolved.
SlotEvidence slot_evidence(const Utterance& machine, const Utterance& user, std::size_t slot,
                           const Ontology& onto, const RuleMask& mask,
                           ExtractStats* stats = nullptr);

// Fuses positives and negatives into the slot's possible info components.
// No evidence, or an empty user utterance, yields {unknown}; negatives alone
// are kept as one negated set; otherwise each positive becomes a singleton
// and the negatives conflicting with a positive survive as one extra set.
std::vector<SlotInfo> fuse_slot(const SlotEvidence& ev, const Utterance& user);

// Cartesian product of fuse_slot over all slots, in canonical slot-major
// order. Never empty: with no evidence it is the single all-unknown Info.
std::vector<Info> extract_infos(const Utterance& machine, const Utterance& user,
                                const Ontology& onto, const RuleMask& mask,
                                ExtractStats* stats = nullptr);

}  // namespace yarbus
