#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

namespace yarbus {

struct SlotValue {
  std::string slot;
  std::string value;
  auto operator<=>(const SlotValue&) const = default;
};

// A dialog act: a label plus a set of slot-value pairs. Args are kept sorted
// and de-duplicated so acts compare as sets.
struct DialogAct {
  std::string label;
  std::vector<SlotValue> args;

  DialogAct() = default;
  DialogAct(std::string label_, std::vector<SlotValue> args_);

  bool has_arg(std::string_view slot, std::string_view value) const;
  bool has_slot(std::string_view slot) const;

  auto operator<=>(const DialogAct&) const = default;
};

// A set of dialog acts. Duplicates collapse; the empty utterance is legal.
struct Utterance {
  std::vector<DialogAct> acts;

  Utterance() = default;
  explicit Utterance(std::vector<DialogAct> acts_);

  bool empty() const { return acts.empty(); }
  bool contains(const DialogAct& a) const;
  bool contains_label(std::string_view label) const;

  auto operator<=>(const Utterance&) const = default;
};

// A distribution over user utterances. Entries are sorted by utterance,
// carry strictly positive probabilities and sum to 1.
struct SluHypotheses {
  std::vector<std::pair<Utterance, double>> entries;

  double total() const;
  bool operator==(const SluHypotheses&) const = default;
};

// Merges duplicate utterances, drops zero-mass entries and rescales so the
// probabilities sum to 1. An empty or zero-mass input becomes the single
// empty utterance with probability 1. Negative scores are rejected.
SluHypotheses normalize_hyps(std::vector<std::pair<Utterance, double>> raw);

}  // namespace yarbus
