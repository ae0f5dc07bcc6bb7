#include "yarbus/preprocess.hpp"

#include <algorithm>
#include <map>

namespace yarbus {

std::vector<Utterance> resolve_repeat(const std::vector<Utterance>& machine_turns) {
  std::vector<Utterance> out;
  out.reserve(machine_turns.size());
  for (std::size_t t = 0; t < machine_turns.size(); ++t) {
    if (machine_turns[t].contains_label("repeat"))
      out.push_back(t == 0 ? Utterance{} : out[t - 1]);
    else
      out.push_back(machine_turns[t]);
  }
  return out;
}

ReferentSlots referent_slots(const Utterance& machine, const Ontology& onto) {
  ReferentSlots ref;
  for (const auto& act : machine.acts) {
    if (act.label == "expl-conf" || act.label == "select") {
      for (const auto& sv : act.args)
        if (onto.slot_index(sv.slot)) ref.slots.push_back(sv.slot);
    } else if (act.label == "request") {
      // request carries the requested slot name in the value position
      for (const auto& sv : act.args)
        if (onto.slot_index(sv.value)) ref.slots.push_back(sv.value);
    }
  }
  std::sort(ref.slots.begin(), ref.slots.end());
  ref.slots.erase(std::unique(ref.slots.begin(), ref.slots.end()), ref.slots.end());
  return ref;
}

std::optional<DialogAct> unthis_act(const DialogAct& act, const ReferentSlots& referents) {
  if (!act.has_arg("this", kDontcare) || referents.slots.size() != 1) return std::nullopt;
  return DialogAct(act.label, {{referents.slots.front(), std::string(kDontcare)}});
}

Utterance unthis_utterance(const Utterance& user, const Utterance& machine, const Ontology& onto,
                           PreprocessStats* stats) {
  const ReferentSlots ref = referent_slots(machine, onto);
  std::vector<DialogAct> acts;
  acts.reserve(user.acts.size());
  for (const auto& act : user.acts) {
    if (!act.has_slot("this")) {
      acts.push_back(act);
    } else if (act.has_arg("this", kDontcare)) {
      if (auto rewritten = unthis_act(act, ref)) acts.push_back(std::move(*rewritten));
    } else if (stats) {
      // only (this, dontcare) is resolvable; anything else is dropped
      ++stats->odd_this_pairs;
    }
  }
  return Utterance(std::move(acts));
}

SluHypotheses unthis_hyps(const SluHypotheses& hyps, const Utterance& machine,
                          const Ontology& onto, PreprocessStats* stats) {
  std::map<Utterance, double> merged;
  for (const auto& [u, p] : hyps.entries)
    merged[unthis_utterance(u, machine, onto, stats)] += p;

  SluHypotheses out;
  out.entries.reserve(merged.size());
  for (auto& [u, p] : merged) out.entries.emplace_back(u, p);
  return out;
}

}  // namespace yarbus
