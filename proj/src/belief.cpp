#include "yarbus/belief.hpp"

#include <algorithm>

#include "yarbus/errors.hpp"

namespace yarbus {

Goal Goal::all_unknown(const Ontology& onto) {
  Goal g;
  g.values.assign(onto.slot_count(), kUnknown);
  return g;
}

bool Goal::is_all_unknown() const {
  return std::all_of(values.begin(), values.end(),
                     [](std::uint32_t v) { return v == kUnknown; });
}

std::map<std::string, std::string> goal_to_slots(const Goal& g, const Ontology& onto) {
  std::map<std::string, std::string> out;
  for (std::size_t s = 0; s < g.values.size(); ++s)
    if (g.values[s] != Goal::kUnknown) out.emplace(onto.slot_name(s), onto.value_name(s, g.values[s]));
  return out;
}

Goal goal_from_slots(const std::map<std::string, std::string>& slots, const Ontology& onto) {
  Goal g = Goal::all_unknown(onto);
  for (const auto& [slot, value] : slots) {
    auto si = onto.slot_index(slot);
    if (!si) throw ValidationError("goal: unknown slot '" + slot + "'");
    auto vi = onto.value_index(*si, value);
    if (!vi) throw ValidationError("goal: value '" + value + "' not legal for slot '" + slot + "'");
    g.values[*si] = *vi;
  }
  return g;
}

Belief::Belief(Map entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("belief: no entries");
  for (const auto& [g, p] : entries_)
    if (!(p > 0.0)) throw ValidationError("belief: non-positive probability");
}

double Belief::mass() const {
  double m = 0.0;
  for (const auto& [g, p] : entries_) m += p;
  return m;
}

Belief initial_belief(const Ontology& onto) {
  Belief::Map m;
  m.emplace(Goal::all_unknown(onto), 1.0);
  return Belief(std::move(m));
}

Goal transition(const Goal& g, const Info& info) {
  Goal out = g;
  for (std::size_t s = 0; s < g.values.size(); ++s) {
    const SlotInfo& si = info.slots[s];
    switch (si.kind) {
      case SlotInfo::Kind::unknown:
        break;
      case SlotInfo::Kind::positive:
        out.values[s] = si.value;
        break;
      case SlotInfo::Kind::negated:
        if (g.values[s] != Goal::kUnknown && si.negates(g.values[s]))
          out.values[s] = Goal::kUnknown;
        break;
    }
  }
  return out;
}

Belief update(const Belief& b, const Utterance& machine, const SluHypotheses& hyps,
              const Ontology& onto, const RuleMask& mask, ExtractStats* stats) {
  // Extraction only depends on the utterance, so do it once per hypothesis.
  struct Evidence {
    std::vector<Info> infos;
    double share;  // hypothesis probability split over its infos
  };
  std::vector<Evidence> evidence;
  evidence.reserve(hyps.entries.size());
  for (const auto& [u, p] : hyps.entries) {
    Evidence ev;
    ev.infos = extract_infos(machine, u, onto, mask, stats);
    ev.share = p / static_cast<double>(ev.infos.size());
    evidence.push_back(std::move(ev));
  }

  // Accumulation order is fixed (goals sorted, hypotheses sorted, infos in
  // cartesian order) so results are bit-reproducible.
  Belief::Map out;
  for (const auto& [goal, weight] : b.entries())
    for (const auto& ev : evidence)
      for (const Info& info : ev.infos) out[transition(goal, info)] += weight * ev.share;
  return Belief(std::move(out));
}

Belief prune(const Belief& b, double theta) {
  if (theta <= 0.0) return b;

  Belief::Map kept;
  double kept_mass = 0.0;
  for (const auto& [g, p] : b.entries()) {
    if (p >= theta) {
      kept.emplace(g, p);
      kept_mass += p;
    }
  }
  if (kept.empty() || kept.size() == b.size()) return b;

  for (auto& [g, p] : kept) p /= kept_mass;
  return Belief(std::move(kept));
}

std::vector<std::pair<Goal, double>> ranked(const Belief& b) {
  std::vector<std::pair<Goal, double>> out(b.entries().begin(), b.entries().end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& c) {
    if (a.second != c.second) return a.second > c.second;
    return a.first < c.first;
  });
  return out;
}

}  // namespace yarbus
