#include "yarbus/extract.hpp"

#include <algorithm>

#include "yarbus/errors.hpp"

namespace yarbus {

namespace {

const DialogAct kAffirm{"affirm", {}};
const DialogAct kNegate{"negate", {}};

void push_value(std::vector<std::uint32_t>& out, const Ontology& onto, std::size_t slot,
                const std::string& value, ExtractStats* stats) {
  if (auto idx = onto.value_index(slot, value)) {
    out.push_back(*idx);
  } else if (stats) {
    ++stats->out_of_ontology;
  }
}

void sort_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

RuleMask RuleMask::parse(std::string_view s) {
  if (s.size() != 5 || s.find_first_not_of("01") != std::string_view::npos)
    throw ValidationError("rule mask must be 5 binary characters, got '" + std::string(s) + "'");
  RuleMask m;
  m.inform = s[0] == '1';
  m.expl_conf = s[1] == '1';
  m.impl_conf = s[2] == '1';
  m.negate = s[3] == '1';
  m.deny = s[4] == '1';
  return m;
}

std::string RuleMask::str() const {
  std::string s(5, '0');
  s[0] = inform ? '1' : '0';
  s[1] = expl_conf ? '1' : '0';
  s[2] = impl_conf ? '1' : '0';
  s[3] = negate ? '1' : '0';
  s[4] = deny ? '1' : '0';
  return s;
}

SlotInfo SlotInfo::make_negated(std::vector<std::uint32_t> vs) {
  sort_unique(vs);
  return SlotInfo{Kind::negated, 0, std::move(vs)};
}

bool SlotInfo::negates(std::uint32_t v) const {
  return kind == Kind::negated && std::binary_search(negated.begin(), negated.end(), v);
}

SlotEvidence slot_evidence(const Utterance& machine, const Utterance& user, std::size_t slot,
                           const Ontology& onto, const RuleMask& mask, ExtractStats* stats) {
  SlotEvidence ev;
  const std::string& slot_name = onto.slot_name(slot);
  const bool user_affirms = user.contains(kAffirm);
  const bool user_negates = user.contains(kNegate);

  if (mask.inform || mask.deny) {
    for (const auto& act : user.acts) {
      if (mask.inform && act.label == "inform") {
        for (const auto& sv : act.args)
          if (sv.slot == slot_name) push_value(ev.positives, onto, slot, sv.value, stats);
      } else if (mask.deny && act.label == "deny") {
        for (const auto& sv : act.args)
          if (sv.slot == slot_name) push_value(ev.negatives, onto, slot, sv.value, stats);
      }
    }
  }

  for (const auto& act : machine.acts) {
    if (act.label == "expl-conf") {
      for (const auto& sv : act.args) {
        if (sv.slot != slot_name) continue;
        if (mask.expl_conf && user_affirms) push_value(ev.positives, onto, slot, sv.value, stats);
        if (mask.negate && user_negates) push_value(ev.negatives, onto, slot, sv.value, stats);
      }
    } else if (act.label == "impl-conf" && mask.impl_conf && !user_negates) {
      for (const auto& sv : act.args)
        if (sv.slot == slot_name) push_value(ev.positives, onto, slot, sv.value, stats);
    }
  }

  sort_unique(ev.positives);
  sort_unique(ev.negatives);
  return ev;
}

std::vector<SlotInfo> fuse_slot(const SlotEvidence& ev, const Utterance& user) {
  if ((ev.positives.empty() && ev.negatives.empty()) || user.empty())
    return {SlotInfo::make_unknown()};

  if (ev.positives.empty()) return {SlotInfo::make_negated(ev.negatives)};

  std::vector<SlotInfo> out;
  out.reserve(ev.positives.size() + 1);
  for (std::uint32_t v : ev.positives) out.push_back(SlotInfo::make_positive(v));

  // Negatives that conflict with a positive are kept as one extra set; the
  // rest are dropped as less informative than the positives.
  std::vector<std::uint32_t> kept;
  for (std::uint32_t v : ev.negatives)
    if (std::binary_search(ev.positives.begin(), ev.positives.end(), v)) kept.push_back(v);
  if (!kept.empty()) out.push_back(SlotInfo::make_negated(std::move(kept)));
  return out;
}

std::vector<Info> extract_infos(const Utterance& machine, const Utterance& user,
                                const Ontology& onto, const RuleMask& mask, ExtractStats* stats) {
  const std::size_t n_slots = onto.slot_count();
  std::vector<std::vector<SlotInfo>> options;
  options.reserve(n_slots);
  std::size_t total = 1;
  for (std::size_t s = 0; s < n_slots; ++s) {
    options.push_back(fuse_slot(slot_evidence(machine, user, s, onto, mask, stats), user));
    total *= options.back().size();
  }

  std::vector<Info> infos;
  infos.reserve(total);
  std::vector<std::size_t> odometer(n_slots, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Info info;
    info.slots.reserve(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) info.slots.push_back(options[s][odometer[s]]);
    infos.push_back(std::move(info));
    for (std::size_t s = n_slots; s-- > 0;) {
      if (++odometer[s] < options[s].size()) break;
      odometer[s] = 0;
    }
  }
  return infos;
}

}  // namespace yarbus
