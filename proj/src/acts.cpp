#include "yarbus/acts.hpp"

#include <algorithm>
#include <map>

#include "yarbus/errors.hpp"

namespace yarbus {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

DialogAct::DialogAct(std::string label_, std::vector<SlotValue> args_)
    : label(std::move(label_)), args(std::move(args_)) {
  sort_unique(args);
}

bool DialogAct::has_arg(std::string_view slot, std::string_view value) const {
  return std::any_of(args.begin(), args.end(), [&](const SlotValue& sv) {
    return sv.slot == slot && sv.value == value;
  });
}

bool DialogAct::has_slot(std::string_view slot) const {
  return std::any_of(args.begin(), args.end(),
                     [&](const SlotValue& sv) { return sv.slot == slot; });
}

Utterance::Utterance(std::vector<DialogAct> acts_) : acts(std::move(acts_)) {
  sort_unique(acts);
}

bool Utterance::contains(const DialogAct& a) const {
  return std::binary_search(acts.begin(), acts.end(), a);
}

bool Utterance::contains_label(std::string_view label) const {
  return std::any_of(acts.begin(), acts.end(),
                     [&](const DialogAct& a) { return a.label == label; });
}

double SluHypotheses::total() const {
  double t = 0.0;
  for (const auto& [u, p] : entries) t += p;
  return t;
}

SluHypotheses normalize_hyps(std::vector<std::pair<Utterance, double>> raw) {
  std::map<Utterance, double> merged;
  double total = 0.0;
  for (auto& [u, score] : raw) {
    if (score < 0.0) throw ValidationError("normalize_hyps: negative SLU score");
    merged[std::move(u)] += score;
    total += score;
  }

  SluHypotheses out;
  if (merged.empty() || total <= 0.0) {
    out.entries.emplace_back(Utterance{}, 1.0);
    return out;
  }
  for (auto& [u, score] : merged) {
    const double p = score / total;
    if (p > 0.0) out.entries.emplace_back(u, p);
  }
  return out;
}

}  // namespace yarbus
