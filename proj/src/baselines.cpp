#include "yarbus/baselines.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "yarbus/preprocess.hpp"

namespace yarbus {

MarginalBelief MarginalBelief::initial(const Ontology& onto) {
  MarginalBelief mb;
  mb.per_slot.resize(onto.slot_count());
  for (auto& dist : mb.per_slot) dist[Goal::kUnknown] = 1.0;
  return mb;
}

double MarginalBelief::slot_mass(std::size_t s) const {
  double m = 0.0;
  for (const auto& [v, p] : per_slot[s]) m += p;
  return m;
}

std::vector<std::map<std::uint32_t, double>> informed_marginals(const SluHypotheses& slu,
                                                                const Ontology& onto) {
  std::vector<std::map<std::uint32_t, double>> q(onto.slot_count());
  for (const auto& [u, p] : slu.entries) {
    for (const auto& act : u.acts) {
      if (act.label != "inform") continue;
      for (const auto& sv : act.args) {
        auto si = onto.slot_index(sv.slot);
        if (!si) continue;
        auto vi = onto.value_index(*si, sv.value);
        if (!vi) continue;
        q[*si][*vi] += p;
      }
    }
  }
  return q;
}

MarginalBelief focus_update(const MarginalBelief& prev, const SluHypotheses& slu,
                            const Ontology& onto) {
  auto q = informed_marginals(slu, onto);
  MarginalBelief next;
  next.per_slot.resize(onto.slot_count());
  for (std::size_t s = 0; s < onto.slot_count(); ++s) {
    double q_sum = 0.0;
    for (const auto& [v, p] : q[s]) q_sum += p;
    if (q_sum > 1.0) {  // a hypothesis informed several values for one slot
      for (auto& [v, p] : q[s]) p /= q_sum;
      q_sum = 1.0;
    }
    const double decay = 1.0 - q_sum;
    auto& dist = next.per_slot[s];
    dist = q[s];
    for (const auto& [v, p] : prev.per_slot[s]) {
      const double carried = p * decay;
      if (carried > 0.0) dist[v] += carried;
    }
    // guard against drift
    double total = 0.0;
    for (const auto& [v, p] : dist) total += p;
    if (total > 0.0)
      for (auto& [v, p] : dist) p /= total;
    std::erase_if(dist, [](const auto& kv) { return kv.second <= 0.0; });
    if (dist.empty()) dist[Goal::kUnknown] = 1.0;
  }
  return next;
}

std::vector<std::pair<Goal, double>> top_joints(const MarginalBelief& mb, std::size_t top_k) {
  const std::size_t n_slots = mb.per_slot.size();

  // per-slot options sorted by descending probability, value order on ties
  std::vector<std::vector<std::pair<std::uint32_t, double>>> options(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    options[s].assign(mb.per_slot[s].begin(), mb.per_slot[s].end());
    std::stable_sort(options[s].begin(), options[s].end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
  }

  struct Node {
    double score;
    std::vector<std::size_t> idx;
  };
  auto node_goal = [&](const Node& n) {
    Goal g;
    g.values.reserve(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) g.values.push_back(options[s][n.idx[s]].first);
    return g;
  };
  auto cmp = [&](const Node& a, const Node& b) {
    if (a.score != b.score) return a.score < b.score;  // max-heap on score
    return node_goal(a) > node_goal(b);
  };

  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  std::set<std::vector<std::size_t>> seen;

  Node first{1.0, std::vector<std::size_t>(n_slots, 0)};
  for (std::size_t s = 0; s < n_slots; ++s) first.score *= options[s][0].second;
  heap.push(first);
  seen.insert(first.idx);

  std::vector<std::pair<Goal, double>> out;
  while (!heap.empty() && out.size() < top_k) {
    Node node = heap.top();
    heap.pop();
    if (node.score <= 0.0) break;
    out.emplace_back(node_goal(node), node.score);
    for (std::size_t s = 0; s < n_slots; ++s) {
      if (node.idx[s] + 1 >= options[s].size()) continue;
      Node child = node;
      ++child.idx[s];
      if (!seen.insert(child.idx).second) continue;
      child.score = node.score / options[s][node.idx[s]].second * options[s][child.idx[s]].second;
      heap.push(child);
    }
  }
  return out;
}

namespace {

std::vector<SluHypotheses> preprocessed_slu(const DialogSession& session, const Ontology& onto,
                                            bool resolve_this) {
  std::vector<Utterance> machine;
  machine.reserve(session.turns.size());
  for (const auto& turn : session.turns) machine.push_back(turn.machine);
  machine = resolve_repeat(machine);

  std::vector<SluHypotheses> slu;
  slu.reserve(session.turns.size());
  for (std::size_t t = 0; t < session.turns.size(); ++t)
    slu.push_back(resolve_this ? unthis_hyps(session.turns[t].slu, machine[t], onto)
                               : session.turns[t].slu);
  return slu;
}

const Utterance& best_hypothesis(const SluHypotheses& slu) {
  // highest probability wins; ties resolve to the first in utterance order
  const std::pair<Utterance, double>* best = &slu.entries.front();
  for (const auto& entry : slu.entries)
    if (entry.second > best->second) best = &entry;
  return best->first;
}

}  // namespace

std::vector<OutputTurn> tophyp_track_session(const DialogSession& session, const Ontology& onto,
                                             bool resolve_this) {
  const auto slu = preprocessed_slu(session, onto, resolve_this);
  Goal goal = Goal::all_unknown(onto);
  std::vector<OutputTurn> out;
  out.reserve(session.turns.size());
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    if (!slu[t].entries.empty()) {
      for (const auto& act : best_hypothesis(slu[t]).acts) {
        if (act.label != "inform") continue;
        for (const auto& sv : act.args) {
          auto si = onto.slot_index(sv.slot);
          if (!si) continue;
          auto vi = onto.value_index(*si, sv.value);
          if (!vi) continue;
          goal.values[*si] = *vi;
        }
      }
    }
    out.push_back(make_ranked_turn({{goal, 1.0}}, onto));
  }
  return out;
}

std::vector<OutputTurn> focus_track_session(const DialogSession& session, const Ontology& onto,
                                            std::size_t top_k, bool resolve_this) {
  const auto slu = preprocessed_slu(session, onto, resolve_this);
  MarginalBelief mb = MarginalBelief::initial(onto);
  std::vector<OutputTurn> out;
  out.reserve(session.turns.size());
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    mb = focus_update(mb, slu[t], onto);
    out.push_back(make_ranked_turn(top_joints(mb, top_k), onto));
  }
  return out;
}

}  // namespace yarbus
