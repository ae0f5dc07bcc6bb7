#include "yarbus/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "yarbus/errors.hpp"

namespace yarbus {

std::vector<bool> schedule_mask(const DialogSession& session, Schedule schedule) {
  std::vector<bool> mask(session.turns.size(), true);
  if (schedule == Schedule::all_turns) return mask;
  bool seen = false;
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    seen = seen || session.turns[t].live_evidence;
    mask[t] = seen;
  }
  return mask;
}

namespace {

struct ScoredTurn {
  bool correct = false;
  double top_score = -std::numeric_limits<double>::infinity();
};

double roc_ca5(const std::vector<ScoredTurn>& turns, std::vector<RocPoint>* points) {
  const double n = static_cast<double>(turns.size());
  if (points) points->push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  if (turns.empty()) return 0.0;

  std::vector<ScoredTurn> sorted = turns;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredTurn& a, const ScoredTurn& b) { return a.top_score > b.top_score; });

  double best = 0.0;  // theta = +inf is always feasible with CA = 0
  std::size_t correct_accepts = 0, false_accepts = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double theta = sorted[i].top_score;
    if (!std::isfinite(theta)) break;  // turns with no emitted hypothesis
    for (; i < sorted.size() && sorted[i].top_score == theta; ++i) {
      if (sorted[i].correct)
        ++correct_accepts;
      else
        ++false_accepts;
    }
    const double ca = static_cast<double>(correct_accepts) / n;
    const double fa = static_cast<double>(false_accepts) / n;
    if (points) points->push_back({theta, ca, fa});
    if (fa <= 0.05) best = std::max(best, ca);
  }
  return best;
}

}  // namespace

MetricsReport score_output(const TrackerOutput& output, const std::vector<DialogSession>& sessions,
                           Schedule schedule, std::vector<RocPoint>* roc_points) {
  std::map<std::string, const DialogSession*> labels;
  for (const auto& s : sessions)
    if (!labels.emplace(s.session_id, &s).second)
      throw ValidationError("scoring: duplicate session-id " + s.session_id);

  std::map<std::string, const OutputSession*> outputs;
  for (const auto& s : output.sessions)
    if (!outputs.emplace(s.session_id, &s).second)
      throw ValidationError("scoring: duplicate session-id " + s.session_id + " in tracker output");

  if (labels.size() != outputs.size())
    throw ValidationError("scoring: tracker output covers " + std::to_string(outputs.size()) +
                          " sessions but labels cover " + std::to_string(labels.size()));

  std::uint64_t n_correct = 0;
  std::uint64_t n_scored = 0;
  double l2_sum = 0.0;
  std::vector<ScoredTurn> scored;

  // Iterate in session-id order so the metrics are independent of the file's
  // session ordering.
  for (const auto& [sid, out_session] : outputs) {
    auto lit = labels.find(sid);
    if (lit == labels.end())
      throw ValidationError("scoring: session " + sid + " has no labels");
    const DialogSession& session = *lit->second;
    if (session.turns.size() != out_session->turns.size())
      throw ValidationError("scoring: session " + sid + " turn count mismatch");

    const std::vector<bool> mask = schedule_mask(session, schedule);
    for (std::size_t t = 0; t < session.turns.size(); ++t) {
      if (!mask[t]) continue;
      if (!session.turns[t].label_goal)
        throw ValidationError("scoring: session " + sid + " turn " + std::to_string(t) +
                              " is scheduled but has no goal label");
      const auto& label = *session.turns[t].label_goal;
      const OutputTurn& turn = out_session->turns[t];

      ScoredTurn st;
      if (!turn.hyps.empty()) {
        st.correct = turn.hyps.front().slots == label;
        st.top_score = turn.hyps.front().score;
      }
      ++n_scored;
      if (st.correct) ++n_correct;
      scored.push_back(st);

      // squared error over the union of emitted goals and the label goal
      double turn_l2 = 0.0;
      bool label_emitted = false;
      std::map<std::map<std::string, std::string>, double> mass;
      for (const auto& hyp : turn.hyps) mass[hyp.slots] += hyp.score;
      for (const auto& [goal, p] : mass) {
        if (goal == label) {
          turn_l2 += (p - 1.0) * (p - 1.0);
          label_emitted = true;
        } else {
          turn_l2 += p * p;
        }
      }
      if (!label_emitted) turn_l2 += 1.0;
      l2_sum += turn_l2;
    }
  }

  MetricsReport report;
  report.schedule = schedule;
  report.turns_scored = n_scored;
  report.mistakes = n_scored - n_correct;
  if (n_scored > 0) {
    report.accuracy = static_cast<double>(n_correct) / static_cast<double>(n_scored);
    report.l2 = l2_sum / static_cast<double>(n_scored);
    report.roc_ca5 = roc_ca5(scored, roc_points);
  }
  return report;
}

}  // namespace yarbus
