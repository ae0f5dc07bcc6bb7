#pragma once

#include <cstdint>
#include <vector>

#include "yarbus/ingest.hpp"
#include "yarbus/ontology.hpp"

namespace yarbus {

// schedule1 scores every turn; schedule2 scores a turn once joint-goal
// evidence has appeared up to and including it.
enum class Schedule { all_turns = 1, after_evidence = 2 };

struct MetricsReport {
  double accuracy = 0.0;
  double l2 = 0.0;
  double roc_ca5 = 0.0;
  std::uint64_t turns_scored = 0;
  std::uint64_t mistakes = 0;
  Schedule schedule = Schedule::after_evidence;
};

// One point of the correct-accept / false-accept curve at threshold theta.
struct RocPoint {
  double theta = 0.0;
  double ca = 0.0;
  double fa = 0.0;
};

std::vector<bool> schedule_mask(const DialogSession& session, Schedule schedule);

// Scores a tracker output against labeled sessions. Sessions are joined by
// session-id; the two sets must match exactly and every scheduled turn must
// carry a goal label.
MetricsReport score_output(const TrackerOutput& output, const std::vector<DialogSession>& sessions,
                           Schedule schedule, std::vector<RocPoint>* roc_points = nullptr);

}  // namespace yarbus
