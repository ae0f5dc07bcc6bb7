#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "yarbus/acts.hpp"
#include "yarbus/belief.hpp"
#include "yarbus/ontology.hpp"

namespace yarbus {

struct Turn {
  Utterance machine;
  SluHypotheses slu;
  std::optional<std::map<std::string, std::string>> label_goal;
  std::optional<Utterance> label_semantics;

  // whether the live SLU or machine acts up to ingest carried any joint-goal
  // evidence; frozen at load so SLU overrides do not change the schedule
  bool live_evidence = false;
  // raw score total before normalization, for diagnostics
  double slu_raw_total = 0.0;
};

struct DialogSession {
  std::string session_id;
  std::vector<Turn> turns;
  // labels provided their semantics under "user-acts" instead of "semantics"
  bool semantics_from_user_acts = false;
};

// One ranked joint-goal hypothesis: informed slots only, unknown omitted.
struct JointHyp {
  std::map<std::string, std::string> slots;
  double score = 0.0;
  bool operator==(const JointHyp&) const = default;
};

struct OutputTurn {
  std::vector<JointHyp> hyps;  // ranked descending
  bool operator==(const OutputTurn&) const = default;
};

struct OutputSession {
  std::string session_id;
  std::vector<OutputTurn> turns;
  bool operator==(const OutputSession&) const = default;
};

struct TrackerOutput {
  std::string dataset;
  double wall_time = 0.0;
  std::vector<OutputSession> sessions;
  bool operator==(const TrackerOutput&) const = default;
};

// True when the turn carries joint-goal evidence: an inform, expl-conf,
// impl-conf or deny act over an informable slot, in the machine utterance or
// any SLU hypothesis.
bool goal_evidence(const Utterance& machine, const SluHypotheses& slu, const Ontology& onto);

// Reads one DSTC-format session. Machine acts come from each turn's
// output dialog-acts, the SLU from input.live slu-hyps (normalized), labels
// from the optional label document.
DialogSession load_session(std::istream& log, std::istream* label, const Ontology& onto);
DialogSession load_session_file(const std::string& log_path, const std::string& label_path,
                                const Ontology& onto);

// One session path per line; blank lines ignored.
std::vector<std::string> read_flist(const std::string& path);

// External SLU keyed by session-id and turn index, same act-list + score
// shape as the live SLU.
struct SluOverride {
  std::map<std::string, std::map<int, std::vector<std::pair<Utterance, double>>>> sessions;
};

SluOverride load_slu_override(std::istream& in);
SluOverride load_slu_override_file(const std::string& path);

// Replaces every turn's SLU with the override entries (normalized). Every
// turn of the session must be covered.
DialogSession apply_slu_override(DialogSession session, const SluOverride& ov);

// Replaces every turn's SLU with the labeled semantics at probability 1.
DialogSession oracle_slu(DialogSession session);

// Rounds to `digits` significant digits (the tracker-output score precision).
double round_sig(double x, int digits = 9);

// Rounds scores to 9 significant digits, ranks descending with ties broken
// by goal order, and serializes goals as slot maps.
OutputTurn make_ranked_turn(const std::vector<std::pair<Goal, double>>& entries,
                            const Ontology& onto);

void write_tracker_output(const TrackerOutput& out, std::ostream& os);
void write_tracker_output_file(const TrackerOutput& out, const std::string& path);

// Parses and validates a tracker-output document. When an ontology is given,
// every hypothesis is validated against it.
TrackerOutput parse_tracker_output(std::istream& in, const Ontology* onto = nullptr);
TrackerOutput parse_tracker_output_file(const std::string& path, const Ontology* onto = nullptr);

}  // namespace yarbus
