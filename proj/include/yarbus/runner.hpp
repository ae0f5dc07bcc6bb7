#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yarbus/belief.hpp"
#include "yarbus/extract.hpp"
#include "yarbus/ingest.hpp"
#include "yarbus/metrics.hpp"
#include "yarbus/ontology.hpp"
#include "yarbus/preprocess.hpp"

namespace yarbus {

enum class TrackerKind { yarbus, tophyp, focus };
enum class SluSourceKind { live, oracle, file };

TrackerKind parse_tracker(std::string_view name);
const char* tracker_name(TrackerKind kind);

struct RunConfig {
  std::string dataset_root;
  std::string flist;
  std::string ontology_path;

  SluSourceKind slu = SluSourceKind::live;
  std::string slu_file;  // when slu == file

  RuleMask mask = RuleMask::all();
  double theta = 1e-2;
  TrackerKind tracker = TrackerKind::yarbus;
  Schedule schedule = Schedule::after_evidence;
  unsigned jobs = 1;
  std::size_t focus_top_k = 20;
  bool baseline_resolve_this = true;

  // the output document's "dataset" field; defaults to the flist stem
  std::string dataset_name;
  // measured wall time goes to the report; the output file records 0 unless
  // this is set, so repeated runs stay byte-identical
  bool emit_wall_time = false;

  std::string out_path;
  std::string report_path;      // JSON report
  std::string report_csv_path;  // CSV mirror
  std::string roc_csv_path;     // (theta, ca, fa) points

  std::string slu_source_label() const;
  std::string dataset_label() const;
};

struct TrackStats {
  std::vector<std::size_t> belief_sizes;  // after pruning, one per turn
  ExtractStats extract;
  PreprocessStats preprocess;
  double max_raw_slu_total_error = 0.0;  // max |raw score total - 1| seen

  void merge(const TrackStats& other);
};

// One full pass of the joint-goal tracker over a session: resolves repeats,
// this-resolves the SLU, then per turn extracts, updates and prunes.
std::vector<OutputTurn> yarbus_track_session(const DialogSession& session, const Ontology& onto,
                                             const RuleMask& mask, double theta,
                                             TrackStats* stats = nullptr);

struct RunResult {
  TrackerOutput output;
  std::vector<MetricsReport> reports;  // both schedules, when labels exist
  std::vector<RocPoint> roc_points;    // for the configured schedule
  double wall_seconds = 0.0;
  TrackStats stats;
  std::vector<std::string> warnings;  // per-session failures, one line each

  // load-time notes
  std::size_t ontology_values_merged = 0;          // values collapsed by canonicalization
  std::size_t sessions_with_user_acts_semantics = 0;  // labels using the user-acts spelling

  const MetricsReport* report_for(Schedule schedule) const;
};

// Tracks every session in the flist, writes the configured artifacts and
// scores the output when labels are present. Per-session failures are
// collected in `warnings` and the remaining sessions are still processed.
RunResult run_track(const RunConfig& cfg);

struct AblateRow {
  RuleMask mask;
  MetricsReport report;
};

// run_track for each of the 32 masks, sessions loaded once.
std::vector<AblateRow> run_ablate(const RunConfig& cfg);

struct StatsResult {
  std::map<std::size_t, std::uint64_t> histogram;  // belief size -> turn count
  std::size_t max_size = 0;
  std::vector<std::string> warnings;
};

// Tracks while recording the belief size after every prune.
StatsResult run_stats(const RunConfig& cfg);

// Re-scores an existing tracker-output file against the configured labels.
MetricsReport run_score(const std::string& output_path, const RunConfig& cfg,
                        std::vector<RocPoint>* roc_points = nullptr);

// Report serialization shared by the CLI and the tests.
std::string metrics_csv_header();
std::string metrics_csv_row(const RunConfig& cfg, const MetricsReport& report);
std::string metrics_json(const RunConfig& cfg, const std::vector<MetricsReport>& reports,
                         double wall_seconds);
std::string roc_csv(const std::vector<RocPoint>& points);
std::string ablate_csv(const std::vector<AblateRow>& rows);
std::string stats_csv(const StatsResult& stats);

}  // namespace yarbus
