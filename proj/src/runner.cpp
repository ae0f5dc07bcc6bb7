#include "yarbus/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "yarbus/baselines.hpp"
#include "yarbus/errors.hpp"

namespace yarbus {

namespace fs = std::filesystem;

TrackerKind parse_tracker(std::string_view name) {
  if (name == "yarbus") return TrackerKind::yarbus;
  if (name == "tophyp") return TrackerKind::tophyp;
  if (name == "focus") return TrackerKind::focus;
  throw ValidationError("unknown tracker '" + std::string(name) + "', expected yarbus|tophyp|focus");
}

const char* tracker_name(TrackerKind kind) {
  switch (kind) {
    case TrackerKind::yarbus: return "yarbus";
    case TrackerKind::tophyp: return "tophyp";
    case TrackerKind::focus: return "focus";
  }
  return "?";
}

std::string RunConfig::slu_source_label() const {
  switch (slu) {
    case SluSourceKind::live: return "live";
    case SluSourceKind::oracle: return "oracle";
    case SluSourceKind::file: return fs::path(slu_file).filename().string();
  }
  return "?";
}

std::string RunConfig::dataset_label() const {
  if (!dataset_name.empty()) return dataset_name;
  return fs::path(flist).stem().string();
}

void TrackStats::merge(const TrackStats& other) {
  belief_sizes.insert(belief_sizes.end(), other.belief_sizes.begin(), other.belief_sizes.end());
  extract.merge(other.extract);
  preprocess.merge(other.preprocess);
  max_raw_slu_total_error = std::max(max_raw_slu_total_error, other.max_raw_slu_total_error);
}

std::vector<OutputTurn> yarbus_track_session(const DialogSession& session, const Ontology& onto,
                                             const RuleMask& mask, double theta,
                                             TrackStats* stats) {
  std::vector<Utterance> machine;
  machine.reserve(session.turns.size());
  for (const auto& turn : session.turns) machine.push_back(turn.machine);
  machine = resolve_repeat(machine);

  Belief belief = initial_belief(onto);
  std::vector<OutputTurn> out;
  out.reserve(session.turns.size());
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    const SluHypotheses hyps = unthis_hyps(session.turns[t].slu, machine[t], onto,
                                           stats ? &stats->preprocess : nullptr);
    belief = update(belief, machine[t], hyps, onto, mask, stats ? &stats->extract : nullptr);
    belief = prune(belief, theta);
    if (stats) {
      stats->belief_sizes.push_back(belief.size());
      stats->max_raw_slu_total_error =
          std::max(stats->max_raw_slu_total_error, std::fabs(session.turns[t].slu_raw_total - 1.0));
    }
    out.push_back(make_ranked_turn(ranked(belief), onto));
  }
  return out;
}

namespace {

struct LoadedRun {
  Ontology onto;
  std::vector<std::string> names;             // flist order
  std::vector<std::optional<DialogSession>> sessions;  // nullopt = failed
  std::vector<std::string> warnings;
  std::size_t ontology_values_merged = 0;
  std::size_t sessions_with_user_acts_semantics = 0;
};

void validate_config(const RunConfig& cfg) {
  if (cfg.theta < 0.0 || cfg.theta >= 1.0)
    throw ValidationError("theta must be in [0, 1)");
  if (cfg.jobs < 1) throw ValidationError("jobs must be at least 1");
  if (cfg.flist.empty()) throw ValidationError("an flist is required");
  if (cfg.ontology_path.empty()) throw ValidationError("an ontology is required");
}

LoadedRun load_all_sessions(const RunConfig& cfg) {
  LoadedRun run;
  run.onto = Ontology::load_file(cfg.ontology_path, &run.ontology_values_merged);
  run.names = read_flist(cfg.flist);
  run.sessions.resize(run.names.size());

  std::optional<SluOverride> override;
  if (cfg.slu == SluSourceKind::file) override = load_slu_override_file(cfg.slu_file);

  std::vector<std::string> errors(run.names.size());
  detail::parallel_for(run.names.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const fs::path dir = fs::path(cfg.dataset_root) / run.names[i];
      const fs::path log = dir / "log.json";
      const fs::path label = dir / "label.json";
      DialogSession s =
          load_session_file(log.string(), fs::exists(label) ? label.string() : "", run.onto);
      if (override) s = apply_slu_override(std::move(s), *override);
      if (cfg.slu == SluSourceKind::oracle) s = oracle_slu(std::move(s));
      run.sessions[i] = std::move(s);
    } catch (const std::exception& e) {
      errors[i] = run.names[i] + ": " + e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) run.warnings.push_back(e);
  for (const auto& s : run.sessions)
    if (s && s->semantics_from_user_acts) ++run.sessions_with_user_acts_semantics;
  return run;
}

struct TrackedSessions {
  std::vector<OutputSession> sessions;  // flist order, failures skipped
  TrackStats stats;
  std::vector<std::string> warnings;
};

TrackedSessions track_all(const LoadedRun& run, const RunConfig& cfg, const RuleMask& mask) {
  std::vector<std::optional<OutputSession>> results(run.sessions.size());
  std::vector<TrackStats> stats(run.sessions.size());
  std::vector<std::string> errors(run.sessions.size());

  detail::parallel_for(run.sessions.size(), cfg.jobs, [&](std::size_t i) {
    if (!run.sessions[i]) return;
    const DialogSession& session = *run.sessions[i];
    try {
      OutputSession out;
      out.session_id = session.session_id;
      switch (cfg.tracker) {
        case TrackerKind::yarbus:
          out.turns = yarbus_track_session(session, run.onto, mask, cfg.theta, &stats[i]);
          break;
        case TrackerKind::tophyp:
          out.turns = tophyp_track_session(session, run.onto, cfg.baseline_resolve_this);
          break;
        case TrackerKind::focus:
          out.turns =
              focus_track_session(session, run.onto, cfg.focus_top_k, cfg.baseline_resolve_this);
          break;
      }
      results[i] = std::move(out);
    } catch (const std::exception& e) {
      errors[i] = session.session_id + ": " + e.what();
    }
  });

  TrackedSessions tracked;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i]) {
      tracked.sessions.push_back(std::move(*results[i]));
      tracked.stats.merge(stats[i]);
    } else if (!errors[i].empty()) {
      tracked.warnings.push_back(errors[i]);
    }
  }
  return tracked;
}

std::vector<DialogSession> labeled_sessions(const LoadedRun& run) {
  std::vector<DialogSession> out;
  for (const auto& s : run.sessions)
    if (s) out.push_back(*s);
  return out;
}

bool all_turns_labeled(const std::vector<DialogSession>& sessions) {
  for (const auto& s : sessions)
    for (const auto& t : s.turns)
      if (!t.label_goal) return false;
  return true;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << text;
  if (!os) throw IoError("failed writing: " + path);
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7f", v);
  return buf;
}

}  // namespace

const MetricsReport* RunResult::report_for(Schedule schedule) const {
  for (const auto& r : reports)
    if (r.schedule == schedule) return &r;
  return nullptr;
}

RunResult run_track(const RunConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  LoadedRun run = load_all_sessions(cfg);
  TrackedSessions tracked = track_all(run, cfg, cfg.mask);

  RunResult result;
  result.warnings = run.warnings;
  result.warnings.insert(result.warnings.end(), tracked.warnings.begin(), tracked.warnings.end());
  result.stats = std::move(tracked.stats);
  result.ontology_values_merged = run.ontology_values_merged;
  result.sessions_with_user_acts_semantics = run.sessions_with_user_acts_semantics;
  result.output.dataset = cfg.dataset_label();
  result.output.sessions = std::move(tracked.sessions);

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.output.wall_time = cfg.emit_wall_time ? result.wall_seconds : 0.0;

  const std::vector<DialogSession> sessions = labeled_sessions(run);
  if (!sessions.empty() && all_turns_labeled(sessions)) {
    for (Schedule schedule : {Schedule::all_turns, Schedule::after_evidence}) {
      const bool featured = schedule == cfg.schedule;
      result.reports.push_back(score_output(result.output, sessions, schedule,
                                            featured ? &result.roc_points : nullptr));
    }
  }

  if (!cfg.out_path.empty()) write_tracker_output_file(result.output, cfg.out_path);
  if (!cfg.report_path.empty())
    write_text_file(cfg.report_path, metrics_json(cfg, result.reports, result.wall_seconds));
  if (!cfg.report_csv_path.empty()) {
    std::string csv = metrics_csv_header();
    for (const auto& r : result.reports) csv += metrics_csv_row(cfg, r);
    write_text_file(cfg.report_csv_path, csv);
  }
  if (!cfg.roc_csv_path.empty()) write_text_file(cfg.roc_csv_path, roc_csv(result.roc_points));
  return result;
}

std::vector<AblateRow> run_ablate(const RunConfig& cfg) {
  validate_config(cfg);
  LoadedRun run = load_all_sessions(cfg);
  if (!run.warnings.empty())
    throw ValidationError("ablate: failed to load sessions: " + run.warnings.front());
  const std::vector<DialogSession> sessions = labeled_sessions(run);
  if (sessions.empty() || !all_turns_labeled(sessions))
    throw ValidationError("ablate: every session must be labeled");

  std::vector<AblateRow> rows;
  rows.reserve(32);
  for (unsigned bits = 0; bits < 32; ++bits) {
    std::string mask_str(5, '0');
    for (unsigned b = 0; b < 5; ++b)
      if (bits & (1u << (4 - b))) mask_str[b] = '1';
    const RuleMask mask = RuleMask::parse(mask_str);

    TrackedSessions tracked = track_all(run, cfg, mask);
    if (!tracked.warnings.empty())
      throw ValidationError("ablate: tracking failed: " + tracked.warnings.front());
    TrackerOutput output;
    output.dataset = cfg.dataset_label();
    output.sessions = std::move(tracked.sessions);
    rows.push_back({mask, score_output(output, sessions, cfg.schedule)});
  }
  return rows;
}

StatsResult run_stats(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.tracker != TrackerKind::yarbus)
    throw ValidationError("stats: belief sizes are only defined for the yarbus tracker");
  LoadedRun run = load_all_sessions(cfg);
  TrackedSessions tracked = track_all(run, cfg, cfg.mask);

  StatsResult result;
  result.warnings = run.warnings;
  result.warnings.insert(result.warnings.end(), tracked.warnings.begin(), tracked.warnings.end());
  for (std::size_t size : tracked.stats.belief_sizes) {
    ++result.histogram[size];
    result.max_size = std::max(result.max_size, size);
  }
  return result;
}

MetricsReport run_score(const std::string& output_path, const RunConfig& cfg,
                        std::vector<RocPoint>* roc_points) {
  validate_config(cfg);
  LoadedRun run = load_all_sessions(cfg);
  if (!run.warnings.empty())
    throw ValidationError("score: failed to load sessions: " + run.warnings.front());
  const std::vector<DialogSession> sessions = labeled_sessions(run);
  const TrackerOutput output = parse_tracker_output_file(output_path, &run.onto);
  return score_output(output, sessions, cfg.schedule, roc_points);
}

std::string metrics_csv_header() { return "dataset,slu,mask,schedule,accuracy,l2,roc_ca5,turns\n"; }

std::string metrics_csv_row(const RunConfig& cfg, const MetricsReport& report) {
  std::ostringstream os;
  os << cfg.dataset_label() << ',' << cfg.slu_source_label() << ',' << cfg.mask.str() << ','
     << static_cast<int>(report.schedule) << ',' << format_metric(report.accuracy) << ','
     << format_metric(report.l2) << ',' << format_metric(report.roc_ca5) << ','
     << report.turns_scored << '\n';
  return os.str();
}

std::string metrics_json(const RunConfig& cfg, const std::vector<MetricsReport>& reports,
                         double wall_seconds) {
  nlohmann::ordered_json doc;
  doc["dataset"] = cfg.dataset_label();
  doc["slu"] = cfg.slu_source_label();
  doc["tracker"] = tracker_name(cfg.tracker);
  doc["mask"] = cfg.mask.str();
  doc["theta"] = cfg.theta;
  if (cfg.tracker == TrackerKind::focus) doc["focus-top-k"] = cfg.focus_top_k;
  doc["wall-seconds"] = wall_seconds;
  doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json jr;
    jr["schedule"] = static_cast<int>(r.schedule);
    jr["accuracy"] = r.accuracy;
    jr["l2"] = r.l2;
    jr["roc_ca5"] = r.roc_ca5;
    jr["turns"] = r.turns_scored;
    jr["mistakes"] = r.mistakes;
    doc["reports"].push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::ostringstream os;
  os << "theta,ca,fa\n";
  for (const auto& p : points) {
    if (std::isinf(p.theta))
      os << "inf";
    else
      os << format_metric(p.theta);
    os << ',' << format_metric(p.ca) << ',' << format_metric(p.fa) << '\n';
  }
  return os.str();
}

std::string ablate_csv(const std::vector<AblateRow>& rows) {
  std::ostringstream os;
  os << "mask,accuracy,l2,roc_ca5,turns\n";
  for (const auto& row : rows)
    os << row.mask.str() << ',' << format_metric(row.report.accuracy) << ','
       << format_metric(row.report.l2) << ',' << format_metric(row.report.roc_ca5) << ','
       << row.report.turns_scored << '\n';
  return os.str();
}

std::string stats_csv(const StatsResult& stats) {
  std::ostringstream os;
  os << "belief_size,turns\n";
  for (const auto& [size, count] : stats.histogram) os << size << ',' << count << '\n';
  return os.str();
}

}  // namespace yarbus
