#include "yarbus/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "yarbus/errors.hpp"
#include "yarbus/strings.hpp"

namespace yarbus {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(what + ": invalid JSON: " + e.what());
  }
}

std::string json_to_text(const json& v, const std::string& where) {
  if (v.is_string()) return canon(v.get<std::string>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw ParseError(where + ": expected a scalar");
}

DialogAct parse_act(const json& a, const std::string& where) {
  if (!a.is_object() || !a.contains("act"))
    throw ParseError(where + ": dialog act is missing 'act'");
  std::vector<SlotValue> args;
  if (a.contains("slots")) {
    if (!a["slots"].is_array()) throw ParseError(where + ": 'slots' is not an array");
    for (const auto& sv : a["slots"]) {
      if (!sv.is_array() || sv.size() != 2)
        throw ParseError(where + ": slot-value pair is not a 2-element array");
      args.push_back({json_to_text(sv[0], where), json_to_text(sv[1], where)});
    }
  }
  return DialogAct(canon(a["act"].get<std::string>()), std::move(args));
}

Utterance parse_utterance(const json& acts, const std::string& where) {
  if (!acts.is_array()) throw ParseError(where + ": act list is not an array");
  std::vector<DialogAct> out;
  out.reserve(acts.size());
  for (const auto& a : acts) out.push_back(parse_act(a, where));
  return Utterance(std::move(out));
}

std::vector<std::pair<Utterance, double>> parse_raw_hyps(const json& hyps,
                                                         const std::string& where) {
  if (!hyps.is_array()) throw ParseError(where + ": slu-hyps is not an array");
  std::vector<std::pair<Utterance, double>> raw;
  raw.reserve(hyps.size());
  for (const auto& h : hyps) {
    if (!h.is_object() || !h.contains("slu-hyp") || !h.contains("score"))
      throw ParseError(where + ": slu hypothesis needs 'slu-hyp' and 'score'");
    raw.emplace_back(parse_utterance(h["slu-hyp"], where), h["score"].get<double>());
  }
  return raw;
}

void check_turn_index(const json& turn, std::size_t expected, const std::string& what) {
  if (turn.contains("turn-index") && turn["turn-index"].get<long long>() !=
                                         static_cast<long long>(expected))
    throw ValidationError(what + ": turn indices are not contiguous at turn " +
                          std::to_string(expected));
}

double validated_score(double s, const std::string& where) {
  if (!std::isfinite(s) || s < 0.0 || s > 1.0 + 1e-9)
    throw ValidationError(where + ": score out of range");
  return s;
}

}  // namespace

bool goal_evidence(const Utterance& machine, const SluHypotheses& slu, const Ontology& onto) {
  auto mentions = [&](const Utterance& u) {
    for (const auto& act : u.acts) {
      if (act.label != "inform" && act.label != "expl-conf" && act.label != "impl-conf" &&
          act.label != "deny")
        continue;
      for (const auto& sv : act.args)
        if (onto.slot_index(sv.slot)) return true;
    }
    return false;
  };
  if (mentions(machine)) return true;
  for (const auto& [u, p] : slu.entries)
    if (mentions(u)) return true;
  return false;
}

DialogSession load_session(std::istream& log, std::istream* label, const Ontology& onto) {
  const json doc = parse_json(log, "log");
  if (!doc.contains("session-id") || !doc.contains("turns"))
    throw ParseError("log: missing 'session-id' or 'turns'");

  DialogSession session;
  session.session_id = trim(doc["session-id"].get<std::string>());

  const auto& turns = doc["turns"];
  if (!turns.is_array()) throw ParseError("log: 'turns' is not an array");
  session.turns.reserve(turns.size());
  for (std::size_t t = 0; t < turns.size(); ++t) {
    const std::string where = "log turn " + std::to_string(t);
    const auto& jt = turns[t];
    check_turn_index(jt, t, "log");

    Turn turn;
    if (!jt.contains("output") || !jt["output"].contains("dialog-acts"))
      throw ParseError(where + ": missing output.dialog-acts");
    turn.machine = parse_utterance(jt["output"]["dialog-acts"], where);

    if (!jt.contains("input") || !jt["input"].contains("live") ||
        !jt["input"]["live"].contains("slu-hyps"))
      throw ParseError(where + ": missing input.live.slu-hyps");
    auto raw = parse_raw_hyps(jt["input"]["live"]["slu-hyps"], where);
    for (const auto& [u, s] : raw) turn.slu_raw_total += s;
    try {
      turn.slu = normalize_hyps(std::move(raw));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    turn.live_evidence = goal_evidence(turn.machine, turn.slu, onto);
    session.turns.push_back(std::move(turn));
  }

  if (label) {
    const json ldoc = parse_json(*label, "label");
    if (!ldoc.contains("session-id") || !ldoc.contains("turns"))
      throw ParseError("label: missing 'session-id' or 'turns'");
    if (trim(ldoc["session-id"].get<std::string>()) != session.session_id)
      throw ValidationError("label session-id '" + trim(ldoc["session-id"].get<std::string>()) +
                            "' does not match log session-id '" + session.session_id + "'");
    const auto& lturns = ldoc["turns"];
    if (!lturns.is_array() || lturns.size() != session.turns.size())
      throw ValidationError("label: turn count differs from log (" + session.session_id + ")");

    for (std::size_t t = 0; t < lturns.size(); ++t) {
      const std::string where = "label turn " + std::to_string(t);
      const auto& jt = lturns[t];
      check_turn_index(jt, t, "label");
      Turn& turn = session.turns[t];

      if (jt.contains("goal-labels")) {
        if (!jt["goal-labels"].is_object()) throw ParseError(where + ": goal-labels is not an object");
        std::map<std::string, std::string> goal;
        for (const auto& [slot, value] : jt["goal-labels"].items()) {
          const std::string s = canon(slot);
          const std::string v = json_to_text(value, where);
          auto si = onto.slot_index(s);
          if (!si) throw ValidationError(where + ": labeled slot '" + s + "' not in ontology");
          if (!onto.value_index(*si, v))
            throw ValidationError(where + ": labeled value '" + v + "' not legal for slot '" + s + "'");
          goal.emplace(s, v);
        }
        turn.label_goal = std::move(goal);
      }

      // semantics path differs across releases; accept both spellings
      if (jt.contains("semantics") && jt["semantics"].contains("json")) {
        turn.label_semantics = parse_utterance(jt["semantics"]["json"], where);
      } else if (jt.contains("user-acts")) {
        turn.label_semantics = parse_utterance(jt["user-acts"], where);
        session.semantics_from_user_acts = true;
      }
    }
  }
  return session;
}

DialogSession load_session_file(const std::string& log_path, const std::string& label_path,
                                const Ontology& onto) {
  std::ifstream log(log_path);
  if (!log) throw IoError("cannot open log file: " + log_path);
  if (label_path.empty()) return load_session(log, nullptr, onto);
  std::ifstream label(label_path);
  if (!label) throw IoError("cannot open label file: " + label_path);
  return load_session(log, &label, onto);
}

std::vector<std::string> read_flist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open flist: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

SluOverride load_slu_override(std::istream& in) {
  const json doc = parse_json(in, "slu override");
  if (!doc.is_object()) throw ParseError("slu override: top level must be an object");
  SluOverride ov;
  for (const auto& [sid, turns] : doc.items()) {
    if (!turns.is_object())
      throw ParseError("slu override: session '" + sid + "' must map turn index to slu-hyps");
    auto& per_turn = ov.sessions[trim(sid)];
    for (const auto& [idx, hyps] : turns.items()) {
      int t = 0;
      try {
        t = std::stoi(idx);
      } catch (const std::exception&) {
        throw ParseError("slu override: bad turn index '" + idx + "' in session '" + sid + "'");
      }
      per_turn[t] = parse_raw_hyps(hyps, "slu override " + sid + " turn " + idx);
    }
  }
  return ov;
}

SluOverride load_slu_override_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open slu override file: " + path);
  return load_slu_override(in);
}

DialogSession apply_slu_override(DialogSession session, const SluOverride& ov) {
  auto it = ov.sessions.find(session.session_id);
  if (it == ov.sessions.end())
    throw ValidationError("slu override: no entry for session " + session.session_id);

  std::vector<int> missing;
  for (std::size_t t = 0; t < session.turns.size(); ++t)
    if (!it->second.count(static_cast<int>(t))) missing.push_back(static_cast<int>(t));
  if (!missing.empty()) {
    std::ostringstream os;
    os << "slu override: session " << session.session_id << " missing turns: [";
    for (std::size_t i = 0; i < missing.size(); ++i) os << (i ? ", " : "") << missing[i];
    os << "]";
    throw ValidationError(os.str());
  }

  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    auto raw = it->second.at(static_cast<int>(t));
    session.turns[t].slu_raw_total = 0.0;
    for (const auto& [u, s] : raw) session.turns[t].slu_raw_total += s;
    session.turns[t].slu = normalize_hyps(std::move(raw));
  }
  return session;
}

DialogSession oracle_slu(DialogSession session) {
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    if (!session.turns[t].label_semantics)
      throw ValidationError("oracle slu: session " + session.session_id + " turn " +
                            std::to_string(t) + " has no labeled semantics");
    session.turns[t].slu.entries = {{*session.turns[t].label_semantics, 1.0}};
    session.turns[t].slu_raw_total = 1.0;
  }
  return session;
}

double round_sig(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(x)))));
  return std::round(x * mag) / mag;
}

OutputTurn make_ranked_turn(const std::vector<std::pair<Goal, double>>& entries,
                            const Ontology& onto) {
  std::vector<std::pair<Goal, double>> rounded = entries;
  for (auto& [g, p] : rounded) p = round_sig(p);
  std::stable_sort(rounded.begin(), rounded.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  OutputTurn turn;
  turn.hyps.reserve(rounded.size());
  for (const auto& [g, p] : rounded) turn.hyps.push_back({goal_to_slots(g, onto), p});
  return turn;
}

void write_tracker_output(const TrackerOutput& out, std::ostream& os) {
  ordered_json doc;
  doc["dataset"] = out.dataset;
  doc["wall-time"] = out.wall_time;
  doc["sessions"] = ordered_json::array();
  for (const auto& session : out.sessions) {
    ordered_json js;
    js["session-id"] = session.session_id;
    js["turns"] = ordered_json::array();
    for (const auto& turn : session.turns) {
      ordered_json jhyps = ordered_json::array();
      for (const auto& hyp : turn.hyps) {
        ordered_json jh;
        jh["slots"] = ordered_json(hyp.slots);
        jh["score"] = hyp.score;
        jhyps.push_back(std::move(jh));
      }
      ordered_json jt;
      jt["goal-labels-joint"] = std::move(jhyps);
      js["turns"].push_back(std::move(jt));
    }
    doc["sessions"].push_back(std::move(js));
  }
  os << doc.dump(2) << "\n";
  if (!os) throw IoError("failed writing tracker output");
}

void write_tracker_output_file(const TrackerOutput& out, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_tracker_output(out, os);
}

TrackerOutput parse_tracker_output(std::istream& in, const Ontology* onto) {
  const json doc = parse_json(in, "tracker output");
  if (!doc.contains("dataset") || !doc.contains("sessions"))
    throw ParseError("tracker output: missing 'dataset' or 'sessions'");

  TrackerOutput out;
  out.dataset = doc["dataset"].get<std::string>();
  out.wall_time = doc.value("wall-time", 0.0);
  for (std::size_t i = 0; i < doc["sessions"].size(); ++i) {
    const auto& js = doc["sessions"][i];
    const std::string where = "tracker output sessions[" + std::to_string(i) + "]";
    if (!js.contains("session-id") || !js.contains("turns"))
      throw ParseError(where + ": missing 'session-id' or 'turns'");
    OutputSession session;
    session.session_id = trim(js["session-id"].get<std::string>());
    for (std::size_t t = 0; t < js["turns"].size(); ++t) {
      const auto& jt = js["turns"][t];
      const std::string twhere = where + ".turns[" + std::to_string(t) + "]";
      if (!jt.contains("goal-labels-joint"))
        throw ParseError(twhere + ": missing 'goal-labels-joint'");
      OutputTurn turn;
      double sum = 0.0;
      double prev = 2.0;
      for (const auto& jh : jt["goal-labels-joint"]) {
        if (!jh.contains("slots") || !jh.contains("score"))
          throw ParseError(twhere + ": hypothesis needs 'slots' and 'score'");
        JointHyp hyp;
        for (const auto& [slot, value] : jh["slots"].items())
          hyp.slots.emplace(canon(slot), json_to_text(value, twhere));
        hyp.score = validated_score(jh["score"].get<double>(), twhere);
        if (hyp.score > prev + 1e-9)
          throw ValidationError(twhere + ": hypotheses are not ranked descending");
        prev = hyp.score;
        sum += hyp.score;
        if (onto) goal_from_slots(hyp.slots, *onto);  // throws on schema mismatch
        turn.hyps.push_back(std::move(hyp));
      }
      if (sum > 1.0 + 1e-9)
        throw ValidationError(twhere + ": hypothesis scores sum to more than 1");
      session.turns.push_back(std::move(turn));
    }
    out.sessions.push_back(std::move(session));
  }
  return out;
}

TrackerOutput parse_tracker_output_file(const std::string& path, const Ontology* onto) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tracker output: " + path);
  try {
    return parse_tracker_output(in, onto);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace yarbus
