#include "yarbus/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "yarbus/errors.hpp"
#include "yarbus/strings.hpp"

namespace yarbus {

Ontology Ontology::create(const std::map<std::string, std::vector<std::string>>& informable,
                          std::size_t* merged_values) {
  Ontology o;
  if (merged_values) *merged_values = 0;
  for (const auto& [raw_slot, raw_values] : informable) {
    const std::string slot = canon(raw_slot);
    if (slot.empty()) throw ValidationError("ontology: empty slot name");
    if (!o.slot_lookup_.emplace(slot, o.slots_.size()).second)
      throw ValidationError("ontology: duplicate slot '" + slot + "'");
    o.slots_.push_back(slot);

    std::vector<std::string> vals;
    vals.reserve(raw_values.size() + 1);
    bool had_dontcare = false;
    for (const auto& rv : raw_values) {
      const std::string v = canon(rv);
      if (v.empty()) throw ValidationError("ontology: empty value in slot '" + slot + "'");
      if (v == kUnknownValue)
        throw ValidationError("ontology: reserved value 'unknown' in slot '" + slot + "'");
      had_dontcare = had_dontcare || v == kDontcare;
      vals.push_back(v);
    }
    if (!had_dontcare) vals.emplace_back(kDontcare);
    std::sort(vals.begin(), vals.end());
    const auto last = std::unique(vals.begin(), vals.end());
    // values that collapse under canonicalization make the per-slot counts
    // diverge from the raw listing; noted rather than fatal
    if (merged_values) *merged_values += std::distance(last, vals.end());
    vals.erase(last, vals.end());
    o.values_.push_back(std::move(vals));
  }

  // create() received a std::map, so slots_ is already sorted. Build lookups.
  o.value_lookup_.resize(o.values_.size());
  o.dontcare_.resize(o.values_.size());
  for (std::size_t s = 0; s < o.values_.size(); ++s) {
    for (std::uint32_t i = 0; i < o.values_[s].size(); ++i)
      o.value_lookup_[s].emplace(o.values_[s][i], i);
    o.dontcare_[s] = o.value_lookup_[s].at(std::string(kDontcare));
  }
  return o;
}

Ontology Ontology::load(std::istream& in, std::size_t* merged_values) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ontology: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("informable") || !doc["informable"].is_object())
    throw ParseError("ontology: missing top-level 'informable' object");

  std::map<std::string, std::vector<std::string>> informable;
  for (const auto& [slot, vals] : doc["informable"].items()) {
    if (!vals.is_array())
      throw ParseError("ontology: informable." + slot + " is not an array");
    std::vector<std::string> out;
    out.reserve(vals.size());
    for (const auto& v : vals) {
      if (!v.is_string())
        throw ParseError("ontology: non-string value under informable." + slot);
      out.push_back(v.get<std::string>());
    }
    const std::string key = canon(slot);
    if (informable.count(key))
      throw ValidationError("ontology: duplicate slot '" + key + "'");
    informable.emplace(key, std::move(out));
  }
  return create(informable, merged_values);
}

Ontology Ontology::load_file(const std::string& path, std::size_t* merged_values) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ontology file: " + path);
  return load(in, merged_values);
}

std::string Ontology::to_json_string() const {
  nlohmann::ordered_json inf = nlohmann::ordered_json::object();
  for (std::size_t s = 0; s < slots_.size(); ++s) inf[slots_[s]] = values_[s];
  nlohmann::ordered_json doc;
  doc["informable"] = std::move(inf);
  return doc.dump(2) + "\n";
}

std::optional<std::size_t> Ontology::slot_index(std::string_view name) const {
  auto it = slot_lookup_.find(name);
  if (it == slot_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Ontology::value_index(std::size_t slot, std::string_view value) const {
  auto it = value_lookup_[slot].find(value);
  if (it == value_lookup_[slot].end()) return std::nullopt;
  return it->second;
}

std::uint64_t joint_goal_count(const Ontology& o) {
  std::uint64_t n = 1;
  for (std::size_t s = 0; s < o.slot_count(); ++s) {
    const std::uint64_t factor = o.values(s).size() + 1;
    if (n > std::numeric_limits<std::uint64_t>::max() / factor)
      throw ValidationError("joint_goal_count: overflow");
    n *= factor;
  }
  return n;
}

}  // namespace yarbus
