#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace yarbus {

inline constexpr std::string_view kDontcare = "dontcare";
inline constexpr std::string_view kUnknownValue = "unknown";

// The slot/value universe. Slots are sorted lexicographically and that order
// is the canonical iteration order everywhere downstream. Every value set
// contains "dontcare"; "unknown" is a tracker-internal sentinel and never
// appears here.
class Ontology {
 public:
  Ontology() = default;

  // `informable` maps slot name to its legal values; strings are canonicalized
  // and "dontcare" is appended where absent. `merged_values`, when given,
  // receives the number of values that collapsed under canonicalization.
  static Ontology create(const std::map<std::string, std::vector<std::string>>& informable,
                         std::size_t* merged_values = nullptr);

  static Ontology load(std::istream& in, std::size_t* merged_values = nullptr);
  static Ontology load_file(const std::string& path, std::size_t* merged_values = nullptr);
  std::string to_json_string() const;

  std::size_t slot_count() const { return slots_.size(); }
  const std::vector<std::string>& slots() const { return slots_; }
  const std::string& slot_name(std::size_t s) const { return slots_[s]; }
  const std::vector<std::string>& values(std::size_t s) const { return values_[s]; }

  std::optional<std::size_t> slot_index(std::string_view name) const;
  std::optional<std::uint32_t> value_index(std::size_t slot, std::string_view value) const;
  const std::string& value_name(std::size_t slot, std::uint32_t v) const { return values_[slot][v]; }
  std::uint32_t dontcare_index(std::size_t slot) const { return dontcare_[slot]; }

  bool operator==(const Ontology& other) const {
    return slots_ == other.slots_ && values_ == other.values_;
  }

 private:
  std::vector<std::string> slots_;
  std::vector<std::vector<std::string>> values_;
  std::vector<std::uint32_t> dontcare_;
  std::map<std::string, std::size_t, std::less<>> slot_lookup_;
  std::vector<std::map<std::string, std::uint32_t, std::less<>>> value_lookup_;
};

// Number of joint goals: the product over slots of (|values| + 1), the +1
// accounting for the unknown sentinel.
std::uint64_t joint_goal_count(const Ontology& o);

}  // namespace yarbus
