#pragma once

// Academic registry: one snapshot entry per professor with rank, field
// (SDS), discipline (UDA) and home university.

#include <collab/error.hpp>
#include <collab/text.hpp>

#include <json.hpp>

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace collab {

enum class Rank { Full, Associate, Assistant };

inline constexpr std::array<Rank, 3> kRanks{Rank::Full, Rank::Associate, Rank::Assistant};

inline constexpr std::size_t rank_index(Rank r) { return static_cast<std::size_t>(r); }

// Token used in roster records.
inline constexpr std::string_view rank_token(Rank r) {
  switch (r) {
    case Rank::Full: return "full";
    case Rank::Associate: return "associate";
    case Rank::Assistant: return "assistant";
  }
  return "";
}

inline constexpr std::string_view rank_label(Rank r) {
  switch (r) {
    case Rank::Full: return "Full";
    case Rank::Associate: return "Associate";
    case Rank::Assistant: return "Assistant";
  }
  return "";
}

inline std::optional<Rank> parse_rank(std::string_view token) {
  for (auto r : kRanks) {
    if (rank_token(r) == token) return r;
  }
  return std::nullopt;
}

struct Academic {
  std::string academic_id;
  std::string surname;
  std::string given_names;
  Rank rank = Rank::Full;
  std::string sds;
  std::string uda;
  std::string university_id;

  bool operator==(const Academic&) const = default;
};

class Roster {
 public:
  // Throws DataError on a duplicate id or an SDS already mapped to another UDA.
  void add(Academic a) {
    if (a.academic_id.empty()) throw DataError("empty academic id");
    if (a.sds.empty() || a.uda.empty()) throw DataError("academic " + a.academic_id + " lacks SDS or UDA");
    if (index_.count(a.academic_id)) throw DataError("duplicate academic id " + a.academic_id);
    if (auto it = sds_uda_.find(a.sds); it != sds_uda_.end() && it->second != a.uda) {
      throw DataError("inconsistent SDS mapping: " + a.sds + " maps to both " + it->second + " and " + a.uda +
                      " (academic " + a.academic_id + ")");
    }
    sds_uda_.emplace(a.sds, a.uda);
    index_.emplace(a.academic_id, academics_.size());
    academics_.push_back(std::move(a));
  }

  const std::vector<Academic>& academics() const { return academics_; }
  std::size_t size() const { return academics_.size(); }
  bool empty() const { return academics_.empty(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const Academic* find(std::string_view id) const {
    auto i = index_of(id);
    return i ? &academics_[*i] : nullptr;
  }

  const std::map<std::string, std::string, std::less<>>& sds_to_uda() const { return sds_uda_; }

  bool operator==(const Roster& other) const { return academics_ == other.academics_; }

 private:
  std::vector<Academic> academics_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::string, std::less<>> sds_uda_;
};

inline Academic academic_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  auto str = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("missing field \"") + key + "\"");
    if (!it->is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
  };
  Academic a;
  a.academic_id = str("id");
  a.surname = str("surname");
  a.given_names = str("given");
  const auto rank = str("rank");
  auto r = parse_rank(rank);
  if (!r) throw DataError("unknown rank '" + rank + "' for academic " + a.academic_id);
  a.rank = *r;
  a.sds = str("sds");
  a.uda = str("uda");
  a.university_id = str("university");
  return a;
}

inline nlohmann::ordered_json academic_to_json(const Academic& a) {
  nlohmann::ordered_json j;
  j["id"] = a.academic_id;
  j["surname"] = a.surname;
  j["given"] = a.given_names;
  j["rank"] = std::string(rank_token(a.rank));
  j["sds"] = a.sds;
  j["uda"] = a.uda;
  j["university"] = a.university_id;
  return j;
}

struct RosterParse {
  Roster roster;
  std::vector<RecordError> errors;
  std::size_t records = 0;
};

inline RosterParse load_roster(std::istream& in) {
  RosterParse result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    ++result.records;
    try {
      result.roster.add(academic_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const DataError& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

inline void write_roster(std::ostream& out, const Roster& roster) {
  for (const auto& a : roster.academics()) out << academic_to_json(a).dump() << '\n';
}

}  // namespace collab
