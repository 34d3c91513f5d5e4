#pragma once

// Author-publication matrix: explicit link files, a deterministic name and
// affiliation matcher, merging, and the SDS coverage filter.

#include <collab/corpus.hpp>
#include <collab/error.hpp>
#include <collab/roster.hpp>
#include <collab/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace collab {

enum class Provenance { Explicit, Matched };

struct Link {
  std::string academic_id;
  std::string pub_id;
  Provenance provenance = Provenance::Explicit;
  std::optional<std::size_t> byline_position;
};

// Set of (academic, publication) pairs, ordered by academic then publication.
class AttributionSet {
 public:
  using Key = std::pair<std::string, std::string>;

  // Returns false (and keeps the existing link) when the pair is already present.
  bool insert(Link link) {
    Key key{link.academic_id, link.pub_id};
    return links_.emplace(std::move(key), std::move(link)).second;
  }

  bool contains(std::string_view academic_id, std::string_view pub_id) const {
    return links_.count(Key{std::string(academic_id), std::string(pub_id)}) != 0;
  }

  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }

  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  std::set<Key> pairs() const {
    std::set<Key> out;
    for (const auto& [k, _] : links_) out.insert(k);
    return out;
  }

 private:
  std::map<Key, Link> links_;
};

inline void write_attributions(std::ostream& out, const AttributionSet& set) {
  for (const auto& [key, _] : set) {
    nlohmann::ordered_json j;
    j["academic"] = key.first;
    j["pub"] = key.second;
    out << j.dump() << '\n';
  }
}

struct ExplicitAttribution {
  AttributionSet links;
  std::vector<RecordError> errors;
  std::vector<std::string> warnings;
  std::size_t records = 0;
  std::size_t duplicates = 0;
};

// Reads {"academic": ..., "pub": ...} lines. Unknown ids are errors;
// repeated pairs are deduplicated with a warning.
inline ExplicitAttribution attribute_explicit(const Corpus& corpus, const Roster& roster, std::istream& in) {
  ExplicitAttribution result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    ++result.records;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw DataError("record is not a JSON object");
      auto field = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
        return it->get<std::string>();
      };
      auto academic = field("academic");
      auto pub = field("pub");
      const bool known_academic = roster.find(academic) != nullptr;
      const bool known_pub = corpus.find(pub) != nullptr;
      if (!known_academic || !known_pub) {
        std::string what = !known_academic && !known_pub ? "unknown academic and publication"
                           : !known_academic            ? "unknown academic"
                                                        : "unknown publication";
        throw DataError(what + ": academic " + academic + ", publication " + pub);
      }
      if (!result.links.insert({academic, pub, Provenance::Explicit, std::nullopt})) {
        ++result.duplicates;
        result.warnings.push_back("line " + std::to_string(line_no) + ": duplicate pair (" + academic + ", " + pub +
                                  ") ignored");
      }
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const DataError& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Byline names
// ---------------------------------------------------------------------------

namespace names {

// Lowercased surname with everything but letters and digits removed;
// non-ASCII bytes are kept as-is.
inline std::string surname_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (text::is_alnum(c)) {
      out.push_back(text::ascii_lower(c));
    } else if (static_cast<unsigned char>(c) >= 0x80) {
      out.push_back(c);
    }
  }
  return out;
}

// Leading code point of `s`, uppercased if ASCII.
inline std::string leading_letter(std::string_view s) {
  if (s.empty()) return {};
  const auto lead = static_cast<unsigned char>(s[0]);
  std::size_t len = lead < 0x80 ? 1 : lead >= 0xF0 ? 4 : lead >= 0xE0 ? 3 : 2;
  len = std::min(len, s.size());
  std::string out(s.substr(0, len));
  if (len == 1) out[0] = text::ascii_upper(out[0]);
  return out;
}

inline bool is_initials_token(std::string_view tok) {
  bool any_letter = false;
  for (char c : tok) {
    if (c >= 'A' && c <= 'Z') {
      any_letter = true;
    } else if (c != '.' && c != '-') {
      return false;
    }
  }
  return any_letter;
}

// "M.A." / "MA" / "J-P" contribute one initial per letter; "Maria" contributes "M".
inline std::vector<std::string> byline_initials(std::string_view part) {
  std::vector<std::string> out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    if (is_initials_token(tok)) {
      for (char c : tok) {
        if (c >= 'A' && c <= 'Z') out.emplace_back(1, c);
      }
    } else {
      std::string_view rest = tok;
      while (!rest.empty() && (rest.front() == '.' || rest.front() == '-')) rest.remove_prefix(1);
      if (!rest.empty()) out.push_back(leading_letter(rest));
    }
    tok.clear();
  };
  for (char c : part) {
    if (text::is_space(c)) {
      flush();
    } else {
      tok.push_back(c);
    }
  }
  flush();
  return out;
}

// Initials of a roster given-name string: first letter of each word, with
// hyphens and dots separating words ("Jean-Pierre" -> J, P).
inline std::vector<std::string> given_initials(std::string_view given) {
  std::vector<std::string> out;
  bool at_word_start = true;
  for (std::size_t i = 0; i < given.size(); ++i) {
    const char c = given[i];
    if (text::is_space(c) || c == '-' || c == '.') {
      at_word_start = true;
      continue;
    }
    if (at_word_start) out.push_back(leading_letter(given.substr(i)));
    at_word_start = false;
  }
  return out;
}

struct BylineName {
  std::string surname;  // surname_key form
  std::vector<std::string> initials;
};

// Accepts "Surname, Initials" and "Surname I." forms.
inline std::optional<BylineName> parse_byline_name(std::string_view raw) {
  const auto s = text::trim(raw);
  if (s.empty()) return std::nullopt;
  BylineName name;
  if (auto comma = s.find(','); comma != std::string_view::npos) {
    name.surname = surname_key(s.substr(0, comma));
    name.initials = byline_initials(s.substr(comma + 1));
  } else {
    auto last_space = s.find_last_of(" \t");
    if (last_space == std::string_view::npos) return std::nullopt;
    const auto tail = s.substr(last_space + 1);
    if (!is_initials_token(tail)) return std::nullopt;
    name.surname = surname_key(s.substr(0, last_space));
    name.initials = byline_initials(tail);
  }
  if (name.surname.empty() || name.initials.empty()) return std::nullopt;
  return name;
}

// Surname keys agree and the byline initials are a prefix of the academic's.
inline bool matches(const Academic& a, const BylineName& name) {
  if (surname_key(a.surname) != name.surname) return false;
  const auto given = given_initials(a.given_names);
  if (name.initials.size() > given.size()) return false;
  return std::equal(name.initials.begin(), name.initials.end(), given.begin());
}

inline bool matches(const Academic& a, std::string_view byline_name) {
  auto parsed = parse_byline_name(byline_name);
  return parsed && matches(a, *parsed);
}

}  // namespace names

// ---------------------------------------------------------------------------
// Heuristic matcher
// ---------------------------------------------------------------------------

struct HeuristicAttribution {
  AttributionSet links;
  std::size_t ambiguous = 0;  // byline authors with two or more candidate academics
};

// Links byline author k of publication p to academic a iff the surname keys
// agree, the byline initials prefix a's initials, and p lists a's
// university among its addresses. Byline authors with several candidates
// are dropped and tallied. Output is independent of record order.
inline HeuristicAttribution attribute_heuristic(const Corpus& corpus, const Roster& roster) {
  std::map<std::string, std::vector<std::size_t>> by_surname;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    by_surname[names::surname_key(roster.academics()[i].surname)].push_back(i);
  }

  HeuristicAttribution result;
  for (const auto& pub : corpus.publications()) {
    std::set<std::string> seen_names;
    for (std::size_t k = 0; k < pub.authors.size(); ++k) {
      if (!seen_names.insert(text::fold(pub.authors[k].name)).second) continue;
      auto parsed = names::parse_byline_name(pub.authors[k].name);
      if (!parsed) continue;
      auto it = by_surname.find(parsed->surname);
      if (it == by_surname.end()) continue;

      std::vector<std::size_t> candidates;
      for (auto idx : it->second) {
        const auto& a = roster.academics()[idx];
        if (!names::matches(a, *parsed)) continue;
        const bool at_university = std::any_of(pub.addresses.begin(), pub.addresses.end(), [&](const Address& addr) {
          return is_organization(addr, a.university_id);
        });
        if (at_university) candidates.push_back(idx);
      }
      if (candidates.size() == 1) {
        result.links.insert(
            {roster.academics()[candidates.front()].academic_id, pub.pub_id, Provenance::Matched, k});
      } else if (candidates.size() > 1) {
        ++result.ambiguous;
      }
    }
  }
  return result;
}

struct MergedAttribution {
  AttributionSet links;
  std::size_t conflicts = 0;  // matched links dropped in favour of an explicit one
};

// Union of explicit and matched links. An explicit link claims the first
// byline position whose name fits its academic; a matched link for the same
// position but a different academic is dropped.
inline MergedAttribution merge_attributions(const Corpus& corpus, const Roster& roster, const AttributionSet& explicit_links,
                                            const AttributionSet& matched_links) {
  MergedAttribution result;
  std::map<std::pair<std::string, std::size_t>, std::string> claimed;  // (pub, position) -> academic
  for (const auto& [key, link] : explicit_links) {
    Link copy = link;
    copy.provenance = Provenance::Explicit;
    const auto* a = roster.find(key.first);
    const auto* pub = corpus.find(key.second);
    if (a && pub && !copy.byline_position) {
      for (std::size_t k = 0; k < pub->authors.size(); ++k) {
        if (names::matches(*a, pub->authors[k].name)) {
          copy.byline_position = k;
          break;
        }
      }
    }
    if (copy.byline_position) claimed.emplace(std::make_pair(key.second, *copy.byline_position), key.first);
    result.links.insert(std::move(copy));
  }
  for (const auto& [key, link] : matched_links) {
    if (result.links.contains(key.first, key.second)) continue;
    if (link.byline_position) {
      auto it = claimed.find({key.second, *link.byline_position});
      if (it != claimed.end() && it->second != key.first) {
        ++result.conflicts;
        continue;
      }
    }
    result.links.insert(link);
  }
  return result;
}

// Drops links whose publication is not in `corpus` (e.g. removed by the
// document-type filter).
inline AttributionSet restrict_to_corpus(const AttributionSet& set, const Corpus& corpus) {
  AttributionSet out;
  for (const auto& [key, link] : set) {
    if (corpus.find(key.second)) out.insert(link);
  }
  return out;
}

// Dense adjacency over roster and corpus positions, both directions sorted.
struct AttributionIndex {
  std::vector<std::vector<std::size_t>> pubs_of;     // roster index -> corpus indices
  std::vector<std::vector<std::size_t>> authors_of;  // corpus index -> roster indices
  std::size_t skipped = 0;                           // links naming ids absent from corpus/roster
};

inline AttributionIndex index_attributions(const AttributionSet& set, const Corpus& corpus, const Roster& roster) {
  AttributionIndex idx;
  idx.pubs_of.resize(roster.size());
  idx.authors_of.resize(corpus.size());
  for (const auto& [key, _] : set) {
    auto a = roster.index_of(key.first);
    auto p = corpus.index_of(key.second);
    if (!a || !p) {
      ++idx.skipped;
      continue;
    }
    idx.pubs_of[*a].push_back(*p);
    idx.authors_of[*p].push_back(*a);
  }
  for (auto& v : idx.pubs_of) std::sort(v.begin(), v.end());
  for (auto& v : idx.authors_of) std::sort(v.begin(), v.end());
  return idx;
}

// ---------------------------------------------------------------------------
// SDS coverage
// ---------------------------------------------------------------------------

struct SdsCoverage {
  std::string sds;
  std::string uda;
  std::size_t staff_count = 0;
  std::size_t productive_count = 0;
  bool included = false;
};

struct CoverageResult {
  std::set<std::string, std::less<>> included;
  std::vector<SdsCoverage> report;  // ordered by SDS code
  std::vector<std::string> warnings;

  bool includes(std::string_view sds) const { return included.count(sds) != 0; }
};

// An SDS is kept when productive/staff >= threshold (inclusive); an academic
// is productive with at least one attributed publication.
inline CoverageResult sds_coverage_filter(const Roster& roster, const AttributionSet& attributions,
                                          double threshold = 0.5) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("SDS threshold must lie in [0, 1], got " + std::to_string(threshold));
  }
  std::set<std::string> productive_ids;
  for (const auto& [key, _] : attributions) productive_ids.insert(key.first);

  std::map<std::string, SdsCoverage> per_sds;
  for (const auto& [sds, uda] : roster.sds_to_uda()) per_sds[sds] = SdsCoverage{sds, uda, 0, 0, false};
  for (const auto& a : roster.academics()) {
    auto& cov = per_sds[a.sds];
    ++cov.staff_count;
    if (productive_ids.count(a.academic_id)) ++cov.productive_count;
  }

  CoverageResult result;
  for (auto& [sds, cov] : per_sds) {
    if (cov.staff_count == 0) {
      result.warnings.push_back("SDS " + sds + " has no staff; excluded");
    } else {
      const double fraction = static_cast<double>(cov.productive_count) / static_cast<double>(cov.staff_count);
      cov.included = fraction >= threshold;
    }
    if (cov.included) result.included.insert(sds);
    result.report.push_back(cov);
  }
  return result;
}

}  // namespace collab
