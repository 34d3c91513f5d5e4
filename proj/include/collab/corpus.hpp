#pragma once

// Publication corpus: record types, line-delimited JSON parsing and
// serialization, and document-type filtering.

#include <collab/error.hpp>
#include <collab/text.hpp>

#include <json.hpp>

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

inline bool is_country_code(std::string_view code) {
  return code.size() == 2 && code[0] >= 'A' && code[0] <= 'Z' && code[1] >= 'A' && code[1] <= 'Z';
}

struct Address {
  std::string org_name;
  std::optional<std::string> org_id;
  std::string country;

  bool operator==(const Address&) const = default;
};

// Identity used to compare organizations: the stable id when present,
// otherwise the folded name.
inline std::string organization_key(const Address& a) {
  return a.org_id ? "id:" + *a.org_id : "name:" + text::fold(a.org_name);
}

// True if the address denotes the university identified by `university_id`.
inline bool is_organization(const Address& a, std::string_view university_id) {
  if (a.org_id) return *a.org_id == university_id;
  return text::fold(a.org_name) == text::fold(university_id);
}

struct BylineAuthor {
  std::string name;
  std::vector<std::size_t> address_idxs;

  bool operator==(const BylineAuthor&) const = default;
};

struct Publication {
  std::string pub_id;
  int year = 0;
  std::string doc_type;
  std::vector<BylineAuthor> authors;
  std::vector<Address> addresses;

  bool operator==(const Publication&) const = default;
};

struct YearWindow {
  int first = 2006;
  int last = 2010;

  bool contains(int year) const { return year >= first && year <= last; }
  bool operator==(const YearWindow&) const = default;
};

// Parses "2006-2010" or a single year "2008".
inline YearWindow parse_year_window(std::string_view s) {
  const auto parts = text::split(s, '-');
  try {
    if (parts.size() == 1) {
      const int y = std::stoi(parts[0]);
      return {y, y};
    }
    if (parts.size() == 2) {
      YearWindow w{std::stoi(parts[0]), std::stoi(parts[1])};
      if (w.first <= w.last) return w;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid year window '" + std::string(s) + "' (expected FIRST-LAST)");
}

// Returns a description of the first broken invariant, or nullopt.
inline std::optional<std::string> check_publication(const Publication& pub, const YearWindow& window) {
  if (pub.pub_id.empty()) return "empty publication id";
  const std::string where = " in publication " + pub.pub_id;
  if (pub.authors.empty()) return "no authors" + where;
  if (!window.contains(pub.year)) {
    return "year " + std::to_string(pub.year) + " outside window " + std::to_string(window.first) + "-" +
           std::to_string(window.last) + where;
  }
  for (const auto& a : pub.addresses) {
    if (text::trim(a.org_name).empty()) return "empty organization name" + where;
    if (!is_country_code(a.country)) return "invalid country code '" + a.country + "'" + where;
  }
  for (std::size_t k = 0; k < pub.authors.size(); ++k) {
    const auto& idxs = pub.authors[k].address_idxs;
    std::set<std::size_t> seen;
    for (auto i : idxs) {
      if (i >= pub.addresses.size()) {
        return "address index out of range" + where + ": author " + std::to_string(k) + " references address " +
               std::to_string(i) + " of " + std::to_string(pub.addresses.size());
      }
      if (!seen.insert(i).second) return "duplicate address index " + std::to_string(i) + where;
    }
  }
  return std::nullopt;
}

// Immutable once built; publications keep insertion order.
class Corpus {
 public:
  Corpus() = default;
  Corpus(YearWindow window, std::string home_country) : window_(window), home_country_(std::move(home_country)) {
    if (!is_country_code(home_country_)) throw ConfigError("invalid home country '" + home_country_ + "'");
  }

  // Throws DataError when the publication breaks an invariant or its id is taken.
  void add(Publication pub) {
    if (auto err = check_publication(pub, window_)) throw DataError(*err);
    if (index_.count(pub.pub_id)) throw DataError("duplicate publication id " + pub.pub_id);
    index_.emplace(pub.pub_id, pubs_.size());
    pubs_.push_back(std::move(pub));
  }

  const std::vector<Publication>& publications() const { return pubs_; }
  std::size_t size() const { return pubs_.size(); }
  bool empty() const { return pubs_.empty(); }

  std::optional<std::size_t> index_of(std::string_view pub_id) const {
    auto it = index_.find(pub_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const Publication* find(std::string_view pub_id) const {
    auto i = index_of(pub_id);
    return i ? &pubs_[*i] : nullptr;
  }

  const YearWindow& window() const { return window_; }
  const std::string& home_country() const { return home_country_; }

  bool operator==(const Corpus& other) const {
    return window_ == other.window_ && home_country_ == other.home_country_ && pubs_ == other.pubs_;
  }

 private:
  YearWindow window_;
  std::string home_country_ = "IT";
  std::vector<Publication> pubs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

namespace detail {

inline const nlohmann::json& required(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::string required_string(const nlohmann::json& obj, const char* key) {
  const auto& v = required(obj, key);
  if (!v.is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace detail

// Decodes one publication record. Structural problems throw DataError;
// invariants are checked separately by check_publication.
inline Publication publication_from_json(const nlohmann::json& j) {
  using detail::required;
  using detail::required_string;
  if (!j.is_object()) throw DataError("record is not a JSON object");
  Publication pub;
  pub.pub_id = required_string(j, "id");
  const auto& year = required(j, "year");
  if (!year.is_number_integer()) throw DataError("field \"year\" must be an integer");
  pub.year = year.get<int>();
  pub.doc_type = required_string(j, "type");

  const auto& authors = required(j, "authors");
  if (!authors.is_array()) throw DataError("field \"authors\" must be an array");
  for (const auto& a : authors) {
    if (!a.is_object()) throw DataError("author entry is not an object");
    BylineAuthor author;
    author.name = required_string(a, "name");
    if (auto it = a.find("addr"); it != a.end()) {
      if (!it->is_array()) throw DataError("field \"addr\" must be an array");
      for (const auto& idx : *it) {
        if (!idx.is_number_integer()) throw DataError("address index must be an integer");
        const auto v = idx.get<long long>();
        if (v < 0) {
          throw DataError("address index out of range in publication " + pub.pub_id + ": negative index " +
                          std::to_string(v));
        }
        author.address_idxs.push_back(static_cast<std::size_t>(v));
      }
    }
    pub.authors.push_back(std::move(author));
  }

  const auto& addresses = required(j, "addresses");
  if (!addresses.is_array()) throw DataError("field \"addresses\" must be an array");
  for (const auto& a : addresses) {
    if (!a.is_object()) throw DataError("address entry is not an object");
    Address addr;
    addr.org_name = required_string(a, "org");
    if (auto it = a.find("org_id"); it != a.end() && !it->is_null()) {
      if (!it->is_string()) throw DataError("field \"org_id\" must be a string");
      addr.org_id = it->get<std::string>();
    }
    addr.country = required_string(a, "country");
    pub.addresses.push_back(std::move(addr));
  }
  return pub;
}

inline nlohmann::ordered_json publication_to_json(const Publication& pub) {
  nlohmann::ordered_json j;
  j["id"] = pub.pub_id;
  j["year"] = pub.year;
  j["type"] = pub.doc_type;
  j["authors"] = nlohmann::ordered_json::array();
  for (const auto& a : pub.authors) {
    nlohmann::ordered_json aj;
    aj["name"] = a.name;
    aj["addr"] = a.address_idxs;
    j["authors"].push_back(std::move(aj));
  }
  j["addresses"] = nlohmann::ordered_json::array();
  for (const auto& a : pub.addresses) {
    nlohmann::ordered_json aj;
    aj["org"] = a.org_name;
    if (a.org_id) aj["org_id"] = *a.org_id;
    aj["country"] = a.country;
    j["addresses"].push_back(std::move(aj));
  }
  return j;
}

struct CorpusParse {
  Corpus corpus;
  std::vector<RecordError> errors;
  std::size_t records = 0;  // non-blank input lines
};

// Reads one publication per line. Blank lines are skipped; every other
// line ends up either in the corpus or in `errors`.
inline CorpusParse parse_corpus(std::istream& in, YearWindow window, std::string home_country = "IT") {
  CorpusParse result{Corpus(window, std::move(home_country)), {}, 0};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    ++result.records;
    try {
      const auto j = nlohmann::json::parse(line);
      result.corpus.add(publication_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const DataError& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& pub : corpus.publications()) out << publication_to_json(pub).dump() << '\n';
}

inline std::set<std::string> default_doc_types() { return {"article", "review", "letter", "proceedings-paper"}; }

struct DocTypeFilter {
  Corpus corpus;
  std::size_t removed = 0;
};

inline DocTypeFilter filter_doc_types(const Corpus& corpus, const std::set<std::string>& allowlist) {
  if (allowlist.empty()) throw ConfigError("document-type allowlist is empty");
  DocTypeFilter result{Corpus(corpus.window(), corpus.home_country()), 0};
  for (const auto& pub : corpus.publications()) {
    if (allowlist.count(pub.doc_type)) {
      result.corpus.add(pub);
    } else {
      ++result.removed;
    }
  }
  return result;
}

}  // namespace collab
