#pragma once

// Collaboration forms of one publication from the point of view of one of
// its attributed academics.

#include <collab/attribution.hpp>
#include <collab/corpus.hpp>
#include <collab/error.hpp>
#include <collab/roster.hpp>
#include <collab/text.hpp>

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace collab {

// A publication may show several forms at once; all are false unless is_collab.
struct CollabFlags {
  bool is_collab = false;
  bool intramural = false;
  bool extramural_domestic = false;
  bool extramural_international = false;

  bool operator==(const CollabFlags&) const = default;
};

// Byline authors are distinct by folded name; repeated names collapse.
inline std::size_t distinct_byline_authors(const Publication& pub) {
  std::set<std::string> names;
  for (const auto& a : pub.authors) names.insert(text::fold(a.name));
  return names.size();
}

// `attributed` lists every roster academic linked to `pub`, focal included.
//
// Intramural: another attributed academic shares the focal university, or
// some other byline author is address-linked to it. When the focal academic
// cannot be located in the byline by name, two linked authors are required
// since one of them may be the focal academic.
// Extramural flags look at the publication's organization set only.
inline CollabFlags classify(const Publication& pub, const Academic& focal, std::span<const Academic* const> attributed,
                            std::string_view home_country) {
  const bool focal_attributed = std::any_of(attributed.begin(), attributed.end(), [&](const Academic* a) {
    return a && a->academic_id == focal.academic_id;
  });
  if (!focal_attributed) {
    throw ContractError("academic " + focal.academic_id + " is not attributed to publication " + pub.pub_id);
  }

  CollabFlags flags;
  flags.is_collab = distinct_byline_authors(pub) >= 2;
  if (!flags.is_collab) return flags;

  for (const Academic* other : attributed) {
    if (other && other->academic_id != focal.academic_id && other->university_id == focal.university_id) {
      flags.intramural = true;
      break;
    }
  }

  if (!flags.intramural) {
    std::set<std::string> linked;  // folded names of authors linked to the focal university
    std::set<std::string> focal_names;
    for (const auto& author : pub.authors) {
      const auto key = text::fold(author.name);
      if (names::matches(focal, author.name)) focal_names.insert(key);
      const bool at_focal_university = std::any_of(author.address_idxs.begin(), author.address_idxs.end(), [&](std::size_t i) {
        return is_organization(pub.addresses[i], focal.university_id);
      });
      if (at_focal_university) linked.insert(key);
    }
    if (focal_names.empty()) {
      flags.intramural = linked.size() >= 2;
    } else {
      flags.intramural = std::any_of(linked.begin(), linked.end(), [&](const std::string& n) { return !focal_names.count(n); });
    }
  }

  for (const auto& addr : pub.addresses) {
    if (addr.country == home_country) {
      if (!is_organization(addr, focal.university_id)) flags.extramural_domestic = true;
    } else {
      flags.extramural_international = true;
    }
  }
  return flags;
}

}  // namespace collab
