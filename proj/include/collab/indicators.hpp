#pragma once

// Per-academic collaboration profiles (C, CI, CED, CEF) and their group
// summaries. Ratios stay exact rationals; doubles are produced on demand.

#include <collab/classify.hpp>
#include <collab/error.hpp>
#include <collab/roster.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace collab {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

enum class Form { C, CI, CED, CEF };

inline constexpr std::array<Form, 4> kForms{Form::C, Form::CI, Form::CED, Form::CEF};

inline constexpr std::string_view form_name(Form f) {
  switch (f) {
    case Form::C: return "C";
    case Form::CI: return "CI";
    case Form::CED: return "CED";
    case Form::CEF: return "CEF";
  }
  return "";
}

inline std::optional<Form> parse_form(std::string_view s) {
  for (auto f : kForms) {
    if (form_name(f) == s) return f;
  }
  return std::nullopt;
}

struct CollabCounts {
  std::uint64_t p = 0;
  std::uint64_t cp = 0;
  std::uint64_t cip = 0;
  std::uint64_t cedp = 0;
  std::uint64_t cefp = 0;

  void add(const CollabFlags& f) {
    ++p;
    cp += f.is_collab;
    cip += f.intramural;
    cedp += f.extramural_domestic;
    cefp += f.extramural_international;
  }

  std::uint64_t count(Form f) const {
    switch (f) {
      case Form::C: return cp;
      case Form::CI: return cip;
      case Form::CED: return cedp;
      case Form::CEF: return cefp;
    }
    return 0;
  }

  bool operator==(const CollabCounts&) const = default;
};

struct CollabProfile {
  std::string academic_id;
  Rank rank = Rank::Full;
  std::string uda;
  CollabCounts counts;

  Rational ratio(Form f) const { return Rational(counts.count(f), counts.p); }
  double value(Form f) const { return static_cast<double>(counts.count(f)) / static_cast<double>(counts.p); }

  bool operator==(const CollabProfile&) const = default;
};

// Throws DataError for an academic without publications.
inline CollabProfile build_profile(const Academic& academic, std::span<const CollabFlags> flags) {
  if (flags.empty()) throw DataError("non-productive academic " + academic.academic_id);
  CollabProfile profile{academic.academic_id, academic.rank, academic.uda, {}};
  for (const auto& f : flags) profile.counts.add(f);
  return profile;
}

struct StaffClass {
  bool productive = false;
  bool collaborative = false;
};

inline StaffClass classify_staff(const CollabCounts& counts) { return {counts.p >= 1, counts.cp >= 1}; }

inline StaffClass classify_staff(std::span<const CollabFlags> flags) {
  CollabCounts c;
  for (const auto& f : flags) c.add(f);
  return classify_staff(c);
}

struct GroupStats {
  std::size_t n = 0;
  std::size_t n_zero = 0;
  std::size_t n_full = 0;
  Rational mean;  // unweighted mean of the individual ratios

  Rational pct_zero() const { return Rational(n_zero, n); }
  Rational pct_full() const { return Rational(n_full, n); }
};

// Mean, share at exactly 0 and share at exactly 1 of one ratio over a group.
inline GroupStats group_stats(std::span<const CollabProfile> profiles, Form form) {
  if (profiles.empty()) throw DataError("group statistics of an empty group");
  GroupStats s;
  s.n = profiles.size();
  // Sum numerators per denominator first; far fewer rational additions.
  std::map<std::uint64_t, std::uint64_t> by_p;
  for (const auto& pr : profiles) {
    if (pr.counts.p == 0) throw DataError("non-productive academic " + pr.academic_id + " in group");
    const auto c = pr.counts.count(form);
    by_p[pr.counts.p] += c;
    if (c == 0) ++s.n_zero;
    if (c == pr.counts.p) ++s.n_full;
  }
  Rational sum = 0;
  for (const auto& [p, c] : by_p) sum += Rational(c, p);
  s.mean = sum / static_cast<std::uint64_t>(s.n);
  return s;
}

// Pooled estimator: total collaborative output over total output.
inline Rational aggregate_propensity(std::span<const CollabProfile> profiles, Form form) {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  for (const auto& pr : profiles) {
    num += pr.counts.count(form);
    den += pr.counts.p;
  }
  if (den == 0) throw DataError("aggregate propensity over zero publications");
  return Rational(num, den);
}

}  // namespace collab
