#pragma once

// Seeded synthetic roster/corpus generator with known ground truth, an
// independent brute-force recount of every indicator, and a productivity
// skew report.

#include <collab/attribution.hpp>
#include <collab/corpus.hpp>
#include <collab/error.hpp>
#include <collab/indicators.hpp>
#include <collab/random.hpp>
#include <collab/roster.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace collab::synth {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

// One (UDA, rank) cohort. Publication counts are a rounded lognormal with
// the given median and log-sd; C is drawn per academic from a beta law
// around target_c, and the three forms are drawn conditionally on a
// collaboration with means target_x / target_c.
struct GroupConfig {
  std::string uda;
  Rank rank = Rank::Full;
  std::size_t staff = 0;
  double productive_share = 0.85;
  double median_pubs = 4.0;
  double sigma = 1.2;
  double target_c = 0.9;
  double target_ci = 0.6;
  double target_ced = 0.4;
  double target_cef = 0.3;
  double concentration = 8.0;  // alpha + beta of the per-academic beta draws
};

struct GenConfig {
  std::uint64_t seed = 20140101;
  YearWindow window;
  std::string home_country = "IT";
  std::size_t universities = 6;
  std::size_t sds_per_uda = 2;
  std::size_t domestic_orgs = 10;
  std::size_t foreign_orgs = 15;
  double address_link_rate = 1.0;           // byline author carries its address link
  double colleague_attribution_rate = 0.0;  // intramural colleague also attributed
  double non_research_rate = 0.0;           // share typed editorial-material
  double coupling = 0.0;                    // shifts mean C by coupling * tanh(productivity z-score)
  std::vector<GroupConfig> groups;
};

inline void validate(const GenConfig& cfg) {
  auto unit = [](double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(what + " must lie in [0, 1]");
  };
  if (!is_country_code(cfg.home_country)) throw ConfigError("invalid home country '" + cfg.home_country + "'");
  if (cfg.window.first > cfg.window.last) throw ConfigError("empty year window");
  if (cfg.universities == 0) throw ConfigError("universities must be at least 1");
  if (cfg.sds_per_uda == 0 || cfg.sds_per_uda > 99) throw ConfigError("sds_per_uda must lie in [1, 99]");
  unit(cfg.address_link_rate, "address_link_rate");
  unit(cfg.colleague_attribution_rate, "colleague_attribution_rate");
  unit(cfg.non_research_rate, "non_research_rate");
  if (!(cfg.coupling >= -1.0 && cfg.coupling <= 1.0)) throw ConfigError("coupling must lie in [-1, 1]");
  for (const auto& g : cfg.groups) {
    const std::string where = " (group " + g.uda + "/" + std::string(rank_token(g.rank)) + ")";
    if (g.uda.empty()) throw ConfigError("group without UDA");
    unit(g.productive_share, "productive_share" + where);
    unit(g.target_c, "C target" + where);
    unit(g.target_ci, "CI target" + where);
    unit(g.target_ced, "CED target" + where);
    unit(g.target_cef, "CEF target" + where);
    if (g.target_ci > g.target_c || g.target_ced > g.target_c || g.target_cef > g.target_c) {
      throw ConfigError("CI, CED and CEF targets must not exceed the C target" + where);
    }
    if (!(g.median_pubs >= 1.0)) throw ConfigError("median_pubs must be at least 1" + where);
    if (!(g.sigma >= 0.0)) throw ConfigError("sigma must be non-negative" + where);
    if (!(g.concentration > 0.0)) throw ConfigError("concentration must be positive" + where);
    if (g.target_ced > 0.0 && cfg.domestic_orgs == 0) throw ConfigError("CED target needs domestic_orgs > 0" + where);
    if (g.target_cef > 0.0 && cfg.foreign_orgs == 0) throw ConfigError("CEF target needs foreign_orgs > 0" + where);
  }
}

inline GenConfig gen_config_from_json(const nlohmann::json& j) {
  GenConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("window")) cfg.window = parse_year_window(j.at("window").get<std::string>());
    cfg.home_country = j.value("home_country", cfg.home_country);
    cfg.universities = j.value("universities", cfg.universities);
    cfg.sds_per_uda = j.value("sds_per_uda", cfg.sds_per_uda);
    cfg.domestic_orgs = j.value("domestic_orgs", cfg.domestic_orgs);
    cfg.foreign_orgs = j.value("foreign_orgs", cfg.foreign_orgs);
    cfg.address_link_rate = j.value("address_link_rate", cfg.address_link_rate);
    cfg.colleague_attribution_rate = j.value("colleague_attribution_rate", cfg.colleague_attribution_rate);
    cfg.non_research_rate = j.value("non_research_rate", cfg.non_research_rate);
    cfg.coupling = j.value("coupling", cfg.coupling);
    for (const auto& gj : j.at("groups")) {
      GroupConfig g;
      g.uda = gj.at("uda").get<std::string>();
      const auto rank = gj.at("rank").get<std::string>();
      auto r = parse_rank(rank);
      if (!r) throw ConfigError("unknown rank '" + rank + "' in generator config");
      g.rank = *r;
      g.staff = gj.at("staff").get<std::size_t>();
      g.productive_share = gj.value("productive_share", g.productive_share);
      g.median_pubs = gj.value("median_pubs", g.median_pubs);
      g.sigma = gj.value("sigma", g.sigma);
      g.target_c = gj.value("C", g.target_c);
      g.target_ci = gj.value("CI", g.target_ci);
      g.target_ced = gj.value("CED", g.target_ced);
      g.target_cef = gj.value("CEF", g.target_cef);
      g.concentration = gj.value("concentration", g.concentration);
      cfg.groups.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid generator config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

inline GenConfig load_gen_config(std::istream& in) {
  try {
    return gen_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid generator config: ") + e.what());
  }
}

// Four disciplines, three ranks, 634 academics and ~7,000 publications.
// The productivity law is tuned so the top 23% of academics hold close to
// 77% of publications.
inline GenConfig demo_config(std::uint64_t seed = 20140101) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.universities = 6;
  cfg.address_link_rate = 0.9;
  cfg.colleague_attribution_rate = 0.1;
  cfg.non_research_rate = 0.03;
  struct Row {
    const char* uda;
    Rank rank;
    std::size_t staff;
    double productive, median, sigma, c, ci, ced, cef;
  };
  const Row rows[] = {
      {"CHE", Rank::Full, 44, 0.95, 7.5, 1.45, 0.99, 0.80, 0.55, 0.35},
      {"CHE", Rank::Associate, 50, 0.92, 6.0, 1.45, 0.98, 0.82, 0.50, 0.30},
      {"CHE", Rank::Assistant, 50, 0.94, 5.25, 1.45, 0.99, 0.88, 0.45, 0.25},
      {"MED", Rank::Full, 50, 0.90, 7.5, 1.45, 0.98, 0.85, 0.50, 0.20},
      {"MED", Rank::Associate, 60, 0.85, 6.0, 1.45, 0.98, 0.86, 0.45, 0.18},
      {"MED", Rank::Assistant, 77, 0.80, 5.25, 1.45, 0.99, 0.90, 0.40, 0.15},
      {"PHY", Rank::Full, 44, 0.93, 7.5, 1.45, 0.97, 0.70, 0.55, 0.60},
      {"PHY", Rank::Associate, 50, 0.88, 6.0, 1.45, 0.96, 0.70, 0.50, 0.55},
      {"PHY", Rank::Assistant, 44, 0.90, 5.25, 1.45, 0.96, 0.72, 0.45, 0.50},
      {"ECS", Rank::Full, 60, 0.65, 3.0, 1.45, 0.82, 0.45, 0.35, 0.25},
      {"ECS", Rank::Associate, 50, 0.64, 3.0, 1.45, 0.84, 0.45, 0.35, 0.22},
      {"ECS", Rank::Assistant, 55, 0.56, 2.25, 1.45, 0.87, 0.50, 0.30, 0.20},
  };
  for (const auto& r : rows) {
    GroupConfig g;
    g.uda = r.uda;
    g.rank = r.rank;
    g.staff = r.staff;
    g.productive_share = r.productive;
    g.median_pubs = r.median;
    g.sigma = r.sigma;
    g.target_c = r.c;
    g.target_ci = r.ci;
    g.target_ced = r.ced;
    g.target_cef = r.cef;
    cfg.groups.push_back(g);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

// Plain tallies shared by the ground truth and the oracle.
struct RecountedCounts {
  std::uint64_t p = 0;
  std::uint64_t cp = 0;
  std::uint64_t cip = 0;
  std::uint64_t cedp = 0;
  std::uint64_t cefp = 0;

  bool operator==(const RecountedCounts&) const = default;
};

inline bool same_counts(const CollabCounts& a, const RecountedCounts& b) {
  return a.p == b.p && a.cp == b.cp && a.cip == b.cip && a.cedp == b.cedp && a.cefp == b.cefp;
}

// Realized tallies per roster academic over research document types
// (everything but editorial-material), plus the configured targets.
struct GroundTruth {
  std::vector<RecountedCounts> realized;
  std::vector<std::size_t> group_of;  // roster index -> index into groups
  std::vector<GroupConfig> groups;
};

struct Dataset {
  Roster roster;
  Corpus corpus;
  AttributionSet attributions;
  GroundTruth truth;
};

namespace detail {

inline constexpr std::array<const char*, 32> kSurnames{
    "Rossi",   "Russo",    "Ferrari", "Esposito", "Bianchi", "Romano",  "Colombo", "Ricci",
    "Marino",  "Greco",    "Bruno",   "Gallo",    "Conti",   "Costa",   "Giordano", "Mancini",
    "Rizzo",   "Lombardi", "Moretti", "Barbieri", "Fontana", "Santoro", "Mariani", "Rinaldi",
    "Caruso",  "Ferrara",  "Galli",   "Martini",  "Leone",   "Longo",   "Gentile", "Martinelli"};

inline constexpr std::array<const char*, 20> kGivenNames{
    "Maria",  "Marco",   "Giulia",  "Luca",     "Anna",    "Paolo",   "Chiara", "Andrea",  "Elena",  "Giovanni",
    "Sara",   "Stefano", "Laura",   "Francesco", "Silvia", "Roberto", "Paola",  "Alessandro", "Marta", "Davide"};

inline constexpr std::array<const char*, 12> kForeignCountries{"US", "DE", "FR", "GB", "ES", "NL",
                                                               "CH", "JP", "CN", "CA", "SE", "BE"};

inline std::string letters(std::size_t k) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + k % 26));
    k /= 26;
  } while (k > 0);
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

inline std::string numbered(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

}  // namespace detail

inline bool is_research_type(std::string_view doc_type) { return doc_type != "editorial-material"; }

// Deterministic in the seed. Each academic draws from its own stream, so the
// emitted records do not depend on how generation is scheduled.
inline Dataset generate(const GenConfig& cfg) {
  validate(cfg);
  Dataset ds;
  ds.corpus = Corpus(cfg.window, cfg.home_country);
  ds.truth.groups = cfg.groups;

  // Roster.
  std::size_t next = 0;
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
    const auto& grp = cfg.groups[g];
    for (std::size_t s = 0; s < grp.staff; ++s, ++next) {
      Academic a;
      a.academic_id = detail::numbered("A", next, 5);
      a.surname = detail::kSurnames[next % detail::kSurnames.size()];
      if (const auto block = next / detail::kSurnames.size(); block > 0) a.surname += " " + detail::letters(block);
      a.given_names = detail::kGivenNames[(next * 7 + next / 20) % detail::kGivenNames.size()];
      a.rank = grp.rank;
      a.uda = grp.uda;
      a.sds = grp.uda + "/" + detail::numbered("", s % cfg.sds_per_uda + 1, 2);
      a.university_id = detail::numbered("U", next % cfg.universities, 2);
      ds.roster.add(std::move(a));
      ds.truth.group_of.push_back(g);
    }
  }
  const auto& academics = ds.roster.academics();
  const std::size_t m = academics.size();
  ds.truth.realized.assign(m, {});

  std::vector<std::vector<std::size_t>> members(cfg.universities);
  for (std::size_t i = 0; i < m; ++i) members[i % cfg.universities].push_back(i);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& grp = cfg.groups[ds.truth.group_of[i]];
    if (grp.target_ci > 0.0 && members[i % cfg.universities].size() < 2) {
      throw ConfigError("infeasible config: intramural collaboration requested for " + academics[i].academic_id +
                        ", the only academic at university " + academics[i].university_id);
    }
  }

  auto byline = [](const Academic& a) { return a.surname + ", " + a.given_names.substr(0, 1) + "."; };
  auto university_address = [&](const Academic& a) {
    return Address{"University " + a.university_id, a.university_id, cfg.home_country};
  };
  const auto years = static_cast<std::size_t>(cfg.window.last - cfg.window.first + 1);

  for (std::size_t i = 0; i < m; ++i) {
    const auto& me = academics[i];
    const auto& grp = cfg.groups[ds.truth.group_of[i]];
    rng::Stream rs(rng::derive_seed(cfg.seed, i));

    const bool productive = rs.bernoulli(grp.productive_share);
    const double z = rs.normal();
    const std::uint64_t p =
        productive ? static_cast<std::uint64_t>(std::max(1.0, std::round(grp.median_pubs * std::exp(grp.sigma * z)))) : 0;
    const double mean_c = std::clamp(grp.target_c + cfg.coupling * std::tanh(z), 0.0, 1.0);
    const double c = rs.beta_mean(mean_c, grp.concentration);
    auto conditional = [&](double target) {
      return grp.target_c > 0.0 ? rs.beta_mean(target / grp.target_c, grp.concentration) : 0.0;
    };
    const double q_intra = conditional(grp.target_ci);
    const double q_domestic = conditional(grp.target_ced);
    const double q_foreign = conditional(grp.target_cef);

    for (std::uint64_t k = 0; k < p; ++k) {
      Publication pub;
      pub.pub_id = "P" + me.academic_id.substr(1) + "-" + std::to_string(k);
      pub.year = cfg.window.first + static_cast<int>(rs.index(years));
      pub.doc_type = rs.bernoulli(cfg.non_research_rate) ? "editorial-material"
                     : rs.bernoulli(0.15)                 ? "review"
                                                          : "article";
      pub.addresses.push_back(university_address(me));
      auto linked = [&](std::size_t addr) {
        return rs.bernoulli(cfg.address_link_rate) ? std::vector<std::size_t>{addr} : std::vector<std::size_t>{};
      };
      pub.authors.push_back({byline(me), linked(0)});

      const bool collab = rs.bernoulli(c);
      bool intra = false, domestic = false, foreign = false;
      if (collab) {
        intra = rs.bernoulli(q_intra);
        domestic = rs.bernoulli(q_domestic);
        foreign = rs.bernoulli(q_foreign);
      }

      std::optional<std::size_t> colleague;
      bool colleague_detectable = false;
      if (intra) {
        const auto& pool = members[i % cfg.universities];
        std::size_t pick = rs.index(pool.size() - 1);
        if (pool[pick] == i) pick = pool.size() - 1;
        const std::size_t j = pool[pick];
        auto links = linked(0);
        colleague_detectable = !links.empty();
        pub.authors.push_back({byline(academics[j]), std::move(links)});
        if (rs.bernoulli(cfg.colleague_attribution_rate)) {
          colleague = j;
          colleague_detectable = true;
        }
      }
      if (domestic) {
        const auto d = rs.index(cfg.domestic_orgs);
        pub.addresses.push_back({"Domestic Institute " + std::to_string(d), detail::numbered("D", d, 2), cfg.home_country});
        pub.authors.push_back({"Verdi Ext, D.", linked(pub.addresses.size() - 1)});
      }
      if (foreign) {
        const auto f = rs.index(cfg.foreign_orgs);
        pub.addresses.push_back({"Foreign Institute " + std::to_string(f), detail::numbered("F", f, 2),
                                 detail::kForeignCountries[f % detail::kForeignCountries.size()]});
        pub.authors.push_back({"Smith Ext, F.", linked(pub.addresses.size() - 1)});
      }
      if (collab && !intra && !domestic && !foreign) pub.authors.push_back({"Bianco Ext, G.", {}});

      ds.attributions.insert({me.academic_id, pub.pub_id, Provenance::Explicit, 0});
      if (colleague) {
        ds.attributions.insert({academics[*colleague].academic_id, pub.pub_id, Provenance::Explicit, 1});
      }
      if (is_research_type(pub.doc_type)) {
        auto& t = ds.truth.realized[i];
        ++t.p;
        t.cp += collab;
        t.cip += intra && colleague_detectable;
        t.cedp += domestic;
        t.cefp += foreign;
        if (colleague) {
          auto& tc = ds.truth.realized[*colleague];
          ++tc.p;
          ++tc.cp;
          ++tc.cip;
          tc.cedp += domestic;
          tc.cefp += foreign;
        }
      }
      ds.corpus.add(std::move(pub));
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

// Recounts p, cp, cip, cedp, cefp for every roster academic by brute force
// over all (academic, publication) pairs. Deliberately re-derives every
// classification rule here rather than calling the pipeline's code.
inline std::vector<RecountedCounts> oracle_recount(const Roster& roster, const Corpus& corpus,
                                                   const AttributionSet& attributions, std::string_view home_country,
                                                   const std::set<std::string>& doc_types) {
  const auto& people = roster.academics();
  const auto& pubs = corpus.publications();

  std::unordered_map<std::string, std::uint64_t> person_no, pub_no;
  for (std::size_t i = 0; i < people.size(); ++i) person_no[people[i].academic_id] = i;
  for (std::size_t j = 0; j < pubs.size(); ++j) pub_no[pubs[j].pub_id] = j;
  std::unordered_set<std::uint64_t> linked_pairs;
  for (const auto& [key, _] : attributions) {
    auto a = person_no.find(key.first);
    auto p = pub_no.find(key.second);
    if (a != person_no.end() && p != pub_no.end()) linked_pairs.insert(a->second << 32 | p->second);
  }
  auto authored = [&](std::size_t i, std::size_t j) { return linked_pairs.count(std::uint64_t(i) << 32 | j) != 0; };

  auto lower_squeezed = [](const std::string& s) {
    std::string out;
    for (char ch : s) {
      const bool blank = ch == ' ' || (ch >= '\t' && ch <= '\r');
      if (blank) {
        if (!out.empty() && out.back() != ' ') out += ' ';
      } else {
        out += (ch >= 'A' && ch <= 'Z') ? char(ch + 32) : ch;
      }
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
  };
  auto key_of = [](std::string_view s) {
    std::string out;
    for (char ch : s) {
      if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) out += ch;
      else if (ch >= 'A' && ch <= 'Z') out += char(ch + 32);
      else if (static_cast<unsigned char>(ch) >= 0x80) out += ch;
    }
    return out;
  };
  auto caps_only = [](std::string_view tok) {
    int caps = 0;
    for (char ch : tok) {
      if (ch >= 'A' && ch <= 'Z') ++caps;
      else if (ch != '.' && ch != '-') return false;
    }
    return caps > 0;
  };
  // Byline "Surname, X.Y." or "Surname XY" against the academic's names.
  auto is_same_person = [&](const Academic& who, const std::string& raw) {
    std::string s = raw;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    std::string surname_part, initials_part;
    bool split_on_comma = false;
    if (auto c = s.find(','); c != std::string::npos) {
      surname_part = s.substr(0, c);
      initials_part = s.substr(c + 1);
      split_on_comma = true;
    } else {
      auto sp = s.find_last_of(" \t");
      if (sp == std::string::npos || !caps_only(std::string_view(s).substr(sp + 1))) return false;
      surname_part = s.substr(0, sp);
      initials_part = s.substr(sp + 1);
    }
    std::vector<std::string> given;  // initials in the byline
    std::string tok;
    initials_part += ' ';
    for (char ch : initials_part) {
      if (ch != ' ' && !(ch >= '\t' && ch <= '\r')) {
        tok += ch;
        continue;
      }
      if (tok.empty()) continue;
      if (caps_only(tok)) {
        for (char t : tok)
          if (t >= 'A' && t <= 'Z') given.emplace_back(1, t);
      } else if (split_on_comma) {
        std::size_t at = tok.find_first_not_of(".-");
        if (at != std::string::npos) {
          const auto lead = static_cast<unsigned char>(tok[at]);
          std::size_t len = lead < 0x80 ? 1 : lead >= 0xF0 ? 4 : lead >= 0xE0 ? 3 : 2;
          std::string letter = tok.substr(at, len);
          if (len == 1 && letter[0] >= 'a' && letter[0] <= 'z') letter[0] = char(letter[0] - 32);
          given.push_back(letter);
        }
      }
      tok.clear();
    }
    const std::string surname = key_of(surname_part);
    if (surname.empty() || given.empty() || surname != key_of(who.surname)) return false;
    std::vector<std::string> own;  // initials of the roster given names
    bool fresh = true;
    for (std::size_t k = 0; k < who.given_names.size(); ++k) {
      const char ch = who.given_names[k];
      if (ch == ' ' || ch == '-' || ch == '.' || (ch >= '\t' && ch <= '\r')) {
        fresh = true;
        continue;
      }
      if (fresh) {
        const auto lead = static_cast<unsigned char>(ch);
        std::size_t len = lead < 0x80 ? 1 : lead >= 0xF0 ? 4 : lead >= 0xE0 ? 3 : 2;
        std::string letter = who.given_names.substr(k, len);
        if (len == 1 && letter[0] >= 'a' && letter[0] <= 'z') letter[0] = char(letter[0] - 32);
        own.push_back(letter);
      }
      fresh = false;
    }
    if (given.size() > own.size()) return false;
    for (std::size_t k = 0; k < given.size(); ++k)
      if (given[k] != own[k]) return false;
    return true;
  };
  auto at_university = [&](const Address& addr, const std::string& university) {
    if (addr.org_id.has_value()) return *addr.org_id == university;
    return lower_squeezed(addr.org_name) == lower_squeezed(university);
  };

  std::vector<RecountedCounts> out(people.size());
  for (std::size_t i = 0; i < people.size(); ++i) {
    const Academic& me = people[i];
    for (std::size_t j = 0; j < pubs.size(); ++j) {
      const Publication& pub = pubs[j];
      if (!doc_types.count(pub.doc_type) || !authored(i, j)) continue;
      RecountedCounts& t = out[i];
      t.p += 1;

      std::vector<std::string> distinct;
      for (const auto& au : pub.authors) {
        auto n = lower_squeezed(au.name);
        if (std::find(distinct.begin(), distinct.end(), n) == distinct.end()) distinct.push_back(n);
      }
      if (distinct.size() < 2) continue;
      t.cp += 1;

      bool intramural = false;
      for (std::size_t o = 0; o < people.size() && !intramural; ++o) {
        if (o != i && people[o].university_id == me.university_id && authored(o, j)) intramural = true;
      }
      if (!intramural) {
        std::vector<std::string> at_home, me_in_byline;
        for (const auto& au : pub.authors) {
          const auto n = lower_squeezed(au.name);
          if (is_same_person(me, au.name) &&
              std::find(me_in_byline.begin(), me_in_byline.end(), n) == me_in_byline.end())
            me_in_byline.push_back(n);
          bool home = false;
          for (auto idx : au.address_idxs) home = home || at_university(pub.addresses[idx], me.university_id);
          if (home && std::find(at_home.begin(), at_home.end(), n) == at_home.end()) at_home.push_back(n);
        }
        if (me_in_byline.empty()) {
          intramural = at_home.size() >= 2;
        } else {
          for (const auto& n : at_home)
            if (std::find(me_in_byline.begin(), me_in_byline.end(), n) == me_in_byline.end()) intramural = true;
        }
      }
      t.cip += intramural;

      bool domestic = false, foreign = false;
      for (const auto& addr : pub.addresses) {
        if (addr.country != home_country) foreign = true;
        else if (!at_university(addr, me.university_id)) domestic = true;
      }
      t.cedp += domestic;
      t.cefp += foreign;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Skew
// ---------------------------------------------------------------------------

// Share of total output held by the top `fraction` of academics, with the
// Lorenz curve interpolated linearly between academics.
inline double top_share(std::vector<std::uint64_t> outputs, double fraction) {
  if (outputs.empty()) return 0.0;
  std::sort(outputs.begin(), outputs.end(), std::greater<>());
  long double total = 0;
  for (auto v : outputs) total += v;
  if (total == 0) return 0.0;
  const long double position = static_cast<long double>(fraction) * outputs.size();
  const auto whole = static_cast<std::size_t>(position);
  long double held = 0;
  for (std::size_t k = 0; k < whole && k < outputs.size(); ++k) held += outputs[k];
  if (whole < outputs.size()) held += (position - whole) * outputs[whole];
  return static_cast<double>(held / total);
}

struct SkewReport {
  std::size_t population = 0;                      // academics, productive or not
  std::vector<std::pair<double, double>> curve;    // (top fraction, share of output)
  double top23_share = 0.0;
  std::array<Rational, 4> aggregate;        // per form, pooled estimator
  std::array<Rational, 4> individual_mean;  // per form, mean of individual ratios
  std::array<double, 4> gap{};              // |aggregate - individual_mean|
};

// `population` counts every academic in scope; those without a profile
// contribute zero output.
inline SkewReport skew_report(std::size_t population, std::span<const CollabProfile> profiles) {
  if (profiles.size() < 2) throw DataError("skew report needs at least two productive academics");
  if (population < profiles.size()) throw ContractError("population smaller than the number of profiles");
  std::vector<std::uint64_t> outputs(population, 0);
  for (std::size_t i = 0; i < profiles.size(); ++i) outputs[i] = profiles[i].counts.p;

  SkewReport r;
  r.population = population;
  for (int k = 1; k <= 20; ++k) {
    const double x = k / 20.0;
    r.curve.emplace_back(x, top_share(outputs, x));
  }
  r.top23_share = top_share(outputs, 0.23);
  for (std::size_t f = 0; f < kForms.size(); ++f) {
    r.aggregate[f] = aggregate_propensity(profiles, kForms[f]);
    r.individual_mean[f] = group_stats(profiles, kForms[f]).mean;
    r.gap[f] = std::fabs(to_double(r.aggregate[f]) - to_double(r.individual_mean[f]));
  }
  return r;
}

inline SkewReport skew_report(const Roster& roster, std::span<const CollabProfile> profiles) {
  return skew_report(roster.size(), profiles);
}

inline void export_skew(std::ostream& out, const SkewReport& r) {
  char buf[96];
  out << "metric,value\n";
  out << "population," << r.population << '\n';
  std::snprintf(buf, sizeof buf, "top23_share,%.6f\n", r.top23_share);
  out << buf;
  for (const auto& [x, share] : r.curve) {
    std::snprintf(buf, sizeof buf, "top_%.2f_share,%.6f\n", x, share);
    out << buf;
  }
  for (std::size_t f = 0; f < kForms.size(); ++f) {
    const std::string name(form_name(kForms[f]));
    std::snprintf(buf, sizeof buf, "aggregate_%s,%.6f\n", name.c_str(), to_double(r.aggregate[f]));
    out << buf;
    std::snprintf(buf, sizeof buf, "individual_mean_%s,%.6f\n", name.c_str(), to_double(r.individual_mean[f]));
    out << buf;
    std::snprintf(buf, sizeof buf, "gap_%s,%.6f\n", name.c_str(), r.gap[f]);
    out << buf;
  }
}

}  // namespace collab::synth
