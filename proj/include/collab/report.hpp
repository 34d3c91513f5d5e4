#pragma once

// Staff/publication table and per-form propensity tables, rendered as CSV or
// Markdown pipe tables. Percentages are rounded half-to-even at one decimal
// from exact values at render time only.

#include <collab/attribution.hpp>
#include <collab/corpus.hpp>
#include <collab/error.hpp>
#include <collab/indicators.hpp>
#include <collab/roster.hpp>
#include <collab/stats.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace collab {

// 0.99444 -> "99.4"; 0.00125 -> "0.1" (half-to-even on the exact value).
inline std::string format_percent(const Rational& fraction) {
  using boost::multiprecision::cpp_int;
  const Rational scaled = fraction * 1000;
  cpp_int num = boost::multiprecision::numerator(scaled);
  const cpp_int den = boost::multiprecision::denominator(scaled);
  const bool negative = num < 0;
  if (negative) num = -num;
  cpp_int q = num / den;
  const cpp_int twice_rem = 2 * (num % den);
  if (twice_rem > den || (twice_rem == den && (q & 1) != 0)) ++q;
  std::string digits = q.str();
  if (digits.size() < 2) digits.insert(0, 2 - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - 1) + "." + digits.back();
  if (negative && q != 0) out.insert(0, "-");
  return out;
}

inline std::string format_percent(double fraction) { return format_percent(Rational(fraction)); }

inline std::string format_percent(const std::optional<Rational>& fraction) {
  return fraction ? format_percent(*fraction) : std::string("n/a");
}

enum class Format { Csv, Markdown };

inline Format parse_format(std::string_view token) {
  if (token == "csv") return Format::Csv;
  if (token == "md" || token == "markdown") return Format::Markdown;
  throw ConfigError("unknown format '" + std::string(token) + "' (expected csv or md)");
}

inline std::string_view format_extension(Format f) { return f == Format::Csv ? "csv" : "md"; }

inline constexpr std::string_view kTotalLabel = "Total";

// ---------------------------------------------------------------------------
// Table 1: staff and publications
// ---------------------------------------------------------------------------

struct StaffRow {
  std::string uda;
  Rank rank = Rank::Full;
  std::size_t pubs = 0;
  std::optional<Rational> pubs_share;  // of the block's distinct publications
  std::size_t staff = 0;
  std::optional<Rational> staff_share;  // of the block's staff
  std::size_t productive = 0;
  std::size_t collaborative = 0;

  std::optional<Rational> productive_share() const {
    return staff ? std::optional<Rational>(Rational(productive, staff)) : std::nullopt;
  }
  std::optional<Rational> collaborative_share() const {
    return staff ? std::optional<Rational>(Rational(collaborative, staff)) : std::nullopt;
  }
};

struct StaffTable {
  std::vector<StaffRow> rows;  // UDA blocks of three ranks, Total block last
  std::size_t total_pubs = 0;  // distinct publications over all UDAs
};

// `population[i]` tells whether roster academic i is counted; `counts[i]`
// holds that academic's tallies. UDA blocks are ordered by descending
// distinct publication count, then UDA code.
inline StaffTable table_staff(const Roster& roster, const AttributionIndex& index, std::span<const CollabCounts> counts,
                              const std::vector<bool>& population) {
  struct Block {
    std::array<std::set<std::size_t>, 3> pubs;
    std::set<std::size_t> all_pubs;
    std::array<std::size_t, 3> staff{};
    std::array<std::size_t, 3> productive{};
    std::array<std::size_t, 3> collaborative{};
  };
  std::map<std::string, Block> blocks;
  Block total;

  const auto& academics = roster.academics();
  for (std::size_t i = 0; i < academics.size(); ++i) {
    if (!population[i]) continue;
    const auto& a = academics[i];
    const auto r = rank_index(a.rank);
    auto& block = blocks[a.uda];
    const auto cls = classify_staff(counts[i]);
    for (Block* b : {&block, &total}) {
      ++b->staff[r];
      b->productive[r] += cls.productive;
      b->collaborative[r] += cls.collaborative;
      for (auto p : index.pubs_of[i]) {
        b->pubs[r].insert(p);
        b->all_pubs.insert(p);
      }
    }
  }

  std::vector<std::string> order;
  for (const auto& [uda, _] : blocks) order.push_back(uda);
  std::stable_sort(order.begin(), order.end(), [&](const std::string& x, const std::string& y) {
    return blocks[x].all_pubs.size() > blocks[y].all_pubs.size();
  });

  StaffTable table;
  table.total_pubs = total.all_pubs.size();
  auto emit = [&](const std::string& label, const Block& b) {
    std::size_t staff_sum = 0;
    for (auto s : b.staff) staff_sum += s;
    for (auto rank : kRanks) {
      const auto r = rank_index(rank);
      StaffRow row;
      row.uda = label;
      row.rank = rank;
      row.pubs = b.pubs[r].size();
      if (!b.all_pubs.empty()) row.pubs_share = Rational(row.pubs, b.all_pubs.size());
      row.staff = b.staff[r];
      if (staff_sum) row.staff_share = Rational(row.staff, staff_sum);
      row.productive = b.productive[r];
      row.collaborative = b.collaborative[r];
      table.rows.push_back(std::move(row));
    }
  };
  for (const auto& uda : order) emit(uda, blocks[uda]);
  if (!blocks.empty()) emit(std::string(kTotalLabel), total);
  return table;
}

// ---------------------------------------------------------------------------
// Tables 2-5: propensity per form
// ---------------------------------------------------------------------------

struct PropensityRow {
  Rank rank = Rank::Full;
  std::optional<GroupStats> stats;  // empty without productive academics
  ComparisonCell comparison;       // fixed vs-order: row i holds comparison i
};

struct PropensityBlock {
  std::string uda;
  std::array<PropensityRow, 3> rows;
};

struct PropensityTable {
  Form form = Form::C;
  std::vector<PropensityBlock> blocks;  // UDA blocks, Total last
};

// Statistics and rank comparisons of `form` over the profiles of one UDA
// (or the Total population).
inline PropensityBlock propensity_block(std::string uda, std::span<const CollabProfile> profiles, Form form,
                                        const StarThresholds& thresholds = {}) {
  std::array<std::vector<CollabProfile>, 3> by_rank;
  std::array<std::vector<double>, 3> values;
  for (const auto& pr : profiles) {
    by_rank[rank_index(pr.rank)].push_back(pr);
    values[rank_index(pr.rank)].push_back(pr.value(form));
  }
  PropensityBlock block;
  block.uda = std::move(uda);
  const auto cells = compare_ranks(values, thresholds);
  for (auto rank : kRanks) {
    const auto r = rank_index(rank);
    auto& row = block.rows[r];
    row.rank = rank;
    if (!by_rank[r].empty()) row.stats = group_stats(by_rank[r], form);
    row.comparison = cells[r];
  }
  return block;
}

// Orders UDA blocks by descending Full-rank mean (UDA code breaks ties;
// blocks without full professors go last) and appends the Total block.
inline PropensityTable table_propensity(Form form, std::vector<PropensityBlock> uda_blocks,
                                        std::optional<PropensityBlock> total) {
  auto full_mean = [](const PropensityBlock& b) -> const std::optional<GroupStats>& {
    return b.rows[rank_index(Rank::Full)].stats;
  };
  std::sort(uda_blocks.begin(), uda_blocks.end(), [&](const PropensityBlock& x, const PropensityBlock& y) {
    const auto& fx = full_mean(x);
    const auto& fy = full_mean(y);
    if (fx && fy && fx->mean != fy->mean) return fx->mean > fy->mean;
    if (fx.has_value() != fy.has_value()) return fx.has_value();
    return x.uda < y.uda;
  });
  PropensityTable table{form, std::move(uda_blocks)};
  if (total) table.blocks.push_back(std::move(*total));
  return table;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline std::string printf_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string comparison_text(const ComparisonCell& cell) {
  if (!cell.result) return "n/a";
  return std::string(1, sign_char(cell.result->sign)) + cell.result->stars;
}

inline void markdown_row(std::ostream& out, const std::vector<std::string>& cells) {
  out << '|';
  for (const auto& c : cells) out << ' ' << c << " |";
  out << '\n';
}

inline void markdown_header(std::ostream& out, const std::vector<std::string>& cells) {
  markdown_row(out, cells);
  out << '|';
  for (std::size_t i = 0; i < cells.size(); ++i) out << " --- |";
  out << '\n';
}

inline void csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out << '"';
      for (char ch : c) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << c;
    }
  }
  out << '\n';
}

}  // namespace detail

inline void export_table(std::ostream& out, const StaffTable& table, Format format) {
  if (format == Format::Csv) {
    detail::csv_row(out, {"uda", "rank", "publications", "publications_pct", "staff", "staff_pct", "productive",
                          "productive_pct", "collaborative", "collaborative_pct"});
    for (const auto& r : table.rows) {
      detail::csv_row(out, {r.uda, std::string(rank_label(r.rank)), std::to_string(r.pubs), format_percent(r.pubs_share),
                            std::to_string(r.staff), format_percent(r.staff_share), std::to_string(r.productive),
                            format_percent(r.productive_share()), std::to_string(r.collaborative),
                            format_percent(r.collaborative_share())});
    }
    return;
  }
  detail::markdown_header(out, {"UDA", "Rank", "Publications", "Staff", "Productive", "Collaborative"});
  std::string previous;
  for (const auto& r : table.rows) {
    auto with_pct = [](std::size_t n, const std::optional<Rational>& share) {
      return std::to_string(n) + " (" + (share ? format_percent(*share) + "%" : std::string("n/a")) + ")";
    };
    detail::markdown_row(out, {r.uda == previous ? "" : r.uda, std::string(rank_label(r.rank)),
                               with_pct(r.pubs, r.pubs_share), with_pct(r.staff, r.staff_share),
                               with_pct(r.productive, r.productive_share()),
                               with_pct(r.collaborative, r.collaborative_share())});
    previous = r.uda;
  }
}

inline void export_table(std::ostream& out, const PropensityTable& table, Format format) {
  const std::string f(form_name(table.form));
  if (format == Format::Csv) {
    detail::csv_row(out, {"uda", "rank", "n", "mean", "pct_zero", "pct_full", "versus", "test", "u", "p_value"});
  } else {
    detail::markdown_header(out, {"UDA", "Rank", "n", "Mean " + f, f + " = 0%", f + " = 100%", "", "U Mann-Whitney"});
  }
  for (const auto& block : table.blocks) {
    for (std::size_t i = 0; i < block.rows.size(); ++i) {
      const auto& row = block.rows[i];
      const auto& cmp = row.comparison;
      std::string n = "0", mean = "n/a", zero = "n/a", full = "n/a";
      if (row.stats) {
        n = std::to_string(row.stats->n);
        mean = format_percent(row.stats->mean);
        zero = format_percent(row.stats->pct_zero());
        full = format_percent(row.stats->pct_full());
      }
      const std::string versus = "vs " + std::string(rank_label(cmp.b));
      if (format == Format::Csv) {
        std::string u = "n/a", p = "n/a";
        if (cmp.result) {
          u = detail::printf_double("%.1f", cmp.result->u);
          p = detail::printf_double("%.6g", cmp.result->p_value);
        }
        detail::csv_row(out, {block.uda, std::string(rank_label(row.rank)), n, mean, zero, full, versus,
                              detail::comparison_text(cmp), u, p});
      } else {
        detail::markdown_row(out, {i == 0 ? block.uda : "", std::string(rank_label(row.rank)), n, mean, zero, full,
                                   versus, detail::comparison_text(cmp)});
      }
    }
  }
}

inline void export_profiles(std::ostream& out, std::span<const CollabProfile> profiles) {
  detail::csv_row(out, {"academic_id", "rank", "uda", "p", "cp", "cip", "cedp", "cefp", "C", "CI", "CED", "CEF"});
  for (const auto& pr : profiles) {
    std::vector<std::string> cells{pr.academic_id, std::string(rank_label(pr.rank)), pr.uda};
    for (auto v : {pr.counts.p, pr.counts.cp, pr.counts.cip, pr.counts.cedp, pr.counts.cefp}) {
      cells.push_back(std::to_string(v));
    }
    for (auto f : kForms) cells.push_back(detail::printf_double("%.6f", pr.value(f)));
    detail::csv_row(out, cells);
  }
}

template <typename Table>
std::string render(const Table& table, Format format) {
  std::ostringstream out;
  export_table(out, table, format);
  return out.str();
}

}  // namespace collab
