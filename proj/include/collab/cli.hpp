#pragma once

// Command-line front end: validate, analyze, simulate.
// Exit codes: 0 success, 1 data error, 2 usage or configuration error.

#include <collab/attribution.hpp>
#include <collab/corpus.hpp>
#include <collab/error.hpp>
#include <collab/pipeline.hpp>
#include <collab/report.hpp>
#include <collab/roster.hpp>
#include <collab/synth.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace collab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Raised for unreadable or missing input files (exit 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string corpus_path;
  std::string roster_path;
  std::string attributions_path;
  std::string gen_config_path;
  std::string out_dir = "out";
  std::string home_country = "IT";
  double sds_threshold = 0.5;
  std::string doc_types;  // comma list; empty = default allowlist
  std::string stars = "0.05,0.01,0.001";
  std::string window = "2006-2010";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  unsigned workers = 1;
  bool staff_pre_filter = false;
  bool inject_fault = false;  // test hook for simulate: perturb one pipeline count
};

namespace detail {

inline std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing --") + what + " path");
  if (!std::filesystem::exists(path)) throw InputError("file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  return in;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

inline std::set<std::string> doc_type_allowlist(const std::string& csv) {
  if (csv.empty()) return default_doc_types();
  std::set<std::string> out;
  for (auto& t : text::split(csv, ',')) {
    if (!t.empty()) out.insert(t);
  }
  if (out.empty()) throw ConfigError("--doc-types lists no document type");
  return out;
}

inline AnalysisOptions analysis_options(const RunConfig& cfg) {
  AnalysisOptions opt;
  if (!(cfg.sds_threshold >= 0.0 && cfg.sds_threshold <= 1.0)) {
    throw ConfigError("--sds-threshold must lie in [0, 1]");
  }
  opt.sds_threshold = cfg.sds_threshold;
  opt.doc_types = doc_type_allowlist(cfg.doc_types);
  opt.stars = StarThresholds::parse(cfg.stars);
  opt.workers = cfg.workers;
  opt.staff_pre_filter = cfg.staff_pre_filter;
  return opt;
}

inline void report_errors(std::ostream& out, const char* what, const std::vector<RecordError>& errors) {
  for (const auto& e : errors) out << what << ' ' << e.str() << '\n';
}

// Writes profiles, Table 1 and the four propensity tables.
inline void write_tables(const std::filesystem::path& dir, const Analysis& a, Format format) {
  std::filesystem::create_directories(dir);
  const std::string ext(format_extension(format));
  {
    std::ostringstream s;
    export_profiles(s, a.profiles);
    write_file(dir / "profiles.csv", s.str());
  }
  write_file(dir / ("table1_staff." + ext), render(a.staff, format));
  for (std::size_t f = 0; f < kForms.size(); ++f) {
    const auto name = "table" + std::to_string(f + 2) + "_" + std::string(form_name(kForms[f])) + "." + ext;
    write_file(dir / name, render(a.propensity[f], format));
  }
}

inline std::string summary_text(const Analysis& a, const Roster& roster, std::size_t corpus_size, bool heuristic,
                                std::size_t ambiguous) {
  std::ostringstream s;
  s << "# Analysis summary\n\n";
  if (heuristic) {
    s << "> WARNING: no attribution file given; publications were attributed by the name/affiliation matcher "
         "(" << ambiguous << " ambiguous byline authors dropped).\n\n";
  }
  std::size_t in_scope = 0;
  for (bool b : a.included) in_scope += b;
  s << "- publications read: " << corpus_size << '\n';
  s << "- removed by document type: " << a.removed_by_type << '\n';
  s << "- attribution links: " << a.attributions.size() << '\n';
  s << "- SDS included: " << a.coverage.included.size() << " of " << a.coverage.report.size() << '\n';
  s << "- academics in included SDS: " << in_scope << " of " << roster.size() << '\n';
  s << "- productive academics analyzed: " << a.profiles.size() << '\n';
  for (const auto& w : a.coverage.warnings) s << "- warning: " << w << '\n';
  return s.str();
}

}  // namespace detail

struct LoadedInputs {
  CorpusParse corpus;
  RosterParse roster;
  std::optional<ExplicitAttribution> explicit_links;
  std::optional<HeuristicAttribution> matched_links;
};

inline LoadedInputs load_inputs(const RunConfig& cfg) {
  const auto window = parse_year_window(cfg.window);
  if (!is_country_code(cfg.home_country)) throw ConfigError("invalid --home-country '" + cfg.home_country + "'");
  auto corpus_in = detail::open_input(cfg.corpus_path, "corpus");
  auto roster_in = detail::open_input(cfg.roster_path, "roster");
  std::optional<std::ifstream> attr_in;
  if (!cfg.attributions_path.empty()) attr_in = detail::open_input(cfg.attributions_path, "attributions");

  LoadedInputs in{parse_corpus(corpus_in, window, cfg.home_country), load_roster(roster_in), {}, {}};
  if (attr_in) {
    in.explicit_links = attribute_explicit(in.corpus.corpus, in.roster.roster, *attr_in);
  } else {
    in.matched_links = attribute_heuristic(in.corpus.corpus, in.roster.roster);
  }
  return in;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  auto in = load_inputs(cfg);
  std::size_t hard = in.corpus.errors.size() + in.roster.errors.size();
  out << "corpus: " << in.corpus.records << " records, " << in.corpus.corpus.size() << " accepted, "
      << in.corpus.errors.size() << " rejected\n";
  detail::report_errors(out, "  corpus", in.corpus.errors);
  out << "roster: " << in.roster.records << " records, " << in.roster.roster.size() << " accepted, "
      << in.roster.errors.size() << " rejected\n";
  detail::report_errors(out, "  roster", in.roster.errors);
  if (in.explicit_links) {
    const auto& e = *in.explicit_links;
    hard += e.errors.size();
    out << "attributions: " << e.records << " records, " << e.links.size() << " links, " << e.errors.size()
        << " rejected, " << e.duplicates << " duplicates\n";
    detail::report_errors(out, "  attributions", e.errors);
    for (const auto& w : e.warnings) out << "  attributions warning " << w << '\n';
  } else {
    out << "attributions: matcher produced " << in.matched_links->links.size() << " links, ambiguity tally "
        << in.matched_links->ambiguous << '\n';
  }
  out << (hard == 0 ? "OK\n" : "FAILED: " + std::to_string(hard) + " rejected records\n");
  return hard == 0 ? kExitOk : kExitData;
}

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto options = detail::analysis_options(cfg);
  const auto format = parse_format(cfg.format);
  auto in = load_inputs(cfg);
  std::size_t hard = in.corpus.errors.size() + in.roster.errors.size();
  detail::report_errors(err, "corpus", in.corpus.errors);
  detail::report_errors(err, "roster", in.roster.errors);
  if (in.explicit_links) {
    hard += in.explicit_links->errors.size();
    detail::report_errors(err, "attributions", in.explicit_links->errors);
  }
  if (hard) throw DataError(std::to_string(hard) + " rejected input records; run validate for details");

  const bool heuristic = !in.explicit_links;
  if (heuristic) err << "warning: no --attributions given; using the name/affiliation matcher\n";
  const auto& links = heuristic ? in.matched_links->links : in.explicit_links->links;
  const auto analysis = analyze(in.corpus.corpus, in.roster.roster, links, options);

  const std::filesystem::path dir(cfg.out_dir);
  detail::write_tables(dir, analysis, format);
  const auto summary = detail::summary_text(analysis, in.roster.roster, in.corpus.corpus.size(), heuristic,
                                            heuristic ? in.matched_links->ambiguous : 0);
  detail::write_file(dir / "summary.md", summary);
  out << summary;
  return kExitOk;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  synth::GenConfig gen = synth::demo_config();
  if (!cfg.gen_config_path.empty()) {
    auto in = detail::open_input(cfg.gen_config_path, "config");
    gen = synth::load_gen_config(in);
  }
  if (cfg.seed) gen.seed = *cfg.seed;
  auto options = detail::analysis_options(cfg);
  const auto format = parse_format(cfg.format);

  const auto ds = synth::generate(gen);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ostringstream c, r, a;
    write_corpus(c, ds.corpus);
    write_roster(r, ds.roster);
    write_attributions(a, ds.attributions);
    detail::write_file(dir / "corpus.jsonl", c.str());
    detail::write_file(dir / "roster.jsonl", r.str());
    detail::write_file(dir / "attributions.jsonl", a.str());
  }

  auto analysis = analyze(ds.corpus, ds.roster, ds.attributions, options);
  if (cfg.inject_fault && !analysis.counts.empty()) {
    for (auto& c : analysis.counts) {
      if (c.p > 0) {
        ++c.cp;
        break;
      }
    }
  }
  detail::write_tables(dir, analysis, format);

  const auto oracle = synth::oracle_recount(ds.roster, ds.corpus, ds.attributions, gen.home_country, options.doc_types);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    if (!synth::same_counts(analysis.counts[i], oracle[i])) {
      if (mismatches < 10) err << "oracle mismatch for " << ds.roster.academics()[i].academic_id << '\n';
      ++mismatches;
    }
  }

  std::size_t in_scope = 0;
  for (bool b : analysis.included) in_scope += b;
  std::ostringstream summary;
  summary << detail::summary_text(analysis, ds.roster, ds.corpus.size(), false, 0);
  summary << "- seed: " << gen.seed << '\n';
  summary << "- oracle: " << (mismatches == 0 ? "agreement on all " + std::to_string(oracle.size()) + " academics"
                                              : std::to_string(mismatches) + " academics disagree")
          << '\n';
  if (analysis.profiles.size() >= 2) {
    const auto skew = synth::skew_report(in_scope, analysis.profiles);
    std::ostringstream s;
    synth::export_skew(s, skew);
    detail::write_file(dir / "skew.csv", s.str());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * skew.top23_share);
    summary << "- top 23% of academics hold " << buf << " of publications\n";
  }
  detail::write_file(dir / "summary.md", summary.str());
  out << summary.str();
  return mismatches == 0 ? kExitOk : kExitData;
}

// Parses arguments and dispatches. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collaboration-propensity indicators from publication and roster records", "collabprop"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_dir, "Output directory");
    sub->add_option("--home-country", cfg.home_country, "ISO country code treated as domestic");
    sub->add_option("--window", cfg.window, "Publication year window FIRST-LAST");
  };
  auto add_analysis = [&](CLI::App* sub) {
    sub->add_option("--sds-threshold", cfg.sds_threshold, "Minimum productive share for an SDS to be analyzed");
    sub->add_option("--doc-types", cfg.doc_types, "Comma-separated document types to keep");
    sub->add_option("--stars", cfg.stars, "Comma-separated, decreasing p-value cutoffs for *, **, ***");
    sub->add_option("--format", cfg.format, "Table format: csv or md");
    sub->add_option("--workers", cfg.workers, "Worker threads");
    sub->add_flag("--staff-pre-filter", cfg.staff_pre_filter, "Table 1 over all SDSs, not only included ones");
  };

  auto* validate = app.add_subcommand("validate", "Check input files and report rejected records");
  validate->add_option("--corpus", cfg.corpus_path, "Publication records (JSON lines)");
  validate->add_option("--roster", cfg.roster_path, "Roster records (JSON lines)");
  validate->add_option("--attributions", cfg.attributions_path, "Academic-publication links (JSON lines)");
  add_common(validate);

  auto* analyze_cmd = app.add_subcommand("analyze", "Compute profiles and write all tables");
  analyze_cmd->add_option("--corpus", cfg.corpus_path, "Publication records (JSON lines)");
  analyze_cmd->add_option("--roster", cfg.roster_path, "Roster records (JSON lines)");
  analyze_cmd->add_option("--attributions", cfg.attributions_path, "Academic-publication links (JSON lines)");
  add_common(analyze_cmd);
  add_analysis(analyze_cmd);

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset, analyze it, and cross-check");
  simulate->add_option("--config", cfg.gen_config_path, "Generator config (JSON); built-in demo when omitted");
  auto* seed_opt = simulate->add_option("--seed", seed, "Generator seed (overrides the config)");
  simulate->add_option("--out", cfg.out_dir, "Output directory");
  add_analysis(simulate);
  simulate->add_flag("--inject-fault", cfg.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (seed_opt->count()) cfg.seed = seed;

  try {
    if (*validate) return cmd_validate(cfg, out);
    if (*analyze_cmd) return cmd_analyze(cfg, out, err);
    return cmd_simulate(cfg, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"collabprop"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace collab::cli
