// Acceptance suite. Each test is one criterion; the listener below prints a
// single PASS/FAIL line per criterion after the run.

#include <collab/cli.hpp>
#include <collab/pipeline.hpp>
#include <collab/synth.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

using namespace collab;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(COLLAB_TEST_DATA) + "/fixture/" + name; }

struct Fixture {
  Corpus corpus;
  Roster roster;
  AttributionSet links;
};

Fixture load_fixture() {
  std::ifstream c(fixture("corpus.jsonl")), r(fixture("roster.jsonl")), a(fixture("attributions.jsonl"));
  auto corpus = parse_corpus(c, {2006, 2010}, "IT");
  auto roster = load_roster(r);
  auto links = attribute_explicit(corpus.corpus, roster.roster, a);
  EXPECT_TRUE(corpus.errors.empty() && roster.errors.empty() && links.errors.empty());
  return {std::move(corpus.corpus), std::move(roster.roster), std::move(links.links)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

// Exact two-sided p-value by enumerating every assignment of the pooled
// ranks to group a (tie-free input).
double enumerated_p(const std::vector<int>& ranks_a, int n) {
  const int m = static_cast<int>(ranks_a.size());
  int observed = 0;
  for (int r : ranks_a) observed += r;
  long long total = 0, le = 0, ge = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    int s = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) s += i + 1;
    }
    ++total;
    le += s <= observed;
    ge += s >= observed;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

// Total-block publication counts never exceed the column sums over UDAs.
bool total_rows_within_column_sums(const StaffTable& t) {
  std::array<std::size_t, 3> sums{}, totals{};
  for (const auto& r : t.rows) {
    (r.uda == kTotalLabel ? totals : sums)[rank_index(r.rank)] += r.pubs;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (totals[k] > sums[k]) return false;
  }
  return true;
}

void expect_indicator_bounds(const std::vector<CollabProfile>& profiles) {
  for (const auto& pr : profiles) {
    const auto c = pr.ratio(Form::C);
    EXPECT_LE(c, 1);
    for (auto f : {Form::CI, Form::CED, Form::CEF}) {
      EXPECT_GE(pr.ratio(f), 0) << pr.academic_id;
      EXPECT_LE(pr.ratio(f), c) << pr.academic_id;
    }
  }
}

}  // namespace

TEST(Acceptance, Criterion1_OracleEquivalence) {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ds = synth::generate(synth::demo_config(seed));
    EXPECT_GE(ds.roster.size(), 500u);
    EXPECT_GE(ds.corpus.size(), 5000u);
    const auto a = analyze(ds.corpus, ds.roster, ds.attributions);
    const auto oracle =
        synth::oracle_recount(ds.roster, ds.corpus, ds.attributions, ds.corpus.home_country(), default_doc_types());
    ASSERT_EQ(oracle.size(), a.counts.size());
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i) mismatches += !synth::same_counts(a.counts[i], oracle[i]);
    EXPECT_EQ(mismatches, 0u) << "seed " << seed;
    for (const auto& pr : a.profiles) {
      const auto& o = oracle[*ds.roster.index_of(pr.academic_id)];
      EXPECT_EQ(pr.ratio(Form::C), Rational(o.cp, o.p));
      EXPECT_EQ(pr.ratio(Form::CI), Rational(o.cip, o.p));
      EXPECT_EQ(pr.ratio(Form::CED), Rational(o.cedp, o.p));
      EXPECT_EQ(pr.ratio(Form::CEF), Rational(o.cefp, o.p));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("  20 corpora checked in %.2f s\n", seconds);
  EXPECT_LE(seconds, 60.0);
}

TEST(Acceptance, Criterion2_FixtureReproduction) {
  auto fx = load_fixture();
  EXPECT_EQ(fx.roster.size(), 10u);
  EXPECT_EQ(fx.corpus.size(), 15u);
  const auto a = analyze(fx.corpus, fx.roster, fx.links);
  const std::map<std::string, CollabCounts> expected{
      {"A01", {4, 3, 2, 1, 1}}, {"A02", {2, 2, 2, 0, 1}}, {"A03", {3, 2, 1, 1, 1}}, {"A04", {2, 2, 1, 2, 0}},
      {"A05", {2, 1, 1, 0, 0}}, {"A06", {2, 2, 1, 1, 1}}, {"A07", {2, 2, 1, 2, 1}}, {"A08", {2, 1, 0, 1, 1}},
      {"A09", {1, 1, 0, 0, 0}}, {"A10", {0, 0, 0, 0, 0}}};
  for (std::size_t i = 0; i < fx.roster.size(); ++i) {
    EXPECT_EQ(a.counts[i], expected.at(fx.roster.academics()[i].academic_id));
  }
  const std::map<std::string, std::array<Rational, 4>> ratios{
      {"A01", {Rational(3, 4), Rational(1, 2), Rational(1, 4), Rational(1, 4)}},
      {"A03", {Rational(2, 3), Rational(1, 3), Rational(1, 3), Rational(1, 3)}},
      {"A08", {Rational(1, 2), Rational(0), Rational(1, 2), Rational(1, 2)}}};
  for (const auto& pr : a.profiles) {
    if (auto it = ratios.find(pr.academic_id); it != ratios.end()) {
      for (std::size_t f = 0; f < 4; ++f) EXPECT_EQ(pr.ratio(kForms[f]), it->second[f]) << pr.academic_id;
    }
  }

  std::array<std::size_t, 3> total_pubs{}, total_staff{};
  for (const auto& r : a.staff.rows) {
    if (r.uda == kTotalLabel) {
      total_pubs[rank_index(r.rank)] = r.pubs;
      total_staff[rank_index(r.rank)] = r.staff;
    }
  }
  EXPECT_EQ(total_pubs, (std::array<std::size_t, 3>{6, 5, 6}));
  EXPECT_EQ(total_staff, (std::array<std::size_t, 3>{4, 3, 3}));
  EXPECT_EQ(a.staff.total_pubs, 14u);

  const auto& total_c = a.propensity[0].blocks.back();
  EXPECT_EQ(total_c.uda, kTotalLabel);
  EXPECT_EQ(total_c.rows[0].stats->mean, Rational(11, 12));
  EXPECT_EQ(total_c.rows[1].stats->mean, Rational(1));
  EXPECT_EQ(total_c.rows[2].stats->mean, Rational(5, 9));
  EXPECT_EQ(a.propensity[1].blocks.back().rows[2].stats->mean, Rational(5, 18));
  EXPECT_EQ(a.propensity[2].blocks.back().rows[0].stats->mean, Rational(3, 4));
  EXPECT_EQ(a.propensity[3].blocks.back().rows[0].stats->mean, Rational(1, 4));
}

TEST(Acceptance, Criterion3_MannWhitneyCorrectness) {
  // Every tie-free rank configuration with both sizes at most 6.
  std::size_t cases = 0;
  double worst = 0.0;
  for (int na = 1; na <= 6; ++na) {
    for (int nb = 1; nb <= 6; ++nb) {
      const int n = na + nb;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != na) continue;
        std::vector<double> a, b;
        std::vector<int> ranks_a;
        for (int i = 0; i < n; ++i) {
          if (mask >> i & 1u) {
            a.push_back(i * 1.5 + 0.25);
            ranks_a.push_back(i + 1);
          } else {
            b.push_back(i * 1.5 + 0.25);
          }
        }
        const double got = mann_whitney(a, b).p_value;
        worst = std::max(worst, std::fabs(got - enumerated_p(ranks_a, n)));
        ++cases;
      }
    }
  }
  std::printf("  %zu tie-free configurations, max |p - p_enum| = %.3g\n", cases, worst);
  EXPECT_LE(worst, 1e-12);

  std::mt19937_64 gen(2024);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t na = 1 + gen() % 40, nb = 1 + gen() % 40;
    const bool ties = trial % 2 == 0;
    auto draw = [&] { return ties ? static_cast<double>(gen() % 6) / 5.0 : static_cast<double>(gen() % 1000000) / 1e6; };
    std::vector<double> a(na), b(nb);
    for (auto& x : a) x = draw();
    for (auto& x : b) x = draw();
    const auto ab = mann_whitney(a, b);
    const auto ba = mann_whitney(b, a);
    const bool antisymmetric = std::fabs(ab.p_value - ba.p_value) <= 1e-12 &&
                               ab.u + ba.u == static_cast<double>(na * nb) &&
                               (ab.sign == Sign::Zero ? ba.sign == Sign::Zero : ab.sign != ba.sign);
    auto f = [](double x) { return std::log1p(x) * 7.0 + std::pow(x, 3.0); };
    std::vector<double> fa(a), fb(b);
    std::transform(fa.begin(), fa.end(), fa.begin(), f);
    std::transform(fb.begin(), fb.end(), fb.begin(), f);
    const auto t = mann_whitney(fa, fb);
    const bool invariant = t.p_value == ab.p_value && t.u == ab.u && t.sign == ab.sign;
    violations += !(antisymmetric && invariant);
  }
  EXPECT_EQ(violations, 0u);
}

TEST(Acceptance, Criterion4_RankDirectionNotMeanDirection) {
  const std::vector<double> a{0.3, 0.3, 0.3, 0.3};
  const std::vector<double> b{0.0, 0.0, 0.0, 1.0, 1.0};
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  const auto r = mann_whitney(a, b);
  EXPECT_LT(mean_a, mean_b);
  EXPECT_EQ(r.sign, Sign::Plus);
}

TEST(Acceptance, Criterion5_AggregateDistortion) {
  synth::GenConfig cfg;
  cfg.seed = 77;
  cfg.coupling = 0.4;
  synth::GroupConfig g;
  g.uda = "MED";
  g.staff = 1000;
  g.productive_share = 1.0;
  g.median_pubs = 4.0;
  g.sigma = 1.2;
  g.target_c = 0.5;
  g.target_ci = 0.3;
  g.target_ced = 0.2;
  g.target_cef = 0.1;
  cfg.groups.push_back(g);
  const auto ds = synth::generate(cfg);
  const auto a = analyze(ds.corpus, ds.roster, ds.attributions);
  const auto skew = synth::skew_report(ds.roster, a.profiles);
  std::printf("  coupled population: aggregate C %.4f, individual mean %.4f, gap %.4f\n", to_double(skew.aggregate[0]),
              to_double(skew.individual_mean[0]), skew.gap[0]);
  EXPECT_GE(skew.gap[0], 0.05);

  std::vector<CollabProfile> equal_p;
  std::mt19937_64 gen(5);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t cp = gen() % 8;
    equal_p.push_back({"E" + std::to_string(i), Rank::Full, "MED", {7, cp, gen() % (cp + 1), 0, 0}});
  }
  const auto flat = synth::skew_report(equal_p.size(), equal_p);
  EXPECT_EQ(flat.aggregate[0], flat.individual_mean[0]);
  EXPECT_EQ(flat.gap[0], 0.0);
}

TEST(Acceptance, Criterion6_SkewCalibration) {
  std::ifstream in(std::string(COLLAB_SOURCE_DIR) + "/configs/demo.json");
  ASSERT_TRUE(in);
  const auto cfg = synth::load_gen_config(in);
  auto share = [&](std::uint64_t seed) {
    auto c = cfg;
    c.seed = seed;
    const auto ds = synth::generate(c);
    const auto a = analyze(ds.corpus, ds.roster, ds.attributions);
    std::size_t in_scope = 0;
    for (bool b : a.included) in_scope += b;
    return synth::skew_report(in_scope, a.profiles).top23_share;
  };
  const double s = share(cfg.seed);
  std::printf("  top 23%% share %.4f (seed %llu)\n", s, static_cast<unsigned long long>(cfg.seed));
  EXPECT_GE(s, 0.70);
  EXPECT_LE(s, 0.84);
  EXPECT_EQ(s, share(cfg.seed));
}

TEST(Acceptance, Criterion7_StructuralRules) {
  auto fx = load_fixture();
  const auto a = analyze(fx.corpus, fx.roster, fx.links);
  expect_indicator_bounds(a.profiles);
  EXPECT_TRUE(total_rows_within_column_sums(a.staff));

  // ECS/01 sits at exactly half coverage.
  bool saw_half = false;
  for (const auto& cov : a.coverage.report) {
    if (cov.productive_count * 2 == cov.staff_count) {
      saw_half = true;
      EXPECT_TRUE(cov.included) << cov.sds;
    }
  }
  EXPECT_TRUE(saw_half);

  // Single-author publications, however many affiliations, are never collaborations.
  std::size_t multi_affiliation_solo = 0;
  for (const auto& pub : a.corpus.publications()) {
    if (distinct_byline_authors(pub) != 1) continue;
    if (pub.addresses.size() > 1) ++multi_affiliation_solo;
    const auto p = *a.corpus.index_of(pub.pub_id);
    for (auto i : a.index.authors_of[p]) {
      std::vector<const Academic*> attributed;
      for (auto j : a.index.authors_of[p]) attributed.push_back(&fx.roster.academics()[j]);
      EXPECT_FALSE(classify(pub, fx.roster.academics()[i], attributed, "IT").is_collab) << pub.pub_id;
    }
  }
  EXPECT_GE(multi_affiliation_solo, 2u);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ds = synth::generate(synth::demo_config(seed));
    const auto s = analyze(ds.corpus, ds.roster, ds.attributions);
    expect_indicator_bounds(s.profiles);
    EXPECT_TRUE(total_rows_within_column_sums(s.staff));
    for (const auto& cov : s.coverage.report) {
      EXPECT_EQ(cov.included, cov.productive_count * 2 >= cov.staff_count) << cov.sds;
    }
  }
}

TEST(Acceptance, Criterion8_Determinism) {
  const fs::path root = fs::temp_directory_path() / "collabprop_acceptance";
  fs::remove_all(root);
  const std::vector<std::string> inputs{"--corpus", fixture("corpus.jsonl"), "--roster", fixture("roster.jsonl"),
                                        "--attributions", fixture("attributions.jsonl")};
  auto analyze_into = [&](const std::string& name, const std::string& workers) {
    std::vector<std::string> args{"analyze"};
    args.insert(args.end(), inputs.begin(), inputs.end());
    args.insert(args.end(), {"--out", (root / name).string(), "--workers", workers});
    EXPECT_EQ(run_cli(args), 0);
    return read_dir(root / name);
  };
  const auto a1 = analyze_into("a1", "1");
  EXPECT_EQ(a1, analyze_into("a2", "1"));
  EXPECT_EQ(a1, analyze_into("a4", "4"));
  EXPECT_EQ(a1.size(), 7u);

  auto simulate_into = [&](const std::string& name, const std::string& workers) {
    EXPECT_EQ(run_cli({"simulate", "--seed", "11", "--out", (root / name).string(), "--workers", workers}), 0);
    return read_dir(root / name);
  };
  const auto s1 = simulate_into("s1", "1");
  EXPECT_EQ(s1, simulate_into("s2", "1"));
  EXPECT_EQ(s1, simulate_into("s4", "4"));
  EXPECT_GE(s1.size(), 10u);
  fs::remove_all(root);
}

namespace {

class CriterionPrinter : public ::testing::EmptyTestEventListener {
 public:
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const std::string name = info.name();
    const auto underscore = name.find('_');
    const std::string number = name.substr(std::string("Criterion").size(), underscore - 9);
    lines_.push_back("ACCEPTANCE criterion " + number + ": " + (info.result()->Passed() ? "PASS" : "FAIL") + "  (" +
                     name.substr(underscore + 1) + ")");
  }
  void OnTestProgramEnd(const ::testing::UnitTest&) override {
    std::printf("\n");
    for (const auto& l : lines_) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new CriterionPrinter);
  return RUN_ALL_TESTS();
}
