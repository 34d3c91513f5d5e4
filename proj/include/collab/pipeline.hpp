#pragma once

// End-to-end analysis: document-type filter, SDS coverage, per-academic
// classification and tallies, profiles, and all report tables.

#include <collab/attribution.hpp>
#include <collab/classify.hpp>
#include <collab/corpus.hpp>
#include <collab/error.hpp>
#include <collab/indicators.hpp>
#include <collab/report.hpp>
#include <collab/roster.hpp>
#include <collab/stats.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace collab {

// Runs fn(i) for i in [0, n) on up to `workers` threads, in contiguous
// chunks. Callers write only to slot i, so results do not depend on the
// worker count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    threads.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

struct AnalysisOptions {
  double sds_threshold = 0.5;
  std::set<std::string> doc_types = default_doc_types();
  StarThresholds stars;
  unsigned workers = 1;
  bool staff_pre_filter = false;  // Table 1 over all SDSs instead of included ones
};

// Per-academic tallies over the attributed publications in `corpus`,
// indexed like the roster.
inline std::vector<CollabCounts> tally_counts(const Corpus& corpus, const Roster& roster, const AttributionIndex& index,
                                              unsigned workers = 1) {
  std::vector<CollabCounts> counts(roster.size());
  const auto& academics = roster.academics();
  parallel_for(roster.size(), workers, [&](std::size_t i) {
    std::vector<const Academic*> attributed;
    for (auto p : index.pubs_of[i]) {
      attributed.clear();
      for (auto a : index.authors_of[p]) attributed.push_back(&academics[a]);
      counts[i].add(classify(corpus.publications()[p], academics[i], attributed, corpus.home_country()));
    }
  });
  return counts;
}

struct Analysis {
  Corpus corpus;  // after the document-type filter
  std::size_t removed_by_type = 0;
  AttributionSet attributions;  // restricted to `corpus`
  CoverageResult coverage;
  AttributionIndex index;
  std::vector<CollabCounts> counts;   // per roster academic
  std::vector<bool> included;         // academic's SDS passed the coverage filter
  std::vector<CollabProfile> profiles;  // included and productive, roster order
  StaffTable staff;
  std::array<PropensityTable, 4> propensity;  // C, CI, CED, CEF
};

// Throws DataError when no SDS survives the coverage filter.
inline Analysis analyze(const Corpus& corpus, const Roster& roster, const AttributionSet& attributions,
                        const AnalysisOptions& options = {}) {
  Analysis out;
  auto filtered = filter_doc_types(corpus, options.doc_types);
  out.corpus = std::move(filtered.corpus);
  out.removed_by_type = filtered.removed;
  out.attributions = restrict_to_corpus(attributions, out.corpus);
  out.coverage = sds_coverage_filter(roster, out.attributions, options.sds_threshold);
  if (out.coverage.included.empty()) throw DataError("no included SDS after the coverage filter");

  out.index = index_attributions(out.attributions, out.corpus, roster);
  out.counts = tally_counts(out.corpus, roster, out.index, options.workers);

  const auto& academics = roster.academics();
  out.included.resize(academics.size());
  std::map<std::string, std::vector<CollabProfile>> by_uda;
  for (std::size_t i = 0; i < academics.size(); ++i) {
    out.included[i] = out.coverage.includes(academics[i].sds);
    if (!out.included[i] || out.counts[i].p == 0) continue;
    CollabProfile pr{academics[i].academic_id, academics[i].rank, academics[i].uda, out.counts[i]};
    by_uda[pr.uda].push_back(pr);
    out.profiles.push_back(std::move(pr));
  }

  const std::vector<bool> everyone(academics.size(), true);
  out.staff = table_staff(roster, out.index, out.counts, options.staff_pre_filter ? everyone : out.included);

  std::vector<std::string> udas;
  for (const auto& [uda, _] : by_uda) udas.push_back(uda);
  const std::size_t per_form = udas.size() + 1;  // UDA blocks, then Total
  std::vector<PropensityBlock> blocks(kForms.size() * per_form);
  parallel_for(blocks.size(), options.workers, [&](std::size_t t) {
    const Form form = kForms[t / per_form];
    const std::size_t b = t % per_form;
    if (b < udas.size()) {
      blocks[t] = propensity_block(udas[b], by_uda.at(udas[b]), form, options.stars);
    } else {
      blocks[t] = propensity_block(std::string(kTotalLabel), out.profiles, form, options.stars);
    }
  });
  for (std::size_t f = 0; f < kForms.size(); ++f) {
    std::vector<PropensityBlock> uda_blocks(blocks.begin() + f * per_form, blocks.begin() + f * per_form + udas.size());
    std::optional<PropensityBlock> total;
    if (!out.profiles.empty()) total = blocks[f * per_form + udas.size()];
    out.propensity[f] = table_propensity(kForms[f], std::move(uda_blocks), std::move(total));
  }
  return out;
}

}  // namespace collab
