#ifndef ASSOC_FILTER_HPP
#define ASSOC_FILTER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "assoc/core.hpp"

namespace assoc {

struct FilterConfig {
  int min_method_lines = 4;
  int max_method_lines = 30;
  int max_associated_tokens = 40;
  int max_diff_lines = 500;
  bool require_return_change = true;
  bool drop_verb_changes = true;
  bool drop_trivial_string_match = true;
  bool drop_reformat_only = true;
};

/// Discard reasons, in the fixed order they are checked.
inline const std::vector<std::string>& filter_reasons() {
  static const std::vector<std::string> reasons = {
      "short-method",        "long-method",
      "too-many-associated", "too-many-diff-lines",
      "no-return-change",    "trivial-string-match",
      "verb-phrase-change",  "reformat-typo-rephrase"};
  return reasons;
}

/// Empty result = keep; otherwise the first matching discard reason.
std::optional<std::string> apply_filters(const Example& e,
                                         const MinedMeta& meta,
                                         const FilterConfig& cfg);

struct FilterReport {
  int kept = 0;
  std::map<std::string, int> discarded;  // reason -> count
};

/// Runs apply_filters over a list; examples keep their order.
std::vector<Example> filter_examples(const std::vector<Example>& examples,
                                     const FilterConfig& cfg,
                                     FilterReport* report = nullptr);

/// Removes later examples whose (NP text, candidate lexeme list) key was
/// already seen. Stable.
std::vector<Example> dedupe(const std::vector<Example>& examples);

struct SplitRatios {
  double train = 0.8, validation = 0.08, test = 0.12;
};

/// Deterministic seeded shuffle + split of addition examples; deletions
/// always go to their own partition.
std::vector<DatasetPartition> partition(const std::vector<Example>& examples,
                                        uint64_t seed, SplitRatios ratios);

/// True iff the NP-token surface-matching rule fires for every
/// associated token (the example is resolvable by string matching).
bool trivial_string_match(const Example& e);

}  // namespace assoc

#endif
