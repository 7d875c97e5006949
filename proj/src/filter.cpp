#include "assoc/filter.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace assoc {

bool trivial_string_match(const Example& e) {
  bool any = false;
  for (const auto& t : e.tokens) {
    if (t.label != Label::Associated) continue;
    any = true;
    if (!np_token_match(e.np, t.lexeme)) return false;
  }
  return any;
}

std::optional<std::string> apply_filters(const Example& e,
                                         const MinedMeta& meta,
                                         const FilterConfig& cfg) {
  if (e.method_line_count < cfg.min_method_lines) return "short-method";
  if (e.method_line_count > cfg.max_method_lines) return "long-method";
  int associated = 0;
  for (const auto& t : e.tokens)
    if (t.label == Label::Associated) ++associated;
  if (associated > cfg.max_associated_tokens) return "too-many-associated";
  if (meta.diff_line_count > cfg.max_diff_lines) return "too-many-diff-lines";
  if (cfg.require_return_change && !meta.return_change)
    return "no-return-change";
  if (cfg.drop_trivial_string_match && trivial_string_match(e))
    return "trivial-string-match";
  if (cfg.drop_verb_changes && meta.verb_change) return "verb-phrase-change";
  if (cfg.drop_reformat_only && (meta.reformat || meta.typo || meta.rephrase))
    return "reformat-typo-rephrase";
  return std::nullopt;
}

std::vector<Example> filter_examples(const std::vector<Example>& examples,
                                     const FilterConfig& cfg,
                                     FilterReport* report) {
  std::vector<Example> kept;
  for (const auto& e : examples) {
    MinedMeta meta = e.meta.value_or(MinedMeta{});
    auto reason = apply_filters(e, meta, cfg);
    if (reason) {
      if (report) ++report->discarded[*reason];
      continue;
    }
    Example clean = e;
    clean.meta.reset();  // mining metadata stops at the filter
    kept.push_back(std::move(clean));
    if (report) ++report->kept;
  }
  return kept;
}

std::vector<Example> dedupe(const std::vector<Example>& examples) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Example> out;
  for (const auto& e : examples) {
    std::string lexemes;
    for (const auto& t : e.tokens)
      if (t.kind == TokenKind::Candidate) lexemes += t.lexeme + "\x1f";
    if (seen.emplace(e.np.text, lexemes).second) out.push_back(e);
  }
  return out;
}

std::vector<DatasetPartition> partition(const std::vector<Example>& examples,
                                        uint64_t seed, SplitRatios ratios) {
  if (examples.empty()) throw std::runtime_error("cannot partition an empty dataset");
  double sum = ratios.train + ratios.validation + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::runtime_error("split ratios must sum to 1");
  std::vector<Example> additions, deletions;
  for (const auto& e : examples)
    (e.source == ExampleSource::Addition ? additions : deletions).push_back(e);
  std::mt19937_64 rng(seed);
  std::shuffle(additions.begin(), additions.end(), rng);
  const size_t n = additions.size();
  size_t n_train = static_cast<size_t>(n * ratios.train);
  size_t n_val = static_cast<size_t>(n * ratios.validation);
  if (n_train + n_val > n) n_val = n - n_train;
  std::vector<DatasetPartition> parts(4);
  parts[0].name = "train";
  parts[1].name = "validation";
  parts[2].name = "test";
  parts[3].name = "deletions";
  for (size_t i = 0; i < n; ++i) {
    if (i < n_train) parts[0].examples.push_back(additions[i]);
    else if (i < n_train + n_val) parts[1].examples.push_back(additions[i]);
    else parts[2].examples.push_back(additions[i]);
  }
  parts[3].examples = std::move(deletions);
  return parts;
}

}  // namespace assoc
