#ifndef ASSOC_METRICS_HPP
#define ASSOC_METRICS_HPP

#include <string>
#include <vector>

#include "assoc/core.hpp"
#include "assoc/model.hpp"

namespace assoc {

/// Micro-averaged scores over pooled (NP, candidate token) pairs;
/// positive class = associated.
struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0;
  long n_pairs = 0;  // candidate tokens evaluated
  int runs = 1;
};

MetricsReport report_from_counts(long tp, long fp, long fn, long n_pairs);

/// predictions[i] must align with the candidate tokens of gold[i]
/// (same positions, same order); misalignment reports the example id.
MetricsReport micro_prf(const std::vector<std::vector<TokenPrediction>>& predictions,
                        const std::vector<Example>& gold);

/// Arithmetic mean of precision, recall, and F1 across runs; counts are
/// summed for reference, so the count/score consistency invariant holds
/// only for single-run reports.
MetricsReport average_runs(const std::vector<MetricsReport>& reports);

/// Per-example F1 (convention: 1.0 when an example has neither gold nor
/// predicted positives), the paired scores for significance testing.
std::vector<double> per_example_f1(
    const std::vector<std::vector<TokenPrediction>>& predictions,
    const std::vector<Example>& gold);

/// Two-sided Wilcoxon signed-rank p-value over paired scores.
/// Zero differences are dropped; ties share average ranks; exact
/// enumeration up to n = 25, normal approximation beyond.
double signed_rank_test(const std::vector<double>& a,
                        const std::vector<double>& b);

/// Chance-corrected agreement between two binary annotations.
double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b);

struct SummaryStat {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
};

struct DatasetStats {
  long examples = 0;
  long candidate_tokens = 0;
  long associated_tokens = 0;
  double avg_candidates_per_example = 0.0;
  SummaryStat np_words;          // NP length in words
  SummaryStat candidates;        // candidate tokens per example
  SummaryStat associated;        // associated tokens per example
};

/// Medians and interquartile ranges with lower-interpolation quartiles
/// (index floor(q * (n - 1)) of the sorted values).
DatasetStats dataset_stats(const DatasetPartition& d);

std::string format_report(const std::string& name, const MetricsReport& r);
std::string format_stats(const DatasetStats& s);

}  // namespace assoc

#endif
