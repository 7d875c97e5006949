#include "assoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace assoc {

namespace {

double quantile_lower(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  size_t idx = static_cast<size_t>(
      std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[idx];
}

SummaryStat summarize(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  SummaryStat s;
  s.median = quantile_lower(values, 0.5);
  s.q1 = quantile_lower(values, 0.25);
  s.q3 = quantile_lower(values, 0.75);
  s.iqr = s.q3 - s.q1;
  return s;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct PairCounts {
  long tp = 0, fp = 0, fn = 0, n = 0;
};

/// Tallies one example after checking prediction/gold alignment.
PairCounts tally(const std::vector<TokenPrediction>& pred, const Example& e) {
  std::vector<const CodeToken*> candidates;
  for (const auto& t : e.tokens)
    if (t.kind == TokenKind::Candidate) candidates.push_back(&t);
  if (pred.size() != candidates.size())
    throw std::invalid_argument("prediction/gold misalignment for example " +
                                e.id);
  PairCounts c;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].position != candidates[i]->position)
      throw std::invalid_argument("prediction/gold misalignment for example " +
                                  e.id);
    bool p = pred[i].label == Label::Associated;
    bool g = candidates[i]->label == Label::Associated;
    ++c.n;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
  }
  return c;
}

}  // namespace

MetricsReport report_from_counts(long tp, long fp, long fn, long n_pairs) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.n_pairs = n_pairs;
  r.precision = tp + fp == 0 ? 0.0
                             : static_cast<double>(tp) /
                                   static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0
                          : static_cast<double>(tp) /
                                static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MetricsReport micro_prf(
    const std::vector<std::vector<TokenPrediction>>& predictions,
    const std::vector<Example>& gold) {
  if (predictions.size() != gold.size())
    throw std::invalid_argument("prediction/gold example count mismatch");
  long tp = 0, fp = 0, fn = 0, n = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    PairCounts c = tally(predictions[i], gold[i]);
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    n += c.n;
  }
  return report_from_counts(tp, fp, fn, n);
}

MetricsReport average_runs(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to average");
  MetricsReport out;
  for (const auto& r : reports) {
    out.precision += r.precision;
    out.recall += r.recall;
    out.f1 += r.f1;
    out.tp += r.tp;
    out.fp += r.fp;
    out.fn += r.fn;
    out.n_pairs += r.n_pairs;
  }
  const double n = static_cast<double>(reports.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  out.runs = static_cast<int>(reports.size());
  return out;
}

std::vector<double> per_example_f1(
    const std::vector<std::vector<TokenPrediction>>& predictions,
    const std::vector<Example>& gold) {
  if (predictions.size() != gold.size())
    throw std::invalid_argument("prediction/gold example count mismatch");
  std::vector<double> out;
  out.reserve(gold.size());
  for (size_t i = 0; i < gold.size(); ++i) {
    PairCounts c = tally(predictions[i], gold[i]);
    if (c.tp + c.fp + c.fn == 0) {
      out.push_back(1.0);  // no gold and no predicted positives
      continue;
    }
    out.push_back(report_from_counts(c.tp, c.fp, c.fn, c.n).f1);
  }
  return out;
}

double signed_rank_test(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired score lists differ in length");
  std::vector<double> diffs;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = b[i] - a[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const size_t n = diffs.size();
  if (n == 0) return 1.0;

  // average ranks of |d|, ties shared
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
      ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double w_plus = 0.0;
  for (size_t k = 0; k < n; ++k)
    if (diffs[k] > 0.0) w_plus += rank[k];
  double total = static_cast<double>(n) * (static_cast<double>(n) + 1) / 2.0;
  double w = std::min(w_plus, total - w_plus);

  if (n <= 25) {
    // exact null distribution of the positive-rank sum over the observed
    // (possibly tied) ranks; half-integer ranks are doubled to index
    std::vector<long> r2(n);
    long total2 = 0;
    for (size_t k = 0; k < n; ++k) {
      r2[k] = std::lround(2.0 * rank[k]);
      total2 += r2[k];
    }
    std::vector<double> dist(static_cast<size_t>(total2) + 1, 0.0);
    dist[0] = 1.0;
    for (size_t k = 0; k < n; ++k)
      for (long s = total2 - r2[k]; s >= 0; --s)
        dist[static_cast<size_t>(s + r2[k])] += dist[static_cast<size_t>(s)];
    double count = 0.0, assignments = std::pow(2.0, static_cast<double>(n));
    for (long s = 0; s <= total2; ++s) {
      double sum = static_cast<double>(s) / 2.0;
      if (std::min(sum, total - sum) <= w + 1e-12)
        count += dist[static_cast<size_t>(s)];
    }
    return count / assignments;
  }

  double mean = total / 2.0;
  double var = static_cast<double>(n) * (static_cast<double>(n) + 1) *
               (2.0 * static_cast<double>(n) + 1) / 24.0;
  // tie correction
  i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
      ++j;
    double t = static_cast<double>(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (var <= 0.0) return 1.0;
  double z = (w_plus - mean) / std::sqrt(var);
  double p = 2.0 * normal_sf(std::abs(z));
  return std::min(p, 1.0);
}

double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("annotation lists must align and be non-empty");
  const double n = static_cast<double>(a.size());
  double agree = 0.0, a1 = 0.0, b1 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0) == (b[i] != 0)) agree += 1.0;
    if (a[i] != 0) a1 += 1.0;
    if (b[i] != 0) b1 += 1.0;
  }
  double po = agree / n;
  double pe = (a1 / n) * (b1 / n) + ((n - a1) / n) * ((n - b1) / n);
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

DatasetStats dataset_stats(const DatasetPartition& d) {
  if (d.examples.empty()) throw std::invalid_argument("empty dataset");
  DatasetStats s;
  std::vector<double> np_words, candidates, associated;
  for (const auto& e : d.examples) {
    long cand = 0, assoc = 0;
    for (const auto& t : e.tokens) {
      if (t.kind != TokenKind::Candidate) continue;
      ++cand;
      if (t.label == Label::Associated) ++assoc;
    }
    ++s.examples;
    s.candidate_tokens += cand;
    s.associated_tokens += assoc;
    np_words.push_back(static_cast<double>(e.np.words.size()));
    candidates.push_back(static_cast<double>(cand));
    associated.push_back(static_cast<double>(assoc));
  }
  s.avg_candidates_per_example = static_cast<double>(s.candidate_tokens) /
                                 static_cast<double>(s.examples);
  s.np_words = summarize(std::move(np_words));
  s.candidates = summarize(std::move(candidates));
  s.associated = summarize(std::move(associated));
  return s;
}

std::string format_report(const std::string& name, const MetricsReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(28) << name << std::right << std::fixed
      << std::setprecision(3) << std::setw(7) << r.precision << std::setw(7)
      << r.recall << std::setw(7) << r.f1 << "  (tp=" << r.tp
      << " fp=" << r.fp << " fn=" << r.fn << " pairs=" << r.n_pairs
      << " runs=" << r.runs << ")";
  return out.str();
}

std::string format_stats(const DatasetStats& s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "examples            " << s.examples << "\n";
  out << "candidate tokens    " << s.candidate_tokens << " (avg "
      << s.avg_candidates_per_example << " per example)\n";
  out << "associated tokens   " << s.associated_tokens << "\n";
  auto line = [&](const char* name, const SummaryStat& st) {
    out << name << "median " << st.median << "  iqr " << st.iqr << "\n";
  };
  line("np words            ", s.np_words);
  line("candidates/example  ", s.candidates);
  line("associated/example  ", s.associated);
  return out.str();
}

}  // namespace assoc
