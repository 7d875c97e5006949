#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "assoc/java_ast.hpp"
#include "assoc/metrics.hpp"

using namespace assoc;

namespace {

const char* kNextMethod = R"(public int next() {
    final int opcode = currentBC();
    setBCI(_nextBCI);
    return opcode;
})";

Example figure_example() {
  MethodParse parse = parse_method(kNextMethod);
  Example e;
  e.id = "maxine/sha/addition/0";
  e.project = "maxine";
  e.commit_sha = "sha";
  e.np = NounPhrase::from_text("the current bytecode");
  e.comment_text = "the opcode of the current bytecode";
  e.method_line_count = 5;
  for (size_t i = 0; i < parse.tokens.size(); ++i) {
    CodeToken t;
    t.lexeme = parse.tokens[i].lexeme;
    t.kind = parse.tokens[i].kind;
    t.line_index = parse.tokens[i].line_index;
    t.position = static_cast<int>(i);
    t.label =
        t.kind == TokenKind::Candidate ? Label::NotAssociated : Label::Java;
    e.tokens.push_back(std::move(t));
  }
  for (auto& t : e.tokens) {
    if (t.lexeme == "opcode" || t.lexeme == "currentBC" ||
        (t.lexeme == "int" && t.line_index == 1))
      t.label = Label::Associated;
  }
  return e;
}

std::vector<TokenPrediction> predictions_from_gold(const Example& e) {
  std::vector<TokenPrediction> out;
  for (const auto& t : e.tokens)
    if (t.kind == TokenKind::Candidate)
      out.push_back(
          {t.position, t.label, t.label == Label::Associated ? 1.0 : 0.0});
  return out;
}

// independent Wilcoxon oracle: enumerate every sign assignment of the
// observed tied ranks and count those at least as extreme
double wilcoxon_by_enumeration(const std::vector<double>& a,
                               const std::vector<double>& b) {
  std::vector<double> diffs;
  for (size_t i = 0; i < a.size(); ++i)
    if (b[i] != a[i]) diffs.push_back(b[i] - a[i]);
  const size_t n = diffs.size();
  if (n == 0) return 1.0;

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> rank(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
      ++j;
    for (size_t k = i; k <= j; ++k)
      rank[order[k]] = (static_cast<double>(i + j)) / 2.0 + 1.0;
    i = j + 1;
  }

  double total = 0.0, w_plus = 0.0;
  for (size_t k = 0; k < n; ++k) {
    total += rank[k];
    if (diffs[k] > 0.0) w_plus += rank[k];
  }
  double w_obs = std::min(w_plus, total - w_plus);

  double extreme = 0.0;
  const size_t assignments = size_t{1} << n;
  for (size_t mask = 0; mask < assignments; ++mask) {
    double s = 0.0;
    for (size_t k = 0; k < n; ++k)
      if (mask & (size_t{1} << k)) s += rank[k];
    if (std::min(s, total - s) <= w_obs + 1e-12) extreme += 1.0;
  }
  return extreme / static_cast<double>(assignments);
}

Example sized_example(int id, int candidates, int associated, int np_words) {
  Example e;
  e.id = "p/s/addition/" + std::to_string(id);
  e.project = "p";
  e.commit_sha = "s";
  std::string text;
  for (int i = 0; i < np_words; ++i)
    text += (i ? " word" : "word") + std::to_string(i);
  e.np = NounPhrase::from_text(text);
  e.comment_text = text;
  e.method_line_count = 6;
  for (int i = 0; i < candidates; ++i) {
    CodeToken t;
    t.lexeme = "tok" + std::to_string(i);
    t.kind = TokenKind::Candidate;
    t.position = i;
    t.label = i < associated ? Label::Associated : Label::NotAssociated;
    e.tokens.push_back(t);
  }
  return e;
}

}  // namespace

TEST_CASE("report_from_counts fixtures") {
  MetricsReport r = report_from_counts(2, 0, 1, 3);
  CHECK(r.precision == doctest::Approx(1.0));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(0.8));

  MetricsReport perfect = report_from_counts(5, 0, 0, 5);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  MetricsReport zero = report_from_counts(0, 0, 0, 0);
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);

  // a large pooled tally with round precision/recall
  MetricsReport big = report_from_counts(187698, 139302, 99302, 426302);
  CHECK(big.precision == doctest::Approx(0.574).epsilon(1e-9));
  CHECK(big.recall == doctest::Approx(0.654).epsilon(1e-9));
  CHECK(big.f1 == doctest::Approx(0.6114).epsilon(1e-3));
  CHECK(std::abs(big.f1 - 0.610) < 0.0015);
}

TEST_CASE("micro_prf pools candidate-token decisions") {
  Example e = figure_example();
  auto perfect = predictions_from_gold(e);
  MetricsReport r = micro_prf({perfect}, {e});
  CHECK(r.f1 == 1.0);
  CHECK(r.tp == 4);
  CHECK(r.n_pairs == 8);

  auto only_currentbc = perfect;
  for (auto& p : only_currentbc)
    p.label = e.tokens[p.position].lexeme == "currentBC" ? Label::Associated
                                                         : Label::NotAssociated;
  MetricsReport partial = micro_prf({only_currentbc}, {e});
  CHECK(partial.tp == 1);
  CHECK(partial.fp == 0);
  CHECK(partial.fn == 3);
  CHECK(partial.precision == doctest::Approx(1.0));
  CHECK(partial.recall == doctest::Approx(0.25));
  CHECK(partial.f1 == doctest::Approx(0.4));
}

TEST_CASE("misaligned predictions name the offending example") {
  Example e = figure_example();
  auto preds = predictions_from_gold(e);
  preds.pop_back();
  CHECK_THROWS_WITH_AS(micro_prf({preds}, {e}),
                       doctest::Contains("maxine/sha/addition/0"),
                       std::invalid_argument);

  auto shifted = predictions_from_gold(e);
  shifted[0].position += 1;
  shifted[1].position -= 1;
  CHECK_THROWS_AS(micro_prf({shifted}, {e}), std::invalid_argument);
}

TEST_CASE("average_runs means the scores and sums the counts") {
  MetricsReport one = report_from_counts(2, 1, 1, 4);
  MetricsReport same = average_runs({one});
  CHECK(same.f1 == doctest::Approx(one.f1));
  CHECK(same.runs == 1);

  MetricsReport tri = average_runs({one, one, one});
  CHECK(tri.f1 == doctest::Approx(one.f1));
  CHECK(tri.tp == 6);
  CHECK(tri.runs == 3);

  MetricsReport a, b, c;
  a.f1 = 0.60;
  b.f1 = 0.61;
  c.f1 = 0.62;
  CHECK(average_runs({a, b, c}).f1 == doctest::Approx(0.61));
  CHECK_THROWS(average_runs({}));
}

TEST_CASE("per-example F1 conventions") {
  Example e = figure_example();
  Example empty = e;
  for (auto& t : empty.tokens)
    if (t.label == Label::Associated) t.label = Label::NotAssociated;

  auto perfect = predictions_from_gold(e);
  auto nothing = predictions_from_gold(empty);
  auto scores = per_example_f1({perfect, nothing}, {e, empty});
  REQUIRE(scores.size() == 2);
  CHECK(scores[0] == 1.0);
  CHECK(scores[1] == 1.0);  // no gold, no predictions

  // all-negative predictions against real gold miss everything
  auto silent = nothing;
  auto missed = per_example_f1({silent}, {e});
  CHECK(missed[0] == 0.0);
}

TEST_CASE("signed-rank test on identical scores is 1") {
  std::vector<double> a = {0.5, 0.6, 0.7};
  CHECK(signed_rank_test(a, a) == 1.0);
}

TEST_CASE("signed-rank test matches the n=10 table value") {
  // distinct magnitudes 1..10, one negative difference of rank 8
  std::vector<double> a(10, 0.0);
  std::vector<double> b = {1, 2, 3, 4, 5, 6, 7, -8, 9, 10};
  CHECK(signed_rank_test(a, b) == doctest::Approx(50.0 / 1024.0).epsilon(1e-12));

  // all six differences positive: the most extreme outcome
  std::vector<double> a6(6, 0.0);
  std::vector<double> b6 = {1, 2, 3, 4, 5, 6};
  CHECK(signed_rank_test(a6, b6) == doctest::Approx(2.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("signed-rank test agrees with sign-flip enumeration") {
  std::vector<std::vector<double>> cases = {
      {0.1, -0.1, 0.2, 0.3, -0.2, 0.4, 0.1, 0.5},
      {0.3, 0.3, -0.3, 0.1, 0.1, 0.2},
      {1.0, -2.0, 3.0, -4.0, 5.0, 6.0, -7.0, 8.0, 9.0},
      {0.05, 0.0, -0.05, 0.1, 0.1, -0.2, 0.3, 0.0, 0.4, 0.15},
  };
  for (const auto& diffs : cases) {
    std::vector<double> a(diffs.size(), 0.0);
    CHECK(signed_rank_test(a, diffs) ==
          doctest::Approx(wilcoxon_by_enumeration(a, diffs)).epsilon(1e-12));
  }
}

TEST_CASE("a consistent shift over many pairs is significant") {
  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back(0.4 + 0.01 * i);
    b.push_back(a.back() * 1.1 + 0.03);
  }
  CHECK(signed_rank_test(a, b) < 0.01);

  // fully tied magnitudes exercise the tie correction
  std::vector<double> shifted;
  for (double x : a) shifted.push_back(x + 0.5);
  CHECK(signed_rank_test(a, shifted) < 0.01);
}

TEST_CASE("cohens kappa fixtures") {
  std::vector<int> a = {0, 1, 0, 1, 1, 0};
  CHECK(cohens_kappa(a, a) == doctest::Approx(1.0));

  // 40 agreeing positives, 40 agreeing negatives, 10 + 10 disagreements
  std::vector<int> x, y;
  for (int i = 0; i < 40; ++i) { x.push_back(1); y.push_back(1); }
  for (int i = 0; i < 40; ++i) { x.push_back(0); y.push_back(0); }
  for (int i = 0; i < 10; ++i) { x.push_back(1); y.push_back(0); }
  for (int i = 0; i < 10; ++i) { x.push_back(0); y.push_back(1); }
  CHECK(cohens_kappa(x, y) == doctest::Approx(0.6));

  // constant annotator vs alternating annotator: chance-level agreement
  std::vector<int> ones(10, 1), alt;
  for (int i = 0; i < 10; ++i) alt.push_back(i % 2);
  CHECK(cohens_kappa(ones, alt) == doctest::Approx(0.0));

  CHECK_THROWS(cohens_kappa({1}, {1, 0}));
  CHECK_THROWS(cohens_kappa({}, {}));
}

TEST_CASE("dataset_stats on a single example has zero spread") {
  DatasetPartition d{"test", {figure_example()}};
  DatasetStats s = dataset_stats(d);
  CHECK(s.examples == 1);
  CHECK(s.candidate_tokens == 8);
  CHECK(s.associated_tokens == 4);
  CHECK(s.avg_candidates_per_example == doctest::Approx(8.0));
  CHECK(s.np_words.median == 3.0);
  CHECK(s.np_words.iqr == 0.0);
  CHECK(s.candidates.median == 8.0);
  CHECK(s.associated.median == 4.0);
  CHECK(s.associated.iqr == 0.0);
}

TEST_CASE("quartiles use lower interpolation") {
  DatasetPartition d{"test",
                     {sized_example(0, 1, 0, 2), sized_example(1, 2, 1, 2),
                      sized_example(2, 3, 2, 4), sized_example(3, 4, 3, 6)}};
  DatasetStats s = dataset_stats(d);
  // sorted candidate counts {1,2,3,4}: q1 = 1, median = 2, q3 = 3
  CHECK(s.candidates.q1 == 1.0);
  CHECK(s.candidates.median == 2.0);
  CHECK(s.candidates.q3 == 3.0);
  CHECK(s.candidates.iqr == 2.0);
  CHECK(s.np_words.median == 2.0);
  CHECK_THROWS(dataset_stats(DatasetPartition{"x", {}}));
}

TEST_CASE("reports format into aligned rows") {
  std::string line = format_report("binary", report_from_counts(2, 0, 1, 3));
  CHECK(line.find("binary") == 0);
  CHECK(line.find("1.000") != std::string::npos);
  CHECK(line.find("0.800") != std::string::npos);
  CHECK(line.find("tp=2") != std::string::npos);
}
