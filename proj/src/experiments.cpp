#include "assoc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace assoc {

namespace {

Eigen::MatrixXd slice_columns(const Eigen::MatrixXd& x,
                              const std::vector<bool>& keep) {
  Eigen::Index kept = 0;
  for (bool k : keep) kept += k ? 1 : 0;
  Eigen::MatrixXd out(x.rows(), kept);
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (keep[static_cast<size_t>(j)]) out.col(c++) = x.col(j);
  return out;
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

std::vector<std::vector<TokenPrediction>> predict_all_binary(
    const BinaryModel& model, const DatasetPartition& part,
    const EmbeddingTables& tables) {
  std::vector<std::vector<TokenPrediction>> out;
  out.reserve(part.examples.size());
  for (const auto& e : part.examples)
    out.push_back(predict_binary(model, e, tables));
  return out;
}

std::vector<std::vector<TokenPrediction>> predict_all_crf(
    const CrfModel& model, const DatasetPartition& part,
    const EmbeddingTables& tables, double* remap_fraction) {
  std::vector<std::vector<TokenPrediction>> out;
  out.reserve(part.examples.size());
  long remapped = 0, candidates = 0;
  for (const auto& e : part.examples) {
    int r = 0;
    out.push_back(predict_crf(model, e, tables, &r));
    remapped += r;
    candidates += static_cast<long>(out.back().size());
  }
  if (remap_fraction)
    *remap_fraction = candidates == 0
                          ? 0.0
                          : static_cast<double>(remapped) /
                                static_cast<double>(candidates);
  return out;
}

std::vector<std::vector<TokenPrediction>> predict_all_baseline(
    BaselineMode mode, const DatasetPartition& part, uint64_t seed) {
  std::vector<std::vector<TokenPrediction>> out;
  out.reserve(part.examples.size());
  for (const auto& e : part.examples)
    out.push_back(run_baseline(mode, e, seed));
  return out;
}

MetricsReport evaluate_binary(const BinaryModel& model,
                              const DatasetPartition& test,
                              const EmbeddingTables& tables) {
  return micro_prf(predict_all_binary(model, test, tables), test.examples);
}

MetricsReport evaluate_crf(const CrfModel& model, const DatasetPartition& test,
                           const EmbeddingTables& tables,
                           double* remap_fraction) {
  return micro_prf(predict_all_crf(model, test, tables, remap_fraction),
                   test.examples);
}

MetricsReport evaluate_baseline(BaselineMode mode, const DatasetPartition& test,
                                uint64_t seed) {
  return micro_prf(predict_all_baseline(mode, test, seed), test.examples);
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "binary") return ModelKind::Binary;
  if (s == "crf") return ModelKind::Crf;
  throw std::invalid_argument("unknown model kind: " + s);
}

std::vector<ExperimentRow> augment_and_train(
    const DatasetPartition& train, const DatasetPartition& val,
    const DatasetPartition& test, const DatasetPartition& deletions,
    const std::vector<int>& counts, const EmbeddingTables& tables,
    const TrainConfig& cfg, ModelKind kind) {
  std::vector<Example> ordered = deletions.examples;
  std::sort(ordered.begin(), ordered.end(),
            [](const Example& a, const Example& b) { return a.id < b.id; });
  std::vector<ExperimentRow> rows;
  for (int k : counts) {
    if (k < 0 || static_cast<size_t>(k) > ordered.size())
      throw std::invalid_argument("augmentation count exceeds deletions size");
    DatasetPartition augmented{train.name, train.examples};
    augmented.examples.insert(augmented.examples.end(), ordered.begin(),
                              ordered.begin() + k);
    MetricsReport report;
    if (kind == ModelKind::Binary) {
      BinaryModel m = train_binary(augmented, val, tables, cfg);
      report = evaluate_binary(m, test, tables);
    } else {
      CrfModel m = train_crf(augmented, val, tables, cfg);
      report = evaluate_crf(m, test, tables);
    }
    rows.push_back({"+" + std::to_string(k) + " deletions", report});
  }
  return rows;
}

const std::vector<std::string>& ablation_groups() {
  static const std::vector<std::string> groups = {
      "code_embeddings", "comment_embeddings", "cosine", "java_api_ast"};
  return groups;
}

std::vector<bool> ablation_keep_mask(const FeatureManifest& manifest,
                                     const std::vector<std::string>& groups) {
  const auto& known = ablation_groups();
  std::vector<std::string> closed = groups;
  for (const auto& g : groups) {
    if (std::find(known.begin(), known.end(), g) == known.end())
      throw std::invalid_argument("unknown feature group: " + g);
    if (g == "code_embeddings" || g == "comment_embeddings")
      if (std::find(closed.begin(), closed.end(), "cosine") == closed.end())
        closed.push_back("cosine");  // cosine depends on the embeddings
  }
  std::vector<bool> keep(static_cast<size_t>(manifest.total_dim), true);
  auto drop = [&](const std::string& block_name) {
    const FeatureBlock& b = manifest.block(block_name);
    for (int j = b.offset; j < b.offset + b.length; ++j)
      keep[static_cast<size_t>(j)] = false;
  };
  for (const auto& g : closed) {
    if (g == "java_api_ast") {
      drop("ast_onehot");
      drop("api_onehot");
    } else {
      drop(g);
    }
  }
  return keep;
}

ExperimentRow ablate_one(const std::vector<std::string>& groups,
                         const DatasetPartition& train,
                         const DatasetPartition& val,
                         const DatasetPartition& test,
                         const EmbeddingTables& tables,
                         const TrainConfig& cfg) {
  FeatureManifest manifest = make_manifest(tables.dim);
  std::vector<bool> keep = ablation_keep_mask(manifest, groups);

  BinaryData tr = collect_binary_rows(train, tables, manifest);
  BinaryData va = collect_binary_rows(val, tables, manifest);
  BinaryData te = collect_binary_rows(test, tables, manifest);
  tr.x = slice_columns(tr.x, keep);
  va.x = slice_columns(va.x, keep);
  te.x = slice_columns(te.x, keep);

  BinaryFit fit = fit_binary(tr, va, cfg);
  long tp = 0, fp = 0, fn = 0;
  Eigen::MatrixXd logits = mlp_forward_batch(fit.params, te.x);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    bool pred = sigmoid(logits(i, 0)) > cfg.threshold;
    bool gold = te.y(i) > 0.5;
    if (pred && gold) ++tp;
    else if (pred) ++fp;
    else if (gold) ++fn;
  }
  std::string name = "full";
  if (!groups.empty()) {
    name.clear();
    for (const auto& g : groups) name += (name.empty() ? "-" : ",") + g;
  }
  return {name, report_from_counts(tp, fp, fn, te.x.rows())};
}

std::vector<ExperimentRow> ablation_table(const DatasetPartition& train,
                                          const DatasetPartition& val,
                                          const DatasetPartition& test,
                                          const EmbeddingTables& tables,
                                          const TrainConfig& cfg) {
  std::vector<ExperimentRow> rows;
  rows.push_back(ablate_one({}, train, val, test, tables, cfg));
  for (const auto& g : ablation_groups())
    rows.push_back(ablate_one({g}, train, val, test, tables, cfg));
  return rows;
}

std::string format_table(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "configuration                     P      R     F1\n";
  for (const auto& r : rows) out << format_report(r.name, r.report) << "\n";
  return out.str();
}

}  // namespace assoc
