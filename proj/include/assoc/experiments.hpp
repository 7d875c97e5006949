#ifndef ASSOC_EXPERIMENTS_HPP
#define ASSOC_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "assoc/metrics.hpp"
#include "assoc/model.hpp"

namespace assoc {

struct ExperimentRow {
  std::string name;
  MetricsReport report;
};

std::vector<std::vector<TokenPrediction>> predict_all_binary(
    const BinaryModel& model, const DatasetPartition& part,
    const EmbeddingTables& tables);

/// remap_fraction, when given, receives the fraction of candidate
/// tokens whose pseudo-label prediction was remapped.
std::vector<std::vector<TokenPrediction>> predict_all_crf(
    const CrfModel& model, const DatasetPartition& part,
    const EmbeddingTables& tables, double* remap_fraction = nullptr);

std::vector<std::vector<TokenPrediction>> predict_all_baseline(
    BaselineMode mode, const DatasetPartition& part, uint64_t seed);

MetricsReport evaluate_binary(const BinaryModel& model,
                              const DatasetPartition& test,
                              const EmbeddingTables& tables);
MetricsReport evaluate_crf(const CrfModel& model, const DatasetPartition& test,
                           const EmbeddingTables& tables,
                           double* remap_fraction = nullptr);
MetricsReport evaluate_baseline(BaselineMode mode, const DatasetPartition& test,
                                uint64_t seed);

enum class ModelKind { Binary, Crf };
ModelKind model_kind_from_string(const std::string& s);

/// Trains on train plus the first k deletion examples (ordered by id)
/// for each requested k, evaluating each model on test.
std::vector<ExperimentRow> augment_and_train(
    const DatasetPartition& train, const DatasetPartition& val,
    const DatasetPartition& test, const DatasetPartition& deletions,
    const std::vector<int>& counts, const EmbeddingTables& tables,
    const TrainConfig& cfg, ModelKind kind);

/// The four ablatable feature groups.
const std::vector<std::string>& ablation_groups();

/// Feature columns dropped for a group set. Removing either embedding
/// group also drops the cosine block, which depends on it. Unknown
/// group names are an error.
std::vector<bool> ablation_keep_mask(const FeatureManifest& manifest,
                                     const std::vector<std::string>& groups);

/// Retrains the binary classifier with the group's columns removed from
/// the input and reports test scores for that configuration.
ExperimentRow ablate_one(const std::vector<std::string>& groups,
                         const DatasetPartition& train,
                         const DatasetPartition& val,
                         const DatasetPartition& test,
                         const EmbeddingTables& tables, const TrainConfig& cfg);

/// The standard grid: full model plus each group ablated alone.
std::vector<ExperimentRow> ablation_table(const DatasetPartition& train,
                                          const DatasetPartition& val,
                                          const DatasetPartition& test,
                                          const EmbeddingTables& tables,
                                          const TrainConfig& cfg);

std::string format_table(const std::vector<ExperimentRow>& rows);

}  // namespace assoc

#endif
