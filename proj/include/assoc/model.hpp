#ifndef ASSOC_MODEL_HPP
#define ASSOC_MODEL_HPP

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "assoc/core.hpp"
#include "assoc/features.hpp"

namespace assoc {

// label indices shared by the CRF and evaluation mapping
inline constexpr int kAssoc = 0;
inline constexpr int kNotAssoc = 1;
inline constexpr int kJava = 2;

inline constexpr double kAssociatedRate = 0.428;  // training-set class prior

struct TrainConfig {
  uint64_t seed = 1;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 100;
  int patience = 5;
  int warmup_epochs_before_patience = 10;
  double threshold = 0.5;
  std::vector<int> hidden = {512, 384, 256, 128};
  double dropout_rate = 0.2;
};

struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;  // layer i: out x in
  std::vector<Eigen::VectorXd> biases;
  double dropout_rate = 0.2;

  static MlpParams init(int input_dim, const std::vector<int>& hidden,
                        int output_dim, double dropout_rate, uint64_t seed);
  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
};

struct MlpGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpGrads zeros_like(const MlpParams& p);
  void scale(double s);
};

struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  std::vector<Eigen::MatrixXd> linear;  // pre-activation per layer
  std::vector<Eigen::MatrixXd> masks;   // dropout multipliers (empty in eval)
};

/// Batched forward pass; rows are samples. Dropout applies to hidden
/// layers only and only when a generator is supplied.
Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& x,
                                  std::mt19937_64* dropout_rng = nullptr,
                                  ForwardCache* cache = nullptr);

/// Single-row forward. The binary head (output_dim 1) yields a logistic
/// probability; multi-output heads yield raw scores.
std::vector<double> mlp_forward(const MlpParams& p,
                                const std::vector<double>& row,
                                bool train_mode = false,
                                std::mt19937_64* dropout_rng = nullptr);

/// Backprop from d(loss)/d(output); accumulates into grads.
void mlp_backward(const MlpParams& p, const ForwardCache& cache,
                  const Eigen::MatrixXd& dout, MlpGrads* grads);

/// Mean binary cross-entropy over the batch plus parameter gradients.
double binary_loss_and_grads(const MlpParams& p, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y, MlpGrads* grads,
                             std::mt19937_64* dropout_rng = nullptr);

// ---- CRF ----

struct CrfParams {
  MlpParams mlp;  // emits 3 scores per token
  Eigen::Matrix3d transitions = Eigen::Matrix3d::Zero();
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();

  static CrfParams init(int input_dim, const std::vector<int>& hidden,
                        double dropout_rate, uint64_t seed);
};

struct CrfGrads {
  MlpGrads mlp;
  Eigen::Matrix3d transitions = Eigen::Matrix3d::Zero();
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();

  static CrfGrads zeros_like(const CrfParams& p);
  void scale(double s);
};

/// log partition via the forward algorithm; emissions is L x 3.
double crf_log_partition(const Eigen::MatrixXd& emissions,
                         const CrfParams& p);

double crf_path_score(const Eigen::MatrixXd& emissions, const CrfParams& p,
                      const std::vector<int>& path);

/// Exact MAP path via dynamic programming.
std::vector<int> crf_viterbi(const Eigen::MatrixXd& emissions,
                             const CrfParams& p);

/// Negative log-likelihood of the gold path for one sequence, with
/// gradients for the emission network and transition parameters.
double crf_loss_and_grads(const CrfParams& p, const Eigen::MatrixXd& x,
                          const std::vector<int>& gold, CrfGrads* grads,
                          std::mt19937_64* dropout_rng = nullptr);

// ---- training ----

/// Tracks validation F1 and implements "stop after `patience`
/// non-improving epochs once past `warmup` epochs, keep the best".
class EarlyStopper {
 public:
  EarlyStopper(int warmup, int patience) : warmup_(warmup), patience_(patience) {}
  /// Returns true when training should stop after this (1-based) epoch.
  bool observe(int epoch, double f1);
  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }
  double best_f1() const { return best_f1_; }

 private:
  int warmup_, patience_;
  double best_f1_ = -1.0;
  int best_epoch_ = 0;
  int since_best_ = 0;
  bool improved_ = false;
};

struct BinaryModel {
  MlpParams params;
  FeatureManifest manifest;
  double threshold = 0.5;
  uint64_t seed = 0;
  std::vector<double> epoch_f1;  // validation F1 per epoch
  int best_epoch = 0;
};

struct CrfModel {
  CrfParams params;
  FeatureManifest manifest;
  uint64_t seed = 0;
  std::vector<double> epoch_f1;
  int best_epoch = 0;
  double java_remap_fraction = 0.0;  // last evaluation
};

/// Matrix-level training data (one row per candidate token).
struct BinaryData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

BinaryData collect_binary_rows(const DatasetPartition& part,
                               const EmbeddingTables& tables,
                               const FeatureManifest& manifest);

struct BinaryFit {
  MlpParams params;
  std::vector<double> epoch_f1;
  int best_epoch = 0;
};

/// Core binary training loop over prebuilt matrices; train_binary and
/// the ablation driver both go through here.
BinaryFit fit_binary(const BinaryData& train, const BinaryData& val,
                     const TrainConfig& cfg);

BinaryModel train_binary(const DatasetPartition& train,
                         const DatasetPartition& val,
                         const EmbeddingTables& tables, const TrainConfig& cfg);

/// One full-length sequence for the CRF (all tokens, pseudo-labels on
/// non-candidates).
struct CrfSeq {
  Eigen::MatrixXd x;
  std::vector<int> gold;
  std::vector<bool> candidate;  // per position
};

std::vector<CrfSeq> collect_crf_sequences(const DatasetPartition& part,
                                          const EmbeddingTables& tables,
                                          const FeatureManifest& manifest);

struct CrfFit {
  CrfParams params;
  std::vector<double> epoch_f1;
  int best_epoch = 0;
  double java_remap_fraction = 0.0;
};

CrfFit fit_crf(const std::vector<CrfSeq>& train, const std::vector<CrfSeq>& val,
               const TrainConfig& cfg);

struct TokenPrediction {
  int position;
  Label label;
  double probability;  // binary model only; CRF reports 0/1
};

std::vector<TokenPrediction> predict_binary(const BinaryModel& model,
                                            const Example& example,
                                            const EmbeddingTables& tables);

/// Re-injects non-candidate tokens with the pseudo-label Java: the gold
/// label sequence over all tokens in position order.
std::vector<int> crf_prepare(const Example& example);

CrfModel train_crf(const DatasetPartition& train, const DatasetPartition& val,
                   const EmbeddingTables& tables, const TrainConfig& cfg);

/// MAP decode; Java predictions on candidate positions become
/// not-associated, and non-candidate positions are dropped from the
/// output. remap_count, when given, receives the number of candidate
/// positions that carried the pseudo-label.
std::vector<TokenPrediction> predict_crf(const CrfModel& model,
                                         const Example& example,
                                         const EmbeddingTables& tables,
                                         int* remap_count = nullptr);

// ---- baselines ----

enum class BaselineMode { Random, WeightedRandom, Subtoken, ReturnLine };
BaselineMode baseline_mode_from_string(const std::string& s);

std::vector<TokenPrediction> run_baseline(BaselineMode mode,
                                          const Example& example,
                                          uint64_t seed);

// ---- persistence ----

void save_binary_model(const BinaryModel& m, const std::string& path);
BinaryModel load_binary_model(const std::string& path);
void save_crf_model(const CrfModel& m, const std::string& path);
CrfModel load_crf_model(const std::string& path);

/// Kind tag of a saved model file: "binary" or "crf".
std::string peek_model_kind(const std::string& path);

}  // namespace assoc

#endif
