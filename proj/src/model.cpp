#include "assoc/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace assoc {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double logsumexp3(const Eigen::Vector3d& v) {
  double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd x(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return x;
}

/// Adam state for one set of network parameters.
struct AdamState {
  MlpGrads m, v;
  Eigen::Matrix3d mt = Eigen::Matrix3d::Zero(), vt = Eigen::Matrix3d::Zero();
  Eigen::Vector3d ms = Eigen::Vector3d::Zero(), vs = Eigen::Vector3d::Zero();
  Eigen::Vector3d me = Eigen::Vector3d::Zero(), ve = Eigen::Vector3d::Zero();
  int t = 0;

  static AdamState zeros_like(const MlpParams& p) {
    AdamState s;
    s.m = MlpGrads::zeros_like(p);
    s.v = MlpGrads::zeros_like(p);
    return s;
  }

  template <typename P, typename G, typename M>
  static void update(P& param, const G& grad, M& m1, M& m2, double lr,
                     double bc1, double bc2) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m1 = b1 * m1 + (1.0 - b1) * grad;
    m2 = (b2 * m2.array() + (1.0 - b2) * grad.array().square()).matrix();
    param.array() -=
        lr * (m1.array() / bc1) / ((m2.array() / bc2).sqrt() + eps);
  }

  void step_mlp(MlpParams& p, const MlpGrads& g, double lr) {
    ++t;
    double bc1 = 1.0 - std::pow(0.9, t);
    double bc2 = 1.0 - std::pow(0.999, t);
    for (size_t i = 0; i < p.weights.size(); ++i) {
      update(p.weights[i], g.weights[i], m.weights[i], v.weights[i], lr, bc1,
             bc2);
      update(p.biases[i], g.biases[i], m.biases[i], v.biases[i], lr, bc1, bc2);
    }
  }

  void step_crf(CrfParams& p, const CrfGrads& g, double lr) {
    step_mlp(p.mlp, g.mlp, lr);
    double bc1 = 1.0 - std::pow(0.9, t);
    double bc2 = 1.0 - std::pow(0.999, t);
    update(p.transitions, g.transitions, mt, vt, lr, bc1, bc2);
    update(p.start, g.start, ms, vs, lr, bc1, bc2);
    update(p.end, g.end, me, ve, lr, bc1, bc2);
  }
};

struct Counts {
  long tp = 0, fp = 0, fn = 0;
  double f1() const {
    double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    double r = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

}  // namespace

MlpParams MlpParams::init(int input_dim, const std::vector<int>& hidden,
                          int output_dim, double dropout_rate, uint64_t seed) {
  if (input_dim <= 0 || output_dim <= 0)
    throw std::invalid_argument("network dimensions must be positive");
  MlpParams p;
  p.dropout_rate = dropout_rate;
  std::mt19937_64 rng(seed);
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    int fan_in = dims[i], fan_out = dims[i + 1];
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
  MlpGrads g;
  for (const auto& w : p.weights)
    g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : p.biases)
    g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

void MlpGrads::scale(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& x,
                                  std::mt19937_64* dropout_rng,
                                  ForwardCache* cache) {
  if (x.cols() != p.input_dim())
    throw std::invalid_argument("input width does not match the network");
  Eigen::MatrixXd cur = x;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep = 1.0 - p.dropout_rate;
  for (size_t i = 0; i < p.weights.size(); ++i) {
    if (cache) cache->inputs.push_back(cur);
    Eigen::MatrixXd z =
        (cur * p.weights[i].transpose()).rowwise() + p.biases[i].transpose();
    if (cache) cache->linear.push_back(z);
    if (i + 1 == p.weights.size()) {
      cur = z;  // linear head
    } else {
      cur = z.cwiseMax(0.0);
      if (dropout_rng && p.dropout_rate > 0.0) {
        Eigen::MatrixXd mask(cur.rows(), cur.cols());
        for (Eigen::Index r = 0; r < mask.rows(); ++r)
          for (Eigen::Index c = 0; c < mask.cols(); ++c)
            mask(r, c) = u(*dropout_rng) < keep ? 1.0 / keep : 0.0;
        cur = cur.cwiseProduct(mask);
        if (cache) cache->masks.push_back(std::move(mask));
      } else if (cache) {
        cache->masks.push_back(Eigen::MatrixXd::Ones(cur.rows(), cur.cols()));
      }
    }
  }
  return cur;
}

std::vector<double> mlp_forward(const MlpParams& p,
                                const std::vector<double>& row, bool train_mode,
                                std::mt19937_64* dropout_rng) {
  Eigen::MatrixXd x(1, row.size());
  for (size_t j = 0; j < row.size(); ++j)
    x(0, static_cast<Eigen::Index>(j)) = row[j];
  Eigen::MatrixXd out =
      mlp_forward_batch(p, x, train_mode ? dropout_rng : nullptr, nullptr);
  std::vector<double> scores(out.cols());
  for (Eigen::Index j = 0; j < out.cols(); ++j) scores[j] = out(0, j);
  if (p.output_dim() == 1) scores[0] = sigmoid(scores[0]);
  return scores;
}

void mlp_backward(const MlpParams& p, const ForwardCache& cache,
                  const Eigen::MatrixXd& dout, MlpGrads* grads) {
  Eigen::MatrixXd dz = dout;
  for (int i = static_cast<int>(p.weights.size()) - 1; i >= 0; --i) {
    grads->weights[i] += dz.transpose() * cache.inputs[i];
    grads->biases[i] += dz.colwise().sum().transpose();
    if (i > 0) {
      Eigen::MatrixXd da = dz * p.weights[i];
      const Eigen::MatrixXd& z = cache.linear[i - 1];
      da = da.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
      if (!cache.masks.empty())
        da = da.cwiseProduct(cache.masks[i - 1]);
      dz = std::move(da);
    }
  }
}

double binary_loss_and_grads(const MlpParams& p, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y, MlpGrads* grads,
                             std::mt19937_64* dropout_rng) {
  if (p.output_dim() != 1)
    throw std::invalid_argument("binary loss needs a single-output head");
  ForwardCache cache;
  Eigen::MatrixXd logits = mlp_forward_batch(p, x, dropout_rng, &cache);
  const Eigen::Index n = x.rows();
  double loss = 0.0;
  Eigen::MatrixXd dlogit(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = logits(i, 0);
    // numerically stable: log(1+e^-|z|) + max(z,0) - y*z
    loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y(i) * z;
    dlogit(i, 0) = (sigmoid(z) - y(i)) / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss))
    throw std::runtime_error("training diverged: non-finite loss");
  if (grads) mlp_backward(p, cache, dlogit, grads);
  return loss;
}

// ---- CRF ----

CrfParams CrfParams::init(int input_dim, const std::vector<int>& hidden,
                          double dropout_rate, uint64_t seed) {
  CrfParams p;
  p.mlp = MlpParams::init(input_dim, hidden, 3, dropout_rate, seed);
  return p;
}

CrfGrads CrfGrads::zeros_like(const CrfParams& p) {
  CrfGrads g;
  g.mlp = MlpGrads::zeros_like(p.mlp);
  return g;
}

void CrfGrads::scale(double s) {
  mlp.scale(s);
  transitions *= s;
  start *= s;
  end *= s;
}

double crf_log_partition(const Eigen::MatrixXd& emissions, const CrfParams& p) {
  const Eigen::Index n = emissions.rows();
  if (n == 0) throw std::invalid_argument("empty sequence");
  Eigen::Vector3d alpha = p.start + emissions.row(0).transpose();
  for (Eigen::Index t = 1; t < n; ++t) {
    Eigen::Vector3d next;
    for (int j = 0; j < 3; ++j)
      next(j) = logsumexp3(alpha + p.transitions.col(j)) + emissions(t, j);
    alpha = next;
  }
  return logsumexp3(alpha + p.end);
}

double crf_path_score(const Eigen::MatrixXd& emissions, const CrfParams& p,
                      const std::vector<int>& path) {
  if (static_cast<Eigen::Index>(path.size()) != emissions.rows())
    throw std::invalid_argument("path length mismatch");
  double score = p.start(path[0]) + emissions(0, path[0]);
  for (size_t t = 1; t < path.size(); ++t)
    score += p.transitions(path[t - 1], path[t]) +
             emissions(static_cast<Eigen::Index>(t), path[t]);
  return score + p.end(path.back());
}

std::vector<int> crf_viterbi(const Eigen::MatrixXd& emissions,
                             const CrfParams& p) {
  const Eigen::Index n = emissions.rows();
  if (n == 0) return {};
  Eigen::Vector3d best = p.start + emissions.row(0).transpose();
  std::vector<std::array<int, 3>> back(n);
  for (Eigen::Index t = 1; t < n; ++t) {
    Eigen::Vector3d next;
    for (int j = 0; j < 3; ++j) {
      int arg = 0;
      double top = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i) {
        double s = best(i) + p.transitions(i, j);
        if (s > top) {
          top = s;
          arg = i;
        }
      }
      next(j) = top + emissions(t, j);
      back[t][j] = arg;
    }
    best = next;
  }
  best += p.end;
  int state = 0;
  for (int j = 1; j < 3; ++j)
    if (best(j) > best(state)) state = j;
  std::vector<int> path(n);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    path[t] = state;
    if (t > 0) state = back[t][state];
  }
  return path;
}

double crf_loss_and_grads(const CrfParams& p, const Eigen::MatrixXd& x,
                          const std::vector<int>& gold, CrfGrads* grads,
                          std::mt19937_64* dropout_rng) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(gold.size()) != n)
    throw std::invalid_argument("gold path length mismatch");
  ForwardCache cache;
  Eigen::MatrixXd emissions = mlp_forward_batch(p.mlp, x, dropout_rng, &cache);
  double log_z = crf_log_partition(emissions, p);
  double loss = log_z - crf_path_score(emissions, p, gold);
  if (!std::isfinite(loss))
    throw std::runtime_error("training diverged: non-finite loss");
  if (!grads) return loss;

  // forward/backward vectors including emissions
  std::vector<Eigen::Vector3d> alpha(n), beta(n);
  alpha[0] = p.start + emissions.row(0).transpose();
  for (Eigen::Index t = 1; t < n; ++t)
    for (int j = 0; j < 3; ++j)
      alpha[t](j) =
          logsumexp3(alpha[t - 1] + p.transitions.col(j)) + emissions(t, j);
  beta[n - 1] = p.end;
  for (Eigen::Index t = n - 2; t >= 0; --t)
    for (int i = 0; i < 3; ++i)
      beta[t](i) = logsumexp3(p.transitions.row(i).transpose() +
                              emissions.row(t + 1).transpose() + beta[t + 1]);

  Eigen::MatrixXd demis(n, 3);
  for (Eigen::Index t = 0; t < n; ++t)
    for (int j = 0; j < 3; ++j)
      demis(t, j) = std::exp(alpha[t](j) + beta[t](j) - log_z) -
                    (gold[t] == j ? 1.0 : 0.0);
  for (Eigen::Index t = 0; t + 1 < n; ++t)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        grads->transitions(i, j) +=
            std::exp(alpha[t](i) + p.transitions(i, j) + emissions(t + 1, j) +
                     beta[t + 1](j) - log_z) -
            (gold[t] == i && gold[t + 1] == j ? 1.0 : 0.0);
  for (int j = 0; j < 3; ++j) {
    grads->start(j) += std::exp(alpha[0](j) + beta[0](j) - log_z) -
                       (gold[0] == j ? 1.0 : 0.0);
    grads->end(j) += std::exp(alpha[n - 1](j) + beta[n - 1](j) - log_z) -
                     (gold[n - 1] == j ? 1.0 : 0.0);
  }
  mlp_backward(p.mlp, cache, demis, &grads->mlp);
  return loss;
}

// ---- training ----

bool EarlyStopper::observe(int epoch, double f1) {
  improved_ = f1 > best_f1_;
  if (improved_) {
    best_f1_ = f1;
    best_epoch_ = epoch;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return epoch > warmup_ && since_best_ >= patience_;
}

namespace {

int label_index(Label l) {
  switch (l) {
    case Label::Associated: return kAssoc;
    case Label::NotAssociated: return kNotAssoc;
    case Label::Java: return kJava;
  }
  return kJava;
}

}  // namespace

BinaryData collect_binary_rows(const DatasetPartition& part,
                               const EmbeddingTables& tables,
                               const FeatureManifest& manifest) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  for (const auto& e : part.examples) {
    FeatureMatrix fm = featurize(e, tables, manifest);
    size_t r = 0;
    for (const auto& t : e.tokens) {
      if (t.kind != TokenKind::Candidate) continue;
      rows.push_back(std::move(fm.rows[r++]));
      labels.push_back(t.label == Label::Associated ? 1.0 : 0.0);
    }
  }
  BinaryData d;
  d.x = to_matrix(rows);
  d.y = Eigen::VectorXd(labels.size());
  for (size_t i = 0; i < labels.size(); ++i)
    d.y(static_cast<Eigen::Index>(i)) = labels[i];
  return d;
}

BinaryFit fit_binary(const BinaryData& tr, const BinaryData& va,
                     const TrainConfig& cfg) {
  if (tr.x.rows() == 0) throw std::invalid_argument("empty training set");
  BinaryFit fit;
  fit.params = MlpParams::init(static_cast<int>(tr.x.cols()), cfg.hidden, 1,
                               cfg.dropout_rate, cfg.seed);
  MlpParams best = fit.params;
  AdamState adam = AdamState::zeros_like(fit.params);
  std::mt19937_64 rng(cfg.seed);
  EarlyStopper stopper(cfg.warmup_epochs_before_patience, cfg.patience);

  std::vector<Eigen::Index> order(tr.x.rows());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t off = 0; off < order.size();
         off += static_cast<size_t>(cfg.batch_size)) {
      size_t count = std::min(order.size() - off,
                              static_cast<size_t>(cfg.batch_size));
      Eigen::MatrixXd bx(count, tr.x.cols());
      Eigen::VectorXd by(count);
      for (size_t i = 0; i < count; ++i) {
        bx.row(static_cast<Eigen::Index>(i)) = tr.x.row(order[off + i]);
        by(static_cast<Eigen::Index>(i)) = tr.y(order[off + i]);
      }
      MlpGrads grads = MlpGrads::zeros_like(fit.params);
      binary_loss_and_grads(fit.params, bx, by, &grads, &rng);
      adam.step_mlp(fit.params, grads, cfg.learning_rate);
    }
    Counts c;
    if (va.x.rows() > 0) {
      Eigen::MatrixXd logits = mlp_forward_batch(fit.params, va.x);
      for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        bool pred = sigmoid(logits(i, 0)) > cfg.threshold;
        bool gold = va.y(i) > 0.5;
        if (pred && gold) ++c.tp;
        else if (pred) ++c.fp;
        else if (gold) ++c.fn;
      }
    }
    double f1 = c.f1();
    fit.epoch_f1.push_back(f1);
    bool stop = stopper.observe(epoch, f1);
    if (stopper.improved()) best = fit.params;
    if (stop) break;
  }
  fit.params = best;
  fit.best_epoch = stopper.best_epoch();
  return fit;
}

BinaryModel train_binary(const DatasetPartition& train,
                         const DatasetPartition& val,
                         const EmbeddingTables& tables,
                         const TrainConfig& cfg) {
  FeatureManifest manifest = make_manifest(tables.dim);
  BinaryFit fit = fit_binary(collect_binary_rows(train, tables, manifest),
                             collect_binary_rows(val, tables, manifest), cfg);
  BinaryModel model;
  model.manifest = manifest;
  model.threshold = cfg.threshold;
  model.seed = cfg.seed;
  model.params = std::move(fit.params);
  model.epoch_f1 = std::move(fit.epoch_f1);
  model.best_epoch = fit.best_epoch;
  return model;
}

std::vector<TokenPrediction> predict_binary(const BinaryModel& model,
                                            const Example& example,
                                            const EmbeddingTables& tables) {
  FeatureMatrix fm = featurize(example, tables, model.manifest);
  std::vector<TokenPrediction> out;
  if (fm.rows.empty()) return out;
  Eigen::MatrixXd logits =
      mlp_forward_batch(model.params, to_matrix(fm.rows));
  for (size_t i = 0; i < fm.positions.size(); ++i) {
    double prob = sigmoid(logits(static_cast<Eigen::Index>(i), 0));
    out.push_back({fm.positions[i],
                   prob > model.threshold ? Label::Associated
                                          : Label::NotAssociated,
                   prob});
  }
  return out;
}

std::vector<int> crf_prepare(const Example& example) {
  std::vector<int> gold;
  gold.reserve(example.tokens.size());
  for (const auto& t : example.tokens)
    gold.push_back(t.kind == TokenKind::Candidate ? label_index(t.label)
                                                  : kJava);
  return gold;
}

std::vector<CrfSeq> collect_crf_sequences(const DatasetPartition& part,
                                          const EmbeddingTables& tables,
                                          const FeatureManifest& manifest) {
  std::vector<CrfSeq> out;
  for (const auto& e : part.examples) {
    FeatureMatrix fm = featurize(e, tables, manifest, true);
    if (fm.rows.empty()) continue;
    CrfSeq seq;
    seq.x = to_matrix(fm.rows);
    seq.gold = crf_prepare(e);
    for (const auto& t : e.tokens)
      seq.candidate.push_back(t.kind == TokenKind::Candidate);
    out.push_back(std::move(seq));
  }
  return out;
}

namespace {

/// Decode, remap the pseudo-label on candidate positions, and tally.
void score_crf(const CrfParams& params, const CrfSeq& seq, Counts* c,
               long* remapped, long* candidates) {
  Eigen::MatrixXd emissions = mlp_forward_batch(params.mlp, seq.x);
  std::vector<int> path = crf_viterbi(emissions, params);
  for (size_t t = 0; t < path.size(); ++t) {
    if (!seq.candidate[t]) continue;
    ++*candidates;
    int pred = path[t];
    if (pred == kJava) {
      pred = kNotAssoc;
      ++*remapped;
    }
    bool p = pred == kAssoc;
    bool g = seq.gold[t] == kAssoc;
    if (p && g) ++c->tp;
    else if (p) ++c->fp;
    else if (g) ++c->fn;
  }
}

}  // namespace

CrfFit fit_crf(const std::vector<CrfSeq>& tr, const std::vector<CrfSeq>& va,
               const TrainConfig& cfg) {
  if (tr.empty()) throw std::invalid_argument("empty training set");
  CrfFit fit;
  fit.params = CrfParams::init(static_cast<int>(tr.front().x.cols()),
                               cfg.hidden, cfg.dropout_rate, cfg.seed);
  CrfParams best = fit.params;
  AdamState adam = AdamState::zeros_like(fit.params.mlp);
  std::mt19937_64 rng(cfg.seed);
  EarlyStopper stopper(cfg.warmup_epochs_before_patience, cfg.patience);

  std::vector<size_t> order(tr.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t off = 0; off < order.size();
         off += static_cast<size_t>(cfg.batch_size)) {
      size_t count =
          std::min(order.size() - off, static_cast<size_t>(cfg.batch_size));
      CrfGrads grads = CrfGrads::zeros_like(fit.params);
      for (size_t i = 0; i < count; ++i) {
        const CrfSeq& seq = tr[order[off + i]];
        crf_loss_and_grads(fit.params, seq.x, seq.gold, &grads, &rng);
      }
      grads.scale(1.0 / static_cast<double>(count));
      adam.step_crf(fit.params, grads, cfg.learning_rate);
    }
    Counts c;
    long remapped = 0, candidates = 0;
    for (const auto& seq : va)
      score_crf(fit.params, seq, &c, &remapped, &candidates);
    double f1 = c.f1();
    fit.epoch_f1.push_back(f1);
    fit.java_remap_fraction =
        candidates == 0 ? 0.0
                        : static_cast<double>(remapped) /
                              static_cast<double>(candidates);
    bool stop = stopper.observe(epoch, f1);
    if (stopper.improved()) best = fit.params;
    if (stop) break;
  }
  fit.params = best;
  fit.best_epoch = stopper.best_epoch();
  return fit;
}

CrfModel train_crf(const DatasetPartition& train, const DatasetPartition& val,
                   const EmbeddingTables& tables, const TrainConfig& cfg) {
  FeatureManifest manifest = make_manifest(tables.dim);
  CrfFit fit = fit_crf(collect_crf_sequences(train, tables, manifest),
                       collect_crf_sequences(val, tables, manifest), cfg);
  CrfModel model;
  model.manifest = manifest;
  model.seed = cfg.seed;
  model.params = std::move(fit.params);
  model.epoch_f1 = std::move(fit.epoch_f1);
  model.best_epoch = fit.best_epoch;
  model.java_remap_fraction = fit.java_remap_fraction;
  return model;
}

std::vector<TokenPrediction> predict_crf(const CrfModel& model,
                                         const Example& example,
                                         const EmbeddingTables& tables,
                                         int* remap_count) {
  FeatureMatrix fm = featurize(example, tables, model.manifest, true);
  std::vector<TokenPrediction> out;
  if (remap_count) *remap_count = 0;
  if (fm.rows.empty()) return out;
  Eigen::MatrixXd emissions =
      mlp_forward_batch(model.params.mlp, to_matrix(fm.rows));
  std::vector<int> path = crf_viterbi(emissions, model.params);
  for (size_t t = 0; t < path.size(); ++t) {
    const CodeToken& tok = example.tokens[t];
    if (tok.kind != TokenKind::Candidate) continue;
    int pred = path[t];
    if (pred == kJava) {
      pred = kNotAssoc;
      if (remap_count) ++*remap_count;
    }
    bool assoc = pred == kAssoc;
    out.push_back({tok.position,
                   assoc ? Label::Associated : Label::NotAssociated,
                   assoc ? 1.0 : 0.0});
  }
  return out;
}

// ---- baselines ----

BaselineMode baseline_mode_from_string(const std::string& s) {
  if (s == "random") return BaselineMode::Random;
  if (s == "weighted_random") return BaselineMode::WeightedRandom;
  if (s == "subtoken") return BaselineMode::Subtoken;
  if (s == "return_line") return BaselineMode::ReturnLine;
  throw std::invalid_argument("unknown baseline: " + s);
}

std::vector<TokenPrediction> run_baseline(BaselineMode mode,
                                          const Example& example,
                                          uint64_t seed) {
  std::mt19937_64 rng(seed ^ fnv1a64(example.id));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TokenPrediction> out;
  for (const auto& t : example.tokens) {
    if (t.kind != TokenKind::Candidate) continue;
    bool assoc = false;
    double prob = 0.0;
    switch (mode) {
      case BaselineMode::Random:
        prob = 0.5;
        assoc = u(rng) < prob;
        break;
      case BaselineMode::WeightedRandom:
        prob = kAssociatedRate;
        assoc = u(rng) < prob;
        break;
      case BaselineMode::Subtoken:
        assoc = np_token_match(example.np, t.lexeme);
        prob = assoc ? 1.0 : 0.0;
        break;
      case BaselineMode::ReturnLine: {
        // same rule as the second surface bit: the token or another with
        // the same lexeme sits in a return statement
        auto [match, ret] = surface_features(example.np, t, example);
        (void)match;
        assoc = ret > 0.5;
        prob = assoc ? 1.0 : 0.0;
        break;
      }
    }
    out.push_back({t.position,
                   assoc ? Label::Associated : Label::NotAssociated, prob});
  }
  return out;
}

// ---- persistence ----

namespace {

constexpr char kMagic[4] = {'A', 'S', 'M', 'D'};

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("truncated model file");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("truncated model file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) {
  uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string read_string(std::istream& in) {
  uint32_t n = read_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw std::runtime_error("truncated model file");
  return s;
}

void write_mlp(std::ostream& out, const MlpParams& p) {
  write_f64(out, p.dropout_rate);
  write_u32(out, static_cast<uint32_t>(p.weights.size()));
  for (size_t i = 0; i < p.weights.size(); ++i) {
    const auto& w = p.weights[i];
    write_u32(out, static_cast<uint32_t>(w.rows()));
    write_u32(out, static_cast<uint32_t>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64(out, w(r, c));
    for (Eigen::Index r = 0; r < p.biases[i].size(); ++r)
      write_f64(out, p.biases[i](r));
  }
}

MlpParams read_mlp(std::istream& in) {
  MlpParams p;
  p.dropout_rate = read_f64(in);
  uint32_t layers = read_u32(in);
  for (uint32_t i = 0; i < layers; ++i) {
    uint32_t rows = read_u32(in), cols = read_u32(in);
    Eigen::MatrixXd w(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t c = 0; c < cols; ++c) w(r, c) = read_f64(in);
    Eigen::VectorXd b(rows);
    for (uint32_t r = 0; r < rows; ++r) b(r) = read_f64(in);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

void write_manifest(std::ostream& out, const FeatureManifest& m) {
  write_u32(out, static_cast<uint32_t>(m.blocks.size()));
  for (const auto& b : m.blocks) {
    write_string(out, b.name);
    write_u32(out, static_cast<uint32_t>(b.offset));
    write_u32(out, static_cast<uint32_t>(b.length));
  }
  write_u32(out, static_cast<uint32_t>(m.total_dim));
  write_u64(out, m.hash());
}

FeatureManifest read_manifest(std::istream& in) {
  FeatureManifest m;
  uint32_t blocks = read_u32(in);
  for (uint32_t i = 0; i < blocks; ++i) {
    FeatureBlock b;
    b.name = read_string(in);
    b.offset = static_cast<int>(read_u32(in));
    b.length = static_cast<int>(read_u32(in));
    m.blocks.push_back(std::move(b));
  }
  m.total_dim = static_cast<int>(read_u32(in));
  if (read_u64(in) != m.hash())
    throw std::runtime_error("model file manifest hash mismatch");
  return m;
}

void write_header(std::ostream& out, uint8_t kind, uint64_t seed) {
  out.write(kMagic, 4);
  out.put(static_cast<char>(kind));
  write_u64(out, seed);
}

uint8_t read_header(std::istream& in, uint64_t* seed) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a model file");
  int kind = in.get();
  if (kind < 0) throw std::runtime_error("truncated model file");
  *seed = read_u64(in);
  return static_cast<uint8_t>(kind);
}

void write_epochs(std::ostream& out, const std::vector<double>& f1,
                  int best_epoch) {
  write_u32(out, static_cast<uint32_t>(f1.size()));
  for (double v : f1) write_f64(out, v);
  write_u32(out, static_cast<uint32_t>(best_epoch));
}

void read_epochs(std::istream& in, std::vector<double>* f1, int* best_epoch) {
  uint32_t n = read_u32(in);
  for (uint32_t i = 0; i < n; ++i) f1->push_back(read_f64(in));
  *best_epoch = static_cast<int>(read_u32(in));
}

}  // namespace

void save_binary_model(const BinaryModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_header(out, 0, m.seed);
  write_manifest(out, m.manifest);
  write_f64(out, m.threshold);
  write_mlp(out, m.params);
  write_epochs(out, m.epoch_f1, m.best_epoch);
  if (!out) throw std::runtime_error("write failed: " + path);
}

BinaryModel load_binary_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  BinaryModel m;
  if (read_header(in, &m.seed) != 0)
    throw std::runtime_error(path + " is not a binary association model");
  m.manifest = read_manifest(in);
  m.threshold = read_f64(in);
  m.params = read_mlp(in);
  read_epochs(in, &m.epoch_f1, &m.best_epoch);
  return m;
}

void save_crf_model(const CrfModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_header(out, 1, m.seed);
  write_manifest(out, m.manifest);
  write_mlp(out, m.params.mlp);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) write_f64(out, m.params.transitions(i, j));
  for (int i = 0; i < 3; ++i) write_f64(out, m.params.start(i));
  for (int i = 0; i < 3; ++i) write_f64(out, m.params.end(i));
  write_epochs(out, m.epoch_f1, m.best_epoch);
  write_f64(out, m.java_remap_fraction);
  if (!out) throw std::runtime_error("write failed: " + path);
}

CrfModel load_crf_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  CrfModel m;
  if (read_header(in, &m.seed) != 1)
    throw std::runtime_error(path + " is not a sequence association model");
  m.manifest = read_manifest(in);
  m.params.mlp = read_mlp(in);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.params.transitions(i, j) = read_f64(in);
  for (int i = 0; i < 3; ++i) m.params.start(i) = read_f64(in);
  for (int i = 0; i < 3; ++i) m.params.end(i) = read_f64(in);
  read_epochs(in, &m.epoch_f1, &m.best_epoch);
  m.java_remap_fraction = read_f64(in);
  return m;
}

std::string peek_model_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  uint64_t seed = 0;
  return read_header(in, &seed) == 0 ? "binary" : "crf";
}

}  // namespace assoc
