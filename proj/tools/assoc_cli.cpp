// Command-line surface over the mining/training pipeline.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "assoc/comment_nlp.hpp"
#include "assoc/core.hpp"
#include "assoc/embeddings.hpp"
#include "assoc/experiments.hpp"
#include "assoc/features.hpp"
#include "assoc/filter.hpp"
#include "assoc/java_ast.hpp"
#include "assoc/metrics.hpp"
#include "assoc/miner.hpp"
#include "assoc/model.hpp"

namespace fs = std::filesystem;
using namespace assoc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<int> parse_counts(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<EmbedDocument> corpus_from(const DatasetPartition& part) {
  std::vector<EmbedDocument> corpus;
  for (const auto& e : part.examples) {
    EmbedDocument doc;
    doc.return_text = e.comment_text;
    for (const auto& t : e.tokens) doc.code_tokens.push_back(t.lexeme);
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

/// Unlabeled example over a raw method for ad-hoc prediction.
Example example_from_method(const std::string& method_source,
                            const NounPhrase& np,
                            const std::string& comment_text) {
  MethodParse parse = parse_method(method_source);
  Example e;
  e.id = "adhoc/" + np.text;
  e.project = "adhoc";
  e.commit_sha = "none";
  e.np = np;
  e.comment_text = comment_text;
  int lines = 1;
  for (char c : method_source)
    if (c == '\n') ++lines;
  e.method_line_count = lines;
  for (size_t i = 0; i < parse.tokens.size(); ++i) {
    CodeToken t;
    t.lexeme = parse.tokens[i].lexeme;
    t.kind = parse.tokens[i].kind;
    t.line_index = parse.tokens[i].line_index;
    t.position = static_cast<int>(i);
    t.parent_node_type = parse.ancestors[i].first;
    t.grandparent_node_type = parse.ancestors[i].second;
    t.label = t.kind == TokenKind::Candidate ? Label::NotAssociated
                                             : Label::Java;
    e.tokens.push_back(std::move(t));
  }
  return e;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int run(int argc, char** argv) {
  CLI::App app{"noun-phrase / code-token association pipeline"};
  app.require_subcommand(1);
  uint64_t seed = 1;
  app.add_option("--seed", seed, "global random seed")->capture_default_str();
  std::string pos_lexicon_path;
  app.add_option("--pos-lexicon", pos_lexicon_path,
                 "replace the built-in tagging lexicon (word TAB tag lines)")
      ->check(CLI::ExistingFile);

  // mine
  auto* mine = app.add_subcommand("mine", "mine examples from a git clone");
  std::string repo, project, out_path, skip_path;
  mine->add_option("--repo", repo, "path to the repository clone")->required();
  mine->add_option("--project", project, "project name for example ids")
      ->required();
  mine->add_option("--out", out_path, "output JSONL")->required();
  mine->add_option("--skip-log", skip_path, "file for skipped-method notes");

  // filter
  auto* filter = app.add_subcommand("filter", "apply quality filters");
  std::string in_path, report_path;
  FilterConfig fcfg;
  filter->add_option("--in", in_path)->required();
  filter->add_option("--out", out_path)->required();
  filter->add_option("--report", report_path, "discard-count report file");
  filter->add_option("--min-lines", fcfg.min_method_lines)
      ->capture_default_str();
  filter->add_option("--max-lines", fcfg.max_method_lines)
      ->capture_default_str();
  filter->add_option("--max-associated", fcfg.max_associated_tokens)
      ->capture_default_str();
  filter->add_option("--max-diff-lines", fcfg.max_diff_lines)
      ->capture_default_str();

  // split
  auto* split = app.add_subcommand("split", "partition into train/val/test");
  std::string out_dir;
  SplitRatios ratios;
  split->add_option("--in", in_path)->required();
  split->add_option("--out-dir", out_dir)->required();
  split->add_option("--train", ratios.train)->capture_default_str();
  split->add_option("--val", ratios.validation)->capture_default_str();
  split->add_option("--test", ratios.test)->capture_default_str();

  // embed
  auto* embed = app.add_subcommand("embed", "train the embedding tables");
  EmbedConfig ecfg;
  bool hashed = false;
  embed->add_option("--train", in_path, "training partition JSONL")
      ->required();
  embed->add_option("--out", out_path)->required();
  embed->add_option("--dim", ecfg.dim)->capture_default_str();
  embed->add_option("--epochs", ecfg.epochs)->capture_default_str();
  embed->add_option("--window", ecfg.window)->capture_default_str();
  embed->add_option("--negatives", ecfg.negatives)->capture_default_str();
  embed->add_flag("--hashed", hashed, "seeded hash vectors, no training");

  // featurize
  auto* feat = app.add_subcommand("featurize", "dump feature rows");
  std::string tables_path;
  bool all_tokens = false;
  feat->add_option("--in", in_path)->required();
  feat->add_option("--tables", tables_path)->required();
  feat->add_option("--out", out_path)->required();
  feat->add_flag("--all-tokens", all_tokens,
                 "include keyword/operator/symbol rows");

  // train
  auto* train = app.add_subcommand("train", "train a model");
  std::string kind = "binary", train_path, val_path;
  TrainConfig tcfg;
  train->add_option("--kind", kind, "binary|crf")->capture_default_str();
  train->add_option("--train", train_path)->required();
  train->add_option("--val", val_path)->required();
  train->add_option("--tables", tables_path)->required();
  train->add_option("--out", out_path)->required();
  train->add_option("--lr", tcfg.learning_rate)->capture_default_str();
  train->add_option("--batch-size", tcfg.batch_size)->capture_default_str();
  train->add_option("--max-epochs", tcfg.max_epochs)->capture_default_str();
  train->add_option("--patience", tcfg.patience)->capture_default_str();
  train->add_option("--warmup", tcfg.warmup_epochs_before_patience)
      ->capture_default_str();
  train->add_option("--threshold", tcfg.threshold)->capture_default_str();
  train->add_option("--hidden", tcfg.hidden, "hidden layer widths")
      ->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a saved model");
  std::string model_path, test_path;
  eval->add_option("--model", model_path)->required();
  eval->add_option("--test", test_path)->required();
  eval->add_option("--tables", tables_path)->required();
  eval->add_option("--report", report_path, "write the report here too");

  // augment
  auto* augment = app.add_subcommand(
      "augment", "retrain with deletion examples added in stages");
  std::string deletions_path, counts_csv = "0";
  augment->add_option("--kind", kind, "binary|crf")->capture_default_str();
  augment->add_option("--train", train_path)->required();
  augment->add_option("--val", val_path)->required();
  augment->add_option("--test", test_path)->required();
  augment->add_option("--deletions", deletions_path)->required();
  augment->add_option("--tables", tables_path)->required();
  augment->add_option("--counts", counts_csv, "comma-separated k values")
      ->capture_default_str();
  augment->add_option("--report", report_path);

  // ablate
  auto* ablate_cmd =
      app.add_subcommand("ablate", "retrain with feature groups removed");
  std::string groups_csv;
  ablate_cmd->add_option("--train", train_path)->required();
  ablate_cmd->add_option("--val", val_path)->required();
  ablate_cmd->add_option("--test", test_path)->required();
  ablate_cmd->add_option("--tables", tables_path)->required();
  ablate_cmd->add_option("--groups", groups_csv,
                         "comma-separated groups; default: full grid");
  ablate_cmd->add_option("--report", report_path);

  // baseline
  auto* baseline = app.add_subcommand("baseline", "run a baseline");
  std::string mode = "subtoken";
  baseline
      ->add_option("--mode", mode,
                   "random|weighted_random|subtoken|return_line")
      ->capture_default_str();
  baseline->add_option("--test", test_path)->required();
  baseline->add_option("--report", report_path);

  // predict
  auto* predict = app.add_subcommand("predict", "label a raw method");
  std::string method_path, comment_path;
  predict->add_option("--model", model_path)->required();
  predict->add_option("--tables", tables_path)->required();
  predict->add_option("--method", method_path, "file with the method source")
      ->required();
  predict->add_option("--comment", comment_path, "file with the comment")
      ->required();

  // stats
  auto* stats = app.add_subcommand("stats", "dataset summary statistics");
  stats->add_option("--in", in_path)->required();

  CLI11_PARSE(app, argc, argv);
  ecfg.seed = seed;
  tcfg.seed = seed;
  if (!pos_lexicon_path.empty()) load_pos_lexicon(pos_lexicon_path);

  if (mine->parsed()) {
    std::vector<Example> mined;
    std::vector<std::string> skips;
    walk_commits(repo, project, [&](const CommitPair& pair) {
      for (auto& e : build_examples(pair)) mined.push_back(std::move(e));
    }, &skips);
    save_dataset({"mined", mined}, out_path);
    if (!skip_path.empty()) {
      std::string log;
      for (const auto& s : skips) log += s + "\n";
      write_text(skip_path, log);
    }
    std::cout << "mined " << mined.size() << " examples ("
              << skips.size() << " skips)\n";
    return 0;
  }

  if (filter->parsed()) {
    DatasetPartition d = load_dataset(in_path);
    FilterReport report;
    std::vector<Example> kept = filter_examples(d.examples, fcfg, &report);
    kept = dedupe(kept);
    save_dataset({"filtered", kept}, out_path);
    std::ostringstream summary;
    summary << "kept " << kept.size() << " of " << d.examples.size() << "\n";
    for (const auto& reason : filter_reasons()) {
      auto it = report.discarded.find(reason);
      if (it != report.discarded.end())
        summary << "  " << reason << ": " << it->second << "\n";
    }
    std::cout << summary.str();
    if (!report_path.empty()) write_text(report_path, summary.str());
    return 0;
  }

  if (split->parsed()) {
    DatasetPartition d = load_dataset(in_path);
    fs::create_directories(out_dir);
    for (const auto& part : partition(d.examples, seed, ratios)) {
      save_dataset(part, (fs::path(out_dir) / (part.name + ".jsonl")).string());
      std::cout << part.name << ": " << part.examples.size() << "\n";
    }
    return 0;
  }

  if (embed->parsed()) {
    DatasetPartition d = load_dataset(in_path);
    EmbeddingTables tables = hashed
                                 ? hashed_fallback(ecfg.dim, ecfg.seed)
                                 : train_embeddings(corpus_from(d), ecfg);
    save_embeddings(tables, out_path);
    std::cout << "saved " << ecfg.dim << "-dim tables to " << out_path << "\n";
    return 0;
  }

  if (feat->parsed()) {
    DatasetPartition d = load_dataset(in_path);
    EmbeddingTables tables = load_embeddings(tables_path);
    FeatureManifest manifest = make_manifest(tables.dim);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    for (const auto& e : d.examples) {
      FeatureMatrix fm = featurize(e, tables, manifest, all_tokens);
      nlohmann::ordered_json rec;
      rec["id"] = e.id;
      rec["positions"] = fm.positions;
      rec["rows"] = fm.rows;
      out << rec.dump() << "\n";
    }
    std::cout << "manifest hash " << manifest.hash() << ", dim "
              << manifest.total_dim << "\n";
    return 0;
  }

  if (train->parsed()) {
    DatasetPartition tr = load_dataset(train_path);
    DatasetPartition va = load_dataset(val_path);
    EmbeddingTables tables = load_embeddings(tables_path);
    if (model_kind_from_string(kind) == ModelKind::Binary) {
      BinaryModel m = train_binary(tr, va, tables, tcfg);
      save_binary_model(m, out_path);
      std::cout << "best epoch " << m.best_epoch << ", val F1 "
                << (m.best_epoch > 0 ? m.epoch_f1[m.best_epoch - 1] : 0.0)
                << "\n";
    } else {
      CrfModel m = train_crf(tr, va, tables, tcfg);
      save_crf_model(m, out_path);
      std::cout << "best epoch " << m.best_epoch << ", val F1 "
                << (m.best_epoch > 0 ? m.epoch_f1[m.best_epoch - 1] : 0.0)
                << "\n";
    }
    return 0;
  }

  if (eval->parsed()) {
    DatasetPartition te = load_dataset(test_path);
    EmbeddingTables tables = load_embeddings(tables_path);
    std::ostringstream text;
    if (peek_model_kind(model_path) == "binary") {
      BinaryModel m = load_binary_model(model_path);
      text << format_report("binary", evaluate_binary(m, te, tables)) << "\n";
    } else {
      CrfModel m = load_crf_model(model_path);
      double remap = 0.0;
      text << format_report("crf", evaluate_crf(m, te, tables, &remap))
           << "\n";
      text << "pseudo-label remap fraction " << remap << "\n";
    }
    std::cout << text.str();
    if (!report_path.empty()) write_text(report_path, text.str());
    return 0;
  }

  if (augment->parsed()) {
    DatasetPartition tr = load_dataset(train_path);
    DatasetPartition va = load_dataset(val_path);
    DatasetPartition te = load_dataset(test_path);
    DatasetPartition del = load_dataset(deletions_path);
    EmbeddingTables tables = load_embeddings(tables_path);
    auto rows = augment_and_train(tr, va, te, del, parse_counts(counts_csv),
                                  tables, tcfg, model_kind_from_string(kind));
    std::string text = format_table(rows);
    std::cout << text;
    if (!report_path.empty()) write_text(report_path, text);
    return 0;
  }

  if (ablate_cmd->parsed()) {
    DatasetPartition tr = load_dataset(train_path);
    DatasetPartition va = load_dataset(val_path);
    DatasetPartition te = load_dataset(test_path);
    EmbeddingTables tables = load_embeddings(tables_path);
    std::vector<ExperimentRow> rows;
    if (groups_csv.empty()) {
      rows = ablation_table(tr, va, te, tables, tcfg);
    } else {
      std::vector<std::string> groups;
      std::stringstream ss(groups_csv);
      std::string g;
      while (std::getline(ss, g, ',')) groups.push_back(g);
      rows.push_back(ablate_one(groups, tr, va, te, tables, tcfg));
    }
    std::string text = format_table(rows);
    std::cout << text;
    if (!report_path.empty()) write_text(report_path, text);
    return 0;
  }

  if (baseline->parsed()) {
    DatasetPartition te = load_dataset(test_path);
    MetricsReport r =
        evaluate_baseline(baseline_mode_from_string(mode), te, seed);
    std::string text = format_report(mode, r) + "\n";
    std::cout << text;
    if (!report_path.empty()) write_text(report_path, text);
    return 0;
  }

  if (predict->parsed()) {
    std::string method_source = slurp(method_path);
    std::string comment = slurp(comment_path);
    ReturnComment rc;
    if (comment.find("@return") != std::string::npos) {
      rc = extract_return_comment(comment);
    } else {
      rc.return_text = comment;
      rc.nps = chunk_noun_phrases(comment);
    }
    if (rc.nps.empty())
      throw std::runtime_error("no noun phrase found in the comment");
    EmbeddingTables tables = load_embeddings(tables_path);
    bool binary = peek_model_kind(model_path) == "binary";
    BinaryModel bm;
    CrfModel cm;
    if (binary) bm = load_binary_model(model_path);
    else cm = load_crf_model(model_path);
    for (const auto& np : rc.nps) {
      Example e = example_from_method(method_source, np, rc.return_text);
      auto preds = binary ? predict_binary(bm, e, tables)
                          : predict_crf(cm, e, tables);
      std::cout << "np: " << np.text << "\n";
      for (const auto& p : preds)
        if (p.label == Label::Associated)
          std::cout << "  " << e.tokens[p.position].lexeme << " @"
                    << p.position << "\n";
    }
    return 0;
  }

  if (stats->parsed()) {
    DatasetPartition d = load_dataset(in_path);
    std::cout << format_stats(dataset_stats(d));
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
