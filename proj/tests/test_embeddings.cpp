#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "assoc/embeddings.hpp"

using namespace assoc;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<EmbedDocument> toy_corpus() {
  // "opcode" and "bytecode" always co-occur; "unrelatedterm" never does
  std::vector<EmbedDocument> corpus;
  for (int i = 0; i < 30; ++i) {
    corpus.push_back({"the opcode of the bytecode",
                      {"opcode", "bytecode", "opcode", "bytecode"}});
    corpus.push_back({"an unrelatedterm here", {"unrelatedterm", "filler"}});
  }
  return corpus;
}

}  // namespace

TEST_CASE("vocabulary keeps items seen at least twice") {
  std::vector<EmbedDocument> corpus = {
      {"alpha alpha beta", {"tok", "tok", "once"}},
      {"alpha", {"tok"}},
  };
  EmbedConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 1;
  auto tables = train_embeddings(corpus, cfg);
  CHECK(tables.comment_word.contains("alpha"));
  CHECK_FALSE(tables.comment_word.contains("beta"));  // frequency 1 -> OOV
  CHECK(tables.code_token.contains("tok"));
  CHECK_FALSE(tables.code_token.contains("once"));
  CHECK(tables.comment_word.contains(kOovItem));
  CHECK(tables.code_token.contains(kOovItem));
}

TEST_CASE("training is deterministic per seed") {
  EmbedConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 2;
  cfg.seed = 5;
  auto a = train_embeddings(toy_corpus(), cfg);
  auto b = train_embeddings(toy_corpus(), cfg);
  CHECK(a.code_token.lookup("opcode") == b.code_token.lookup("opcode"));
  cfg.seed = 6;
  auto c = train_embeddings(toy_corpus(), cfg);
  CHECK(a.code_token.lookup("opcode") != c.code_token.lookup("opcode"));
}

TEST_CASE("co-occurring tokens end up closer than unrelated ones") {
  EmbedConfig cfg;
  cfg.dim = 32;
  cfg.epochs = 10;
  cfg.seed = 3;
  auto tables = train_embeddings(toy_corpus(), cfg);
  double close = cosine(tables.code_token.lookup("opcode"),
                        tables.code_token.lookup("bytecode"));
  double far = cosine(tables.code_token.lookup("opcode"),
                      tables.code_token.lookup("unrelatedterm"));
  CHECK(close > far);
}

TEST_CASE("empty corpus is an error") {
  CHECK_THROWS(train_embeddings({}, EmbedConfig{}));
}

TEST_CASE("hashed fallback gives stable unit vectors") {
  auto tables = hashed_fallback(64, 9);
  auto v1 = tables.code_token.lookup("currentBC");
  auto v2 = tables.code_token.lookup("currentBC");
  CHECK(v1 == v2);
  CHECK(norm(v1) == doctest::Approx(1.0).epsilon(1e-9));

  // same string hashes identically across calls but views are independent
  auto other_view = tables.comment_word.lookup("currentBC");
  CHECK(v1 != other_view);

  double max_cos = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto a = tables.code_token.lookup("tok" + std::to_string(i));
    auto b = tables.code_token.lookup("tok" + std::to_string(i + 1000));
    max_cos = std::max(max_cos, std::abs(cosine(a, b)));
  }
  CHECK(max_cos < 0.999);
}

TEST_CASE("embed_mean conventions") {
  auto tables = hashed_fallback(16, 1);
  auto single = embed_mean({"item"}, tables.code_token);
  CHECK(single == tables.code_token.lookup("item"));

  auto empty = embed_mean({}, tables.code_token);
  CHECK(norm(empty) == 0.0);

  auto a = tables.code_token.lookup("a");
  auto b = tables.code_token.lookup("b");
  auto mid = embed_mean({"a", "b"}, tables.code_token);
  for (size_t i = 0; i < mid.size(); ++i)
    CHECK(mid[i] == doctest::Approx((a[i] + b[i]) / 2.0));

  auto swapped = embed_mean({"b", "a"}, tables.code_token);
  for (size_t i = 0; i < mid.size(); ++i)
    CHECK(mid[i] == doctest::Approx(swapped[i]));
}

TEST_CASE("unknown items fall back to the OOV vector") {
  std::vector<EmbedDocument> corpus = {{"alpha alpha", {"tok", "tok"}}};
  EmbedConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 1;
  auto tables = train_embeddings(corpus, cfg);
  CHECK(tables.code_token.lookup("neverseen") ==
        tables.code_token.lookup(kOovItem));
}

TEST_CASE("cosine conventions") {
  CHECK(cosine({1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(cosine({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(cosine({1, 0}, {0, 0}) == 0.0);  // zero vector convention
}

TEST_CASE("tables survive a save/load round trip") {
  namespace fs = std::filesystem;
  std::string path = (fs::temp_directory_path() / "assoc_tables.bin").string();
  EmbedConfig cfg;
  cfg.dim = 12;
  cfg.epochs = 1;
  auto tables = train_embeddings(toy_corpus(), cfg);
  save_embeddings(tables, path);
  auto back = load_embeddings(path);
  std::remove(path.c_str());

  CHECK(back.dim == tables.dim);
  CHECK(back.code_token.vocab_size() == tables.code_token.vocab_size());
  auto orig = tables.code_token.lookup("opcode");
  auto loaded = back.code_token.lookup("opcode");
  REQUIRE(orig.size() == loaded.size());
  for (size_t i = 0; i < orig.size(); ++i)
    CHECK(loaded[i] == doctest::Approx(orig[i]).epsilon(1e-6));
}

TEST_CASE("view item builders") {
  auto cc = comment_char_items("Ab c");
  CHECK(cc == std::vector<std::string>{"a", "b", "c"});
  auto cw = comment_word_items("The Current bytecode");
  CHECK(cw == std::vector<std::string>{"the", "current", "bytecode"});
  auto kc = code_char_items({"aB"});
  CHECK(kc == std::vector<std::string>{"a", "b"});
  auto ks = code_subtoken_items({"maxResult", "x"});
  CHECK(ks == std::vector<std::string>{"max", "result", "x"});
}
