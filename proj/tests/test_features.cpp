#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "assoc/features.hpp"
#include "assoc/java_ast.hpp"

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
    t.parent_node_type = parse.ancestors[i].first;
    t.grandparent_node_type = parse.ancestors[i].second;
    t.label = t.kind == TokenKind::Candidate ? Label::NotAssociated : Label::Java;
    e.tokens.push_back(std::move(t));
  }
  return e;
}

const CodeToken& token_at(const Example& e, const std::string& lexeme,
                          int occurrence = 0) {
  int seen = 0;
  for (const auto& t : e.tokens)
    if (t.lexeme == lexeme && seen++ == occurrence) return t;
  throw std::runtime_error("token not found: " + lexeme);
}

}  // namespace

TEST_CASE("manifest layout is frozen and contiguous") {
  FeatureManifest m = make_manifest(128);
  std::vector<std::string> order;
  int cursor = 0;
  for (const auto& b : m.blocks) {
    order.push_back(b.name);
    CHECK(b.offset == cursor);
    cursor += b.length;
  }
  CHECK(cursor == m.total_dim);
  CHECK(order == std::vector<std::string>{"surface", "comment_embeddings",
                                          "code_embeddings", "cosine",
                                          "ast_onehot", "api_onehot"});
  CHECK(m.block("surface").length == 2);
  CHECK(m.block("comment_embeddings").length == 4 * 128);
  CHECK(m.block("code_embeddings").length == 6 * 128);
  CHECK(m.block("cosine").length == 6);
  CHECK(m.block("ast_onehot").length ==
        2 * static_cast<int>(node_type_names().size()));
  CHECK_THROWS(m.block("no_such_block"));

  // dim is the only variable input
  CHECK(make_manifest(16).total_dim ==
        2 + 10 * 16 + 6 + m.block("ast_onehot").length +
            m.block("api_onehot").length);
  CHECK(make_manifest(128).hash() != make_manifest(16).hash());
  CHECK(make_manifest(128).hash() == m.hash());
}

TEST_CASE("surface bits on the fixture") {
  Example e = figure_example();

  auto [m1, r1] = surface_features(e.np, token_at(e, "currentBC"), e);
  CHECK(m1 == 1.0);  // shared subtoken "current"

  auto [m2, r2] = surface_features(e.np, token_at(e, "setBCI"), e);
  CHECK(m2 == 0.0);

  // `opcode` in `return opcode;`
  auto [m3, r3] = surface_features(e.np, token_at(e, "opcode", 1), e);
  CHECK(r3 == 1.0);
  // the declaration-line `opcode` matches by lexeme
  auto [m4, r4] = surface_features(e.np, token_at(e, "opcode", 0), e);
  CHECK(r4 == 1.0);
  // `currentBC` appears only outside the return statement
  CHECK(r1 == 0.0);

  NounPhrase np = NounPhrase::from_text("max result");
  CodeToken t;
  t.lexeme = "maxResult";
  t.kind = TokenKind::Candidate;
  auto [m5, r5] = surface_features(np, t, e);
  CHECK(m5 == 1.0);
}

TEST_CASE("cosine block projects the NP through the code tables") {
  auto tables = hashed_fallback(32, 4);
  Example e = figure_example();

  auto cos = cosine_block(e.np, token_at(e, "currentBC"),
                          {token_at(e, "currentBC")}, tables);
  REQUIRE(cos.size() == 6);
  for (double c : cos) {
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
  }

  // single-word NP whose word equals the lexeme: token-level cosine 1
  NounPhrase np = NounPhrase::from_text("opcode");
  CodeToken t;
  t.lexeme = "opcode";
  t.kind = TokenKind::Candidate;
  auto exact = cosine_block(np, t, {t}, tables);
  CHECK(exact[0] == doctest::Approx(1.0));

  // empty line context zeroes the NP-line cosines
  auto empty_line = cosine_block(np, t, {}, tables);
  CHECK(empty_line[3] == 0.0);
  CHECK(empty_line[4] == 0.0);
  CHECK(empty_line[5] == 0.0);

  // subtoken-level similarity prefers currentBC over setBCI
  auto to_current =
      cosine_block(e.np, token_at(e, "currentBC"), {}, tables);
  auto to_set = cosine_block(e.np, token_at(e, "setBCI"), {}, tables);
  CHECK(to_current[1] > to_set[1]);
}

TEST_CASE("embedding block shape and line pooling") {
  auto tables = hashed_fallback(16, 2);
  Example e = figure_example();
  auto block = embedding_block(e.np, token_at(e, "opcode", 1), e, tables);
  CHECK(block.size() == 10u * 16u);
  for (double v : block) CHECK(std::isfinite(v));
}

TEST_CASE("ast one-hot sets one bit per half") {
  auto v = ast_onehot("ReturnStatement", "MethodBody");
  const int vocab = static_cast<int>(node_type_names().size());
  REQUIRE(static_cast<int>(v.size()) == 2 * vocab);
  CHECK(v[node_type_index("ReturnStatement")] == 1.0);
  CHECK(v[vocab + node_type_index("MethodBody")] == 1.0);
  double sum = 0.0;
  for (double x : v) sum += x;
  CHECK(sum == 2.0);

  auto other = ast_onehot("Mystery", "Mystery");
  CHECK(other[node_type_index(kNodeOther)] == 1.0);
  CHECK(other[vocab + node_type_index(kNodeOther)] == 1.0);
}

TEST_CASE("api one-hot encodes the token and its neighbors") {
  const size_t common = common_java_types().size();
  const size_t util = java_util_classes().size();

  CodeToken t;
  t.lexeme = "int";
  t.kind = TokenKind::Candidate;
  auto v = api_onehot(t, nullptr, nullptr);
  REQUIRE(v.size() == (common + 1) + (util + 1) + 6);
  // `int` hits its common-type slot, not the none slot
  size_t int_slot = 0;
  for (size_t i = 0; i < common; ++i)
    if (common_java_types()[i] == "int") int_slot = i;
  CHECK(v[int_slot] == 1.0);
  CHECK(v[common] == 0.0);
  // absent neighbors
  CHECK(v[v.size() - 2] == 1.0);
  CHECK(v[v.size() - 1] == 1.0);

  CodeToken list;
  list.lexeme = "List";
  list.kind = TokenKind::Candidate;
  CodeToken kw;
  kw.lexeme = "new";
  kw.kind = TokenKind::JavaKeyword;
  auto w = api_onehot(list, &kw, nullptr);
  CHECK(w[common] == 1.0);  // List is not a common type
  size_t list_slot = 0;
  for (size_t i = 0; i < util; ++i)
    if (java_util_classes()[i] == "List") list_slot = i;
  CHECK(w[(common + 1) + list_slot] == 1.0);
  size_t flags = (common + 1) + (util + 1);
  CHECK(w[flags + 0] == 0.0);  // prev not a common type
  CHECK(w[flags + 1] == 1.0);  // prev is a keyword
  CHECK(w[flags + 4] == 0.0);  // prev present
  CHECK(w[flags + 5] == 1.0);  // next absent
}

TEST_CASE("featurize emits one row per candidate in position order") {
  auto tables = hashed_fallback(16, 7);
  FeatureManifest manifest = make_manifest(16);
  Example e = figure_example();
  FeatureMatrix fm = featurize(e, tables, manifest);
  CHECK(fm.rows.size() == 8);  // the method's 8 candidate tokens
  REQUIRE(fm.positions.size() == 8);
  for (size_t i = 1; i < fm.positions.size(); ++i)
    CHECK(fm.positions[i - 1] < fm.positions[i]);
  for (const auto& row : fm.rows) {
    CHECK(static_cast<int>(row.size()) == manifest.total_dim);
    for (double v : row) CHECK(std::isfinite(v));
  }

  FeatureMatrix all = featurize(e, tables, manifest, true);
  CHECK(all.rows.size() == e.tokens.size());
}

TEST_CASE("manifest/tables dimension mismatch is an error") {
  auto tables = hashed_fallback(16, 7);
  CHECK_THROWS(featurize(figure_example(), tables, make_manifest(128)));
}

TEST_CASE("in_return_statement spans return to semicolon") {
  Example e = figure_example();
  CHECK(in_return_statement(e.tokens, token_at(e, "opcode", 1).position));
  CHECK_FALSE(in_return_statement(e.tokens, token_at(e, "opcode", 0).position));
  CHECK_FALSE(in_return_statement(e.tokens, token_at(e, "currentBC").position));
}
