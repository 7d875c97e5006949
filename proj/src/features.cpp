#include "assoc/features.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace assoc {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> char_items(const std::string& lexeme) {
  std::vector<std::string> out;
  for (char c : lowercase(lexeme)) out.push_back(std::string(1, c));
  return out;
}

std::vector<CodeToken> line_context(const Example& e, int line_index) {
  std::vector<CodeToken> out;
  for (const auto& t : e.tokens)
    if (t.line_index == line_index) out.push_back(t);
  return out;
}

}  // namespace

const FeatureBlock& FeatureManifest::block(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw std::runtime_error("unknown feature block: " + name);
}

std::string FeatureManifest::describe() const {
  std::ostringstream out;
  out << "block offset length\n";
  for (const auto& b : blocks)
    out << b.name << " " << b.offset << " " << b.length << "\n";
  out << "total " << total_dim << "\n";
  return out.str();
}

uint64_t FeatureManifest::hash() const { return fnv1a64(describe()); }

FeatureManifest make_manifest(int embedding_dim) {
  FeatureManifest m;
  const int vocab = static_cast<int>(node_type_names().size());
  const int common = static_cast<int>(common_java_types().size());
  const int util = static_cast<int>(java_util_classes().size());
  int offset = 0;
  auto add = [&](const std::string& name, int length) {
    m.blocks.push_back({name, offset, length});
    offset += length;
  };
  add("surface", 2);
  add("comment_embeddings", 4 * embedding_dim);
  add("code_embeddings", 6 * embedding_dim);
  add("cosine", 6);
  add("ast_onehot", 2 * vocab);
  add("api_onehot", (common + 1) + (util + 1) + 6);
  m.total_dim = offset;
  return m;
}

bool in_return_statement(const std::vector<CodeToken>& tokens, int position) {
  bool active = false;
  for (const auto& t : tokens) {
    if (!active && t.kind == TokenKind::JavaKeyword && t.lexeme == "return")
      active = true;
    if (t.position == position) return active;
    if (active && t.kind == TokenKind::Symbol && t.lexeme == ";") active = false;
  }
  return false;
}

std::pair<double, double> surface_features(const NounPhrase& np,
                                           const CodeToken& token,
                                           const Example& example) {
  double match = np_token_match(np, token.lexeme) ? 1.0 : 0.0;
  double ret = 0.0;
  if (in_return_statement(example.tokens, token.position)) {
    ret = 1.0;
  } else {
    for (const auto& t : example.tokens) {
      if (t.lexeme == token.lexeme &&
          in_return_statement(example.tokens, t.position)) {
        ret = 1.0;
        break;
      }
    }
  }
  return {match, ret};
}

std::vector<double> cosine_block(const NounPhrase& np, const CodeToken& token,
                                 const std::vector<CodeToken>& line_tokens,
                                 const EmbeddingTables& tables) {
  // the NP is projected into the code vector space
  auto np_token = embed_mean(np.words, tables.code_token);
  auto np_sub = embed_mean(np.subtokens, tables.code_subtoken);
  auto np_char = embed_mean(np.chars, tables.code_char);

  auto tok_token = embed_mean({token.lexeme}, tables.code_token);
  auto tok_sub = embed_mean(subtokenize(token.lexeme), tables.code_subtoken);
  auto tok_char = embed_mean(char_items(token.lexeme), tables.code_char);

  std::vector<std::string> line_lex, line_sub, line_char;
  for (const auto& t : line_tokens) {
    line_lex.push_back(t.lexeme);
    for (const auto& st : subtokenize(t.lexeme)) line_sub.push_back(st);
    for (const auto& c : char_items(t.lexeme)) line_char.push_back(c);
  }
  auto ln_token = embed_mean(line_lex, tables.code_token);
  auto ln_sub = embed_mean(line_sub, tables.code_subtoken);
  auto ln_char = embed_mean(line_char, tables.code_char);

  return {cosine(np_token, tok_token), cosine(np_sub, tok_sub),
          cosine(np_char, tok_char),   cosine(np_token, ln_token),
          cosine(np_sub, ln_sub),      cosine(np_char, ln_char)};
}

std::vector<double> embedding_block(const NounPhrase& np,
                                    const CodeToken& token,
                                    const Example& example,
                                    const EmbeddingTables& tables) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(10) * tables.dim);
  auto append = [&](const std::vector<double>& v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  append(embed_mean(np.chars, tables.comment_char));
  append(embed_mean(np.words, tables.comment_word));
  append(embed_mean(comment_char_items(example.comment_text),
                    tables.comment_char));
  append(embed_mean(comment_word_items(example.comment_text),
                    tables.comment_word));
  append(embed_mean(char_items(token.lexeme), tables.code_char));
  append(embed_mean(subtokenize(token.lexeme), tables.code_subtoken));
  append(embed_mean({token.lexeme}, tables.code_token));
  auto line = line_context(example, token.line_index);
  std::vector<std::string> line_lex, line_sub, line_char;
  for (const auto& t : line) {
    line_lex.push_back(t.lexeme);
    for (const auto& st : subtokenize(t.lexeme)) line_sub.push_back(st);
    for (const auto& c : char_items(t.lexeme)) line_char.push_back(c);
  }
  append(embed_mean(line_char, tables.code_char));
  append(embed_mean(line_sub, tables.code_subtoken));
  append(embed_mean(line_lex, tables.code_token));
  return out;
}

std::vector<double> ast_onehot(const std::string& parent,
                               const std::string& grandparent) {
  const int vocab = static_cast<int>(node_type_names().size());
  std::vector<double> out(static_cast<size_t>(2) * vocab, 0.0);
  out[node_type_index(parent)] = 1.0;
  out[vocab + node_type_index(grandparent)] = 1.0;
  return out;
}

std::vector<double> api_onehot(const CodeToken& token, const CodeToken* prev,
                               const CodeToken* next) {
  const auto& common = common_java_types();
  const auto& util = java_util_classes();
  std::vector<double> out((common.size() + 1) + (util.size() + 1) + 6, 0.0);
  size_t off = 0;
  {
    size_t hit = common.size();  // none
    for (size_t i = 0; i < common.size(); ++i)
      if (common[i] == token.lexeme) hit = i;
    out[off + hit] = 1.0;
    off += common.size() + 1;
  }
  {
    size_t hit = util.size();
    for (size_t i = 0; i < util.size(); ++i)
      if (util[i] == token.lexeme) hit = i;
    out[off + hit] = 1.0;
    off += util.size() + 1;
  }
  out[off + 0] = prev && is_common_java_type(prev->lexeme) ? 1.0 : 0.0;
  out[off + 1] = prev && prev->kind == TokenKind::JavaKeyword ? 1.0 : 0.0;
  out[off + 2] = next && is_common_java_type(next->lexeme) ? 1.0 : 0.0;
  out[off + 3] = next && next->kind == TokenKind::JavaKeyword ? 1.0 : 0.0;
  out[off + 4] = prev ? 0.0 : 1.0;
  out[off + 5] = next ? 0.0 : 1.0;
  return out;
}

FeatureMatrix featurize(const Example& example, const EmbeddingTables& tables,
                        const FeatureManifest& manifest,
                        bool include_noncandidates) {
  FeatureManifest expected = make_manifest(tables.dim);
  if (expected.total_dim != manifest.total_dim)
    throw std::runtime_error(
        "embedding tables do not match the feature manifest");
  FeatureMatrix fm;
  for (size_t i = 0; i < example.tokens.size(); ++i) {
    const CodeToken& t = example.tokens[i];
    if (!include_noncandidates && t.kind != TokenKind::Candidate) continue;
    std::vector<double> row;
    row.reserve(manifest.total_dim);
    auto [s1, s2] = surface_features(example.np, t, example);
    row.push_back(s1);
    row.push_back(s2);
    auto emb = embedding_block(example.np, t, example, tables);
    row.insert(row.end(), emb.begin(), emb.end());
    auto cos = cosine_block(example.np, t, line_context(example, t.line_index),
                            tables);
    row.insert(row.end(), cos.begin(), cos.end());
    auto ast = ast_onehot(t.parent_node_type, t.grandparent_node_type);
    row.insert(row.end(), ast.begin(), ast.end());
    const CodeToken* prev = i > 0 ? &example.tokens[i - 1] : nullptr;
    const CodeToken* next =
        i + 1 < example.tokens.size() ? &example.tokens[i + 1] : nullptr;
    auto api = api_onehot(t, prev, next);
    row.insert(row.end(), api.begin(), api.end());
    if (static_cast<int>(row.size()) != manifest.total_dim)
      throw std::runtime_error("feature row length mismatch");
    fm.rows.push_back(std::move(row));
    fm.positions.push_back(t.position);
  }
  return fm;
}

}  // namespace assoc
