#ifndef ASSOC_FEATURES_HPP
#define ASSOC_FEATURES_HPP

#include <string>
#include <vector>

#include "assoc/core.hpp"
#include "assoc/embeddings.hpp"

namespace assoc {

struct FeatureBlock {
  std::string name;
  int offset = 0;
  int length = 0;
};

/// Named block layout of the dense feature vector. Block order is
/// frozen: surface, comment_embeddings, code_embeddings, cosine,
/// ast_onehot, api_onehot.
struct FeatureManifest {
  std::vector<FeatureBlock> blocks;
  int total_dim = 0;

  const FeatureBlock& block(const std::string& name) const;
  std::string describe() const;  // human-readable block table
  uint64_t hash() const;
};

/// The manifest for a given embedding dimension and the frozen
/// node-type / API vocabularies.
FeatureManifest make_manifest(int embedding_dim);

/// One row per token, row order = position order.
struct FeatureMatrix {
  std::vector<std::vector<double>> rows;
  std::vector<int> positions;  // token position per row
};

/// The two binary surface features: NP subtoken match and presence in a
/// return statement.
std::pair<double, double> surface_features(const NounPhrase& np,
                                           const CodeToken& token,
                                           const Example& example);

/// Six cosines between the NP (projected through the code tables) and
/// the token / line context, at token, subtoken, and char granularity.
std::vector<double> cosine_block(const NounPhrase& np, const CodeToken& token,
                                 const std::vector<CodeToken>& line_tokens,
                                 const EmbeddingTables& tables);

/// 10 mean-pooled vectors: NP and full comment through the comment
/// tables; token and line context through the code tables.
std::vector<double> embedding_block(const NounPhrase& np,
                                    const CodeToken& token,
                                    const Example& example,
                                    const EmbeddingTables& tables);

std::vector<double> ast_onehot(const std::string& parent,
                               const std::string& grandparent);

std::vector<double> api_onehot(const CodeToken& token, const CodeToken* prev,
                               const CodeToken* next);

/// Assembles rows for the example's candidate tokens (or all tokens when
/// include_noncandidates is set, as the CRF requires). Throws when the
/// table dimension disagrees with the manifest.
FeatureMatrix featurize(const Example& example, const EmbeddingTables& tables,
                        const FeatureManifest& manifest,
                        bool include_noncandidates = false);

/// True iff the token at `position` lies inside a return statement (from
/// the `return` keyword to the closing semicolon).
bool in_return_statement(const std::vector<CodeToken>& tokens, int position);

}  // namespace assoc

#endif
