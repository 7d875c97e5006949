#ifndef ASSOC_EMBEDDINGS_HPP
#define ASSOC_EMBEDDINGS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "assoc/core.hpp"

namespace assoc {

inline constexpr const char* kOovItem = "<oov>";

/// One lookup table: item -> vector, with an OOV fallback. In hashed
/// mode every lookup derives a seeded unit vector from the item string
/// instead of consulting the vocabulary.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::string view, int dim);
  static EmbeddingTable hashed(std::string view, int dim, uint64_t seed);

  const std::string& view() const { return view_; }
  int dim() const { return dim_; }
  bool is_hashed() const { return hashed_; }
  size_t vocab_size() const { return vectors_.size(); }
  bool contains(const std::string& item) const;

  /// Vector for an item; unknown items give the OOV vector (or, in
  /// hashed mode, the item's derived vector).
  std::vector<double> lookup(const std::string& item) const;

  void set(const std::string& item, std::vector<double> vec);
  const std::map<std::string, std::vector<double>>& vectors() const {
    return vectors_;
  }

 private:
  std::string view_;
  int dim_ = 0;
  bool hashed_ = false;
  uint64_t seed_ = 0;
  std::map<std::string, std::vector<double>> vectors_;
};

/// The five views: comment chars/words and code chars/subtokens/tokens.
struct EmbeddingTables {
  EmbeddingTable comment_char;
  EmbeddingTable comment_word;
  EmbeddingTable code_char;
  EmbeddingTable code_subtoken;
  EmbeddingTable code_token;
  int dim = 128;
};

struct EmbedConfig {
  int dim = 128;
  int window = 5;
  int epochs = 10;
  int negatives = 5;
  int min_count = 2;
  double learning_rate = 0.025;
  uint64_t seed = 1;
};

/// One training document: the @return text and the method's tokens.
struct EmbedDocument {
  std::string return_text;
  std::vector<std::string> code_tokens;  // lexemes in order
};

/// Skip-gram with negative sampling over the five corpus views.
/// Deterministic per seed; items below min_count train as OOV.
EmbeddingTables train_embeddings(const std::vector<EmbedDocument>& corpus,
                                 const EmbedConfig& cfg);

/// Seeded hash-derived unit vectors for every string; no training.
EmbeddingTables hashed_fallback(int dim, uint64_t seed);

/// Mean of item vectors with OOV substitution; empty list -> zero vector.
std::vector<double> embed_mean(const std::vector<std::string>& items,
                               const EmbeddingTable& table);

/// Cosine with the zero-vector convention (0 against a zero vector).
double cosine(const std::vector<double>& a, const std::vector<double>& b);

void save_embeddings(const EmbeddingTables& tables, const std::string& path);
EmbeddingTables load_embeddings(const std::string& path);

/// Builds the five view item-sequences for one document.
std::vector<std::string> comment_char_items(const std::string& text);
std::vector<std::string> comment_word_items(const std::string& text);
std::vector<std::string> code_char_items(const std::vector<std::string>& tokens);
std::vector<std::string> code_subtoken_items(const std::vector<std::string>& tokens);

}  // namespace assoc

#endif
