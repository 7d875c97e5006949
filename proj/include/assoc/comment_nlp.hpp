#ifndef ASSOC_COMMENT_NLP_HPP
#define ASSOC_COMMENT_NLP_HPP

#include <string>
#include <vector>

#include "assoc/core.hpp"

namespace assoc {

struct ReturnComment {
  std::string raw;          // full Javadoc block
  std::string return_text;  // text attached to @return, tags stripped
  std::vector<NounPhrase> nps;
};

/// Pulls the @return text out of a /** ... */ block. A missing tag gives
/// an empty return_text; mining treats that as "no comment".
ReturnComment extract_return_comment(const std::string& javadoc);

/// Rule-based shallow chunker: optional determiner, then adjectives,
/// nouns, and code-like identifiers, ending in a noun. Words are tagged
/// with a bundled lexicon plus suffix fallbacks; unknown words default
/// to noun. Splits at "or"/"and" and never crosses sentence boundaries.
std::vector<NounPhrase> chunk_noun_phrases(const std::string& text);

/// True iff the word-level diff between the two texts contains a
/// verb-tagged word outside any NP span.
bool detect_verb_change(const std::string& before_text,
                        const std::string& after_text);

enum class PosTag { Det, Adj, Noun, Verb, Prep, Conj, Pron, Adv, Other };

/// Tag for a single word: code-like identifiers are nouns, then the
/// lexicon, then the -s/-ed/-ing verb-stem rule, then noun.
PosTag pos_tag(const std::string& word);

/// Replaces the built-in lexicon with `word TAB tag` lines from a file.
void load_pos_lexicon(const std::string& path);

}  // namespace assoc

#endif
