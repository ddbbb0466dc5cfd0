// Lexical (ROUGE-1/2/L), semantic (greedy embedding matching) and structural
// (length/verb) scores for predicted atoms against gold atoms.
#ifndef ATOMSPLIT_METRICS_HPP
#define ATOMSPLIT_METRICS_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomsplit/splitter.hpp"

namespace atomsplit {

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// Harmonic-mean F1 from precision and recall; 0 when both are 0.
  static Score from(double precision, double recall);
  static Score perfect() { return {1.0, 1.0, 1.0}; }
  static Score zero() { return {}; }

  friend bool operator==(const Score&, const Score&) = default;
};

/// Lowercase, then maximal runs of letters/digits; an apostrophe survives only
/// between two word characters. Everything else is a separator.
std::vector<std::string> metric_tokenize(std::string_view text);

using Tokens = std::span<const std::string>;

/// Clipped n-gram overlap, n in {1, 2}. Both sides without n-grams score 1.
Score rouge_n(Tokens candidate, Tokens reference, int n);

/// LCS-based overlap with beta = 1.
Score rouge_l(Tokens candidate, Tokens reference);

/// Longest common subsequence length, O(|a|·|b|) time and O(|b|) memory.
std::size_t lcs_length(Tokens a, Tokens b);

/// Contextual token vectors for one atom, one row per token.
struct TokenEmbeddings {
  std::vector<std::string> tokens;
  Eigen::MatrixXd vectors;

  Eigen::Index dim() const { return vectors.cols(); }
  /// Throws Error unless rows == tokens and every row has unit L2 norm
  /// within 1e-6.
  void validate() const;
};

/// Greedy cosine matching: precision averages each candidate token's best
/// match, recall each reference token's. Negative cosines count as 0.
Score semantic_score(const TokenEmbeddings& candidate, const TokenEmbeddings& reference);

/// Embeddings keyed by atom id, read from JSON Lines
/// {"id": ..., "tokens": [...], "vectors": [[...], ...]}.
using EmbeddingIndex = std::map<std::string, TokenEmbeddings>;
EmbeddingIndex read_embeddings(std::istream& in);

struct AlignedPair {
  std::optional<AtomicSentence> predicted;
  std::optional<std::string> gold;
  std::optional<std::size_t> predicted_index;
  std::optional<std::size_t> gold_index;
  Score rouge1;
  Score rouge2;
  Score rougeL;
  std::optional<Score> semantic;

  bool matched() const { return predicted.has_value() && gold.has_value(); }
};

/// One-to-one greedy alignment on the ROUGE-1 F1 matrix. Highest cell first;
/// ties go to the lower predicted index, then the lower gold index. Leftover
/// atoms on either side become pairs with an empty partner and zero scores.
/// Output: predicted atoms in order (matched or not), then unmatched gold.
std::vector<AlignedPair> align_atoms(std::span<const AtomicSentence> predicted,
                                     std::span<const std::string> gold);

/// As above, additionally filling `semantic` from per-atom embeddings
/// (parallel to `predicted` and `gold`).
std::vector<AlignedPair> align_atoms(std::span<const AtomicSentence> predicted,
                                     std::span<const std::string> gold,
                                     std::span<const TokenEmbeddings> predicted_embeddings,
                                     std::span<const TokenEmbeddings> gold_embeddings);

struct MetricTable {
  std::size_t pairs = 0;
  Score rouge1;
  Score rouge2;
  Score rougeL;
  std::optional<Score> semantic;  // present when every pair carries one
};

struct CorpusScores {
  MetricTable all_pairs;                     // macro-average over every pair
  std::optional<MetricTable> matched_pairs;  // pairs with both sides only
};

/// Macro-averages precision, recall and F1 independently.
CorpusScores corpus_scores(std::span<const AlignedPair> pairs);

struct TaggedAtom {
  std::vector<std::string> tokens;
  std::vector<std::string> upos;
};

struct CorpusStats {
  double avg_tokens_per_atom = 0.0;
  double avg_verbs_per_atom = 0.0;
  std::size_t atom_count = 0;
};

/// Average length and VERB count (AUX excluded) per atom.
CorpusStats length_verb_stats(std::span<const TaggedAtom> atoms);

}  // namespace atomsplit

#endif  // ATOMSPLIT_METRICS_HPP
