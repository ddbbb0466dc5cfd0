// Rule-based decomposition of one dependency tree into atomic sentences.
//
// The rule pipeline runs in a fixed order: verbal coordination, relative
// clauses, adverbial clauses, appositives (off by default), phrasal
// coordination, then subject copying into subject-less clauses.
#ifndef ATOMSPLIT_SPLITTER_HPP
#define ATOMSPLIT_SPLITTER_HPP

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "atomsplit/depgraph.hpp"

namespace atomsplit {

enum class Rule {
  CoordClause,
  CoordPhrase,
  RelativeClause,
  AdverbialClause,
  Appositive,
  SubjectCopy,
};

std::string_view to_string(Rule rule);
/// Inverse of to_string; throws Error on unknown names.
Rule rule_from_string(std::string_view name);

struct RuleApplication {
  Rule rule;
  TokenId anchor;  // token where the rule fired

  friend bool operator==(const RuleApplication&, const RuleApplication&) = default;
  friend auto operator<=>(const RuleApplication&, const RuleApplication&) = default;
};

struct ClauseSite {
  TokenId anchor;
  Rule kind;

  friend bool operator==(const ClauseSite&, const ClauseSite&) = default;
};

struct SplitConfig {
  bool enable_appositive_rule = false;
  bool keep_subordinator = false;
  int max_atoms_per_sentence = 8;
  int min_atom_tokens = 2;

  /// Throws Error when a limit is below 1.
  void validate() const;
};

/// One token of a realized atom. `copied` marks tokens imported from
/// elsewhere in the tree (subject copy, relative-clause antecedent,
/// appositive antecedent).
struct AtomToken {
  TokenId id;
  bool copied = false;

  friend bool operator==(const AtomToken&, const AtomToken&) = default;
};

struct AtomicSentence {
  std::string text;
  std::string source_sent_id;
  TokenId clause_root = 0;
  TokenSpan span;                 // every id used, copied ones included
  std::vector<AtomToken> tokens;  // realized order; matches `text` word by word
  std::vector<RuleApplication> rules;
};

/// A clause whose realization came out empty. Never silently lost: the
/// pipeline report lists these.
struct DiscardedAtom {
  TokenId clause_root = 0;
  std::vector<RuleApplication> rules;
  std::string reason;
};

struct SplitResult {
  std::vector<AtomicSentence> atoms;
  std::vector<DiscardedAtom> discarded;
  /// Tokens removed on purpose: coordinators, subordinators, relative
  /// pronouns, edge punctuation.
  std::set<TokenId> dropped;
};

/// Candidate split sites ordered by anchor id. Appositive sites are only
/// reported when `config.enable_appositive_rule` is set.
std::vector<ClauseSite> detect_clause_sites(const DepTree& tree, const SplitConfig& config = {});

/// Full decomposition with the drop/discard trace.
SplitResult split(const DepTree& tree, const SplitConfig& config = {});

/// Atoms only, ordered by the source position of their clause root.
std::vector<AtomicSentence> split_sentence(const DepTree& tree, const SplitConfig& config = {});

/// Subject span for a clause lacking its own nsubj/nsubj:pass, taken from the
/// innermost enclosing clause root that has one. Subtrees rooted at
/// `pruned_roots` are cut from the copied span. Throws Error if `clause_root`
/// already has a subject.
std::optional<TokenSpan> propagate_subject(const DepTree& tree, TokenId clause_root,
                                           const std::vector<TokenId>& enclosing_clause_roots,
                                           const std::set<TokenId>& pruned_roots);

/// Same, pruning every clause-level site detect_clause_sites() reports.
std::optional<TokenSpan> propagate_subject(const DepTree& tree, TokenId clause_root,
                                           const std::vector<TokenId>& enclosing_clause_roots);

/// nsubj or nsubj:pass dependent of `id` with the lowest id, or 0.
TokenId subject_of(const DepTree& tree, TokenId id);

/// True for rule kinds that open a clause of their own.
bool is_clause_rule(Rule rule);

}  // namespace atomsplit

#endif  // ATOMSPLIT_SPLITTER_HPP
