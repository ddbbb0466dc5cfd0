// Dependency trees read from CoNLL-U, plus the span/linearization helpers the
// splitting rules are written against.
#ifndef ATOMSPLIT_DEPGRAPH_HPP
#define ATOMSPLIT_DEPGRAPH_HPP

#include <cstddef>
#include <istream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atomsplit {

/// 1-based token position inside a sentence; 0 denotes the artificial root.
using TokenId = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CoNLL-U row. Carries the 1-based input line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A tree invariant does not hold (cycle, self-loop, root count, dangling head).
class ValidationError : public Error {
 public:
  ValidationError(std::string sent_id, const std::string& what);
  const std::string& sent_id() const { return sent_id_; }

 private:
  std::string sent_id_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Realization produced no text.
class EmptyAtomError : public Error {
 public:
  using Error::Error;
};

namespace deprel {
inline constexpr std::string_view kRoot = "root";
inline constexpr std::string_view kNsubj = "nsubj";
inline constexpr std::string_view kNsubjPass = "nsubj:pass";
inline constexpr std::string_view kObj = "obj";
inline constexpr std::string_view kConj = "conj";
inline constexpr std::string_view kCc = "cc";
inline constexpr std::string_view kAdvcl = "advcl";
inline constexpr std::string_view kRelcl = "acl:relcl";
inline constexpr std::string_view kAppos = "appos";
inline constexpr std::string_view kMark = "mark";
inline constexpr std::string_view kPunct = "punct";
inline constexpr std::string_view kObl = "obl";
}  // namespace deprel

/// Maps legacy labels onto the internal inventory: relcl -> acl:relcl,
/// dobj -> obj, nsubjpass -> nsubj:pass. Anything else is returned as is.
std::string normalize_deprel(std::string_view label);

struct Token {
  TokenId id = 0;
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  TokenId head = 0;
  std::string deprel;

  bool is_punct() const { return upos == "PUNCT"; }
  bool has_deprel(std::string_view rel) const { return deprel == rel; }
  /// True for deprel `rel` or any of its subtypes (`obl` matches `obl:tmod`).
  bool has_base_deprel(std::string_view rel) const;
};

/// Ordered set of token ids into one tree.
class TokenSpan {
 public:
  TokenSpan() = default;
  explicit TokenSpan(std::set<TokenId> ids) : ids_(std::move(ids)) {}
  TokenSpan(std::initializer_list<TokenId> ids) : ids_(ids) {}

  const std::set<TokenId>& ids() const { return ids_; }
  bool contains(TokenId id) const { return ids_.count(id) != 0; }
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  std::vector<TokenId> to_vector() const { return {ids_.begin(), ids_.end()}; }

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;

 private:
  std::set<TokenId> ids_;
};

/// One parsed sentence. Immutable once constructed; the constructor enforces
/// every tree invariant and throws ValidationError otherwise.
class DepTree {
 public:
  DepTree(std::string sent_id, std::string text, std::vector<Token> tokens);

  const std::string& sent_id() const { return sent_id_; }
  const std::string& text() const { return text_; }
  std::span<const Token> tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }

  bool contains(TokenId id) const {
    return id >= 1 && static_cast<std::size_t>(id) <= tokens_.size();
  }
  /// Throws LookupError for ids outside 1..n.
  const Token& token(TokenId id) const;
  TokenId root() const { return root_; }
  /// Dependents of `id` in ascending id order. `0` yields the root.
  std::span<const TokenId> children(TokenId id) const;
  /// First dependent of `id` carrying `rel` (subtypes excluded), or 0.
  TokenId child_with(TokenId id, std::string_view rel) const;
  /// Returns true when `ancestor` dominates `id` (reflexive).
  bool dominates(TokenId ancestor, TokenId id) const;
  TokenSpan full_span() const;

 private:
  std::string sent_id_;
  std::string text_;
  std::vector<Token> tokens_;
  std::vector<std::vector<TokenId>> children_;  // index 0 = artificial root
  TokenId root_ = 0;
};

/// Reads every sentence block from a CoNLL-U stream. Multiword-token ranges
/// and empty nodes are skipped.
std::vector<DepTree> parse_conllu(std::istream& in);
std::vector<DepTree> parse_conllu_string(std::string_view text);

/// Writes the token rows of `tree` back out (FEATS/DEPS/MISC as "_").
std::string write_conllu(const DepTree& tree);

/// Tokens reachable from `root_id`, pruning every branch whose top node is in
/// `excluded_roots`. `root_id` itself is always kept.
TokenSpan subtree_span(const DepTree& tree, TokenId root_id,
                       const std::set<TokenId>& excluded_roots = {});

/// Lowercased, space-joined forms of `ids` in the given order with PUNCT
/// tokens stripped from both edges. Returns the empty string when nothing
/// remains; see linearize() for the throwing variant.
std::string realize(const DepTree& tree, std::span<const TokenId> ids);

/// Surface text of `span` minus `drop`, in id order. Throws EmptyAtomError
/// when nothing is left after removals.
std::string linearize(const DepTree& tree, const TokenSpan& span,
                      const std::set<TokenId>& drop = {});

/// ASCII lowercasing; multibyte UTF-8 sequences pass through untouched.
std::string to_lower(std::string_view s);

}  // namespace atomsplit

#endif  // ATOMSPLIT_DEPGRAPH_HPP
