#include "atomsplit/diagnostics.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>

#include "atomsplit/splitter.hpp"

namespace atomsplit {

namespace {

using Bag = std::unordered_map<std::string, int>;

Bag bag_of(const std::vector<std::string>& tokens) {
  Bag bag;
  for (const auto& t : tokens) ++bag[t];
  return bag;
}

// Non-empty multiset inclusion.
bool within(const std::vector<std::string>& tokens, const Bag& bag) {
  if (tokens.empty()) return false;
  Bag need = bag_of(tokens);
  for (const auto& [tok, n] : need) {
    auto it = bag.find(tok);
    if (it == bag.end() || it->second < n) return false;
  }
  return true;
}

std::vector<std::string> words_of(const DepTree& tree, const TokenSpan& span) {
  std::vector<std::string> out;
  for (TokenId id : span) {
    for (auto& w : metric_tokenize(tree.token(id).form)) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string> words_of(const DepTree& tree, TokenId id) {
  return metric_tokenize(tree.token(id).form);
}

TokenId locate_clause_root(const DepTree& tree, const AtomicSentence& atom, const std::vector<std::string>& p) {
  if (tree.contains(atom.clause_root)) return atom.clause_root;
  const Bag pbag = bag_of(p);
  for (const char* tag : {"VERB", "AUX"}) {
    for (const Token& t : tree.tokens()) {
      if (t.upos == tag && within(words_of(tree, t.id), pbag)) return t.id;
    }
  }
  return tree.root();
}

bool is_relative_word(const Token& t) {
  static const std::set<std::string> kWords{"who", "whom", "which", "that", "where", "when", "whose"};
  return kWords.count(to_lower(t.lemma == "_" ? t.form : t.lemma)) > 0;
}

// The object a clause is about: its own obj, an obj shared from the head
// conjunct ("wrote and published the novel"), or the antecedent filling the
// gap of a relative clause without a relative word ("the egg she got").
std::optional<TokenSpan> clause_object(const DepTree& tree, TokenId root, std::set<TokenId> pruned) {
  if (const TokenId obj = tree.child_with(root, deprel::kObj)) return subtree_span(tree, obj, pruned);
  const Token& r = tree.token(root);
  if (r.head == 0) return std::nullopt;
  pruned.insert(root);
  if (r.has_deprel(deprel::kConj)) {
    const TokenId shared = tree.child_with(r.head, deprel::kObj);
    if (shared > root) return subtree_span(tree, shared, pruned);
  }
  if (r.has_deprel(deprel::kRelcl) && subject_of(tree, root) != 0) {
    for (TokenId id : subtree_span(tree, root, pruned)) {
      if (is_relative_word(tree.token(id))) return std::nullopt;
    }
    return subtree_span(tree, r.head, pruned);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ErrorLabel label) {
  switch (label) {
    case ErrorLabel::Correct: return "Correct";
    case ErrorLabel::MissingSubject: return "MissingSubject";
    case ErrorLabel::MissingObject: return "MissingObject";
    case ErrorLabel::CoordinationError: return "CoordinationError";
    case ErrorLabel::RelativeClauseError: return "RelativeClauseError";
    case ErrorLabel::AdverbialClauseError: return "AdverbialClauseError";
    case ErrorLabel::AppositiveError: return "AppositiveError";
    case ErrorLabel::Truncated: return "Truncated";
    case ErrorLabel::Other: return "Other";
  }
  return "?";
}

ErrorLabel error_label_from_string(std::string_view name) {
  for (ErrorLabel l : kAllErrorLabels) {
    if (to_string(l) == name) return l;
  }
  throw Error("unknown error label '" + std::string(name) + "'");
}

std::vector<ErrorLabel> error_conditions(const AlignedPair& pair, const DepTree& source) {
  if (!pair.gold) throw Error("error classification needs a gold atom");
  if (!pair.predicted) return {};

  const std::vector<std::string> p = metric_tokenize(pair.predicted->text);
  const std::vector<std::string> g = metric_tokenize(*pair.gold);
  const Bag pbag = bag_of(p);
  Bag missing = bag_of(g);
  for (const auto& t : p) {
    if (auto it = missing.find(t); it != missing.end() && --it->second == 0) missing.erase(it);
  }

  std::set<TokenId> clause_anchors;
  for (const ClauseSite& s : detect_clause_sites(source)) {
    if (is_clause_rule(s.kind)) clause_anchors.insert(s.anchor);
  }
  const TokenId root = locate_clause_root(source, *pair.predicted, p);
  std::set<TokenId> pruned = clause_anchors;
  pruned.erase(root);

  auto enclosing_root = [&](TokenId id) {
    TokenId cur = source.token(id).head;
    while (cur != 0 && cur != source.root() && !clause_anchors.count(cur)) cur = source.token(cur).head;
    return cur;
  };

  std::set<ErrorLabel> fired;

  // Subject of the clause, inherited from enclosing clauses when absent.
  std::vector<std::string> subject;
  if (const TokenId s = subject_of(source, root)) {
    subject = words_of(source, subtree_span(source, s, pruned));
  } else {
    std::vector<TokenId> chain;
    for (TokenId c = enclosing_root(root); c != 0; c = enclosing_root(c)) chain.push_back(c);
    if (auto span = propagate_subject(source, root, chain, pruned)) subject = words_of(source, *span);
  }
  const Token& root_tok = source.token(root);
  const auto root_words = words_of(source, root);
  const bool verb_first = (root_tok.upos == "VERB" || root_tok.upos == "AUX") && !p.empty() &&
                          root_words.size() == 1 && p.front() == root_words.front();
  if (within(subject, missing) || verb_first) fired.insert(ErrorLabel::MissingSubject);

  bool missing_object = false;
  if (const auto object = clause_object(source, root, pruned)) {
    missing_object = within(words_of(source, *object), missing) && within(root_words, pbag);
  }
  if (missing_object) fired.insert(ErrorLabel::MissingObject);

  const bool truncated = !missing_object && !p.empty() && p.size() < g.size() &&
                         std::equal(p.begin(), p.end(), g.begin());
  if (truncated) fired.insert(ErrorLabel::Truncated);

  if (!truncated) {
    if (root_tok.has_deprel(deprel::kRelcl)) {
      const TokenId matrix = enclosing_root(root);
      if (matrix != 0 && within(words_of(source, matrix), missing)) fired.insert(ErrorLabel::RelativeClauseError);
    }
    // Maximal subtrees whose every word is missing from the prediction.
    std::vector<char> gone(source.size() + 1, 0);
    for (const Token& t : source.tokens()) {
      gone[t.id] = within(words_of(source, subtree_span(source, t.id)), missing) ? 1 : 0;
    }
    for (const Token& t : source.tokens()) {
      if (!gone[t.id] || (t.head != 0 && gone[t.head])) continue;
      if (t.has_deprel(deprel::kConj)) {
        fired.insert(ErrorLabel::CoordinationError);
      } else if (t.has_deprel(deprel::kRelcl)) {
        fired.insert(ErrorLabel::RelativeClauseError);
      } else if (t.has_deprel(deprel::kAdvcl) || t.has_base_deprel(deprel::kObl)) {
        fired.insert(ErrorLabel::AdverbialClauseError);
      } else if (t.has_deprel(deprel::kAppos)) {
        fired.insert(ErrorLabel::AppositiveError);
      }
    }
  }
  return {fired.begin(), fired.end()};
}

ErrorLabel classify_error(const AlignedPair& pair, const DepTree& source) {
  if (!pair.gold) throw Error("error classification needs a gold atom");
  if (!pair.predicted) return ErrorLabel::Other;
  const auto p = metric_tokenize(pair.predicted->text);
  const auto g = metric_tokenize(*pair.gold);
  const double f1 = rouge_n(p, g, 1).f1;
  Bag missing = bag_of(g);
  for (const auto& t : p) {
    if (auto it = missing.find(t); it != missing.end() && --it->second == 0) missing.erase(it);
  }
  if (f1 >= 0.9 && missing.empty()) return ErrorLabel::Correct;
  const auto fired = error_conditions(pair, source);
  if (fired.size() == 1) return fired.front();
  if (fired.empty() && f1 >= 0.9) return ErrorLabel::Correct;
  return ErrorLabel::Other;
}

ErrorDistribution error_distribution(std::span<const ErrorLabel> labels) {
  if (labels.empty()) throw Error("error_distribution: no labels");
  ErrorDistribution d;
  for (ErrorLabel l : kAllErrorLabels) d.counts[l] = 0;
  for (ErrorLabel l : labels) ++d.counts[l];
  d.total = labels.size();
  d.errors = d.total - d.counts[ErrorLabel::Correct];
  if (d.errors > 0) {
    for (const auto& [label, n] : d.counts) {
      if (label != ErrorLabel::Correct && n > 0) {
        d.proportions[label] = static_cast<double>(n) / static_cast<double>(d.errors);
      }
    }
  }
  return d;
}

}  // namespace atomsplit
