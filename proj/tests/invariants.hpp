// Splitter invariants shared by the unit tests and the acceptance binary.
// Each check returns a list of human-readable violations (empty = holds).
#ifndef ATOMSPLIT_TESTS_INVARIANTS_HPP
#define ATOMSPLIT_TESTS_INVARIANTS_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "atomsplit/depgraph.hpp"
#include "atomsplit/splitter.hpp"

namespace invariants {

using namespace atomsplit;

inline bool has_rule(const AtomicSentence& a, Rule r) {
  return std::any_of(a.rules.begin(), a.rules.end(), [r](const RuleApplication& x) { return x.rule == r; });
}

// Text is the lowercased forms of the recorded tokens; every id exists; forms
// come from the source; duplicated source tokens are backed by a rule.
inline std::vector<std::string> provenance(const DepTree& tree, const SplitResult& result) {
  std::vector<std::string> bad;
  std::map<TokenId, int> uses;
  for (const AtomicSentence& a : result.atoms) {
    const std::string where = tree.sent_id() + " '" + a.text + "': ";
    if (a.text.empty()) bad.push_back(where + "empty text");
    if (a.source_sent_id != tree.sent_id()) bad.push_back(where + "wrong source id");
    std::string text;
    for (const AtomToken& t : a.tokens) {
      if (!tree.contains(t.id)) {
        bad.push_back(where + "unknown token " + std::to_string(t.id));
        continue;
      }
      if (!text.empty()) text += ' ';
      text += to_lower(tree.token(t.id).form);
      if (t.copied && !has_rule(a, Rule::SubjectCopy) && !has_rule(a, Rule::RelativeClause) &&
          !has_rule(a, Rule::Appositive)) {
        bad.push_back(where + "copied token without a copying rule");
      }
      if (!t.copied) {
        ++uses[t.id];
        if (!a.span.contains(t.id)) bad.push_back(where + "token missing from span");
      }
    }
    if (text != a.text) bad.push_back(where + "text does not match tokens ('" + text + "')");
  }
  for (const auto& [id, n] : uses) {
    if (n < 2) continue;
    for (const AtomicSentence& a : result.atoms) {
      if (a.span.contains(id) && !has_rule(a, Rule::CoordPhrase)) {
        bad.push_back(tree.sent_id() + ": token " + std::to_string(id) + " reused without cloning");
        break;
      }
    }
  }
  return bad;
}

// Original tokens in source order; copied tokens form one contiguous block.
inline std::vector<std::string> order(const DepTree& tree, const SplitResult& result) {
  std::vector<std::string> bad;
  for (const AtomicSentence& a : result.atoms) {
    TokenId last = 0;
    int blocks = 0;
    bool in_block = false;
    for (const AtomToken& t : a.tokens) {
      if (t.copied) {
        if (!in_block) ++blocks;
        in_block = true;
        continue;
      }
      in_block = false;
      if (t.id <= last) bad.push_back(tree.sent_id() + " '" + a.text + "': out of order");
      last = t.id;
    }
    if (blocks > 1) bad.push_back(tree.sent_id() + " '" + a.text + "': copied tokens not contiguous");
  }
  return bad;
}

// Atom spans plus the dropped set account for every token of the tree.
inline std::vector<std::string> coverage(const DepTree& tree, const SplitResult& result) {
  std::set<TokenId> seen = result.dropped;
  for (const AtomicSentence& a : result.atoms) seen.insert(a.span.begin(), a.span.end());
  std::vector<std::string> bad;
  for (const Token& t : tree.tokens()) {
    if (!seen.count(t.id)) bad.push_back(tree.sent_id() + ": token " + std::to_string(t.id) + " lost");
  }
  return bad;
}

// What a parser would plausibly return for the atom alone: the source tree
// projected onto the atom's tokens. A token whose head is not in the atom
// hangs off its nearest ancestor that is, taking the relation of the
// ancestor it replaces; copied blocks hang off the clause root.
inline DepTree reparse(const DepTree& tree, const AtomicSentence& atom) {
  std::map<TokenId, int> pos_original;
  std::map<TokenId, int> pos_copied;
  for (std::size_t i = 0; i < atom.tokens.size(); ++i) {
    (atom.tokens[i].copied ? pos_copied : pos_original)[atom.tokens[i].id] = static_cast<int>(i) + 1;
  }
  const int root_pos = pos_original.count(atom.clause_root) ? pos_original[atom.clause_root] : 1;
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < atom.tokens.size(); ++i) {
    const AtomToken& at = atom.tokens[i];
    const Token& src = tree.token(at.id);
    const auto& pool = at.copied ? pos_copied : pos_original;
    Token t{static_cast<TokenId>(i) + 1, src.form, src.lemma, src.upos, 0, src.deprel};
    TokenId child = at.id;
    TokenId cur = src.head;
    while (cur != 0 && !pool.count(cur)) {
      child = cur;
      cur = tree.token(cur).head;
    }
    if (cur != 0) {
      t.head = pool.at(cur);
      t.deprel = tree.token(child).deprel;
    } else if (at.copied) {
      t.head = root_pos;
    } else if (t.id == root_pos) {
      t.head = 0;
      t.deprel = "root";
    } else {
      t.head = root_pos;
      t.deprel = tree.token(child).deprel == "root" ? "dep" : tree.token(child).deprel;
    }
    tokens.push_back(std::move(t));
  }
  return DepTree(atom.source_sent_id + "/reparse", atom.text, std::move(tokens));
}

}  // namespace invariants

#endif
