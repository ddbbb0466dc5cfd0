#include "atomsplit/splitter.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace atomsplit {

namespace {

constexpr std::array<std::string_view, 7> kRelativePronouns = {"who",   "whom", "which", "that",
                                                                "where", "when", "whose"};

// Dependents of a nominal that travel with it when it is copied as an
// antecedent, or that belong to a coordinated predicate nominal's phrase.
constexpr std::array<std::string_view, 9> kNominalDeps = {"det",   "amod",     "compound", "nmod", "nummod",
                                                          "flat",  "fixed",    "goeswith", "acl"};

bool base_in(const Token& t, std::span<const std::string_view> rels) {
  return std::any_of(rels.begin(), rels.end(), [&](std::string_view r) { return t.has_base_deprel(r); });
}

bool is_relative_pronoun(const Token& t) {
  const std::string key = to_lower(t.lemma == "_" ? t.form : t.lemma);
  return std::find(kRelativePronouns.begin(), kRelativePronouns.end(), key) != kRelativePronouns.end();
}

bool is_verbal(const Token& t) { return t.upos == "VERB" || t.upos == "AUX"; }

// cc and punct tokens introducing conjunct `anchor`: its own leading ones, and
// (for parsers that hang cc on the first conjunct) those of its head lying
// between the previous conjunct and `anchor`.
std::vector<TokenId> coordinators(const DepTree& tree, TokenId anchor) {
  std::vector<TokenId> out;
  auto is_connective = [&](TokenId id) {
    const Token& t = tree.token(id);
    return t.has_deprel(deprel::kCc) || t.has_deprel(deprel::kPunct);
  };
  for (TokenId c : tree.children(anchor)) {
    if (c < anchor && is_connective(c)) out.push_back(c);
  }
  const TokenId head = tree.token(anchor).head;
  if (head == 0) return out;
  TokenId prev = head;
  for (TokenId s : tree.children(head)) {
    if (s < anchor && tree.token(s).has_deprel(deprel::kConj)) prev = std::max(prev, s);
  }
  for (TokenId c : tree.children(head)) {
    if (c > prev && c < anchor && is_connective(c)) out.push_back(c);
  }
  return out;
}

std::vector<TokenId> strip_punct_edges(const DepTree& tree, std::vector<TokenId> ids) {
  auto first = std::find_if(ids.begin(), ids.end(), [&](TokenId id) { return !tree.token(id).is_punct(); });
  ids.erase(ids.begin(), first);
  while (!ids.empty() && tree.token(ids.back()).is_punct()) ids.pop_back();
  return ids;
}

void collect(const DepTree& tree, TokenId top, const std::set<TokenId>& pruned, std::set<TokenId>& out) {
  const TokenSpan s = subtree_span(tree, top, pruned);
  out.insert(s.begin(), s.end());
}

// Nominal head plus its nominal modifiers, minus clause subtrees.
std::vector<TokenId> antecedent(const DepTree& tree, TokenId head, const std::set<TokenId>& clause_roots) {
  std::set<TokenId> ids{head};
  for (TokenId c : tree.children(head)) {
    if (clause_roots.count(c)) continue;
    if (base_in(tree.token(c), kNominalDeps)) collect(tree, c, clause_roots, ids);
  }
  return strip_punct_edges(tree, {ids.begin(), ids.end()});
}

struct GroupPlan {
  TokenId head;
  std::vector<TokenId> anchors;               // active CoordPhrase sites under `head`
  std::vector<std::set<TokenId>> pieces;      // [0] = head's own piece, then one per anchor
};

struct Draft {
  AtomicSentence atom;
  std::vector<TokenId> origin;  // sites to deactivate if this atom is too short
  bool main_clause = false;
};

struct Realization {
  std::vector<Draft> drafts;
  std::vector<DiscardedAtom> discarded;
  std::set<TokenId> dropped;
  bool overflow = false;
};

class Splitter {
 public:
  Splitter(const DepTree& tree, const SplitConfig& config)
      : tree_(tree), config_(config), sites_(detect_clause_sites(tree, config)) {}

  SplitResult run() {
    std::set<TokenId> inactive;
    while (true) {
      Realization r = realize_all(inactive);
      const auto cap = static_cast<std::size_t>(config_.max_atoms_per_sentence);
      if (r.overflow || r.drafts.size() > cap) {
        // Unsplit the rightmost active site; it stays inside its clause.
        TokenId victim = 0;
        for (const ClauseSite& s : sites_) {
          if (!inactive.count(s.anchor)) victim = std::max(victim, s.anchor);
        }
        if (victim == 0) return finish(std::move(r));
        inactive.insert(victim);
        continue;
      }
      bool merged = false;
      for (const Draft& d : r.drafts) {
        if (static_cast<int>(d.atom.tokens.size()) >= config_.min_atom_tokens || d.origin.empty()) continue;
        inactive.insert(d.origin.begin(), d.origin.end());
        merged = true;
        break;
      }
      if (!merged) return finish(std::move(r));
    }
  }

 private:
  SplitResult finish(Realization r) {
    SplitResult out;
    out.discarded = std::move(r.discarded);
    out.dropped = std::move(r.dropped);
    for (Draft& d : r.drafts) {
      if (d.atom.text.empty()) {
        out.discarded.push_back({d.atom.clause_root, d.atom.rules, "clause realized to an empty string"});
        continue;
      }
      out.atoms.push_back(std::move(d.atom));
    }
    return out;
  }

  Realization realize_all(const std::set<TokenId>& inactive) const {
    Realization out;
    std::map<TokenId, Rule> clause_kind;
    std::set<TokenId> phrase_sites;
    for (const ClauseSite& s : sites_) {
      if (inactive.count(s.anchor)) continue;
      if (is_clause_rule(s.kind)) {
        clause_kind.emplace(s.anchor, s.kind);
      } else {
        phrase_sites.insert(s.anchor);
      }
    }
    std::set<TokenId> clause_roots{tree_.root()};
    for (const auto& [anchor, kind] : clause_kind) clause_roots.insert(anchor);

    // Coordinators of every active coordination site and, unless kept, the
    // subordinators of every active adverbial clause.
    std::set<TokenId> removed;
    for (const ClauseSite& s : sites_) {
      if (inactive.count(s.anchor)) continue;
      if (s.kind == Rule::CoordClause || s.kind == Rule::CoordPhrase) {
        for (TokenId c : coordinators(tree_, s.anchor)) removed.insert(c);
      } else if (s.kind == Rule::AdverbialClause && !config_.keep_subordinator) {
        for (TokenId c : tree_.children(s.anchor)) {
          if (tree_.token(c).has_deprel(deprel::kMark)) removed.insert(c);
        }
      }
    }
    out.dropped = removed;

    auto parent_clause = [&](TokenId c) {
      TokenId cur = tree_.token(c).head;
      while (cur != 0 && !clause_roots.count(cur)) cur = tree_.token(cur).head;
      return cur;
    };

    for (TokenId c : clause_roots) {
      const bool main = c == tree_.root();
      const std::optional<Rule> kind =
          main ? std::nullopt : std::optional<Rule>(clause_kind.at(c));
      std::set<TokenId> others = clause_roots;
      others.erase(c);
      const TokenSpan own = subtree_span(tree_, c, others);

      std::vector<RuleApplication> rules;
      if (kind) rules.push_back({*kind, c});
      for (const auto& [anchor, child_kind] : clause_kind) {
        if (anchor != c && parent_clause(anchor) == c) rules.push_back({child_kind, anchor});
      }

      // Base sequence with relative-pronoun substitution.
      TokenId pronoun = 0;
      if (kind == Rule::RelativeClause) pronoun = relative_pronoun(c, own);
      std::vector<AtomToken> prefix;
      if (kind == Rule::Appositive) {
        for (TokenId id : antecedent(tree_, tree_.token(c).head, clause_roots)) prefix.push_back({id, true});
      }
      std::vector<AtomToken> base;
      for (TokenId id : own) {
        if (removed.count(id)) continue;
        if (id == pronoun) {
          out.dropped.insert(id);
          for (TokenId a : antecedent(tree_, tree_.token(c).head, clause_roots)) base.push_back({a, true});
          continue;
        }
        base.push_back({id, false});
      }

      // Phrasal coordination groups living in this clause.
      std::vector<GroupPlan> groups;
      for (TokenId h : own) {
        GroupPlan g{h, {}, {}};
        for (TokenId ch : tree_.children(h)) {
          if (phrase_sites.count(ch) && own.contains(ch)) g.anchors.push_back(ch);
        }
        if (g.anchors.empty()) continue;
        build_pieces(g, c, own, clause_roots);
        groups.push_back(std::move(g));
      }
      if (!groups.empty()) {
        for (const GroupPlan& g : groups) {
          for (TokenId a : g.anchors) rules.push_back({Rule::CoordPhrase, a});
        }
      }

      std::vector<TokenId> origin;
      for (const GroupPlan& g : groups) origin.insert(origin.end(), g.anchors.begin(), g.anchors.end());
      if (origin.empty() && !main) origin.push_back(c);

      // Subject to copy in front of every clone, if the clause lacks one.
      std::vector<TokenId> subject;
      if (kind != Rule::Appositive && subject_of(tree_, c) == 0) {
        std::vector<TokenId> chain;
        for (TokenId p = main ? 0 : parent_clause(c); p != 0; p = parent_clause(p)) {
          chain.push_back(p);
        }
        if (auto span = propagate_subject(tree_, c, chain, clause_roots)) {
          subject = strip_punct_edges(tree_, span->to_vector());
        }
      }
      if (!subject.empty()) rules.push_back({Rule::SubjectCopy, c});

      std::sort(rules.begin(), rules.end());
      rules.erase(std::unique(rules.begin(), rules.end()), rules.end());

      // Odometer over conjunct choices, first group slowest.
      std::vector<std::size_t> choice(groups.size(), 0);
      std::set<std::string> seen;
      bool exhausted = false;
      while (!exhausted) {
        std::set<TokenId> cut;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
          for (std::size_t k = 0; k < groups[gi].pieces.size(); ++k) {
            if (k != choice[gi]) cut.insert(groups[gi].pieces[k].begin(), groups[gi].pieces[k].end());
          }
        }
        std::vector<AtomToken> body;
        for (const AtomToken& t : base) {
          if (t.copied || !cut.count(t.id)) body.push_back(t);
        }
        // Trim the clause's own edge punctuation before anything is prepended.
        if (!subject.empty() || !prefix.empty()) strip_edges(body, out.dropped);
        std::vector<AtomToken> seq = prefix;
        for (TokenId id : subject) seq.push_back({id, true});
        seq.insert(seq.end(), body.begin(), body.end());
        Draft d = make_draft(c, rules, std::move(seq), out.dropped);
        d.origin = origin;
        d.main_clause = main;
        if (seen.insert(d.atom.text).second) out.drafts.push_back(std::move(d));
        if (out.drafts.size() > static_cast<std::size_t>(config_.max_atoms_per_sentence)) {
          out.overflow = true;
          return out;
        }
        exhausted = true;
        for (std::size_t g = groups.size(); g-- > 0;) {
          if (++choice[g] < groups[g].pieces.size()) {
            exhausted = false;
            break;
          }
          choice[g] = 0;
        }
      }
    }
    return out;
  }

  TokenId relative_pronoun(TokenId clause_root, const TokenSpan& own) const {
    for (TokenId id : own) {
      if (id == clause_root) continue;
      const Token& t = tree_.token(id);
      if (!is_relative_pronoun(t)) continue;
      const TokenId h = t.head;
      if (h == clause_root || (h != 0 && tree_.token(h).head == clause_root)) return id;
    }
    return 0;
  }

  void build_pieces(GroupPlan& g, TokenId clause_root, const TokenSpan& own,
                    const std::set<TokenId>& clause_roots) const {
    std::set<TokenId> pruned = clause_roots;
    pruned.insert(g.anchors.begin(), g.anchors.end());
    // A case marker on the first conjunct is shared when no other conjunct
    // carries its own ("to paris and rome").
    bool conjuncts_have_case = false;
    for (TokenId a : g.anchors) {
      for (TokenId ch : tree_.children(a)) {
        if (tree_.token(ch).has_base_deprel("case")) conjuncts_have_case = true;
      }
    }
    std::set<TokenId> head_piece{g.head};
    for (TokenId ch : tree_.children(g.head)) {
      if (pruned.count(ch)) continue;
      const Token& t = tree_.token(ch);
      if (t.has_base_deprel("case") && !conjuncts_have_case) continue;
      if (g.head == clause_root && !base_in(t, kNominalDeps) && !t.has_base_deprel("case")) continue;
      collect(tree_, ch, pruned, head_piece);
    }
    g.pieces.push_back(std::move(head_piece));
    for (TokenId a : g.anchors) {
      std::set<TokenId> piece;
      collect(tree_, a, clause_roots, piece);
      g.pieces.push_back(std::move(piece));
    }
    for (auto& piece : g.pieces) {
      std::erase_if(piece, [&](TokenId id) { return !own.contains(id); });
    }
  }

  // Drops leading and trailing punctuation; original tokens go to `dropped`.
  void strip_edges(std::vector<AtomToken>& seq, std::set<TokenId>& dropped) const {
    std::size_t first = 0;
    std::size_t last = seq.size();
    while (first < last && tree_.token(seq[first].id).is_punct()) ++first;
    while (last > first && tree_.token(seq[last - 1].id).is_punct()) --last;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if ((i < first || i >= last) && !seq[i].copied) dropped.insert(seq[i].id);
    }
    seq = std::vector<AtomToken>(seq.begin() + static_cast<std::ptrdiff_t>(first),
                                 seq.begin() + static_cast<std::ptrdiff_t>(last));
  }

  Draft make_draft(TokenId clause_root, const std::vector<RuleApplication>& rules, std::vector<AtomToken> seq,
                   std::set<TokenId>& dropped) const {
    strip_edges(seq, dropped);
    Draft d;
    d.atom.source_sent_id = tree_.sent_id();
    d.atom.clause_root = clause_root;
    d.atom.rules = rules;
    std::set<TokenId> ids;
    for (const AtomToken& t : seq) {
      d.atom.tokens.push_back(t);
      ids.insert(t.id);
      if (!d.atom.text.empty()) d.atom.text += ' ';
      d.atom.text += tree_.token(t.id).form;
    }
    d.atom.text = to_lower(d.atom.text);
    d.atom.span = TokenSpan(std::move(ids));
    return d;
  }

  const DepTree& tree_;
  const SplitConfig& config_;
  std::vector<ClauseSite> sites_;
};

}  // namespace

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::CoordClause: return "CoordClause";
    case Rule::CoordPhrase: return "CoordPhrase";
    case Rule::RelativeClause: return "RelativeClause";
    case Rule::AdverbialClause: return "AdverbialClause";
    case Rule::Appositive: return "Appositive";
    case Rule::SubjectCopy: return "SubjectCopy";
  }
  return "?";
}

Rule rule_from_string(std::string_view name) {
  for (Rule r : {Rule::CoordClause, Rule::CoordPhrase, Rule::RelativeClause, Rule::AdverbialClause,
                 Rule::Appositive, Rule::SubjectCopy}) {
    if (to_string(r) == name) return r;
  }
  throw Error("unknown rule name '" + std::string(name) + "'");
}

bool is_clause_rule(Rule rule) {
  return rule == Rule::CoordClause || rule == Rule::RelativeClause || rule == Rule::AdverbialClause ||
         rule == Rule::Appositive;
}

void SplitConfig::validate() const {
  if (max_atoms_per_sentence < 1) throw Error("max_atoms_per_sentence must be >= 1");
  if (min_atom_tokens < 1) throw Error("min_atom_tokens must be >= 1");
}

TokenId subject_of(const DepTree& tree, TokenId id) {
  for (TokenId c : tree.children(id)) {
    const Token& t = tree.token(c);
    if (t.has_deprel(deprel::kNsubj) || t.has_deprel(deprel::kNsubjPass)) return c;
  }
  return 0;
}

std::vector<ClauseSite> detect_clause_sites(const DepTree& tree, const SplitConfig& config) {
  std::vector<ClauseSite> sites;
  for (const Token& t : tree.tokens()) {
    if (t.has_deprel(deprel::kAdvcl)) {
      sites.push_back({t.id, Rule::AdverbialClause});
    } else if (t.has_deprel(deprel::kRelcl)) {
      sites.push_back({t.id, Rule::RelativeClause});
    } else if (t.has_deprel(deprel::kAppos)) {
      if (config.enable_appositive_rule) sites.push_back({t.id, Rule::Appositive});
    } else if (t.has_deprel(deprel::kConj)) {
      const bool clausal = is_verbal(t) || subject_of(tree, t.id) != 0;
      sites.push_back({t.id, clausal ? Rule::CoordClause : Rule::CoordPhrase});
    }
  }
  return sites;
}

std::optional<TokenSpan> propagate_subject(const DepTree& tree, TokenId clause_root,
                                           const std::vector<TokenId>& enclosing_clause_roots,
                                           const std::set<TokenId>& pruned_roots) {
  if (subject_of(tree, clause_root) != 0) {
    throw Error("token " + std::to_string(clause_root) + " already has a subject");
  }
  for (TokenId r : enclosing_clause_roots) {
    if (const TokenId s = subject_of(tree, r)) return subtree_span(tree, s, pruned_roots);
  }
  return std::nullopt;
}

std::optional<TokenSpan> propagate_subject(const DepTree& tree, TokenId clause_root,
                                           const std::vector<TokenId>& enclosing_clause_roots) {
  std::set<TokenId> pruned;
  for (const ClauseSite& s : detect_clause_sites(tree)) {
    if (is_clause_rule(s.kind)) pruned.insert(s.anchor);
  }
  return propagate_subject(tree, clause_root, enclosing_clause_roots, pruned);
}

SplitResult split(const DepTree& tree, const SplitConfig& config) {
  config.validate();
  return Splitter(tree, config).run();
}

std::vector<AtomicSentence> split_sentence(const DepTree& tree, const SplitConfig& config) {
  return split(tree, config).atoms;
}

}  // namespace atomsplit
