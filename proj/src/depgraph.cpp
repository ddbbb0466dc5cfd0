#include "atomsplit/depgraph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace atomsplit {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

ValidationError::ValidationError(std::string sent_id, const std::string& what)
    : Error("sentence '" + sent_id + "': " + what), sent_id_(std::move(sent_id)) {}

std::string normalize_deprel(std::string_view label) {
  if (label == "relcl" || label == "acl:relcl") return std::string(deprel::kRelcl);
  if (label == "dobj") return std::string(deprel::kObj);
  if (label == "nsubjpass") return std::string(deprel::kNsubjPass);
  return std::string(label);
}

bool Token::has_base_deprel(std::string_view rel) const {
  if (deprel.size() < rel.size() || deprel.compare(0, rel.size(), rel) != 0) return false;
  return deprel.size() == rel.size() || deprel[rel.size()] == ':';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

DepTree::DepTree(std::string sent_id, std::string text, std::vector<Token> tokens)
    : sent_id_(std::move(sent_id)), text_(std::move(text)), tokens_(std::move(tokens)) {
  const auto n = static_cast<TokenId>(tokens_.size());
  if (n == 0) throw ValidationError(sent_id_, "sentence has no tokens");
  children_.assign(tokens_.size() + 1, {});
  int roots = 0;
  for (TokenId i = 1; i <= n; ++i) {
    const Token& t = tokens_[i - 1];
    if (t.id != i) {
      throw ValidationError(sent_id_, "token ids must be 1.." + std::to_string(n) +
                                          " without gaps (found " + std::to_string(t.id) +
                                          " at position " + std::to_string(i) + ")");
    }
    if (t.form.empty()) throw ValidationError(sent_id_, "token " + std::to_string(i) + " has an empty form");
    if (t.head == t.id) throw ValidationError(sent_id_, "token " + std::to_string(i) + " is its own head");
    if (t.head < 0 || t.head > n) {
      throw ValidationError(sent_id_, "token " + std::to_string(i) + " has head " +
                                          std::to_string(t.head) + " outside the sentence");
    }
    if (t.head == 0) {
      ++roots;
      root_ = t.id;
      if (t.deprel != deprel::kRoot) {
        throw ValidationError(sent_id_, "token " + std::to_string(i) +
                                            " attaches to 0 with deprel '" + t.deprel + "'");
      }
    } else if (t.deprel == deprel::kRoot) {
      throw ValidationError(sent_id_, "token " + std::to_string(i) +
                                          " has deprel root but head " + std::to_string(t.head));
    }
    children_[t.head].push_back(t.id);
  }
  if (roots != 1) {
    throw ValidationError(sent_id_, "expected exactly one root, found " + std::to_string(roots));
  }
  // Every walk must reach 0 within n steps.
  for (TokenId i = 1; i <= n; ++i) {
    TokenId cur = i;
    int steps = 0;
    while (cur != 0) {
      if (++steps > n) {
        throw ValidationError(sent_id_, "head links from token " + std::to_string(i) + " form a cycle");
      }
      cur = tokens_[cur - 1].head;
    }
  }
}

const Token& DepTree::token(TokenId id) const {
  if (!contains(id)) {
    throw LookupError("sentence '" + sent_id_ + "' has no token " + std::to_string(id));
  }
  return tokens_[id - 1];
}

std::span<const TokenId> DepTree::children(TokenId id) const {
  if (id != 0 && !contains(id)) {
    throw LookupError("sentence '" + sent_id_ + "' has no token " + std::to_string(id));
  }
  return children_[id];
}

TokenId DepTree::child_with(TokenId id, std::string_view rel) const {
  for (TokenId c : children(id)) {
    if (tokens_[c - 1].deprel == rel) return c;
  }
  return 0;
}

bool DepTree::dominates(TokenId ancestor, TokenId id) const {
  for (TokenId cur = id; cur != 0; cur = token(cur).head) {
    if (cur == ancestor) return true;
  }
  return false;
}

TokenSpan DepTree::full_span() const {
  std::set<TokenId> ids;
  for (const Token& t : tokens_) ids.insert(ids.end(), t.id);
  return TokenSpan(std::move(ids));
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_int(const std::string& s, int& value) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::string comment_value(const std::string& line, std::string_view key) {
  // "# key = value"
  auto body = std::string_view(line).substr(1);
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  if (body.substr(0, key.size()) != key) return {};
  body.remove_prefix(key.size());
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  if (body.empty() || body.front() != '=') return {};
  body.remove_prefix(1);
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  return std::string(body);
}

bool has_comment_key(const std::string& line, std::string_view key) {
  auto body = std::string_view(line).substr(1);
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  if (body.substr(0, key.size()) != key) return false;
  body.remove_prefix(key.size());
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  return !body.empty() && body.front() == '=';
}

struct Block {
  std::string sent_id;
  std::string text;
  bool has_sent_id = false;
  bool has_text = false;
  std::vector<Token> tokens;
};

}  // namespace

std::vector<DepTree> parse_conllu(std::istream& in) {
  std::vector<DepTree> trees;
  Block block;
  std::size_t line_no = 0;
  std::string line;

  auto flush = [&] {
    if (block.tokens.empty()) {
      block = Block{};
      return;
    }
    std::string id = block.has_sent_id ? block.sent_id : std::to_string(trees.size() + 1);
    std::string text = block.text;
    if (!block.has_text) {
      for (const Token& t : block.tokens) {
        if (!text.empty()) text += ' ';
        text += t.form;
      }
    }
    trees.emplace_back(std::move(id), std::move(text), std::move(block.tokens));
    block = Block{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      if (has_comment_key(line, "sent_id")) {
        block.sent_id = comment_value(line, "sent_id");
        block.has_sent_id = true;
      } else if (has_comment_key(line, "text")) {
        block.text = comment_value(line, "text");
        block.has_text = true;
      }
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    if (cols[0].find_first_of("-.") != std::string::npos) continue;  // multiword range / empty node
    Token t;
    if (!parse_int(cols[0], t.id) || t.id < 1) {
      throw ParseError(line_no, "token id '" + cols[0] + "' is not a positive integer");
    }
    if (!parse_int(cols[6], t.head) || t.head < 0) {
      throw ParseError(line_no, "head '" + cols[6] + "' is not a non-negative integer");
    }
    t.form = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.deprel = normalize_deprel(cols[7]);
    block.tokens.push_back(std::move(t));
  }
  flush();
  return trees;
}

std::vector<DepTree> parse_conllu_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in);
}

std::string write_conllu(const DepTree& tree) {
  std::ostringstream out;
  out << "# sent_id = " << tree.sent_id() << '\n';
  out << "# text = " << tree.text() << '\n';
  for (const Token& t : tree.tokens()) {
    out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t" << t.head
        << '\t' << t.deprel << "\t_\t_\n";
  }
  out << '\n';
  return out.str();
}

TokenSpan subtree_span(const DepTree& tree, TokenId root_id, const std::set<TokenId>& excluded_roots) {
  tree.token(root_id);
  for (TokenId ex : excluded_roots) tree.token(ex);
  std::set<TokenId> ids;
  std::vector<TokenId> stack{root_id};
  while (!stack.empty()) {
    const TokenId cur = stack.back();
    stack.pop_back();
    ids.insert(cur);
    for (TokenId c : tree.children(cur)) {
      if (!excluded_roots.count(c)) stack.push_back(c);
    }
  }
  return TokenSpan(std::move(ids));
}

std::string realize(const DepTree& tree, std::span<const TokenId> ids) {
  std::size_t first = 0;
  std::size_t last = ids.size();
  while (first < last && tree.token(ids[first]).is_punct()) ++first;
  while (last > first && tree.token(ids[last - 1]).is_punct()) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (!out.empty()) out += ' ';
    out += tree.token(ids[i]).form;
  }
  return to_lower(out);
}

std::string linearize(const DepTree& tree, const TokenSpan& span, const std::set<TokenId>& drop) {
  std::vector<TokenId> ids;
  for (TokenId id : span) {
    tree.token(id);
    if (!drop.count(id)) ids.push_back(id);
  }
  std::string out = realize(tree, ids);
  if (out.empty()) {
    throw EmptyAtomError("sentence '" + tree.sent_id() + "': span is empty after removals");
  }
  return out;
}

}  // namespace atomsplit
