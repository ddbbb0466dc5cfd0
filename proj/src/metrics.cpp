#include "atomsplit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "json.hpp"

namespace atomsplit {

Score Score::from(double precision, double recall) {
  const double sum = precision + recall;
  return {precision, recall, sum > 0.0 ? 2.0 * precision * recall / sum : 0.0};
}

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> char32_t {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) & 0x3F : 0;
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 >> 5) == 0x6 && i + 1 < s.size()) return {static_cast<char32_t>((b0 & 0x1F) << 6) | cont(1), 2};
  if ((b0 >> 4) == 0xE && i + 2 < s.size()) {
    return {static_cast<char32_t>((b0 & 0x0F) << 12) | (cont(1) << 6) | cont(2), 3};
  }
  if ((b0 >> 3) == 0x1E && i + 3 < s.size()) {
    return {static_cast<char32_t>((b0 & 0x07) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3), 4};
  }
  return {0xFFFD, 1};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp < 0xC0) return false;                     // Latin-1 punctuation and symbols
  if (cp == 0xD7 || cp == 0xF7) return false;      // multiplication / division signs
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // general punctuation, symbols, arrows
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp == 0xFFFD || (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF01 && cp <= 0xFF0F)) return false;
  return true;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

char32_t lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(Tokens tokens, int n, int& total) {
  NgramCounts counts;
  total = 0;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
    ++total;
  }
  return counts;
}

Score average(std::span<const Score> scores) {
  if (scores.empty()) return Score::zero();
  Score sum;
  for (const Score& s : scores) {
    sum.precision += s.precision;
    sum.recall += s.recall;
    sum.f1 += s.f1;
  }
  const auto n = static_cast<double>(scores.size());
  return {sum.precision / n, sum.recall / n, sum.f1 / n};
}

}  // namespace

std::vector<std::string> metric_tokenize(std::string_view text) {
  std::vector<CodePoint> cps;
  for (std::size_t i = 0; i < text.size();) {
    CodePoint cp = decode(text, i);
    i += cp.length;
    cps.push_back(cp);
  }
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i].value;
    if (is_word_char(cp)) {
      encode(lower(cp), current);
      continue;
    }
    if (is_apostrophe(cp) && !current.empty() && i + 1 < cps.size() && is_word_char(cps[i + 1].value)) {
      encode(cp, current);
      continue;
    }
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

Score rouge_n(Tokens candidate, Tokens reference, int n) {
  if (n != 1 && n != 2) throw Error("rouge_n supports n = 1 or 2, got " + std::to_string(n));
  int cand_total = 0;
  int ref_total = 0;
  const NgramCounts cand = count_ngrams(candidate, n, cand_total);
  const NgramCounts ref = count_ngrams(reference, n, ref_total);
  if (cand_total == 0 && ref_total == 0) return Score::perfect();
  int overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  const double p = cand_total ? static_cast<double>(overlap) / cand_total : 0.0;
  const double r = ref_total ? static_cast<double>(overlap) / ref_total : 0.0;
  return Score::from(p, r);
}

std::size_t lcs_length(Tokens a, Tokens b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

Score rouge_l(Tokens candidate, Tokens reference) {
  if (candidate.empty() && reference.empty()) return Score::perfect();
  if (candidate.empty() || reference.empty()) return Score::zero();
  const auto l = static_cast<double>(lcs_length(candidate, reference));
  return Score::from(l / static_cast<double>(candidate.size()), l / static_cast<double>(reference.size()));
}

void TokenEmbeddings::validate() const {
  if (static_cast<std::size_t>(vectors.rows()) != tokens.size()) {
    throw Error("embeddings: " + std::to_string(tokens.size()) + " tokens but " +
                std::to_string(vectors.rows()) + " vectors");
  }
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    const double norm = vectors.row(i).norm();
    if (std::abs(norm - 1.0) > 1e-6) {
      throw Error("embeddings: vector " + std::to_string(i) + " has L2 norm " + std::to_string(norm));
    }
  }
}

Score semantic_score(const TokenEmbeddings& candidate, const TokenEmbeddings& reference) {
  if (candidate.vectors.rows() == 0 || reference.vectors.rows() == 0) {
    throw Error("semantic_score: both sides need at least one token vector");
  }
  if (candidate.dim() != reference.dim()) {
    throw Error("semantic_score: dimension mismatch (" + std::to_string(candidate.dim()) + " vs " +
                std::to_string(reference.dim()) + ")");
  }
  // Rows are unit vectors, so the Gram matrix holds the cosines.
  const Eigen::MatrixXd sim = (candidate.vectors * reference.vectors.transpose()).cwiseMax(0.0).cwiseMin(1.0);
  const double precision = sim.rowwise().maxCoeff().mean();
  const double recall = sim.colwise().maxCoeff().mean();
  return Score::from(precision, recall);
}

EmbeddingIndex read_embeddings(std::istream& in) {
  EmbeddingIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "embeddings line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(where + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("tokens") || !j.contains("vectors")) {
      throw Error(where + "expected an object with id, tokens and vectors");
    }
    TokenEmbeddings emb;
    try {
      emb.tokens = j.at("tokens").get<std::vector<std::string>>();
      const auto rows = j.at("vectors").get<std::vector<std::vector<double>>>();
      const std::size_t d = rows.empty() ? 0 : rows.front().size();
      emb.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != d) throw Error("vectors have mixed dimensions");
        for (std::size_t c = 0; c < d; ++c) {
          emb.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      emb.validate();
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + e.what());
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
    const auto id = j.at("id").get<std::string>();
    if (!index.emplace(id, std::move(emb)).second) throw Error(where + "duplicate id '" + id + "'");
  }
  if (!index.empty()) {
    const Eigen::Index d = index.begin()->second.dim();
    for (const auto& [id, emb] : index) {
      if (emb.dim() != d) throw Error("embeddings: '" + id + "' has dimension " + std::to_string(emb.dim()));
    }
  }
  return index;
}

namespace {

std::vector<AlignedPair> align_impl(std::span<const AtomicSentence> predicted, std::span<const std::string> gold,
                                    const TokenEmbeddings* pred_emb, const TokenEmbeddings* gold_emb) {
  if (predicted.empty() && gold.empty()) throw Error("align_atoms: both sides are empty");
  std::vector<std::vector<std::string>> ptoks;
  std::vector<std::vector<std::string>> gtoks;
  for (const auto& p : predicted) ptoks.push_back(metric_tokenize(p.text));
  for (const auto& g : gold) gtoks.push_back(metric_tokenize(g));

  const std::size_t np = predicted.size();
  const std::size_t ng = gold.size();
  std::vector<double> f1(np * ng);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < ng; ++j) f1[i * ng + j] = rouge_n(ptoks[i], gtoks[j], 1).f1;
  }

  std::vector<std::optional<std::size_t>> match(np);
  std::vector<bool> row_used(np, false);
  std::vector<bool> col_used(ng, false);
  for (std::size_t round = 0; round < std::min(np, ng); ++round) {
    double best = -1.0;
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < np; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < ng; ++j) {
        if (!col_used[j] && f1[i * ng + j] > best) {
          best = f1[i * ng + j];
          bi = i;
          bj = j;
        }
      }
    }
    row_used[bi] = true;
    col_used[bj] = true;
    match[bi] = bj;
  }

  auto scored = [&](std::optional<std::size_t> pi, std::optional<std::size_t> gi) {
    AlignedPair pair;
    pair.predicted_index = pi;
    pair.gold_index = gi;
    if (pi) pair.predicted = predicted[*pi];
    if (gi) pair.gold = gold[*gi];
    if (pi && gi) {
      pair.rouge1 = rouge_n(ptoks[*pi], gtoks[*gi], 1);
      pair.rouge2 = rouge_n(ptoks[*pi], gtoks[*gi], 2);
      pair.rougeL = rouge_l(ptoks[*pi], gtoks[*gi]);
      if (pred_emb) pair.semantic = semantic_score(pred_emb[*pi], gold_emb[*gi]);
    } else if (pred_emb) {
      pair.semantic = Score::zero();
    }
    return pair;
  };

  std::vector<AlignedPair> pairs;
  for (std::size_t i = 0; i < np; ++i) pairs.push_back(scored(i, match[i]));
  for (std::size_t j = 0; j < ng; ++j) {
    if (!col_used[j]) pairs.push_back(scored(std::nullopt, j));
  }
  return pairs;
}

}  // namespace

std::vector<AlignedPair> align_atoms(std::span<const AtomicSentence> predicted, std::span<const std::string> gold) {
  return align_impl(predicted, gold, nullptr, nullptr);
}

std::vector<AlignedPair> align_atoms(std::span<const AtomicSentence> predicted, std::span<const std::string> gold,
                                     std::span<const TokenEmbeddings> predicted_embeddings,
                                     std::span<const TokenEmbeddings> gold_embeddings) {
  if (predicted_embeddings.size() != predicted.size() || gold_embeddings.size() != gold.size()) {
    throw Error("align_atoms: embedding lists must parallel the atom lists");
  }
  return align_impl(predicted, gold, predicted_embeddings.data(), gold_embeddings.data());
}

CorpusScores corpus_scores(std::span<const AlignedPair> pairs) {
  if (pairs.empty()) throw Error("corpus_scores: no pairs");
  auto table = [](const std::vector<const AlignedPair*>& subset) {
    MetricTable t;
    t.pairs = subset.size();
    std::vector<Score> r1, r2, rl, sem;
    bool all_semantic = true;
    for (const AlignedPair* p : subset) {
      r1.push_back(p->rouge1);
      r2.push_back(p->rouge2);
      rl.push_back(p->rougeL);
      if (p->semantic) {
        sem.push_back(*p->semantic);
      } else {
        all_semantic = false;
      }
    }
    t.rouge1 = average(r1);
    t.rouge2 = average(r2);
    t.rougeL = average(rl);
    if (all_semantic && !sem.empty()) t.semantic = average(sem);
    return t;
  };
  std::vector<const AlignedPair*> all;
  std::vector<const AlignedPair*> matched;
  for (const AlignedPair& p : pairs) {
    all.push_back(&p);
    if (p.matched()) matched.push_back(&p);
  }
  CorpusScores out;
  out.all_pairs = table(all);
  if (!matched.empty()) out.matched_pairs = table(matched);
  return out;
}

CorpusStats length_verb_stats(std::span<const TaggedAtom> atoms) {
  if (atoms.empty()) throw Error("length_verb_stats: no atoms");
  double tokens = 0.0;
  double verbs = 0.0;
  for (const TaggedAtom& a : atoms) {
    if (a.tokens.size() != a.upos.size()) throw Error("length_verb_stats: tokens and tags are not aligned");
    tokens += static_cast<double>(a.tokens.size());
    verbs += static_cast<double>(std::count(a.upos.begin(), a.upos.end(), "VERB"));
  }
  const auto n = static_cast<double>(atoms.size());
  return {tokens / n, verbs / n, atoms.size()};
}

}  // namespace atomsplit
