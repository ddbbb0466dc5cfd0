#include "atomsplit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace atomsplit {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

bool parse_bool(const std::string& v, bool& out) {
  const std::string l = to_lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") {
    out = true;
    return true;
  }
  if (l == "false" || l == "0" || l == "no" || l == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_positive(const std::string& v, int& out) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(v, &used);
    if (used != v.size()) return false;
    out = value;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

TaggedAtom tag_model_atom(const DepTree& tree, const AtomicSentence& atom) {
  TaggedAtom out;
  for (const AtomToken& t : atom.tokens) {
    const Token& tok = tree.token(t.id);
    for (auto& w : metric_tokenize(tok.form)) {
      out.tokens.push_back(std::move(w));
      out.upos.push_back(tok.upos);
    }
  }
  return out;
}

// Gold atoms carry no tags; each word takes the tag of its first occurrence
// in the source parse, "X" when the parse never uses it.
TaggedAtom tag_gold_atom(const std::unordered_map<std::string, std::string>& lexicon, const std::string& atom) {
  TaggedAtom out;
  out.tokens = metric_tokenize(atom);
  for (const auto& w : out.tokens) {
    auto it = lexicon.find(w);
    out.upos.push_back(it == lexicon.end() ? "X" : it->second);
  }
  return out;
}

nlohmann::ordered_json score_json(const Score& s) {
  nlohmann::ordered_json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f1"] = s.f1;
  return j;
}

nlohmann::ordered_json table_json(const MetricTable& t, bool semantic) {
  nlohmann::ordered_json j;
  j["pairs"] = t.pairs;
  if (semantic) {
    j["semantic"] = t.semantic ? score_json(*t.semantic) : nlohmann::ordered_json(nullptr);
  } else {
    j["rouge1"] = score_json(t.rouge1);
    j["rouge2"] = score_json(t.rouge2);
    j["rougeL"] = score_json(t.rougeL);
  }
  return j;
}

nlohmann::ordered_json stats_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["atom_count"] = s.atom_count;
  j["avg_tokens_per_atom"] = s.avg_tokens_per_atom;
  j["avg_verbs_per_atom"] = s.avg_verbs_per_atom;
  return j;
}

nlohmann::ordered_json rules_json(const std::vector<RuleApplication>& rules) {
  auto arr = nlohmann::ordered_json::array();
  for (const RuleApplication& r : rules) {
    nlohmann::ordered_json j;
    j["rule"] = std::string(to_string(r.rule));
    j["anchor"] = r.anchor;
    arr.push_back(std::move(j));
  }
  return arr;
}

bool has_semantic(const EvalReport& report) { return report.scores.all_pairs.semantic.has_value(); }

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

void render_table(std::ostringstream& out, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
      }
    }
    out << '\n';
  };
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  total += 2 * (width.size() - 1);
  out << std::string(total, '-') << '\n';
  line(header);
  out << std::string(total, '-') << '\n';
  for (const auto& row : rows) line(row);
  out << std::string(total, '-') << '\n';
}

}  // namespace

std::vector<GoldRecord> read_gold(std::istream& in) {
  std::vector<GoldRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "gold line " + std::to_string(line_no) + ": ";
    GoldRecord rec;
    try {
      const auto j = nlohmann::json::parse(line);
      rec.id = j.at("id").get<std::string>();
      rec.source = j.at("source").get<std::string>();
      rec.atoms = j.at("atoms").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + e.what());
    }
    if (rec.id.empty()) throw InputError(where + "empty id");
    if (trim(rec.source).empty()) throw InputError(where + "empty source sentence");
    if (rec.atoms.empty()) throw InputError(where + "no gold atoms");
    for (const auto& a : rec.atoms) {
      if (trim(a).empty()) throw InputError(where + "empty gold atom");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

WikiSplitCorpus ingest_wikisplit(std::istream& in, std::string_view separator) {
  WikiSplitCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      ++corpus.skipped_lines;
      continue;
    }
    corpus.sources.push_back(trim(std::string_view(line).substr(0, tab)));
    std::vector<std::string> simple;
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (true) {
      const auto pos = separator.empty() ? std::string_view::npos : rest.find(separator);
      std::string part = trim(rest.substr(0, pos));
      if (!part.empty()) simple.push_back(std::move(part));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + separator.size());
    }
    corpus.simple_sides.push_back(std::move(simple));
  }
  return corpus;
}

std::vector<std::string> normalize_corpus(std::span<const std::string> sources) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : sources) {
    std::string l = to_lower(s);
    if (seen.insert(l).second) out.push_back(std::move(l));
  }
  return out;
}

SplitConfig read_split_config(std::istream& in) {
  SplitConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(where + "expected key=value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    bool ok = false;
    if (key == "enable_appositive_rule") {
      ok = parse_bool(value, config.enable_appositive_rule);
    } else if (key == "keep_subordinator") {
      ok = parse_bool(value, config.keep_subordinator);
    } else if (key == "max_atoms_per_sentence") {
      ok = parse_positive(value, config.max_atoms_per_sentence) && config.max_atoms_per_sentence >= 1;
    } else if (key == "min_atom_tokens") {
      ok = parse_positive(value, config.min_atom_tokens) && config.min_atom_tokens >= 1;
    } else {
      throw InputError(where + "unknown key '" + key + "'");
    }
    if (!ok) throw InputError(where + "bad value '" + value + "' for " + key);
  }
  return config;
}

std::string predicted_atom_id(std::string_view sent_id, std::size_t index) {
  return std::string(sent_id) + "#p" + std::to_string(index + 1);
}

std::string gold_atom_id(std::string_view sent_id, std::size_t index) {
  return std::string(sent_id) + "#g" + std::to_string(index + 1);
}

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  std::size_t j = 0;
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      auto na = a.substr(i, ie - i);
      auto nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

EvalReport evaluate(const PipelineInputs& inputs) {
  inputs.config.validate();
  std::map<std::string, const DepTree*> by_id;
  for (const DepTree& t : inputs.trees) {
    if (!by_id.emplace(t.sent_id(), &t).second) throw InputError("duplicate sent_id '" + t.sent_id() + "' in parses");
  }
  std::vector<const GoldRecord*> records;
  std::vector<std::string> unmatched;
  std::unordered_set<std::string> gold_ids;
  for (const GoldRecord& g : inputs.gold) {
    if (!gold_ids.insert(g.id).second) throw InputError("duplicate gold id '" + g.id + "'");
    if (!by_id.count(g.id)) unmatched.push_back(g.id);
    records.push_back(&g);
  }
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& id : unmatched) list += (list.empty() ? "" : ", ") + id;
    throw InputError("gold ids without a parse: " + list);
  }
  if (records.empty()) throw InputError("gold file has no records");
  std::sort(records.begin(), records.end(),
            [](const GoldRecord* a, const GoldRecord* b) { return natural_less(a->id, b->id); });

  EvalReport report;
  report.config = inputs.config;
  report.unused_parses = inputs.trees.size() - records.size();
  report.sentences.resize(records.size());

  auto lookup = [&](const std::string& id) -> const TokenEmbeddings& {
    auto it = inputs.embeddings->find(id);
    if (it == inputs.embeddings->end()) throw InputError("no embeddings for atom '" + id + "'");
    return it->second;
  };

  auto process = [&](std::size_t k) {
    const GoldRecord& rec = *records[k];
    const DepTree& tree = *by_id.at(rec.id);
    SentenceResult& out = report.sentences[k];
    out.sent_id = rec.id;
    out.gold = rec.atoms;
    SplitResult split_result = split(tree, inputs.config);
    out.atoms = std::move(split_result.atoms);
    out.discarded = std::move(split_result.discarded);
    if (inputs.embeddings) {
      std::vector<TokenEmbeddings> pe;
      std::vector<TokenEmbeddings> ge;
      for (std::size_t i = 0; i < out.atoms.size(); ++i) pe.push_back(lookup(predicted_atom_id(rec.id, i)));
      for (std::size_t i = 0; i < rec.atoms.size(); ++i) ge.push_back(lookup(gold_atom_id(rec.id, i)));
      out.pairs = align_atoms(out.atoms, rec.atoms, pe, ge);
    } else {
      out.pairs = align_atoms(out.atoms, rec.atoms);
    }
    for (const AlignedPair& p : out.pairs) {
      out.labels.push_back(p.gold ? std::optional<ErrorLabel>(classify_error(p, tree)) : std::nullopt);
    }
    std::unordered_map<std::string, std::string> lexicon;
    for (const Token& t : tree.tokens()) {
      for (const auto& w : metric_tokenize(t.form)) lexicon.emplace(w, t.upos);
    }
    for (const AtomicSentence& a : out.atoms) out.model_tagged.push_back(tag_model_atom(tree, a));
    for (const std::string& g : rec.atoms) out.gold_tagged.push_back(tag_gold_atom(lexicon, g));
  };

  // Workers pull sentence indices; each writes only its own slot.
  unsigned threads = inputs.threads ? inputs.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(records.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(records.size());
  auto worker = [&] {
    for (std::size_t k = next++; k < records.size(); k = next++) {
      try {
        process(k);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<AlignedPair> pairs;
  std::vector<ErrorLabel> labels;
  std::vector<TaggedAtom> model_tagged;
  std::vector<TaggedAtom> gold_tagged;
  for (const SentenceResult& s : report.sentences) {
    pairs.insert(pairs.end(), s.pairs.begin(), s.pairs.end());
    for (const auto& l : s.labels) {
      if (l) labels.push_back(*l);
    }
    model_tagged.insert(model_tagged.end(), s.model_tagged.begin(), s.model_tagged.end());
    gold_tagged.insert(gold_tagged.end(), s.gold_tagged.begin(), s.gold_tagged.end());
  }
  report.scores = corpus_scores(pairs);
  if (!model_tagged.empty()) report.model_stats = length_verb_stats(model_tagged);
  report.gold_stats = length_verb_stats(gold_tagged);
  report.errors = error_distribution(labels);

  std::vector<DepTree> used;
  for (const GoldRecord* r : records) used.push_back(*by_id.at(r->id));
  if (auto violations = check_report(report, used); !violations.empty()) {
    std::string msg = "invariant violations:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw InvariantError(msg);
  }
  return report;
}

EvalReport run_pipeline(const PipelinePaths& paths) {
  PipelineInputs inputs;
  {
    auto in = open_or_throw(paths.conllu);
    inputs.trees = parse_conllu(in);
  }
  {
    auto in = open_or_throw(paths.gold);
    inputs.gold = read_gold(in);
  }
  if (paths.config) {
    auto in = open_or_throw(*paths.config);
    inputs.config = read_split_config(in);
  }
  if (paths.embeddings) {
    auto in = open_or_throw(*paths.embeddings);
    inputs.embeddings = read_embeddings(in);
  }
  inputs.threads = paths.threads;
  return evaluate(inputs);
}

nlohmann::ordered_json atom_to_json(const AtomicSentence& atom, const std::string& id) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["sent_id"] = atom.source_sent_id;
  j["text"] = atom.text;
  j["clause_root"] = atom.clause_root;
  auto tokens = nlohmann::ordered_json::array();
  auto copied = nlohmann::ordered_json::array();
  for (const AtomToken& t : atom.tokens) {
    tokens.push_back(t.id);
    if (t.copied) copied.push_back(t.id);
  }
  j["tokens"] = std::move(tokens);
  j["copied"] = std::move(copied);
  j["rules"] = rules_json(atom.rules);
  return j;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json config;
  config["enable_appositive_rule"] = report.config.enable_appositive_rule;
  config["keep_subordinator"] = report.config.keep_subordinator;
  config["max_atoms_per_sentence"] = report.config.max_atoms_per_sentence;
  config["min_atom_tokens"] = report.config.min_atom_tokens;
  j["config"] = std::move(config);

  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t discarded = 0;
  for (const auto& s : report.sentences) {
    predicted += s.atoms.size();
    gold += s.gold.size();
    discarded += s.discarded.size();
  }
  nlohmann::ordered_json corpus;
  corpus["sentences"] = report.sentences.size();
  corpus["unused_parses"] = report.unused_parses;
  corpus["predicted_atoms"] = predicted;
  corpus["gold_atoms"] = gold;
  corpus["discarded_atoms"] = discarded;
  corpus["pairs"] = report.scores.all_pairs.pairs;
  corpus["matched_pairs"] = report.scores.matched_pairs ? report.scores.matched_pairs->pairs : 0;
  j["corpus"] = std::move(corpus);

  nlohmann::ordered_json rouge;
  rouge["macro_all_pairs"] = table_json(report.scores.all_pairs, false);
  rouge["macro_matched_pairs"] =
      report.scores.matched_pairs ? table_json(*report.scores.matched_pairs, false) : nlohmann::ordered_json(nullptr);
  j["rouge"] = std::move(rouge);

  if (has_semantic(report)) {
    nlohmann::ordered_json sem;
    sem["macro_all_pairs"] = table_json(report.scores.all_pairs, true);
    sem["macro_matched_pairs"] =
        report.scores.matched_pairs ? table_json(*report.scores.matched_pairs, true) : nlohmann::ordered_json(nullptr);
    j["semantic"] = std::move(sem);
  } else {
    j["semantic"] = nullptr;
  }

  nlohmann::ordered_json stats;
  stats["model"] = stats_json(report.model_stats);
  stats["gold"] = stats_json(report.gold_stats);
  j["stats"] = std::move(stats);

  nlohmann::ordered_json errors;
  errors["labeled_pairs"] = report.errors.total;
  errors["errors"] = report.errors.errors;
  nlohmann::ordered_json counts;
  for (const auto& [label, n] : report.errors.counts) counts[std::string(to_string(label))] = n;
  errors["counts"] = std::move(counts);
  nlohmann::ordered_json props = nlohmann::ordered_json::object();
  for (const auto& [label, p] : report.errors.proportions) props[std::string(to_string(label))] = p;
  errors["proportions"] = std::move(props);
  j["errors"] = std::move(errors);

  auto sentences = nlohmann::ordered_json::array();
  for (const SentenceResult& s : report.sentences) {
    nlohmann::ordered_json sj;
    sj["id"] = s.sent_id;
    auto atoms = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.atoms.size(); ++i) atoms.push_back(atom_to_json(s.atoms[i], predicted_atom_id(s.sent_id, i)));
    sj["atoms"] = std::move(atoms);
    auto disc = nlohmann::ordered_json::array();
    for (const DiscardedAtom& d : s.discarded) {
      nlohmann::ordered_json dj;
      dj["clause_root"] = d.clause_root;
      dj["rules"] = rules_json(d.rules);
      dj["reason"] = d.reason;
      disc.push_back(std::move(dj));
    }
    sj["discarded"] = std::move(disc);
    auto pairs = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      const AlignedPair& p = s.pairs[k];
      nlohmann::ordered_json pj;
      pj["predicted_id"] = p.predicted_index ? nlohmann::ordered_json(predicted_atom_id(s.sent_id, *p.predicted_index))
                                             : nlohmann::ordered_json(nullptr);
      pj["gold_id"] = p.gold_index ? nlohmann::ordered_json(gold_atom_id(s.sent_id, *p.gold_index))
                                   : nlohmann::ordered_json(nullptr);
      pj["predicted"] = p.predicted ? nlohmann::ordered_json(p.predicted->text) : nlohmann::ordered_json(nullptr);
      pj["gold"] = p.gold ? nlohmann::ordered_json(*p.gold) : nlohmann::ordered_json(nullptr);
      pj["rouge1"] = score_json(p.rouge1);
      pj["rouge2"] = score_json(p.rouge2);
      pj["rougeL"] = score_json(p.rougeL);
      pj["semantic"] = p.semantic ? score_json(*p.semantic) : nlohmann::ordered_json(nullptr);
      pj["label"] = s.labels[k] ? nlohmann::ordered_json(std::string(to_string(*s.labels[k])))
                                : nlohmann::ordered_json(nullptr);
      pj["rules"] = p.predicted ? rules_json(p.predicted->rules) : nlohmann::ordered_json::array();
      pairs.push_back(std::move(pj));
    }
    sj["pairs"] = std::move(pairs);
    sentences.push_back(std::move(sj));
  }
  j["sentences"] = std::move(sentences);
  return j;
}

std::string render_text(const EvalReport& report) {
  std::ostringstream out;
  const auto& corpus = report.scores;
  out << "Sentences: " << report.sentences.size() << "   pairs: " << corpus.all_pairs.pairs
      << "   matched pairs: " << (corpus.matched_pairs ? corpus.matched_pairs->pairs : 0) << "\n\n";

  auto rouge_rows = [](const MetricTable& t) {
    return std::vector<std::vector<std::string>>{
        {"ROUGE-1", fixed(t.rouge1.precision), fixed(t.rouge1.recall), fixed(t.rouge1.f1)},
        {"ROUGE-2", fixed(t.rouge2.precision), fixed(t.rouge2.recall), fixed(t.rouge2.f1)},
        {"ROUGE-L", fixed(t.rougeL.precision), fixed(t.rougeL.recall), fixed(t.rougeL.f1)},
    };
  };
  out << "Table 1. ROUGE, macro-average over all pairs (unmatched atoms score 0)\n";
  render_table(out, {"Metric", "Precision", "Recall", "F1"}, rouge_rows(corpus.all_pairs));
  if (corpus.matched_pairs) {
    out << "\nTable 1b. ROUGE, macro-average over matched pairs only\n";
    render_table(out, {"Metric", "Precision", "Recall", "F1"}, rouge_rows(*corpus.matched_pairs));
  }

  out << "\nTable 2. Semantic similarity (greedy embedding matching)\n";
  if (has_semantic(report)) {
    std::vector<std::vector<std::string>> rows;
    const Score& a = *corpus.all_pairs.semantic;
    rows.push_back({"Semantic (all pairs)", fixed(a.precision), fixed(a.recall), fixed(a.f1)});
    if (corpus.matched_pairs && corpus.matched_pairs->semantic) {
      const Score& m = *corpus.matched_pairs->semantic;
      rows.push_back({"Semantic (matched pairs)", fixed(m.precision), fixed(m.recall), fixed(m.f1)});
    }
    render_table(out, {"Metric", "Precision", "Recall", "F1"}, rows);
  } else {
    out << "(not computed: no embeddings supplied)\n";
  }

  out << "\nTable 3. Length and verb count per atom\n";
  render_table(out, {"Measure", "Model-Produced", "Gold Standard"},
               {{"Atoms", std::to_string(report.model_stats.atom_count), std::to_string(report.gold_stats.atom_count)},
                {"Average atom length (tokens)", fixed(report.model_stats.avg_tokens_per_atom),
                 fixed(report.gold_stats.avg_tokens_per_atom)},
                {"Average verbs per atom", fixed(report.model_stats.avg_verbs_per_atom),
                 fixed(report.gold_stats.avg_verbs_per_atom)}});

  out << "\nTable 4. Error types (" << report.errors.errors << " errors among " << report.errors.total
      << " pairs with a gold atom)\n";
  std::vector<std::pair<ErrorLabel, std::size_t>> ranked;
  for (const auto& [label, n] : report.errors.counts) {
    if (label != ErrorLabel::Correct) ranked.emplace_back(label, n);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::vector<std::string>> rows;
  for (const auto& [label, n] : ranked) {
    auto it = report.errors.proportions.find(label);
    rows.push_back({std::string(to_string(label)), std::to_string(n),
                    fixed(it == report.errors.proportions.end() ? 0.0 : it->second, 6)});
  }
  rows.push_back({"Correct (excluded)", std::to_string(report.errors.counts.at(ErrorLabel::Correct)), "-"});
  render_table(out, {"Error Type", "Count", "Proportion of Errors"}, rows);
  return out.str();
}

std::vector<std::string> check_report(const EvalReport& report, std::span<const DepTree> trees) {
  std::vector<std::string> v;
  std::map<std::string, const DepTree*> by_id;
  for (const DepTree& t : trees) by_id.emplace(t.sent_id(), &t);
  auto in_range = [](const Score& s) {
    for (double x : {s.precision, s.recall, s.f1}) {
      if (!(x >= 0.0 && x <= 1.0)) return false;
    }
    return true;
  };
  std::vector<AlignedPair> all;
  for (const SentenceResult& s : report.sentences) {
    auto it = by_id.find(s.sent_id);
    if (it == by_id.end()) {
      v.push_back(s.sent_id + ": no parse");
      continue;
    }
    const DepTree& tree = *it->second;
    for (const AtomicSentence& a : s.atoms) {
      if (a.text.empty()) v.push_back(s.sent_id + ": empty atom");
      std::string text;
      for (const AtomToken& t : a.tokens) {
        if (!tree.contains(t.id)) {
          v.push_back(s.sent_id + ": atom uses unknown token " + std::to_string(t.id));
          continue;
        }
        if (!text.empty()) text += ' ';
        text += tree.token(t.id).form;
      }
      if (to_lower(text) != a.text) v.push_back(s.sent_id + ": atom text does not match its tokens");
    }
    if (s.pairs.size() != s.labels.size()) v.push_back(s.sent_id + ": label count mismatch");
    for (const AlignedPair& p : s.pairs) {
      if (!p.predicted && !p.gold) v.push_back(s.sent_id + ": pair with two empty sides");
      if (!in_range(p.rouge1) || !in_range(p.rouge2) || !in_range(p.rougeL) || (p.semantic && !in_range(*p.semantic))) {
        v.push_back(s.sent_id + ": score outside [0,1]");
      }
      all.push_back(p);
    }
  }
  if (!all.empty()) {
    const CorpusScores again = corpus_scores(all);
    auto same = [](const Score& a, const Score& b) {
      return std::abs(a.precision - b.precision) <= 1e-12 && std::abs(a.recall - b.recall) <= 1e-12 &&
             std::abs(a.f1 - b.f1) <= 1e-12;
    };
    if (!same(again.all_pairs.rouge1, report.scores.all_pairs.rouge1) ||
        !same(again.all_pairs.rouge2, report.scores.all_pairs.rouge2) ||
        !same(again.all_pairs.rougeL, report.scores.all_pairs.rougeL)) {
      v.push_back("corpus table does not match per-pair rows");
    }
  }
  return v;
}

}  // namespace atomsplit
