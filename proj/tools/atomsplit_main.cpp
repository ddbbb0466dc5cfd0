// atomsplit: split dependency-parsed sentences into atomic sentences and
// evaluate them against gold atoms.
//
//   atomsplit split  --in parsed.conllu [--config split.conf] [--out atoms.jsonl]
//   atomsplit eval   --conllu parsed.conllu --gold gold.jsonl [--config ...]
//                    [--embeddings emb.jsonl] [--report r.json] [--report-text r.txt]
//   atomsplit ingest --in wikisplit.tsv [--separator "<::>"] [--out sources.txt]
//
// Exit status: 0 success, 1 input error, 2 invariant violation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "atomsplit/pipeline.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInvariant = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw atomsplit::InputError("cannot open '" + path + "'");
  return in;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw atomsplit::InputError("cannot write '" + path + "'");
  out << content;
}

atomsplit::SplitConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  auto in = open_input(path);
  return atomsplit::read_split_config(in);
}

int run_split(const std::string& in_path, const std::string& config_path, const std::string& out_path) {
  const auto config = load_config(config_path);
  config.validate();
  auto in = open_input(in_path);
  const auto trees = atomsplit::parse_conllu(in);
  std::string out;
  std::size_t discarded = 0;
  for (const auto& tree : trees) {
    const auto result = atomsplit::split(tree, config);
    for (std::size_t i = 0; i < result.atoms.size(); ++i) {
      out += atomsplit::atom_to_json(result.atoms[i], atomsplit::predicted_atom_id(tree.sent_id(), i)).dump();
      out += '\n';
    }
    for (const auto& d : result.discarded) {
      ++discarded;
      std::cerr << "warning: " << tree.sent_id() << ": clause at token " << d.clause_root << " discarded ("
                << d.reason << ")\n";
    }
  }
  write_output(out_path, out);
  std::cerr << trees.size() << " sentences, " << discarded << " discarded clauses\n";
  return 0;
}

int run_eval(const atomsplit::PipelinePaths& paths, const std::string& report_path, const std::string& text_path) {
  const auto report = atomsplit::run_pipeline(paths);
  const std::string json = atomsplit::report_to_json(report).dump(2) + "\n";
  const std::string text = atomsplit::render_text(report);
  if (!report_path.empty()) write_output(report_path, json);
  if (!text_path.empty()) write_output(text_path, text);
  if (report_path.empty() && text_path.empty()) std::cout << text;
  return 0;
}

int run_ingest(const std::string& in_path, const std::string& separator, const std::string& out_path) {
  auto in = open_input(in_path);
  const auto corpus = atomsplit::ingest_wikisplit(in, separator);
  const auto sources = atomsplit::normalize_corpus(corpus.sources);
  std::string out;
  for (const auto& s : sources) out += s + '\n';
  write_output(out_path, out);
  std::cerr << corpus.sources.size() << " lines read, " << sources.size() << " unique sources, "
            << corpus.skipped_lines << " lines skipped (no TAB)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-based atomic sentence extraction and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string in_path;
  std::string out_path;

  auto* split_cmd = app.add_subcommand("split", "CoNLL-U in, atoms JSONL out");
  split_cmd->add_option("--in,input", in_path, "CoNLL-U file")->required();
  split_cmd->add_option("--config", config_path, "key=value split configuration");
  split_cmd->add_option("--out", out_path, "atoms JSONL (default stdout)");

  std::string conllu_path;
  std::string gold_path;
  std::string embeddings_path;
  std::string report_path;
  std::string text_path;
  unsigned threads = 0;
  auto* eval_cmd = app.add_subcommand("eval", "split, align, score, classify and report");
  eval_cmd->add_option("--conllu", conllu_path, "CoNLL-U parses")->required();
  eval_cmd->add_option("--gold", gold_path, "gold atoms JSONL")->required();
  eval_cmd->add_option("--config", config_path, "key=value split configuration");
  eval_cmd->add_option("--embeddings", embeddings_path, "token embeddings JSONL");
  eval_cmd->add_option("--report", report_path, "JSON report path");
  eval_cmd->add_option("--report-text", text_path, "plain-text report path");
  eval_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

  std::string separator = "<::>";
  auto* ingest_cmd = app.add_subcommand("ingest", "WikiSplit TSV to a deduplicated source list");
  ingest_cmd->add_option("--in,input", in_path, "WikiSplit TSV file")->required();
  ingest_cmd->add_option("--separator", separator, "separator between simple sentences");
  ingest_cmd->add_option("--out", out_path, "sources file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*split_cmd) return run_split(in_path, config_path, out_path);
    if (*eval_cmd) {
      atomsplit::PipelinePaths paths;
      paths.conllu = conllu_path;
      paths.gold = gold_path;
      if (!config_path.empty()) paths.config = config_path;
      if (!embeddings_path.empty()) paths.embeddings = embeddings_path;
      paths.threads = threads;
      return run_eval(paths, report_path, text_path);
    }
    if (*ingest_cmd) return run_ingest(in_path, separator, out_path);
  } catch (const atomsplit::InvariantError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const atomsplit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
