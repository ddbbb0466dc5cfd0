// Corpus ingestion, the split -> align -> score -> classify pipeline, and
// report rendering (JSON + plain-text tables).
#ifndef ATOMSPLIT_PIPELINE_HPP
#define ATOMSPLIT_PIPELINE_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "atomsplit/depgraph.hpp"
#include "atomsplit/diagnostics.hpp"
#include "atomsplit/metrics.hpp"
#include "atomsplit/splitter.hpp"

namespace atomsplit {

/// Bad user input (missing file, malformed gold line, id join failure).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A finished run broke one of its own invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

struct GoldRecord {
  std::string id;
  std::string source;
  std::vector<std::string> atoms;
};

/// JSON Lines, one {"id", "source", "atoms"} object per line.
std::vector<GoldRecord> read_gold(std::istream& in);

struct WikiSplitCorpus {
  std::vector<std::string> sources;
  std::vector<std::vector<std::string>> simple_sides;  // parallel to `sources`
  std::size_t skipped_lines = 0;                       // lines without a TAB
};

/// "complex<TAB>simple<sep>simple..." per line; blank lines are ignored.
WikiSplitCorpus ingest_wikisplit(std::istream& in, std::string_view separator = "<::>");

/// Lowercases and drops repeats, keeping the first occurrence.
std::vector<std::string> normalize_corpus(std::span<const std::string> sources);

/// Flat key=value file; `#` starts a comment. Unknown keys are an error.
SplitConfig read_split_config(std::istream& in);

std::string predicted_atom_id(std::string_view sent_id, std::size_t index);
std::string gold_atom_id(std::string_view sent_id, std::size_t index);

struct SentenceResult {
  std::string sent_id;
  std::vector<AtomicSentence> atoms;
  std::vector<DiscardedAtom> discarded;
  std::vector<std::string> gold;
  std::vector<AlignedPair> pairs;
  std::vector<std::optional<ErrorLabel>> labels;  // parallel to `pairs`; none without a gold side
  std::vector<TaggedAtom> model_tagged;
  std::vector<TaggedAtom> gold_tagged;
};

struct EvalReport {
  SplitConfig config;
  std::size_t unused_parses = 0;
  std::vector<SentenceResult> sentences;  // ordered by sentence id
  CorpusScores scores;
  CorpusStats model_stats;
  CorpusStats gold_stats;
  ErrorDistribution errors;
};

struct PipelineInputs {
  std::vector<DepTree> trees;
  std::vector<GoldRecord> gold;
  SplitConfig config;
  std::optional<EmbeddingIndex> embeddings;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Runs every stage. Throws InputError listing gold ids without a parse and
/// InvariantError when check_report() finds a violation.
EvalReport evaluate(const PipelineInputs& inputs);

struct PipelinePaths {
  std::filesystem::path conllu;
  std::filesystem::path gold;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> embeddings;
  unsigned threads = 0;
};

EvalReport run_pipeline(const PipelinePaths& paths);

/// Orders "s2" before "s10": digit runs compare numerically.
bool natural_less(std::string_view a, std::string_view b);

nlohmann::ordered_json atom_to_json(const AtomicSentence& atom, const std::string& id);
nlohmann::ordered_json report_to_json(const EvalReport& report);
std::string render_text(const EvalReport& report);

/// Invariant violations found in a finished report (scores out of range,
/// atoms not traceable to their tree, tables not matching rows).
std::vector<std::string> check_report(const EvalReport& report, std::span<const DepTree> trees);

}  // namespace atomsplit

#endif  // ATOMSPLIT_PIPELINE_HPP
