// Shared helpers for loading the checked-in fixture files.
#ifndef ATOMSPLIT_TESTS_FIXTURES_HPP
#define ATOMSPLIT_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomsplit/depgraph.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(ATOMSPLIT_TEST_DATA) + "/" + name; }

inline std::string slurp(const std::string& name) {
  std::ifstream in(path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<atomsplit::DepTree> trees(const std::string& name) {
  return atomsplit::parse_conllu_string(slurp(name));
}

inline const atomsplit::DepTree& find(const std::vector<atomsplit::DepTree>& all, const std::string& id) {
  for (const auto& t : all) {
    if (t.sent_id() == id) return t;
  }
  throw std::runtime_error("no tree " + id);
}

// One CoNLL-U token line; lemma is the lowercased form.
inline std::string row(int id, const std::string& form, const std::string& upos, int head, const std::string& rel) {
  return std::to_string(id) + "\t" + form + "\t" + atomsplit::to_lower(form) + "\t" + upos + "\t_\t_\t" +
         std::to_string(head) + "\t" + rel + "\t_\t_\n";
}

}  // namespace fixtures

#endif
