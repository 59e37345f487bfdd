#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "hwb/textio.hpp"

namespace hwb::test {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string corpus_path(const std::string& name) { return std::string(HWB_CORPUS_DIR) + "/" + name; }

inline Document load_corpus(const std::string& name) { return parse_document(read_file(corpus_path(name))); }

inline const char* kCorpusFiles[] = {
    "sound.hwb",
    "fo_interpolation.hwb",
    "classic.hwb",
    "empty.hwb",
    "positive_squares.hwb",
    "lemma_preservation.hwb",
    "lemma_sort_injectivity.hwb",
    "lemma_op_injectivity_surjectivity.hwb",
    "lemma_op_surjectivity.hwb",
};

}  // namespace hwb::test
