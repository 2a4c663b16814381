// Writes the synthetic evaluation corpus: synth_corpus <output> [documents] [seed]

#include <cstdlib>
#include <iostream>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: synth_corpus <output.jsonl|output.csv> [documents] [seed]\n";
    return 2;
  }
  textclf::testing::SyntheticSpec spec;
  if (argc > 2) spec.documents = std::strtoull(argv[2], nullptr, 10);
  if (argc > 3) spec.seed = std::strtoull(argv[3], nullptr, 10);
  const std::filesystem::path out = argv[1];
  textclf::save_corpus(textclf::testing::synthetic_corpus(spec), out, textclf::format_for_path(out));
  return 0;
}
