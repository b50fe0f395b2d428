// claimspot-synth: writes the deterministic synthetic fixtures used by the
// tests and the bundled example configs.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "claimspot/error.hpp"
#include "claimspot/synthetic.hpp"

namespace cs = claimspot;

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic claim-detection fixtures"};
  std::string out_dir = "data";
  std::size_t n = 1000, n_multiclass = 700, n_annotated = 300, n_transcript = 100, lexicon_dim = 25;
  double claim_fraction = 0.3, agreement = 0.8;
  std::uint64_t seed = 42;
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--n", n, "Sentences in the binary corpus");
  app.add_option("--claim-fraction", claim_fraction, "Share of claims in the binary corpus");
  app.add_option("--n-multiclass", n_multiclass, "Sentences in the seven-way corpus");
  app.add_option("--n-annotated", n_annotated, "Sentences in the annotation fixture");
  app.add_option("--agreement", agreement, "Chance each vote matches the latent category");
  app.add_option("--n-transcript", n_transcript, "Sentences in the transcript fixture");
  app.add_option("--lexicon-dim", lexicon_dim, "Embedding dimension");
  app.add_option("--seed", seed, "Seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    cs::save_labeled_dataset(dir / "synthetic_corpus.jsonl", cs::synthetic::labeled_corpus(n, claim_fraction, seed));
    cs::save_labeled_dataset(dir / "synthetic_multiclass.jsonl", cs::synthetic::multiclass_corpus(n_multiclass, seed));
    const auto annotated = cs::synthetic::annotation_corpus(n_annotated, agreement, seed);
    cs::save_sentences(dir / "annotated_sentences.jsonl", annotated.sentences);
    cs::save_annotations(dir / "annotations.jsonl", annotated.annotations);
    {
      std::ofstream out(dir / "lexicon.txt");
      out << cs::synthetic::lexicon_text(lexicon_dim, seed);
    }
    {
      std::ofstream out(dir / "transcript.txt");
      for (const auto& s : cs::synthetic::transcript_sentences(n_transcript, seed)) out << s << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
