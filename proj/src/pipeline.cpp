#include "seqbirds/pipeline.hpp"

#include "seqbirds/synth.hpp"
#include "seqbirds/xml_io.hpp"

#include <random>

namespace seqbirds {

std::vector<Level> load_levels(const ObjectCatalog& catalog, const std::string& dir) {
  std::vector<Level> levels;
  for (const auto& file : dataset_files(dir)) levels.push_back(read_level_file(catalog, file));
  return levels;
}

std::vector<LevelMatrix> encode_all(const ObjectCatalog& catalog, const GridSpec& spec,
                                    const std::vector<Level>& levels) {
  std::vector<LevelMatrix> out;
  out.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    try {
      out.push_back(encode(catalog, spec, levels[i]));
    } catch (const DataError& e) {
      throw DataError("level " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Sentence> to_sentences(const Vocabulary& vocab, const std::vector<LevelMatrix>& matrices,
                                   int* unknown_rows) {
  std::vector<Sentence> out;
  out.reserve(matrices.size());
  for (const auto& m : matrices) out.push_back(matrix_to_sentence(vocab, m, unknown_rows));
  return out;
}

std::vector<Level> decode_sentences(const ObjectCatalog& catalog, const GridSpec& spec, const Vocabulary& vocab,
                                    const std::vector<Sentence>& sentences) {
  std::vector<Level> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(decode(catalog, spec, sentence_to_matrix(vocab, s)));
  return out;
}

std::vector<Sentence> sample_sentences(const SeqVae<double>& vae, int count, std::uint64_t seed) {
  constexpr int chunk = 100;
  std::vector<Sentence> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::normal_distribution<double> normal;
  for (int start = 0, c = 0; start < count; start += chunk, ++c) {
    Rng rng = make_rng(seed, "generate", static_cast<std::uint64_t>(c));
    const int n = std::min(chunk, count - start);
    MatrixX<double> z(vae.shape.dim_z, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < vae.shape.dim_z; ++i) z(i, j) = normal(rng);
    for (auto& s : generate_batch(vae, z, kMaxRow)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace seqbirds
