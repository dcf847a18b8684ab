#pragma once

#include "seqbirds/codec.hpp"
#include "seqbirds/model_io.hpp"
#include "seqbirds/vocabulary.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqbirds {

std::vector<Level> load_levels(const ObjectCatalog& catalog, const std::string& dir);

/// Throws DataError naming the first level that cannot be encoded.
std::vector<LevelMatrix> encode_all(const ObjectCatalog& catalog, const GridSpec& spec, const std::vector<Level>& levels);

std::vector<Sentence> to_sentences(const Vocabulary& vocab, const std::vector<LevelMatrix>& matrices,
                                   int* unknown_rows = nullptr);

std::vector<Level> decode_sentences(const ObjectCatalog& catalog, const GridSpec& spec, const Vocabulary& vocab,
                                    const std::vector<Sentence>& sentences);

/// Greedy decodes of z ~ N(0, I), drawn in fixed-size chunks.
std::vector<Sentence> sample_sentences(const SeqVae<double>& vae, int count, std::uint64_t seed);

}  // namespace seqbirds
