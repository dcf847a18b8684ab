#pragma once

#include "seqbirds/embedding.hpp"
#include "seqbirds/seqvae.hpp"
#include "seqbirds/vocabulary.hpp"

#include <string>

namespace seqbirds {

/// Everything `generate` and `evolve` need: the trained VAE together with
/// the vocabulary and embedding it was trained against.
struct ModelBundle {
  SeqVae<double> vae;
  Vocabulary vocab;
  EmbeddingModel embedding;
};

/// Text header (dim_z, hidden, vocab_size, dim_x, seed, epoch, start_word)
/// then named row-major binary64 tensor blocks.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path, int n_types);

}  // namespace seqbirds
