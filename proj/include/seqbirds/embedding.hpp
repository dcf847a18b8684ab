#pragma once

#include "seqbirds/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace seqbirds {

struct EmbeddingConfig {
  int dim_x = 50;
  int window = 2;  // context rows on each side
  int epochs = 100;
  double learning_rate = 1e-3;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

/// CBOW word embedding. `input` holds one row per word plus a final UNK
/// row; `output` maps a summed context vector to per-word logits through
/// output^T.
struct EmbeddingModel {
  MatrixX<double> input;   // (|W| + 1) x dim_x
  MatrixX<double> output;  // dim_x x |W|
  int window = 2;
  std::uint64_t seed = 0;

  int vocab_size() const { return static_cast<int>(output.cols()); }
  int dim_x() const { return static_cast<int>(input.cols()); }
  int unk() const { return vocab_size(); }
};

struct CbowExample {
  std::vector<int> context;
  int center = 0;
};

/// Every center position with a full window on both sides.
std::vector<CbowExample> cbow_examples(const std::vector<Sentence>& corpus, int window, int vocab_size);

/// softmax(output^T * sum(input[context])).
VectorX<double> cbow_forward(const EmbeddingModel& model, std::span<const int> context);

/// Mean cross-entropy of the centers. When `grad` is non-null it receives
/// the gradient with the model's shapes.
double cbow_loss(const EmbeddingModel& model, std::span<const CbowExample> examples,
                 EmbeddingModel* grad = nullptr);

EmbeddingModel init_embedding(int vocab_size, const EmbeddingConfig& config);

struct EmbeddingTrainLog {
  std::vector<double> epoch_loss;  // mean training loss after each epoch
};

/// Throws DataError when no sentence is long enough for the window.
EmbeddingModel cbow_train(const std::vector<Sentence>& corpus, int vocab_size, const EmbeddingConfig& config,
                          EmbeddingTrainLog* log = nullptr);

/// Sets the UNK row to the mean of the word rows.
void set_unk_to_mean(EmbeddingModel& model);

VectorX<double> embed(const EmbeddingModel& model, int index);

/// Identity input table (the "without embedding" ablation); input width |W|.
EmbeddingModel one_hot_embedding(int vocab_size);

void save_embedding(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_embedding(const std::string& path);

}  // namespace seqbirds
