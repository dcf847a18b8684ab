#include "seqbirds/embedding.hpp"

#include "seqbirds/nn.hpp"
#include "seqbirds/rng.hpp"
#include "seqbirds/tensor_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace seqbirds {

std::vector<CbowExample> cbow_examples(const std::vector<Sentence>& corpus, int window, int vocab_size) {
  if (window < 1) throw DataError("context window must be at least 1");
  std::vector<CbowExample> out;
  for (const auto& s : corpus) {
    const int n = static_cast<int>(s.size());
    for (int t = window; t < n - window; ++t) {
      const int center = s[static_cast<std::size_t>(t)];
      if (center < 0 || center >= vocab_size) continue;
      CbowExample ex;
      ex.center = center;
      for (int i = 1; i <= window; ++i) {
        ex.context.push_back(s[static_cast<std::size_t>(t - i)]);
        ex.context.push_back(s[static_cast<std::size_t>(t + i)]);
      }
      for (int c : ex.context)
        if (c < 0 || c > vocab_size) throw DataError("word index " + std::to_string(c) + " out of range");
      out.push_back(std::move(ex));
    }
  }
  return out;
}

VectorX<double> cbow_forward(const EmbeddingModel& model, std::span<const int> context) {
  VectorX<double> h = VectorX<double>::Zero(model.dim_x());
  for (int c : context) {
    if (c < 0 || c > model.vocab_size()) throw DataError("context index out of range");
    h += model.input.row(c).transpose();
  }
  MatrixX<double> logits = model.output.transpose() * h;
  return softmax_columns<double>(logits).col(0);
}

double cbow_loss(const EmbeddingModel& model, std::span<const CbowExample> examples, EmbeddingModel* grad) {
  const auto batch = static_cast<Eigen::Index>(examples.size());
  if (batch == 0) return 0.0;
  MatrixX<double> h = MatrixX<double>::Zero(model.dim_x(), batch);
  for (Eigen::Index b = 0; b < batch; ++b)
    for (int c : examples[static_cast<std::size_t>(b)].context) h.col(b) += model.input.row(c).transpose();
  MatrixX<double> probs = softmax_columns<double>(model.output.transpose() * h);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b)
    loss -= std::log(std::max(probs(examples[static_cast<std::size_t>(b)].center, b), 1e-300));
  loss /= static_cast<double>(batch);

  if (grad) {
    MatrixX<double> dlogits = probs;
    for (Eigen::Index b = 0; b < batch; ++b) dlogits(examples[static_cast<std::size_t>(b)].center, b) -= 1.0;
    dlogits /= static_cast<double>(batch);
    grad->window = model.window;
    grad->output.noalias() = h * dlogits.transpose();
    MatrixX<double> dh = model.output * dlogits;
    grad->input = MatrixX<double>::Zero(model.input.rows(), model.input.cols());
    for (Eigen::Index b = 0; b < batch; ++b)
      for (int c : examples[static_cast<std::size_t>(b)].context) grad->input.row(c) += dh.col(b).transpose();
  }
  return loss;
}

EmbeddingModel init_embedding(int vocab_size, const EmbeddingConfig& config) {
  if (vocab_size < 1) throw DataError("vocabulary must not be empty");
  if (config.dim_x < 1) throw DataError("embedding dimension must be positive");
  EmbeddingModel m;
  m.window = config.window;
  m.seed = config.seed;
  Rng rng = make_rng(config.seed, "embedding.init");
  m.input.resize(vocab_size + 1, config.dim_x);
  m.output.resize(config.dim_x, vocab_size);
  std::uniform_real_distribution<double> small(-0.5 / config.dim_x, 0.5 / config.dim_x);
  for (Eigen::Index j = 0; j < m.input.cols(); ++j)
    for (Eigen::Index i = 0; i < m.input.rows(); ++i) m.input(i, j) = small(rng);
  init_uniform(m.output, config.dim_x, rng);
  return m;
}

void set_unk_to_mean(EmbeddingModel& model) {
  const int n = model.vocab_size();
  model.input.row(n) = model.input.topRows(n).colwise().mean();
}

EmbeddingModel cbow_train(const std::vector<Sentence>& corpus, int vocab_size, const EmbeddingConfig& config,
                          EmbeddingTrainLog* log) {
  if (corpus.empty()) throw DataError("cannot train an embedding on an empty corpus");
  const auto examples = cbow_examples(corpus, config.window, vocab_size);
  if (examples.empty())
    throw DataError("corpus sentences are shorter than the context window (" + std::to_string(2 * config.window + 1) +
                    " words needed)");
  EmbeddingModel model = init_embedding(vocab_size, config);
  EmbeddingModel grad = model;
  Adam<double> opt(config.learning_rate);
  Rng shuffle = make_rng(config.seed, "embedding.shuffle");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, config.batch_size));
  std::vector<CbowExample> chunk;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      chunk.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + batch); ++i) chunk.push_back(examples[order[i]]);
      cbow_loss(model, chunk, &grad);
      opt.step({&model.input, &model.output}, {&grad.input, &grad.output});
    }
    if (log) log->epoch_loss.push_back(cbow_loss(model, examples));
  }
  set_unk_to_mean(model);
  return model;
}

VectorX<double> embed(const EmbeddingModel& model, int index) {
  if (index < 0 || index > model.vocab_size()) throw DataError("word index " + std::to_string(index) + " out of range");
  return model.input.row(index).transpose();
}

EmbeddingModel one_hot_embedding(int vocab_size) {
  EmbeddingModel m;
  m.input = MatrixX<double>::Zero(vocab_size + 1, vocab_size);
  m.input.topRows(vocab_size).setIdentity();
  m.output = MatrixX<double>::Zero(vocab_size, vocab_size);
  set_unk_to_mean(m);
  return m;
}

void save_embedding(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  Header h;
  h.set("vocab_size", model.vocab_size());
  h.set("dim_x", model.dim_x());
  h.set("window", model.window);
  h.set("seed", model.seed);
  write_header(out, h);
  write_rowmajor(out, model.input);
  write_rowmajor(out, model.output);
}

EmbeddingModel load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file " + path);
  Header h = read_header(in);
  const auto n = h.get_int("vocab_size");
  const auto d = h.get_int("dim_x");
  if (n < 1 || d < 1 || n > (1 << 24) || d > (1 << 16)) throw DataError("bad embedding dimensions in " + path);
  EmbeddingModel m;
  m.window = static_cast<int>(h.get_int("window"));
  m.seed = h.get_u64("seed");
  m.input = read_rowmajor(in, n + 1, d);
  m.output = read_rowmajor(in, d, n);
  return m;
}

}  // namespace seqbirds
