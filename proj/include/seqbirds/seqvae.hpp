#pragma once

#include "seqbirds/embedding.hpp"
#include "seqbirds/nn.hpp"
#include "seqbirds/rng.hpp"
#include "seqbirds/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace seqbirds {

struct VaeConfig {
  int dim_z = 60;
  int hidden = 400;
  int epochs = 500;
  int batch_size = 20;
  double word_drop = 0.3;
  int kl_free_epochs = 250;
  int kl_ramp_epochs = 50;
  double beta = 1.0;
  double learning_rate = 1e-3;
  double grad_clip = 5.0;
  std::uint64_t seed = 0;
};

/// Throws DataError when a field is out of range.
void validate(const VaeConfig& config);
VaeConfig parse_vae_config(std::string_view text, VaeConfig base = {});
std::string format_vae_config(const VaeConfig& config);

/// KL weight: zero for the first kl_free_epochs, then a linear ramp to beta.
double beta_schedule(const VaeConfig& config, int epoch);

/// -0.5 * sum(1 + logvar - mu^2 - exp(logvar)).
template <typename Derived1, typename Derived2>
double kl_divergence(const Eigen::MatrixBase<Derived1>& mu, const Eigen::MatrixBase<Derived2>& logvar) {
  const auto m = mu.template cast<double>().array();
  const auto lv = logvar.template cast<double>().array();
  return -0.5 * (1.0 + lv - m.square() - lv.exp()).sum();
}

// ---------------------------------------------------------------------------
// Parameters

template <typename Scalar>
struct LstmParams {
  MatrixX<Scalar> w_in;   // 4H x I, gate blocks (input, forget, cell, output)
  MatrixX<Scalar> w_rec;  // 4H x H
  MatrixX<Scalar> bias;   // 4H x 1
};

template <typename Scalar>
struct AffineParams {
  MatrixX<Scalar> weight;
  MatrixX<Scalar> bias;
};

template <typename Scalar>
struct EncoderParams {
  LstmParams<Scalar> cell;
  AffineParams<Scalar> head_mu;
  AffineParams<Scalar> head_logvar;
};

template <typename Scalar>
struct DecoderParams {
  AffineParams<Scalar> latent_init;  // z -> (h0, c0)
  LstmParams<Scalar> cell;
  AffineParams<Scalar> out_proj;  // hidden -> |W| logits
};

template <typename Scalar>
struct VaeParams {
  EncoderParams<Scalar> enc;
  DecoderParams<Scalar> dec;

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "enc.cell.w_in",     "enc.cell.w_rec",       "enc.cell.bias",          "enc.head_mu.weight",
        "enc.head_mu.bias",  "enc.head_logvar.weight", "enc.head_logvar.bias", "dec.latent_init.weight",
        "dec.latent_init.bias", "dec.cell.w_in",      "dec.cell.w_rec",         "dec.cell.bias",
        "dec.out_proj.weight", "dec.out_proj.bias"};
    return n;
  }

  std::vector<MatrixX<Scalar>*> tensors() {
    return {&enc.cell.w_in,        &enc.cell.w_rec,        &enc.cell.bias,         &enc.head_mu.weight,
            &enc.head_mu.bias,     &enc.head_logvar.weight, &enc.head_logvar.bias, &dec.latent_init.weight,
            &dec.latent_init.bias, &dec.cell.w_in,         &dec.cell.w_rec,        &dec.cell.bias,
            &dec.out_proj.weight,  &dec.out_proj.bias};
  }
  std::vector<const MatrixX<Scalar>*> tensors() const {
    auto* self = const_cast<VaeParams*>(this);
    auto t = self->tensors();
    return {t.begin(), t.end()};
  }

  VaeParams zeros_like() const {
    VaeParams out = *this;
    for (auto* t : out.tensors()) t->setZero();
    return out;
  }

  template <typename Other>
  VaeParams<Other> cast() const {
    VaeParams<Other> out;
    auto dst = out.tensors();
    auto src = tensors();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = src[i]->template cast<Other>();
    return out;
  }
};

struct VaeShape {
  int dim_x = 0;
  int hidden = 0;
  int dim_z = 0;
  int vocab_size = 0;
};

/// Encoder, decoder and the frozen word-input table. Column w of `inputs`
/// is the input vector of word w; column vocab_size is UNK.
template <typename Scalar>
struct SeqVae {
  VaeShape shape;
  VaeParams<Scalar> params;
  MatrixX<Scalar> inputs;  // dim_x x (|W| + 1)
  int start_word = 0;      // all-Space word, fed at decoder step 0
  std::uint64_t seed = 0;
  int epoch = 0;

  int unk() const { return shape.vocab_size; }

  template <typename Other>
  SeqVae<Other> cast() const {
    SeqVae<Other> out;
    out.shape = shape;
    out.params = params.template cast<Other>();
    out.inputs = inputs.template cast<Other>();
    out.start_word = start_word;
    out.seed = seed;
    out.epoch = epoch;
    return out;
  }
};

template <typename Scalar>
LstmParams<Scalar> init_lstm(int input, int hidden, Rng& rng) {
  LstmParams<Scalar> p;
  p.w_in.resize(4 * hidden, input);
  p.w_rec.resize(4 * hidden, hidden);
  p.bias.resize(4 * hidden, 1);
  init_uniform(p.w_in, hidden, rng);
  init_uniform(p.w_rec, hidden, rng);
  init_uniform(p.bias, hidden, rng);
  return p;
}

template <typename Scalar>
AffineParams<Scalar> init_affine(int input, int output, Rng& rng) {
  AffineParams<Scalar> p;
  p.weight.resize(output, input);
  p.bias.resize(output, 1);
  init_uniform(p.weight, input, rng);
  init_uniform(p.bias, input, rng);
  return p;
}

/// Fresh model around a trained embedding. The input table is the
/// embedding's input rows, transposed.
template <typename Scalar>
SeqVae<Scalar> make_seqvae(const EmbeddingModel& embedding, int start_word, int hidden, int dim_z, std::uint64_t seed) {
  if (hidden < 1 || dim_z < 1) throw DataError("hidden size and latent size must be positive");
  if (start_word < 0 || start_word >= embedding.vocab_size()) throw DataError("start word out of range");
  SeqVae<Scalar> m;
  m.shape = {embedding.dim_x(), hidden, dim_z, embedding.vocab_size()};
  m.inputs = embedding.input.transpose().cast<Scalar>();
  m.start_word = start_word;
  m.seed = seed;
  Rng rng = make_rng(seed, "vae.init");
  const int x = m.shape.dim_x;
  const int w = m.shape.vocab_size;
  m.params.enc.cell = init_lstm<Scalar>(x, hidden, rng);
  m.params.enc.head_mu = init_affine<Scalar>(hidden, dim_z, rng);
  m.params.enc.head_logvar = init_affine<Scalar>(hidden, dim_z, rng);
  m.params.dec.latent_init = init_affine<Scalar>(dim_z, 2 * hidden, rng);
  m.params.dec.cell = init_lstm<Scalar>(x, hidden, rng);
  m.params.dec.out_proj = init_affine<Scalar>(hidden, w, rng);
  return m;
}

// ---------------------------------------------------------------------------
// Recurrent cell, batched over columns. Time-major column layout: column
// t * batch + b holds step t of sequence b.

template <typename Scalar>
struct LstmTrace {
  int steps = 0;
  int batch = 0;
  MatrixX<Scalar> x;      // I x (T*B)
  MatrixX<Scalar> gates;  // 4H x (T*B), post-activation
  MatrixX<Scalar> h;      // H x ((T+1)*B), block 0 is h0
  MatrixX<Scalar> c;      // H x ((T+1)*B), block 0 is c0

  auto outputs() const { return h.rightCols(static_cast<Eigen::Index>(steps) * batch); }
  auto final_h() const { return h.rightCols(batch); }
};

template <typename Scalar>
void lstm_forward(const LstmParams<Scalar>& p, MatrixX<Scalar> x, int steps, int batch, const MatrixX<Scalar>& h0,
                  const MatrixX<Scalar>& c0, LstmTrace<Scalar>& tr) {
  const Eigen::Index H = p.w_rec.cols();
  const Eigen::Index B = batch;
  tr.steps = steps;
  tr.batch = batch;
  tr.x = std::move(x);
  tr.gates.resize(4 * H, steps * B);
  tr.gates.noalias() = p.w_in * tr.x;
  tr.gates.colwise() += p.bias.col(0);
  tr.h.resize(H, (steps + 1) * B);
  tr.c.resize(H, (steps + 1) * B);
  tr.h.leftCols(B) = h0;
  tr.c.leftCols(B) = c0;
  for (int t = 0; t < steps; ++t) {
    auto g = tr.gates.middleCols(t * B, B);
    g.noalias() += p.w_rec * tr.h.middleCols(t * B, B);
    g.topRows(2 * H) = sigmoid(g.topRows(2 * H).array()).matrix();
    g.middleRows(2 * H, H) = g.middleRows(2 * H, H).array().tanh().matrix();
    g.bottomRows(H) = sigmoid(g.bottomRows(H).array()).matrix();
    auto c_prev = tr.c.middleCols(t * B, B).array();
    tr.c.middleCols((t + 1) * B, B) =
        (g.middleRows(H, H).array() * c_prev + g.topRows(H).array() * g.middleRows(2 * H, H).array()).matrix();
    tr.h.middleCols((t + 1) * B, B) =
        (g.bottomRows(H).array() * tr.c.middleCols((t + 1) * B, B).array().tanh()).matrix();
  }
}

/// Backpropagates `dh_out` (H x T*B, gradient w.r.t. each step's output, may
/// be empty) plus `dh_final` (H x B, extra gradient on the last output, may
/// be empty). Accumulates into `grad`; writes dL/dx, dL/dh0, dL/dc0.
template <typename Scalar>
void lstm_backward(const LstmParams<Scalar>& p, const LstmTrace<Scalar>& tr, const MatrixX<Scalar>& dh_out,
                   const MatrixX<Scalar>& dh_final, LstmParams<Scalar>& grad, MatrixX<Scalar>* dx,
                   MatrixX<Scalar>& dh0, MatrixX<Scalar>& dc0) {
  const Eigen::Index H = p.w_rec.cols();
  const Eigen::Index B = tr.batch;
  const int T = tr.steps;
  MatrixX<Scalar> dpre(4 * H, T * B);
  MatrixX<Scalar> dh_next = MatrixX<Scalar>::Zero(H, B);
  MatrixX<Scalar> dc_next = MatrixX<Scalar>::Zero(H, B);
  MatrixX<Scalar> dh(H, B);
  for (int t = T - 1; t >= 0; --t) {
    dh = dh_next;
    if (dh_out.size()) dh += dh_out.middleCols(t * B, B);
    if (t == T - 1 && dh_final.size()) dh += dh_final;
    auto g = tr.gates.middleCols(t * B, B).array();
    auto gi = g.topRows(H);
    auto gf = g.middleRows(H, H);
    auto gg = g.middleRows(2 * H, H);
    auto go = g.bottomRows(H);
    const auto c_prev = tr.c.middleCols(t * B, B).array();
    const auto tc = tr.c.middleCols((t + 1) * B, B).array().tanh().eval();
    const auto dc = (dc_next.array() + dh.array() * go * (Scalar(1) - tc.square())).eval();
    auto d = dpre.middleCols(t * B, B).array();
    d.topRows(H) = dc * gg * gi * (Scalar(1) - gi);
    d.middleRows(H, H) = dc * c_prev * gf * (Scalar(1) - gf);
    d.middleRows(2 * H, H) = dc * gi * (Scalar(1) - gg.square());
    d.bottomRows(H) = dh.array() * tc * go * (Scalar(1) - go);
    dc_next = (dc * gf).matrix();
    dh_next.noalias() = p.w_rec.transpose() * dpre.middleCols(t * B, B);
  }
  grad.w_rec.noalias() += dpre * tr.h.leftCols(T * B).transpose();
  grad.w_in.noalias() += dpre * tr.x.transpose();
  grad.bias += dpre.rowwise().sum();
  if (dx) dx->noalias() = p.w_in.transpose() * dpre;
  dh0 = dh_next;
  dc0 = dc_next;
}

// ---------------------------------------------------------------------------
// Encoder / decoder

template <typename Scalar>
MatrixX<Scalar> gather_inputs(const SeqVae<Scalar>& m, const std::vector<int>& words) {
  MatrixX<Scalar> x(m.shape.dim_x, static_cast<Eigen::Index>(words.size()));
  for (std::size_t k = 0; k < words.size(); ++k) {
    const int w = words[k];
    if (w < 0 || w > m.shape.vocab_size) throw DataError("word index " + std::to_string(w) + " out of range");
    x.col(static_cast<Eigen::Index>(k)) = m.inputs.col(w);
  }
  return x;
}

/// Time-major word list for a batch of equal-length sentences.
inline std::vector<int> time_major(const std::vector<const Sentence*>& batch) {
  const std::size_t T = batch.front()->size();
  std::vector<int> out(T * batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b]->size() != T) throw DataError("sentences in a batch must have equal length");
    for (std::size_t t = 0; t < T; ++t) out[t * batch.size() + b] = (*batch[b])[t];
  }
  return out;
}

template <typename Scalar>
struct Posterior {
  VectorX<Scalar> mu;
  VectorX<Scalar> logvar;
};

/// Mean and log-variance of q(z | sentence). The encoder reads the sentence
/// last word first, so its final state sits next to the leading rows; the
/// trailing Space words would otherwise wash them out.
template <typename Scalar>
Posterior<Scalar> encode_seq(const SeqVae<Scalar>& m, const Sentence& sentence) {
  if (sentence.empty()) throw DataError("cannot encode an empty sentence");
  const auto& enc = m.params.enc;
  const int H = m.shape.hidden;
  LstmTrace<Scalar> tr;
  const Sentence rev(sentence.rbegin(), sentence.rend());
  lstm_forward(enc.cell, gather_inputs(m, rev), static_cast<int>(sentence.size()), 1,
               MatrixX<Scalar>(MatrixX<Scalar>::Zero(H, 1)), MatrixX<Scalar>(MatrixX<Scalar>::Zero(H, 1)), tr);
  Posterior<Scalar> out;
  out.mu = enc.head_mu.weight * tr.final_h() + enc.head_mu.bias;
  out.logvar = enc.head_logvar.weight * tr.final_h() + enc.head_logvar.bias;
  return out;
}

/// z = mu + exp(logvar / 2) * eps with eps ~ N(0, I).
template <typename Scalar>
VectorX<Scalar> sample_latent(const VectorX<Scalar>& mu, const VectorX<Scalar>& logvar, Rng& rng) {
  if (mu.size() != logvar.size()) throw DataError("mu and logvar lengths differ");
  std::normal_distribution<double> normal;
  VectorX<Scalar> z(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j)
    z(j) = mu(j) + static_cast<Scalar>(std::exp(0.5 * static_cast<double>(logvar(j))) * normal(rng));
  return z;
}

template <typename Scalar>
void decoder_initial_state(const DecoderParams<Scalar>& dec, const MatrixX<Scalar>& z, int hidden, MatrixX<Scalar>& h0,
                           MatrixX<Scalar>& c0) {
  MatrixX<Scalar> pre = dec.latent_init.weight * z;
  pre.colwise() += dec.latent_init.bias.col(0);
  h0 = pre.topRows(hidden).array().tanh().matrix();
  c0 = pre.bottomRows(hidden);
}

/// Decoder step inputs under teacher forcing: step 0 is the start word,
/// step t > 0 is teacher word t-1, replaced by UNK with probability
/// `word_drop`.
template <typename Scalar>
std::vector<int> teacher_inputs(const SeqVae<Scalar>& m, const std::vector<const Sentence*>& batch, double word_drop,
                                Rng& rng) {
  const std::size_t B = batch.size();
  const std::size_t T = batch.front()->size();
  std::vector<int> words(T * B);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < B; ++b) {
      int w = t == 0 ? m.start_word : (*batch[b])[t - 1];
      if (t > 0 && word_drop > 0.0 && u(rng) < word_drop) w = m.unk();
      words[t * B + b] = w;
    }
  }
  return words;
}

/// Per-step logits. With a teacher the inputs follow teacher_inputs;
/// without one each step consumes the argmax of the previous step.
template <typename Scalar>
std::vector<VectorX<Scalar>> decode_seq(const SeqVae<Scalar>& m, const VectorX<Scalar>& z, const Sentence* teacher,
                                        double word_drop, Rng& rng, int length = 30) {
  const auto& dec = m.params.dec;
  const int H = m.shape.hidden;
  MatrixX<Scalar> h;
  MatrixX<Scalar> c;
  decoder_initial_state(dec, MatrixX<Scalar>(z), H, h, c);
  std::vector<VectorX<Scalar>> logits;
  if (teacher) {
    const auto words = teacher_inputs(m, {teacher}, word_drop, rng);
    LstmTrace<Scalar> tr;
    const int T = static_cast<int>(teacher->size());
    lstm_forward(dec.cell, gather_inputs(m, words), T, 1, h, c, tr);
    for (int t = 0; t < T; ++t)
      logits.push_back(dec.out_proj.weight * tr.outputs().col(t) + dec.out_proj.bias.col(0));
    return logits;
  }
  int word = m.start_word;
  LstmTrace<Scalar> tr;
  for (int t = 0; t < length; ++t) {
    lstm_forward(dec.cell, gather_inputs(m, {word}), 1, 1, h, c, tr);
    h = tr.final_h();
    c = tr.c.rightCols(1);
    VectorX<Scalar> l = dec.out_proj.weight * h + dec.out_proj.bias;
    Eigen::Index best = 0;
    l.maxCoeff(&best);
    word = static_cast<int>(best);
    logits.push_back(std::move(l));
  }
  return logits;
}

/// Greedy decoding of every column of `z` (dim_z x B): each step feeds the
/// argmax word of the previous step.
template <typename Scalar>
std::vector<Sentence> generate_batch(const SeqVae<Scalar>& m, const MatrixX<Scalar>& z, int length = 30) {
  const auto& dec = m.params.dec;
  const int H = m.shape.hidden;
  const Eigen::Index B = z.cols();
  std::vector<Sentence> out(static_cast<std::size_t>(B), Sentence(static_cast<std::size_t>(length)));
  if (B == 0) return out;
  MatrixX<Scalar> h;
  MatrixX<Scalar> c;
  decoder_initial_state(dec, z, H, h, c);
  // Input projections of every word, computed once.
  MatrixX<Scalar> proj = dec.cell.w_in * m.inputs;
  proj.colwise() += dec.cell.bias.col(0);
  std::vector<int> words(static_cast<std::size_t>(B), m.start_word);
  MatrixX<Scalar> g(4 * H, B);
  MatrixX<Scalar> logits(m.shape.vocab_size, B);
  for (int t = 0; t < length; ++t) {
    for (Eigen::Index b = 0; b < B; ++b) g.col(b) = proj.col(words[static_cast<std::size_t>(b)]);
    g.noalias() += dec.cell.w_rec * h;
    auto i = sigmoid(g.topRows(H).array());
    auto f = sigmoid(g.middleRows(H, H).array());
    auto gg = g.middleRows(2 * H, H).array().tanh();
    auto o = sigmoid(g.bottomRows(H).array());
    c = (f * c.array() + i * gg).matrix();
    h = (o * c.array().tanh()).matrix();
    logits.noalias() = dec.out_proj.weight * h;
    logits.colwise() += dec.out_proj.bias.col(0);
    for (Eigen::Index b = 0; b < B; ++b) {
      Eigen::Index best = 0;
      logits.col(b).maxCoeff(&best);
      words[static_cast<std::size_t>(b)] = static_cast<int>(best);
      out[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)] = static_cast<int>(best);
    }
  }
  return out;
}

/// G(z): the greedy maximizer of p(W | z).
template <typename Scalar>
Sentence generate(const SeqVae<Scalar>& m, const VectorX<Scalar>& z, int length = 30) {
  if (z.size() != m.shape.dim_z) throw DataError("latent vector has the wrong dimension");
  return generate_batch(m, MatrixX<Scalar>(z), length).front();
}

// ---------------------------------------------------------------------------
// Loss

struct LossTerms {
  double rec = 0.0;  // mean over the batch of the summed per-step cross-entropy
  double kl = 0.0;   // mean KL divergence to N(0, I)
  double total = 0.0;
  double beta = 0.0;  // KL weight applied
};

/// Loss of one batch at `epoch`, drawing the latent noise and then the
/// word-drop mask from `rng`. When `grad` is set it receives dTotal/dParams;
/// `input_grad`, when set, receives dTotal/dInputs.
template <typename Scalar>
LossTerms loss(const SeqVae<Scalar>& m, const std::vector<const Sentence*>& batch, const VaeConfig& config, int epoch,
               Rng& rng, VaeParams<Scalar>* grad = nullptr, MatrixX<Scalar>* input_grad = nullptr) {
  if (batch.empty()) throw DataError("loss needs a nonempty batch");
  const auto& P = m.params;
  const int H = m.shape.hidden;
  const int Z = m.shape.dim_z;
  const int B = static_cast<int>(batch.size());
  const int T = static_cast<int>(batch.front()->size());
  const double beta = beta_schedule(config, epoch);
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(B);

  // Encoder.
  const auto target = time_major(batch);
  std::vector<int> enc_words(target.size());  // reversed in time, see encode_seq
  for (int t = 0; t < T; ++t)
    for (int b = 0; b < B; ++b) enc_words[static_cast<std::size_t>(t * B + b)] = target[static_cast<std::size_t>((T - 1 - t) * B + b)];
  LstmTrace<Scalar> enc_tr;
  lstm_forward(P.enc.cell, gather_inputs(m, enc_words), T, B, MatrixX<Scalar>(MatrixX<Scalar>::Zero(H, B)), MatrixX<Scalar>(MatrixX<Scalar>::Zero(H, B)),
               enc_tr);
  const MatrixX<Scalar> h_last = enc_tr.final_h();
  MatrixX<Scalar> mu = P.enc.head_mu.weight * h_last;
  mu.colwise() += P.enc.head_mu.bias.col(0);
  MatrixX<Scalar> logvar = P.enc.head_logvar.weight * h_last;
  logvar.colwise() += P.enc.head_logvar.bias.col(0);

  // Reparameterized sample.
  MatrixX<Scalar> eps(Z, B);
  std::normal_distribution<double> normal;
  for (int b = 0; b < B; ++b)
    for (int j = 0; j < Z; ++j) eps(j, b) = static_cast<Scalar>(normal(rng));
  const MatrixX<Scalar> stdev = (Scalar(0.5) * logvar.array()).exp().matrix();
  const MatrixX<Scalar> z = mu + (stdev.array() * eps.array()).matrix();

  // Decoder.
  MatrixX<Scalar> h0;
  MatrixX<Scalar> c0;
  decoder_initial_state(P.dec, z, H, h0, c0);
  const auto dec_words = teacher_inputs(m, batch, config.word_drop, rng);
  LstmTrace<Scalar> dec_tr;
  lstm_forward(P.dec.cell, gather_inputs(m, dec_words), T, B, h0, c0, dec_tr);
  MatrixX<Scalar> logits = P.dec.out_proj.weight * dec_tr.outputs();
  logits.colwise() += P.dec.out_proj.bias.col(0);
  MatrixX<Scalar> probs = softmax_columns<Scalar>(logits);

  LossTerms out;
  out.beta = beta;
  for (Eigen::Index k = 0; k < probs.cols(); ++k) {
    const int w = target[static_cast<std::size_t>(k)];
    if (w < 0 || w >= m.shape.vocab_size) throw DataError("target word must be a vocabulary word");
    // log-softmax through the max-shifted logits for accuracy.
    const double mx = static_cast<double>(logits.col(k).maxCoeff());
    const double lse = mx + std::log((logits.col(k).array().template cast<double>() - mx).exp().sum());
    out.rec += lse - static_cast<double>(logits(w, k));
  }
  out.rec /= B;
  for (int b = 0; b < B; ++b) out.kl += kl_divergence(mu.col(b), logvar.col(b));
  out.kl /= B;
  out.total = out.rec + beta * out.kl;
  if (!std::isfinite(out.total)) throw NumericError("VAE loss is not finite");
  if (!grad && !input_grad) return out;

  VaeParams<Scalar> local;
  VaeParams<Scalar>& g = grad ? *grad : local;
  if (!grad) g = P.zeros_like();
  else if (g.enc.cell.w_in.size() == 0) g = P.zeros_like();
  else
    for (auto* t : g.tensors()) t->setZero();

  // Output projection.
  MatrixX<Scalar> dlogits = probs;
  for (Eigen::Index k = 0; k < probs.cols(); ++k) dlogits(target[static_cast<std::size_t>(k)], k) -= Scalar(1);
  dlogits *= inv_b;
  g.dec.out_proj.weight.noalias() = dlogits * dec_tr.outputs().transpose();
  g.dec.out_proj.bias = dlogits.rowwise().sum();
  MatrixX<Scalar> dh_dec = P.dec.out_proj.weight.transpose() * dlogits;

  MatrixX<Scalar> dx_dec;
  MatrixX<Scalar> dh0;
  MatrixX<Scalar> dc0;
  lstm_backward(P.dec.cell, dec_tr, dh_dec, MatrixX<Scalar>(), g.dec.cell, input_grad ? &dx_dec : nullptr, dh0, dc0);

  // Latent initialisation.
  MatrixX<Scalar> dpre0(2 * H, B);
  dpre0.topRows(H) = (dh0.array() * (Scalar(1) - h0.array().square())).matrix();
  dpre0.bottomRows(H) = dc0;
  g.dec.latent_init.weight.noalias() = dpre0 * z.transpose();
  g.dec.latent_init.bias = dpre0.rowwise().sum();
  const MatrixX<Scalar> dz = P.dec.latent_init.weight.transpose() * dpre0;

  // Reparameterization and KL.
  const Scalar kl_w = static_cast<Scalar>(beta) * inv_b;
  const MatrixX<Scalar> dmu = dz + kl_w * mu;
  const MatrixX<Scalar> dlogvar = (dz.array() * eps.array() * Scalar(0.5) * stdev.array() +
                                   kl_w * Scalar(0.5) * (logvar.array().exp() - Scalar(1)))
                                      .matrix();
  g.enc.head_mu.weight.noalias() = dmu * h_last.transpose();
  g.enc.head_mu.bias = dmu.rowwise().sum();
  g.enc.head_logvar.weight.noalias() = dlogvar * h_last.transpose();
  g.enc.head_logvar.bias = dlogvar.rowwise().sum();
  MatrixX<Scalar> dh_last = P.enc.head_mu.weight.transpose() * dmu;
  dh_last.noalias() += P.enc.head_logvar.weight.transpose() * dlogvar;

  MatrixX<Scalar> dx_enc;
  MatrixX<Scalar> unused_h;
  MatrixX<Scalar> unused_c;
  lstm_backward(P.enc.cell, enc_tr, MatrixX<Scalar>(), dh_last, g.enc.cell, input_grad ? &dx_enc : nullptr, unused_h,
                unused_c);

  if (input_grad) {
    *input_grad = MatrixX<Scalar>::Zero(m.inputs.rows(), m.inputs.cols());
    for (std::size_t k = 0; k < target.size(); ++k) {
      input_grad->col(enc_words[k]) += dx_enc.col(static_cast<Eigen::Index>(k));
      input_grad->col(dec_words[k]) += dx_dec.col(static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

struct EpochStats {
  int epoch = 0;
  double rec = 0.0;
  double kl = 0.0;
  double beta = 0.0;
  double total = 0.0;
};

struct VaeTrainLog {
  std::vector<EpochStats> epochs;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Minibatch training with the given configuration. The input table stays
/// frozen. Deterministic for a fixed config.seed.
template <typename Scalar>
VaeTrainLog train(SeqVae<Scalar>& m, const std::vector<Sentence>& dataset, const VaeConfig& config,
                  const EpochCallback& on_epoch = {}) {
  validate(config);
  if (dataset.empty()) throw DataError("cannot train on an empty dataset");
  if (config.dim_z != m.shape.dim_z || config.hidden != m.shape.hidden)
    throw DataError("config dimensions do not match the model");
  VaeTrainLog log;
  Adam<Scalar> opt(config.learning_rate);
  VaeParams<Scalar> grad = m.params.zeros_like();
  auto params = m.params.tensors();
  auto grads = grad.tensors();
  std::vector<const MatrixX<Scalar>*> grads_c(grads.begin(), grads.end());
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const Sentence*> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle = make_rng(config.seed, "vae.shuffle", static_cast<std::uint64_t>(epoch));
    Rng noise = make_rng(config.seed, "vae.noise", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle);
    EpochStats stats;
    stats.epoch = epoch;
    stats.beta = beta_schedule(config, epoch);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + static_cast<std::size_t>(config.batch_size)); ++i)
        batch.push_back(&dataset[order[i]]);
      const LossTerms terms = loss(m, batch, config, epoch, noise, &grad);
      stats.rec += terms.rec * static_cast<double>(batch.size());
      stats.kl += terms.kl * static_cast<double>(batch.size());
      clip_global_norm(grads, config.grad_clip);
      opt.step(params, grads_c);
    }
    stats.rec /= static_cast<double>(dataset.size());
    stats.kl /= static_cast<double>(dataset.size());
    stats.total = stats.rec + stats.beta * stats.kl;
    m.epoch = epoch + 1;
    log.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return log;
}

}  // namespace seqbirds
