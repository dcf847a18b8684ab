#include "seqbirds/seqvae.hpp"

#include "seqbirds/model_io.hpp"
#include "seqbirds/tensor_io.hpp"

#include <fstream>
#include <sstream>

namespace seqbirds {

void validate(const VaeConfig& c) {
  if (c.dim_z < 1) throw DataError("dim_z must be positive");
  if (c.hidden < 1) throw DataError("hidden must be positive");
  if (c.epochs < 0) throw DataError("epochs must be non-negative");
  if (c.batch_size < 1) throw DataError("batch_size must be positive");
  if (!(c.word_drop >= 0.0 && c.word_drop <= 1.0)) throw DataError("word_drop must lie in [0, 1]");
  if (c.kl_free_epochs < 0 || c.kl_free_epochs > c.epochs) throw DataError("kl_free_epochs must lie in [0, epochs]");
  if (c.kl_ramp_epochs < 0) throw DataError("kl_ramp_epochs must be non-negative");
  if (!(c.beta >= 0.0)) throw DataError("beta must be non-negative");
  if (!(c.learning_rate > 0.0)) throw DataError("learning_rate must be positive");
  if (!(c.grad_clip > 0.0)) throw DataError("grad_clip must be positive");
}

double beta_schedule(const VaeConfig& config, int epoch) {
  if (epoch < config.kl_free_epochs) return 0.0;
  if (config.kl_ramp_epochs <= 0) return config.beta;
  const double progress = static_cast<double>(epoch - config.kl_free_epochs) / config.kl_ramp_epochs;
  return config.beta * std::min(1.0, progress);
}

VaeConfig parse_vae_config(std::string_view text, VaeConfig c) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("config line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    value.erase(0, value.find_first_not_of(" \t"));
    auto num = [&]<typename T>(T& out) {
      std::istringstream v(value);
      v.imbue(std::locale::classic());
      T tmp{};
      v >> tmp;
      if (!v || !(v >> std::ws).eof())
        throw DataError("config line " + std::to_string(line_no) + ": bad value for " + key);
      out = tmp;
    };
    if (key == "dim_z") num(c.dim_z);
    else if (key == "hidden") num(c.hidden);
    else if (key == "epochs") num(c.epochs);
    else if (key == "batch_size") num(c.batch_size);
    else if (key == "word_drop") num(c.word_drop);
    else if (key == "kl_free_epochs") num(c.kl_free_epochs);
    else if (key == "kl_ramp_epochs") num(c.kl_ramp_epochs);
    else if (key == "beta") num(c.beta);
    else if (key == "learning_rate") num(c.learning_rate);
    else if (key == "grad_clip") num(c.grad_clip);
    else if (key == "seed") num(c.seed);
    else throw DataError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

std::string format_vae_config(const VaeConfig& c) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "dim_z=" << c.dim_z << "\nhidden=" << c.hidden << "\nepochs=" << c.epochs << "\nbatch_size=" << c.batch_size
      << "\nword_drop=" << c.word_drop << "\nkl_free_epochs=" << c.kl_free_epochs
      << "\nkl_ramp_epochs=" << c.kl_ramp_epochs << "\nbeta=" << c.beta << "\nlearning_rate=" << c.learning_rate
      << "\ngrad_clip=" << c.grad_clip << "\nseed=" << c.seed << '\n';
  return out.str();
}

void save_model(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  const auto& vae = bundle.vae;
  Header h;
  h.set("dim_z", vae.shape.dim_z);
  h.set("hidden", vae.shape.hidden);
  h.set("vocab_size", vae.shape.vocab_size);
  h.set("dim_x", vae.shape.dim_x);
  h.set("seed", vae.seed);
  h.set("epoch", vae.epoch);
  h.set("start_word", vae.start_word);
  h.set("window", bundle.embedding.window);
  write_header(out, h);
  const auto& names = VaeParams<double>::names();
  const auto tensors = vae.params.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) write_named_block(out, names[i], *tensors[i]);
  write_named_block(out, "inputs", vae.inputs);
  write_named_block(out, "embedding.input", bundle.embedding.input);
  write_named_block(out, "embedding.output", bundle.embedding.output);
  MatrixX<double> words(bundle.vocab.size(), kMaxCol);
  for (int i = 0; i < bundle.vocab.size(); ++i)
    for (int c = 0; c < kMaxCol; ++c) words(i, c) = bundle.vocab.word(i)[static_cast<std::size_t>(c)];
  write_named_block(out, "vocab.words", words);
}

ModelBundle load_model(const std::string& path, int n_types) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  Header h = read_header(in);
  ModelBundle b;
  auto& vae = b.vae;
  vae.shape.dim_z = static_cast<int>(h.get_int("dim_z"));
  vae.shape.hidden = static_cast<int>(h.get_int("hidden"));
  vae.shape.vocab_size = static_cast<int>(h.get_int("vocab_size"));
  vae.shape.dim_x = static_cast<int>(h.get_int("dim_x"));
  vae.seed = h.get_u64("seed");
  vae.epoch = static_cast<int>(h.get_int("epoch"));
  vae.start_word = static_cast<int>(h.get_int("start_word"));
  const auto& names = VaeParams<double>::names();
  auto tensors = vae.params.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) *tensors[i] = read_named_block(in, names[i]);
  vae.inputs = read_named_block(in, "inputs");
  b.embedding.input = read_named_block(in, "embedding.input");
  b.embedding.output = read_named_block(in, "embedding.output");
  b.embedding.window = h.has("window") ? static_cast<int>(h.get_int("window")) : 2;
  b.embedding.seed = vae.seed;
  MatrixX<double> words = read_named_block(in, "vocab.words");
  if (words.cols() != kMaxCol || words.rows() != vae.shape.vocab_size)
    throw DataError("model vocabulary block has the wrong shape");
  std::vector<Word> list(static_cast<std::size_t>(words.rows()));
  for (Eigen::Index i = 0; i < words.rows(); ++i)
    for (int c = 0; c < kMaxCol; ++c) {
      const double v = words(i, c);
      if (v < 0 || v > n_types || v != std::floor(v)) throw DataError("model vocabulary holds an invalid type id");
      list[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = static_cast<int>(v);
    }
  b.vocab = Vocabulary(std::move(list));
  const int H = vae.shape.hidden;
  const int Z = vae.shape.dim_z;
  const int X = vae.shape.dim_x;
  const int W = vae.shape.vocab_size;
  auto expect = [&](const MatrixX<double>& m, Eigen::Index r, Eigen::Index c, const char* what) {
    if (m.rows() != r || m.cols() != c) throw DataError(std::string("model tensor ") + what + " has the wrong shape");
  };
  const auto& p = vae.params;
  expect(p.enc.cell.w_in, 4 * H, X, "enc.cell.w_in");
  expect(p.enc.cell.w_rec, 4 * H, H, "enc.cell.w_rec");
  expect(p.enc.cell.bias, 4 * H, 1, "enc.cell.bias");
  expect(p.enc.head_mu.weight, Z, H, "enc.head_mu.weight");
  expect(p.enc.head_logvar.weight, Z, H, "enc.head_logvar.weight");
  expect(p.dec.latent_init.weight, 2 * H, Z, "dec.latent_init.weight");
  expect(p.dec.cell.w_in, 4 * H, X, "dec.cell.w_in");
  expect(p.dec.cell.w_rec, 4 * H, H, "dec.cell.w_rec");
  expect(p.dec.out_proj.weight, W, H, "dec.out_proj.weight");
  expect(p.dec.out_proj.bias, W, 1, "dec.out_proj.bias");
  expect(vae.inputs, X, W + 1, "inputs");
  if (vae.start_word < 0 || vae.start_word >= W) throw DataError("model start word out of range");
  return b;
}

}  // namespace seqbirds
