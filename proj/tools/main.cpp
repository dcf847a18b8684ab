#include "seqbirds/codec.hpp"
#include "seqbirds/embedding.hpp"
#include "seqbirds/lve.hpp"
#include "seqbirds/metrics.hpp"
#include "seqbirds/model_io.hpp"
#include "seqbirds/pipeline.hpp"
#include "seqbirds/render.hpp"
#include "seqbirds/synth.hpp"
#include "seqbirds/vocabulary.hpp"
#include "seqbirds/xml_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace seqbirds;
namespace fs = std::filesystem;

namespace {

enum ExitCode { ok = 0, usage = 1, data = 2, numeric = 3 };

ObjectCatalog catalog_from(const std::string& path) { return path.empty() ? default_catalog() : load_catalog(path); }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << text;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

std::vector<LevelMatrix> dataset_matrices(const ObjectCatalog& catalog, const std::string& dir) {
  auto levels = load_levels(catalog, dir);
  if (levels.empty()) throw DataError("dataset '" + dir + "' contains no levels");
  return encode_all(catalog, GridSpec{}, levels);
}

std::vector<Sentence> dataset_sentences(const ObjectCatalog& catalog, const Vocabulary& vocab, const std::string& dir) {
  int unknown = 0;
  auto sentences = to_sentences(vocab, dataset_matrices(catalog, dir), &unknown);
  if (unknown > 0) std::cerr << "warning: " << unknown << " rows are not in the vocabulary and map to UNK\n";
  return sentences;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential level generator: encoding, embedding, VAE training, generation and latent evolution"};
  app.require_subcommand(1);
  std::string catalog_path;
  app.add_option("--catalog", catalog_path, "object catalog file (default: built-in)");

  std::function<void()> action;
  auto catalog = [&] { return catalog_from(catalog_path); };

  // synth-dataset
  SynthConfig synth;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth-dataset", "write a synthetic corpus of stable levels");
  c_synth->add_option("--count", synth.n_levels, "number of levels")->required();
  c_synth->add_option("--seed", synth.seed, "random seed");
  c_synth->add_option("--out", synth_out, "output directory")->required();
  c_synth->add_option("--towers-min", synth.towers_min);
  c_synth->add_option("--towers-max", synth.towers_max);
  c_synth->add_option("--height-min", synth.height_min);
  c_synth->add_option("--height-max", synth.height_max);
  c_synth->add_option("--pig-prob", synth.pig_prob);
  c_synth->add_option("--tnt-prob", synth.tnt_prob);
  c_synth->add_option("--platform-prob", synth.platform_prob);
  c_synth->callback([&] {
    action = [&] {
      const auto cat = catalog();
      const auto levels = synth_dataset(cat, synth);
      write_dataset(levels, cat, synth_out);
      std::cout << "wrote " << levels.size() << " levels to " << synth_out << "\n";
    };
  });

  // encode / decode
  std::string in_path, out_path;
  auto* c_encode = app.add_subcommand("encode", "level XML to drop matrix");
  c_encode->add_option("--in", in_path)->required();
  c_encode->add_option("--out", out_path)->required();
  c_encode->callback([&] {
    action = [&] {
      const auto cat = catalog();
      write_matrix_file(encode(cat, GridSpec{}, read_level_file(cat, in_path)), out_path);
    };
  });
  auto* c_decode = app.add_subcommand("decode", "drop matrix to level XML");
  c_decode->add_option("--in", in_path)->required();
  c_decode->add_option("--out", out_path)->required();
  c_decode->callback([&] {
    action = [&] {
      const auto cat = catalog();
      write_level_file(cat, decode(cat, GridSpec{}, read_matrix_file(in_path, cat.n_types())), out_path);
    };
  });

  // build-vocab
  std::string dataset_dir;
  auto* c_vocab = app.add_subcommand("build-vocab", "collect the distinct rows of a dataset");
  c_vocab->add_option("--dataset", dataset_dir)->required();
  c_vocab->add_option("--out", out_path)->required();
  c_vocab->callback([&] {
    action = [&] {
      const auto vocab = build_vocab(dataset_matrices(catalog(), dataset_dir));
      write_vocab_file(vocab, out_path);
      std::cout << "vocabulary size " << vocab.size() << "\n";
    };
  });

  // train-embed
  EmbeddingConfig emb_cfg;
  std::string vocab_path;
  auto* c_embed = app.add_subcommand("train-embed", "train the CBOW word embedding");
  c_embed->add_option("--vocab", vocab_path)->required();
  c_embed->add_option("--dataset", dataset_dir)->required();
  c_embed->add_option("--dim", emb_cfg.dim_x);
  c_embed->add_option("--window", emb_cfg.window);
  c_embed->add_option("--epochs", emb_cfg.epochs);
  c_embed->add_option("--lr", emb_cfg.learning_rate);
  c_embed->add_option("--batch", emb_cfg.batch_size);
  c_embed->add_option("--seed", emb_cfg.seed);
  c_embed->add_option("--out", out_path)->required();
  c_embed->callback([&] {
    action = [&] {
      const auto cat = catalog();
      const auto vocab = read_vocab_file(vocab_path, cat.n_types());
      EmbeddingTrainLog log;
      const auto model = cbow_train(dataset_sentences(cat, vocab, dataset_dir), vocab.size(), emb_cfg, &log);
      save_embedding(model, out_path);
      if (!log.epoch_loss.empty()) std::cout << "final loss " << log.epoch_loss.back() << "\n";
    };
  });

  // train-vae
  std::string config_path, emb_path, log_path;
  VaeConfig vae_cfg;
  std::optional<int> o_epochs, o_hidden, o_dim_z, o_batch, o_free, o_ramp;
  std::optional<std::uint64_t> o_seed;
  auto* c_vae = app.add_subcommand("train-vae", "train the sequential VAE");
  c_vae->add_option("--config", config_path, "key=value training configuration");
  c_vae->add_option("--dataset", dataset_dir)->required();
  c_vae->add_option("--vocab", vocab_path)->required();
  c_vae->add_option("--emb", emb_path)->required();
  c_vae->add_option("--out", out_path)->required();
  c_vae->add_option("--log", log_path, "per-epoch loss CSV");
  c_vae->add_option("--epochs", o_epochs);
  c_vae->add_option("--hidden", o_hidden);
  c_vae->add_option("--dim-z", o_dim_z);
  c_vae->add_option("--batch", o_batch);
  c_vae->add_option("--kl-free", o_free);
  c_vae->add_option("--kl-ramp", o_ramp);
  c_vae->add_option("--seed", o_seed);
  c_vae->callback([&] {
    action = [&] {
      const auto cat = catalog();
      VaeConfig cfg = config_path.empty() ? VaeConfig{} : parse_vae_config(read_text(config_path));
      if (o_epochs) cfg.epochs = *o_epochs;
      if (o_hidden) cfg.hidden = *o_hidden;
      if (o_dim_z) cfg.dim_z = *o_dim_z;
      if (o_batch) cfg.batch_size = *o_batch;
      if (o_free) cfg.kl_free_epochs = *o_free;
      if (o_ramp) cfg.kl_ramp_epochs = *o_ramp;
      if (o_seed) cfg.seed = *o_seed;
      validate(cfg);
      const auto vocab = read_vocab_file(vocab_path, cat.n_types());
      auto embedding = load_embedding(emb_path);
      if (embedding.vocab_size() != vocab.size()) throw DataError("embedding and vocabulary sizes differ");
      const auto sentences = dataset_sentences(cat, vocab, dataset_dir);
      ModelBundle bundle{make_seqvae<double>(embedding, vocab.space_index(), cfg.hidden, cfg.dim_z, cfg.seed), vocab,
                         embedding};
      std::ofstream log;
      if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw DataError("cannot open '" + log_path + "' for writing");
        log << "epoch,rec,kl,beta,total\n";
      }
      train(bundle.vae, sentences, cfg, [&](const EpochStats& s) {
        if (log.is_open()) log << s.epoch << ',' << s.rec << ',' << s.kl << ',' << s.beta << ',' << s.total << '\n';
        if ((s.epoch + 1) % 10 == 0 || s.epoch + 1 == cfg.epochs)
          std::cerr << "epoch " << s.epoch + 1 << " rec " << s.rec << " kl " << s.kl << "\n";
      });
      save_model(bundle, out_path);
    };
  });

  // generate
  std::string model_path, out_dir;
  int count = 100;
  std::uint64_t seed = 0;
  auto* c_gen = app.add_subcommand("generate", "sample levels from z ~ N(0, I)");
  c_gen->add_option("--model", model_path)->required();
  c_gen->add_option("--count", count)->check(CLI::NonNegativeNumber);
  c_gen->add_option("--seed", seed);
  c_gen->add_option("--out", out_dir)->required();
  c_gen->callback([&] {
    action = [&] {
      const auto cat = catalog();
      const auto bundle = load_model(model_path, cat.n_types());
      const auto levels = decode_sentences(cat, GridSpec{}, bundle.vocab, sample_sentences(bundle.vae, count, seed));
      write_dataset(levels, cat, out_dir);
      std::cout << "wrote " << levels.size() << " levels to " << out_dir << "\n";
    };
  });

  // evolve
  std::string objective_name = "pigs", mode_name = "dist";
  LveConfig lve_cfg;
  auto* c_evolve = app.add_subcommand("evolve", "latent variable evolution with CMA-ES");
  c_evolve->add_option("--model", model_path)->required();
  c_evolve->add_option("--objective", objective_name)->check(CLI::IsMember({"pigs", "tnt", "difficulty", "aesthetics"}));
  c_evolve->add_option("--mode", mode_name)->check(CLI::IsMember({"dist", "direct"}));
  c_evolve->add_option("--generations", lve_cfg.generations)->check(CLI::PositiveNumber);
  c_evolve->add_option("--lambda", lve_cfg.lambda)->check(CLI::Range(2, 100000));
  c_evolve->add_option("--m", lve_cfg.m, "levels per distribution evaluation")->check(CLI::PositiveNumber);
  c_evolve->add_option("--seed", lve_cfg.seed);
  c_evolve->add_option("--out", out_dir)->required();
  c_evolve->callback([&] {
    action = [&] {
      const auto cat = catalog();
      const auto bundle = load_model(model_path, cat.n_types());
      lve_cfg.mode = parse_lve_mode(mode_name);
      const GridSpec spec;
      const auto generator = vae_generator(cat, spec, bundle);
      const auto result = run_lve(make_objective(cat, objective_name), generator, bundle.vae.shape.dim_z, lve_cfg,
                                  [](const LveHistoryRow& r) {
                                    std::cerr << "generation " << r.generation << " best " << r.best_fitness
                                              << " feature " << r.feature_mean << "\n";
                                  });
      ensure_dir(out_dir);
      write_history_file(result.history, (fs::path(out_dir) / "history.csv").string());
      write_solution_file(result, lve_cfg.mode, (fs::path(out_dir) / "best.bin").string());
      // Ten levels from the best solution.
      const int dz = bundle.vae.shape.dim_z;
      MatrixX<double> z(dz, lve_cfg.mode == LveMode::dist ? 10 : 1);
      if (lve_cfg.mode == LveMode::dist) {
        Rng rng = make_rng(lve_cfg.seed, "evolve.samples");
        std::normal_distribution<double> normal;
        for (Eigen::Index j = 0; j < z.cols(); ++j)
          for (int i = 0; i < dz; ++i) z(i, j) = result.best(i + 1) + std::sqrt(result.best(0)) * normal(rng);
      } else {
        z.col(0) = result.best;
      }
      write_dataset(generator(z), cat, (fs::path(out_dir) / "levels").string());
      std::cout << "best fitness " << result.best_fitness << "\n";
    };
  });

  // metrics
  std::string metric;
  auto* c_metrics = app.add_subcommand("metrics", "diversity or stability report of a level directory");
  c_metrics->add_option("kind", metric, "diversity | stability")->required()->check(CLI::IsMember({"diversity", "stability"}));
  c_metrics->add_option("--in", in_path)->required();
  c_metrics->add_option("--out", out_path)->required();
  c_metrics->callback([&] {
    action = [&] {
      const auto cat = catalog();
      const auto levels = load_levels(cat, in_path);
      if (levels.empty()) throw DataError("'" + in_path + "' contains no levels");
      std::string report;
      if (metric == "stability") {
        const auto r = stability_report(cat, levels);
        report = format_stability_csv(r);
        std::cout << "stability rate " << r.rate << " (" << r.n_stable << "/" << r.n_levels << ")\n";
      } else {
        std::vector<LevelMatrix> matrices;
        long long skipped = 0;
        for (const auto& level : levels) {
          try {
            matrices.push_back(encode(cat, GridSpec{}, level));
          } catch (const DataError&) {
            ++skipped;
          }
        }
        if (matrices.empty()) throw DataError("no level in '" + in_path + "' could be encoded");
        const auto r = diversity(to_sentences(build_vocab(matrices), matrices));
        report = format_diversity_csv(r, skipped);
        std::cout << "distinct-1 " << r.distinct_1 << " distinct-2 " << r.distinct_2 << "\n";
      }
      write_text(out_path, report);
    };
  });

  // render
  auto* c_render = app.add_subcommand("render", "draw a level as SVG");
  c_render->add_option("--in", in_path)->required();
  c_render->add_option("--out", out_path)->required();
  c_render->callback([&] {
    action = [&] {
      const auto cat = catalog();
      render_svg_file(cat, read_level_file(cat, in_path), out_path);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    action();
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return numeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return data;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return data;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return data;
  }
  return ok;
}
