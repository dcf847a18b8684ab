#include "seqbirds/lve.hpp"

#include "seqbirds/objectives.hpp"
#include "seqbirds/tensor_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace seqbirds {

LevelGenerator vae_generator(const ObjectCatalog& catalog, const GridSpec& spec, const ModelBundle& model) {
  return [&catalog, spec, &model](const MatrixX<double>& z) {
    std::vector<Level> levels;
    levels.reserve(static_cast<std::size_t>(z.cols()));
    for (const auto& sentence : generate_batch(model.vae, z, kMaxRow))
      levels.push_back(decode(catalog, spec, sentence_to_matrix(model.vocab, sentence)));
    return levels;
  };
}

LveObjective make_objective(const ObjectCatalog& catalog, std::string_view name) {
  const ObjectCatalog* cat = &catalog;
  if (name == "pigs") {
    return {"pigs", [cat](const Level& l) { return objective_pigs(*cat, l); },
            [cat](const Level& l) { return static_cast<double>(count_category(*cat, l, Category::pig)); }};
  }
  if (name == "tnt") {
    return {"tnt", [cat](const Level& l) { return objective_tnt(*cat, l); },
            [cat](const Level& l) { return static_cast<double>(count_category(*cat, l, Category::tnt)); }};
  }
  if (name == "difficulty") {
    auto f = [cat](const Level& l) { return objective_difficulty(*cat, l); };
    return {"difficulty", f, f};
  }
  if (name == "aesthetics") {
    auto f = [cat](const Level& l) { return objective_aesthetics(*cat, l); };
    return {"aesthetics", f, f};
  }
  throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
}

namespace {

MatrixX<double> standard_normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal;
  MatrixX<double> eps(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) eps(i, j) = normal(rng);
  return eps;
}

MatrixX<double> dist_latents(double alpha, const VectorX<double>& lve_mean, const MatrixX<double>& eps) {
  MatrixX<double> z = std::sqrt(alpha) * eps;
  z.colwise() += lve_mean;
  return z;
}

struct Moments {
  double mean = 0;
  double std = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.std += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(m.std / static_cast<double>(v.size()));
  return m;
}

void check_finite(double v, const std::string& name) {
  if (!std::isfinite(v)) throw NumericError("objective '" + name + "' returned a non-finite value");
}

}  // namespace

double evaluate_dist(const LevelGenerator& generator, const std::function<double(const Level&)>& f, double alpha,
                     const VectorX<double>& lve_mean, int m, Rng& rng) {
  if (alpha < 0) throw std::invalid_argument("evaluate_dist: alpha must be non-negative");
  if (m < 1) throw std::invalid_argument("evaluate_dist: m must be positive");
  const auto eps = standard_normal(static_cast<int>(lve_mean.size()), m, rng);
  double sum = 0;
  for (const auto& level : generator(dist_latents(alpha, lve_mean, eps))) sum += f(level);
  return sum / m;
}

LveMode parse_lve_mode(std::string_view text) {
  if (text == "dist") return LveMode::dist;
  if (text == "direct") return LveMode::direct;
  throw std::invalid_argument("unknown lve mode '" + std::string(text) + "'");
}

std::string to_string(LveMode mode) { return mode == LveMode::dist ? "dist" : "direct"; }

SearchSpace<double> lve_space(LveMode mode, int dim_z) {
  if (mode == LveMode::direct)
    return {VectorX<double>::Constant(dim_z, -3.0), VectorX<double>::Constant(dim_z, 3.0)};
  VectorX<double> lo(dim_z + 1), hi(dim_z + 1);
  lo << 0.0, VectorX<double>::Constant(dim_z, -3.0);
  hi << 2.0, VectorX<double>::Constant(dim_z, 3.0);
  return {lo, hi};
}

LveResult run_lve(const LveObjective& objective, const LevelGenerator& generator, int dim_z, const LveConfig& config,
                  const LveCallback& callback) {
  if (config.generations < 1) throw std::invalid_argument("lve needs at least one generation");
  const auto space = lve_space(config.mode, dim_z);
  auto state = make_cmaes<double>(space.center(), config.sigma0, config.lambda, space.width());
  Rng ask_rng = make_rng(config.seed, "lve.ask");

  LveResult result;
  result.best_fitness = std::numeric_limits<double>::infinity();
  const int lambda = state.lambda;

  for (int gen = 0; gen < config.generations; ++gen) {
    const MatrixX<double> candidates = cmaes_ask(state, ask_rng);
    std::vector<Bounded<double>> feasible;
    for (int k = 0; k < lambda; ++k) feasible.push_back(apply_bounds(space, VectorX<double>(candidates.col(k)), config.penalty_weight));

    std::vector<double> raw(static_cast<std::size_t>(lambda), 0.0);
    if (config.mode == LveMode::dist) {
      // Common random numbers: every candidate of a generation sees the same eps.
      Rng crn = make_rng(config.seed, "lve.crn", static_cast<std::uint64_t>(gen));
      const auto eps = standard_normal(dim_z, config.m, crn);
      MatrixX<double> z(dim_z, static_cast<Eigen::Index>(lambda) * config.m);
      for (int k = 0; k < lambda; ++k) {
        const auto& x = feasible[static_cast<std::size_t>(k)].x;
        z.middleCols(static_cast<Eigen::Index>(k) * config.m, config.m) = dist_latents(x(0), x.tail(dim_z), eps);
      }
      const auto levels = generator(z);
      for (int k = 0; k < lambda; ++k) {
        double sum = 0;
        for (int i = 0; i < config.m; ++i) sum += objective.fitness(levels[static_cast<std::size_t>(k * config.m + i)]);
        raw[static_cast<std::size_t>(k)] = sum / config.m;
      }
    } else {
      MatrixX<double> z(dim_z, lambda);
      for (int k = 0; k < lambda; ++k) z.col(k) = feasible[static_cast<std::size_t>(k)].x;
      const auto levels = generator(z);
      for (int k = 0; k < lambda; ++k) raw[static_cast<std::size_t>(k)] = objective.fitness(levels[static_cast<std::size_t>(k)]);
    }

    std::vector<double> fitness(raw.size());
    int gen_best = 0;
    for (int k = 0; k < lambda; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      check_finite(raw[ku], objective.name);
      fitness[ku] = raw[ku] + feasible[ku].penalty;
      if (raw[ku] < raw[static_cast<std::size_t>(gen_best)]) gen_best = k;
    }
    const auto& best_x = feasible[static_cast<std::size_t>(gen_best)].x;
    if (raw[static_cast<std::size_t>(gen_best)] < result.best_fitness) {
      result.best_fitness = raw[static_cast<std::size_t>(gen_best)];
      result.best = best_x;
    }

    LveHistoryRow row;
    row.generation = gen;
    row.best_fitness = result.best_fitness;
    const auto pop = moments(raw);
    row.pop_mean = pop.mean;
    row.pop_std = pop.std;
    std::vector<double> features;
    if (config.mode == LveMode::dist) {
      Rng frng = make_rng(config.seed, "lve.feature", static_cast<std::uint64_t>(gen));
      const auto eps = standard_normal(dim_z, config.feature_samples, frng);
      for (const auto& level : generator(dist_latents(best_x(0), best_x.tail(dim_z), eps)))
        features.push_back(objective.feature(level));
    } else {
      features.push_back(objective.feature(generator(MatrixX<double>(best_x)).front()));
    }
    const auto feat = moments(features);
    row.feature_mean = feat.mean;
    row.feature_std = feat.std;
    result.history.push_back(row);
    if (callback) callback(row);

    cmaes_tell(state, candidates, fitness);
  }
  return result;
}

std::string format_history(const std::vector<LveHistoryRow>& history) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "generation,best_fitness,pop_mean,pop_std,feature_mean,feature_std\n";
  for (const auto& r : history)
    out << r.generation << ',' << r.best_fitness << ',' << r.pop_mean << ',' << r.pop_std << ',' << r.feature_mean
        << ',' << r.feature_std << '\n';
  return out.str();
}

void write_history_file(const std::vector<LveHistoryRow>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << format_history(history);
}

void write_solution_file(const LveResult& result, LveMode mode, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  Header h;
  h.set("mode", to_string(mode));
  h.set("dim", static_cast<int>(result.best.size()));
  std::ostringstream fit;
  fit << std::setprecision(17) << result.best_fitness;
  h.set("fitness", fit.str());
  write_header(out, h);
  write_f64(out, result.best.data(), static_cast<std::size_t>(result.best.size()));
}

VectorX<double> read_solution_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  const auto h = read_header(in);
  const auto dim = h.get_int("dim");
  if (dim < 1 || dim > 100000) throw DataError("solution file has an invalid dimension");
  VectorX<double> x(dim);
  read_f64(in, x.data(), static_cast<std::size_t>(dim));
  return x;
}

}  // namespace seqbirds
