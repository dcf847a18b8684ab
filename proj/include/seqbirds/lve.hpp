#pragma once

#include "seqbirds/catalog.hpp"
#include "seqbirds/cmaes.hpp"
#include "seqbirds/codec.hpp"
#include "seqbirds/model_io.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace seqbirds {

/// Maps latent vectors (one per column) to decoded levels.
using LevelGenerator = std::function<std::vector<Level>(const MatrixX<double>& z)>;

LevelGenerator vae_generator(const ObjectCatalog& catalog, const GridSpec& spec, const ModelBundle& model);

struct LveObjective {
  std::string name;
  std::function<double(const Level&)> fitness;  // minimized
  std::function<double(const Level&)> feature;  // reported, e.g. the raw pig count
};

/// One of pigs, tnt, difficulty, aesthetics.
LveObjective make_objective(const ObjectCatalog& catalog, std::string_view name);

/// Mean fitness over m levels drawn from z = lve_mean + sqrt(alpha) * eps.
double evaluate_dist(const LevelGenerator& generator, const std::function<double(const Level&)>& f, double alpha,
                     const VectorX<double>& lve_mean, int m, Rng& rng);

enum class LveMode { dist, direct };

LveMode parse_lve_mode(std::string_view text);
std::string to_string(LveMode mode);

struct LveConfig {
  LveMode mode = LveMode::dist;
  int generations = 60;
  int lambda = 60;
  int m = 30;
  int feature_samples = 10;
  double sigma0 = 0.3;
  double penalty_weight = kPenaltyWeight;
  std::uint64_t seed = 0;
};

struct LveHistoryRow {
  int generation = 0;
  double best_fitness = 0;
  double pop_mean = 0;
  double pop_std = 0;
  double feature_mean = 0;
  double feature_std = 0;
};

struct LveResult {
  /// dist: [alpha, lve_mean...]; direct: z. Always inside the search box.
  VectorX<double> best;
  double best_fitness = 0;
  std::vector<LveHistoryRow> history;
};

SearchSpace<double> lve_space(LveMode mode, int dim_z);

using LveCallback = std::function<void(const LveHistoryRow&)>;

LveResult run_lve(const LveObjective& objective, const LevelGenerator& generator, int dim_z, const LveConfig& config,
                  const LveCallback& callback = {});

std::string format_history(const std::vector<LveHistoryRow>& history);
void write_history_file(const std::vector<LveHistoryRow>& history, const std::string& path);

/// Text header (mode, dim, fitness) followed by the vector as binary64.
void write_solution_file(const LveResult& result, LveMode mode, const std::string& path);
VectorX<double> read_solution_file(const std::string& path);

}  // namespace seqbirds
