#pragma once

#include "seqbirds/catalog.hpp"
#include "seqbirds/physics.hpp"

namespace seqbirds {

/// Blocks in the sense of the gameplay objectives: Block and TNT objects.
int count_blocks(const ObjectCatalog& catalog, const Level& level);

/// clamp(1 + floor(pigs / 2) + floor(blocks / 30), 1, 10).
int compute_n_birds(const ObjectCatalog& catalog, const Level& level);
int compute_n_birds(int n_pigs, int n_blocks);

// Negated counts; the evolution minimizes.
double objective_pigs(const ObjectCatalog& catalog, const Level& level);
double objective_tnt(const ObjectCatalog& catalog, const Level& level);

struct AgentOutcome {
  int n_birds = 0;
  int n_rem_birds = 0;
  int n_blocks = 0;
  int n_rem_blocks = 0;
  int n_pigs = 0;
  int pigs_destroyed = 0;
};

inline constexpr double kBlastRadius = 0.5;

/// Deterministic scripted play. Each bird hits the leftmost (then lowest)
/// surviving pig and destroys every object centered within `blast_radius`
/// of it; objects left unstable are then removed until the rest is stable.
/// An unstable starting level collapses before any shot.
AgentOutcome heuristic_play(const ObjectCatalog& catalog, const Level& level, double blast_radius = kBlastRadius,
                            const PhysicsParams& physics = {});

/// max(5 - birds, remaining birds) * 10 + blocks.
double difficulty_score(const AgentOutcome& o);
/// max(60 - blocks, blocks - remaining blocks) * 10 - pigs.
double aesthetics_score(const AgentOutcome& o);

double objective_difficulty(const ObjectCatalog& catalog, const Level& level);
double objective_aesthetics(const ObjectCatalog& catalog, const Level& level);

}  // namespace seqbirds
