#pragma once

#include "seqbirds/rng.hpp"
#include "seqbirds/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace seqbirds {

template <typename Scalar>
struct CmaesState {
  VectorX<Scalar> mean;
  Scalar sigma = 1;
  MatrixX<Scalar> C;
  VectorX<Scalar> p_sigma;
  VectorX<Scalar> p_c;
  int lambda = 0;
  int mu = 0;
  VectorX<Scalar> weights;
  Scalar mu_eff = 0;
  Scalar c_sigma = 0;
  Scalar d_sigma = 0;
  Scalar c_c = 0;
  Scalar c_1 = 0;
  Scalar c_mu = 0;
  Scalar chi_n = 0;
  int generation = 0;
  // Eigendecomposition of C: C = B diag(D^2) B^T.
  MatrixX<Scalar> B;
  VectorX<Scalar> D;
  int repairs = 0;

  int dim() const { return static_cast<int>(mean.size()); }
};

inline int default_lambda(int n) { return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n)))); }

template <typename Scalar>
void update_eigensystem(CmaesState<Scalar>& s) {
  s.C = (s.C + s.C.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(s.C);
  VectorX<Scalar> ev = eig.eigenvalues();
  const Scalar floor_ev(1e-14);
  if (eig.info() != Eigen::Success || (ev.array() < floor_ev).any()) ++s.repairs;
  ev = ev.cwiseMax(floor_ev);
  s.B = eig.eigenvectors();
  s.D = ev.cwiseSqrt();
}

/// Standard (mu/mu_w, lambda) strategy constants. `scales` gives the initial
/// per-coordinate standard deviation relative to sigma (C0 = diag(scales^2)).
template <typename Scalar>
CmaesState<Scalar> make_cmaes(const VectorX<Scalar>& mean, Scalar sigma, int lambda = 0,
                              const VectorX<Scalar>& scales = {}) {
  const int n = static_cast<int>(mean.size());
  if (n < 1) throw std::invalid_argument("cma-es needs at least one dimension");
  if (!(sigma > 0)) throw std::invalid_argument("cma-es step size must be positive");
  CmaesState<Scalar> s;
  s.mean = mean;
  s.sigma = sigma;
  s.lambda = lambda > 0 ? lambda : default_lambda(n);
  if (s.lambda < 2) throw std::invalid_argument("cma-es population must hold at least two candidates");
  s.mu = s.lambda / 2;
  s.weights.resize(s.mu);
  for (int i = 0; i < s.mu; ++i)
    s.weights(i) = Scalar(std::log(s.mu + 0.5) - std::log(static_cast<double>(i + 1)));
  s.weights /= s.weights.sum();
  s.mu_eff = Scalar(1) / s.weights.squaredNorm();

  const Scalar nn(n);
  s.c_sigma = (s.mu_eff + 2) / (nn + s.mu_eff + 5);
  s.d_sigma = 1 + 2 * std::max(Scalar(0), std::sqrt((s.mu_eff - 1) / (nn + 1)) - 1) + s.c_sigma;
  s.c_c = (4 + s.mu_eff / nn) / (nn + 4 + 2 * s.mu_eff / nn);
  s.c_1 = 2 / ((nn + Scalar(1.3)) * (nn + Scalar(1.3)) + s.mu_eff);
  s.c_mu = std::min(1 - s.c_1, 2 * (s.mu_eff - 2 + 1 / s.mu_eff) / ((nn + 2) * (nn + 2) + s.mu_eff));
  s.chi_n = std::sqrt(nn) * (1 - 1 / (4 * nn) + 1 / (21 * nn * nn));

  s.C = MatrixX<Scalar>::Identity(n, n);
  if (scales.size() == n) s.C = scales.array().square().matrix().asDiagonal();
  s.p_sigma = VectorX<Scalar>::Zero(n);
  s.p_c = VectorX<Scalar>::Zero(n);
  update_eigensystem(s);
  return s;
}

/// Columns are candidates.
template <typename Scalar>
MatrixX<Scalar> cmaes_ask(const CmaesState<Scalar>& s, Rng& rng) {
  const int n = s.dim();
  std::normal_distribution<double> normal;
  MatrixX<Scalar> z(n, s.lambda);
  for (int k = 0; k < s.lambda; ++k)
    for (int i = 0; i < n; ++i) z(i, k) = Scalar(normal(rng));
  MatrixX<Scalar> x = s.B * (s.D.asDiagonal() * z);
  x *= s.sigma;
  x.colwise() += s.mean;
  return x;
}

/// Candidate indices sorted by fitness; equal fitnesses keep candidate order.
inline std::vector<int> rank_candidates(const std::vector<double>& fitness) {
  std::vector<int> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitness[static_cast<std::size_t>(a)] < fitness[static_cast<std::size_t>(b)]; });
  return order;
}

template <typename Scalar>
void cmaes_tell(CmaesState<Scalar>& s, const MatrixX<Scalar>& candidates, const std::vector<double>& fitness) {
  const int n = s.dim();
  if (candidates.rows() != n || candidates.cols() != s.lambda || static_cast<int>(fitness.size()) != s.lambda)
    throw std::invalid_argument("cma-es tell: candidate and fitness counts must equal lambda");
  for (double f : fitness)
    if (std::isnan(f)) throw NumericError("cma-es tell: fitness is NaN");

  ++s.generation;
  // A flat population carries no ranking information.
  if (std::all_of(fitness.begin(), fitness.end(), [&](double f) { return f == fitness.front(); })) return;

  const auto order = rank_candidates(fitness);
  MatrixX<Scalar> y(n, s.mu);
  for (int i = 0; i < s.mu; ++i) y.col(i) = (candidates.col(order[static_cast<std::size_t>(i)]) - s.mean) / s.sigma;
  const VectorX<Scalar> y_w = y * s.weights;
  s.mean += s.sigma * y_w;

  const VectorX<Scalar> c_inv_sqrt_y = s.B * ((s.B.transpose() * y_w).array() / s.D.array()).matrix();
  s.p_sigma = (1 - s.c_sigma) * s.p_sigma + std::sqrt(s.c_sigma * (2 - s.c_sigma) * s.mu_eff) * c_inv_sqrt_y;
  const Scalar ps_norm = s.p_sigma.norm();
  const Scalar decay = 1 - std::pow(1 - s.c_sigma, Scalar(2 * s.generation));
  const bool h_sigma = ps_norm / std::sqrt(decay) < (Scalar(1.4) + Scalar(2) / Scalar(n + 1)) * s.chi_n;
  s.p_c = (1 - s.c_c) * s.p_c;
  if (h_sigma) s.p_c += std::sqrt(s.c_c * (2 - s.c_c) * s.mu_eff) * y_w;

  const Scalar delta = h_sigma ? Scalar(0) : s.c_c * (2 - s.c_c);
  MatrixX<Scalar> rank_mu = y * s.weights.asDiagonal() * y.transpose();
  s.C = (1 - s.c_1 - s.c_mu) * s.C + s.c_1 * (s.p_c * s.p_c.transpose() + delta * s.C) + s.c_mu * rank_mu;
  s.sigma *= std::exp((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1));
  update_eigensystem(s);
}

template <typename Scalar>
struct SearchSpace {
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;

  SearchSpace() = default;
  SearchSpace(VectorX<Scalar> lo, VectorX<Scalar> hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw std::invalid_argument("search space bounds differ in dimension");
    if (!(lower.array() < upper.array()).all()) throw std::invalid_argument("search space needs lower < upper");
  }
  int dim() const { return static_cast<int>(lower.size()); }
  VectorX<Scalar> center() const { return (lower + upper) / Scalar(2); }
  VectorX<Scalar> width() const { return upper - lower; }
};

inline constexpr double kPenaltyWeight = 1e-2;

template <typename Scalar>
struct Bounded {
  VectorX<Scalar> x;
  Scalar penalty = 0;
};

template <typename Scalar>
Bounded<Scalar> apply_bounds(const SearchSpace<Scalar>& space, const VectorX<Scalar>& x,
                             Scalar weight = Scalar(kPenaltyWeight)) {
  if (x.size() != space.dim()) throw std::invalid_argument("apply_bounds: dimension mismatch");
  Bounded<Scalar> out;
  out.x = x.cwiseMax(space.lower).cwiseMin(space.upper);
  out.penalty = weight * (x - out.x).squaredNorm();
  return out;
}

}  // namespace seqbirds
