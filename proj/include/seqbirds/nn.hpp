#pragma once

#include "seqbirds/rng.hpp"
#include "seqbirds/types.hpp"

#include <cmath>
#include <vector>

namespace seqbirds {

/// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) entries.
template <typename Scalar>
void init_uniform(MatrixX<Scalar>& m, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(dist(rng));
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) + (-x).exp()).inverse();
}

/// Column-wise softmax, shifted by the column max.
template <typename Scalar>
MatrixX<Scalar> softmax_columns(const MatrixX<Scalar>& logits) {
  MatrixX<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const Scalar mx = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - mx).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

/// Adaptive-moment gradient descent over an ordered list of tensors.
template <typename Scalar>
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  /// `params[i]` and `grads[i]` must keep their shapes across calls.
  void step(const std::vector<MatrixX<Scalar>*>& params, const std::vector<const MatrixX<Scalar>*>& grads) {
    if (m_.empty()) {
      for (const auto* p : params) {
        m_.push_back(MatrixX<Scalar>::Zero(p->rows(), p->cols()));
        v_.push_back(MatrixX<Scalar>::Zero(p->rows(), p->cols()));
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const Scalar step = static_cast<Scalar>(lr_ * std::sqrt(c2) / c1);
    const Scalar b1 = static_cast<Scalar>(beta1_);
    const Scalar b2 = static_cast<Scalar>(beta2_);
    const Scalar eps_hat = static_cast<Scalar>(eps_ * std::sqrt(c2));
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto g = grads[i]->array();
      m_[i].array() = b1 * m_[i].array() + (Scalar(1) - b1) * g;
      v_[i].array() = b2 * v_[i].array() + (Scalar(1) - b2) * g.square();
      params[i]->array() -= step * m_[i].array() / (v_[i].array().sqrt() + eps_hat);
    }
  }

  long long steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long long t_ = 0;
  std::vector<MatrixX<Scalar>> m_;
  std::vector<MatrixX<Scalar>> v_;
};

/// Rescales gradients in place so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
template <typename Scalar>
double clip_global_norm(const std::vector<MatrixX<Scalar>*>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto* g : grads) sq += static_cast<double>(g->squaredNorm());
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const Scalar s = static_cast<Scalar>(max_norm / norm);
    for (auto* g : grads) *g *= s;
  }
  return norm;
}

}  // namespace seqbirds
