#include "learn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace parkour::learn {

Adam::Adam(std::size_t n, const AdamConfig& cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad,
                const std::vector<std::uint8_t>& mask, double lr) {
  const std::size_t n = m_.size();
  if (params.size() != n || grad.size() != n || mask.size() != n)
    throw std::invalid_argument("adam: size mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const double g = grad[i];
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

void Adam::reset() {
  m_.assign(m_.size(), 0.0);
  v_.assign(v_.size(), 0.0);
  t_ = 0;
}

double clip_grad_norm(std::vector<double>& grad, const std::vector<std::uint8_t>& mask,
                      double max_norm) {
  if (grad.size() != mask.size()) throw std::invalid_argument("clip_grad_norm: size mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (mask[i]) sq += grad[i] * grad[i];
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (std::size_t i = 0; i < grad.size(); ++i)
      if (mask[i]) grad[i] *= scale;
  }
  return norm;
}

}  // namespace parkour::learn
