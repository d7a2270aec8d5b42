#pragma once

#include <cstdint>
#include <vector>

namespace parkour::learn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with a per-scalar trainable mask: parameters (and moments) outside the
/// mask are never touched, bit for bit.
class Adam {
 public:
  explicit Adam(std::size_t n, const AdamConfig& cfg = {});

  void step(std::vector<double>& params, const std::vector<double>& grad,
            const std::vector<std::uint8_t>& mask, double lr);

  void reset();
  long steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

/// Scales the masked components of `grad` in place so their global L2 norm is
/// at most `max_norm`; returns the pre-clip norm. Unmasked components are
/// ignored and untouched.
double clip_grad_norm(std::vector<double>& grad, const std::vector<std::uint8_t>& mask,
                      double max_norm);

}  // namespace parkour::learn
