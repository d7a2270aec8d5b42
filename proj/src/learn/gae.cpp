#include "learn/gae.hpp"

#include <stdexcept>

namespace parkour::learn {

GaeResult gae(const Eigen::MatrixXd& rewards, const Eigen::MatrixXd& values,
              const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& dones,
              const Eigen::VectorXd& bootstrap, double gamma, double lam) {
  const Eigen::Index T = rewards.rows(), N = rewards.cols();
  if (values.rows() != T || values.cols() != N || dones.rows() != T || dones.cols() != N ||
      bootstrap.size() != N)
    throw std::invalid_argument("gae: misaligned inputs");

  GaeResult out;
  out.advantages.resize(T, N);
  for (Eigen::Index e = 0; e < N; ++e) {
    double next_adv = 0.0;
    double next_value = bootstrap[e];
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      const double live = dones(t, e) ? 0.0 : 1.0;
      const double delta = rewards(t, e) + gamma * live * next_value - values(t, e);
      next_adv = delta + gamma * lam * live * next_adv;
      out.advantages(t, e) = next_adv;
      next_value = values(t, e);
    }
  }
  out.returns = out.advantages + values;
  return out;
}

std::pair<std::vector<double>, std::vector<double>> gae(const std::vector<double>& rewards,
                                                        const std::vector<double>& values,
                                                        const std::vector<bool>& dones,
                                                        double bootstrap, double gamma,
                                                        double lam) {
  if (values.size() != rewards.size() || dones.size() != rewards.size())
    throw std::invalid_argument("gae: misaligned inputs");
  const Eigen::Index T = static_cast<Eigen::Index>(rewards.size());
  Eigen::MatrixXd r(T, 1), v(T, 1);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> d(T, 1);
  for (Eigen::Index t = 0; t < T; ++t) {
    r(t, 0) = rewards[t];
    v(t, 0) = values[t];
    d(t, 0) = dones[t];
  }
  Eigen::VectorXd boot(1);
  boot[0] = bootstrap;
  const GaeResult res = gae(r, v, d, boot, gamma, lam);
  std::vector<double> adv(T), ret(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    adv[t] = res.advantages(t, 0);
    ret[t] = res.returns(t, 0);
  }
  return {std::move(adv), std::move(ret)};
}

}  // namespace parkour::learn
