#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace parkour::learn {

/// Generalized advantage estimation over a horizon grid: rows are steps, one
/// column per environment. `values` holds V(s_t) for the state each step acts
/// from; `dones(t, e)` marks a transition into a terminal state (nothing is
/// bootstrapped across it); `bootstrap[e]` is V of the state following the
/// final row for environments still running. returns = advantages + values.
struct GaeResult {
  Eigen::MatrixXd advantages;
  Eigen::MatrixXd returns;
};

GaeResult gae(const Eigen::MatrixXd& rewards, const Eigen::MatrixXd& values,
              const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& dones,
              const Eigen::VectorXd& bootstrap, double gamma, double lam);

/// Single-environment convenience over plain sequences.
std::pair<std::vector<double>, std::vector<double>> gae(const std::vector<double>& rewards,
                                                        const std::vector<double>& values,
                                                        const std::vector<bool>& dones,
                                                        double bootstrap, double gamma,
                                                        double lam);

}  // namespace parkour::learn
