#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "common/rng.hpp"
#include "nn/params.hpp"

namespace parkour::nn {

using Mat = Eigen::MatrixXd;

enum class Act { Tanh, Relu };

Act act_from_name(std::string_view name);
std::string_view act_name(Act a);
/// In-place elementwise nonlinearity.
void act_forward(Act a, Mat& y);
/// dy ⊙= f'(·), expressed through the post-activation values y.
void act_backward(Act a, const Mat& y, Mat& dy);

/// Fully-connected layer; batches are columns. W is (out × in) column-major
/// inside the flat block, followed by the bias.
struct DenseSpec {
  int in = 0;
  int out = 0;
  std::size_t w_off = 0;
  std::size_t b_off = 0;

  static DenseSpec create(FlatParams& p, const std::string& name, int in, int out);

  void forward(const FlatParams& p, const Mat& x, Mat& y) const;
  /// Accumulates dW, db into grad; if dx != nullptr adds Wᵀ·dy into *dx
  /// (dx must already be sized like x; it is accumulated, not overwritten).
  void backward(const FlatParams& p, const Mat& x, const Mat& dy,
                std::vector<double>& grad, Mat* dx) const;
};

/// 1-D valid convolution, stride `stride`, no padding. Input rows are
/// channel-major: row = channel·len_in + t. W is (out_ch × in_ch·k).
struct Conv1dSpec {
  int in_ch = 0;
  int len_in = 0;
  int out_ch = 0;
  int k = 0;
  int stride = 1;
  std::size_t w_off = 0;
  std::size_t b_off = 0;

  int len_out() const { return (len_in - k) / stride + 1; }

  static Conv1dSpec create(FlatParams& p, const std::string& name, int in_ch,
                           int len_in, int out_ch, int k, int stride);

  /// col is scratch the caller keeps for backward: (in_ch·k × len_out·N).
  void forward(const FlatParams& p, const Mat& x, Mat& col, Mat& y) const;
  void backward(const FlatParams& p, const Mat& col, const Mat& dy,
                std::vector<double>& grad, Mat* dx) const;
};

/// Bottleneck adapter: f_out = f_in + up(act(down(f_in))). The up projection
/// is zero at creation so a fresh adapter is exactly the identity.
struct AdapterSpec {
  DenseSpec down;
  DenseSpec up;

  static AdapterSpec create(FlatParams& p, const std::string& name, int dim,
                            int width);

  /// hidden (width × N) is cached for backward.
  void forward(const FlatParams& p, Act act, const Mat& f_in, Mat& hidden,
               Mat& f_out) const;
  /// df holds dL/df_out on entry and dL/df_in on return (identity + adapter path).
  void backward(const FlatParams& p, Act act, const Mat& f_in, const Mat& hidden,
                Mat& df, std::vector<double>& grad) const;
};

/// Orthogonal rows/columns scaled by gain (QR of a Gaussian matrix,
/// sign-corrected so the factorization is unique).
void orthogonal_fill(Rng& rng, double gain, Eigen::Ref<Mat> w);
void init_dense(FlatParams& p, const DenseSpec& spec, Rng& rng, double gain);
void init_conv(FlatParams& p, const Conv1dSpec& spec, Rng& rng, double gain);

}  // namespace parkour::nn
