#pragma once

#include <vector>

#include "srlab/tensor.hpp"

namespace srlab {

/// Weights and biases of one convolutional layer. Any f >= 1 is accepted here;
/// networks restrict layers to odd sizes so outputs stay centered.
///
/// Weights are stored [out][in][row][col]. The layer computes a cross-correlation
/// (no kernel flip), so an exported filter is read in the same orientation as the
/// image patch it is applied to.
template <typename T>
struct BasicFilterBank {
  int n_out = 0;
  int n_in = 0;
  int f = 0;
  std::vector<T> weights;
  std::vector<T> biases;

  BasicFilterBank() = default;
  BasicFilterBank(int n_out, int n_in, int f);
  BasicFilterBank(int n_out, int n_in, int f, std::vector<T> weights, std::vector<T> biases);

  [[nodiscard]] T& weight(int o, int i, int r, int c) {
    return weights[((static_cast<std::size_t>(o) * n_in + i) * f + r) * f + c];
  }
  [[nodiscard]] const T& weight(int o, int i, int r, int c) const {
    return weights[((static_cast<std::size_t>(o) * n_in + i) * f + r) * f + c];
  }
  [[nodiscard]] std::size_t weights_per_output() const {
    return static_cast<std::size_t>(n_in) * f * f;
  }

  template <typename U>
  [[nodiscard]] BasicFilterBank<U> cast() const {
    return BasicFilterBank<U>(n_out, n_in, f, std::vector<U>(weights.begin(), weights.end()),
                              std::vector<U>(biases.begin(), biases.end()));
  }

  friend bool operator==(const BasicFilterBank&, const BasicFilterBank&) = default;
};

using FilterBank = BasicFilterBank<float>;
using FilterBankD = BasicFilterBank<double>;

template <typename T>
struct ConvGradients {
  BasicTensor<T> input;  // empty when not requested
  std::vector<T> weights;
  std::vector<T> biases;
};

/// Valid cross-correlation: out[o][y][x] = b[o] + sum_{i,r,c} w[o][i][r][c] * in[i][y+r][x+c].
/// Output is (n_out, H-f+1, W-f+1).
template <typename T>
BasicTensor<T> conv2d_valid(const BasicTensor<T>& input, const BasicFilterBank<T>& bank);

/// Gradients of conv2d_valid given dL/d(output). grad_input is the zero-padded
/// transposed correlation; pass want_input_grad=false to skip it for a first layer.
template <typename T>
ConvGradients<T> conv2d_backward(const BasicTensor<T>& input, const BasicFilterBank<T>& bank,
                                 const BasicTensor<T>& grad_out, bool want_input_grad = true);

template <typename T>
BasicTensor<T> relu(BasicTensor<T> t);

/// Passes grad_out where pre_activation > 0; the subgradient at exactly 0 is 0.
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& pre_activation, const BasicTensor<T>& grad_out);

/// Spatial output size of a valid correlation, or throws ShapeError.
int valid_extent(int input, int filter);

}  // namespace srlab
