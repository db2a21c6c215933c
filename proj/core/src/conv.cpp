#include "srlab/conv.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace srlab {
namespace {

// Kernels use GCC vector extensions; one vector per register at the native width.
#if defined(__AVX512F__)
constexpr std::size_t kVecBytes = 64;
#else
constexpr std::size_t kVecBytes = 32;
#endif

template <typename T>
struct VecOf {
  typedef T type __attribute__((vector_size(kVecBytes)));
};
template <typename T>
using Vec = typename VecOf<T>::type;
template <typename T>
constexpr int kLanes = static_cast<int>(kVecBytes / sizeof(T));

template <typename T>
inline Vec<T> load(const T* p) {
  Vec<T> v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <typename T>
inline void store(T* p, const Vec<T>& v) {
  std::memcpy(p, &v, sizeof v);
}

// "Wrapped" layout: output pixel (y, x) lives at p = y * W + x, where W is the
// input width, so tap (r, c) of every output reads input index p + r * W + c.
// Positions with x >= out_w are computed and discarded. Padded extents keep
// every vector load in bounds.
template <typename T>
struct Geometry {
  int height = 0, width = 0, f = 0, out_h = 0, out_w = 0;
  std::size_t span = 0;    // (out_h - 1) * W + out_w
  std::size_t padded = 0;  // span rounded up to 4 vectors
  std::size_t plane = 0;   // input plane stride including the zero tail

  Geometry(int h, int w, int f_) : height(h), width(w), f(f_), out_h(h - f_ + 1), out_w(w - f_ + 1) {
    span = static_cast<std::size_t>(out_h - 1) * width + out_w;
    const std::size_t step = 4 * kLanes<T>;
    padded = (span + step - 1) / step * step;
    plane = static_cast<std::size_t>(height) * width + (padded - span);
  }
};

template <typename T>
std::vector<T> pad_planes(const BasicTensor<T>& t, std::size_t plane) {
  std::vector<T> out(plane * t.channels(), T{0});
  for (int c = 0; c < t.channels(); ++c) {
    auto src = t.channel(c);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(c * plane));
  }
  return out;
}

// OB output channels x XB vectors of wrapped positions starting at p0. Each
// output accumulates its taps in (i, r, c) order with one accumulator, so the
// result does not depend on the block shape or on where the pixel sits.
template <typename T, int OB, int XB>
void correlate_block(const T* in, std::size_t plane, int n_in, int f, int width, const T* w,
                     std::size_t w_stride, std::size_t p0, T* out, std::size_t out_stride) {
  constexpr int L = kLanes<T>;
  Vec<T> acc[OB * XB];
#pragma GCC unroll 32
  for (int k = 0; k < OB * XB; ++k) acc[k] = Vec<T>{};
  for (int i = 0; i < n_in; ++i) {
    for (int r = 0; r < f; ++r) {
      const T* src = in + i * plane + p0 + static_cast<std::size_t>(r) * width;
      const T* wr = w + (static_cast<std::size_t>(i) * f + r) * f;
      for (int c = 0; c < f; ++c) {
        Vec<T> v[XB];
#pragma GCC unroll 8
        for (int x = 0; x < XB; ++x) v[x] = load(src + c + x * L);
#pragma GCC unroll 16
        for (int o = 0; o < OB; ++o) {
          const T wt = wr[o * w_stride + c];
#pragma GCC unroll 8
          for (int x = 0; x < XB; ++x) acc[o * XB + x] += wt * v[x];
        }
      }
    }
  }
#pragma GCC unroll 32
  for (int k = 0; k < OB * XB; ++k) store(out + (k / XB) * out_stride + p0 + (k % XB) * L, acc[k]);
}

template <typename T, int OB, int XB>
void correlate_rows(const T* in, const Geometry<T>& g, int n_in, const T* w, std::size_t w_stride, T* out) {
  for (std::size_t p = 0; p < g.padded; p += XB * kLanes<T>) {
    correlate_block<T, OB, XB>(in, g.plane, n_in, g.f, g.width, w, w_stride, p, out, g.padded);
  }
}

// Bias-free valid correlation into the wrapped layout: out is n_out x g.padded.
template <typename T>
std::vector<T> correlate(const std::vector<T>& in, const Geometry<T>& g, int n_in, const T* weights,
                         int n_out) {
  const std::size_t w_stride = static_cast<std::size_t>(n_in) * g.f * g.f;
  std::vector<T> out(static_cast<std::size_t>(n_out) * g.padded);
  int o = 0;
  for (; o + 8 <= n_out; o += 8) {
    correlate_rows<T, 8, 2>(in.data(), g, n_in, weights + o * w_stride, w_stride, out.data() + o * g.padded);
  }
  for (; o + 4 <= n_out; o += 4) {
    correlate_rows<T, 4, 2>(in.data(), g, n_in, weights + o * w_stride, w_stride, out.data() + o * g.padded);
  }
  for (; o < n_out; ++o) {
    correlate_rows<T, 1, 4>(in.data(), g, n_in, weights + o * w_stride, w_stride, out.data() + o * g.padded);
  }
  return out;
}

// grad_w[o][t] = sum_p go[o][p] * in[offset[t] + p], for OB outputs x TB taps.
template <typename T, int OB, int TB>
void weight_grad_block(const T* go, std::size_t go_stride, const T* in, const std::size_t* offsets,
                       std::size_t padded, T* grad, std::size_t grad_stride) {
  constexpr int L = kLanes<T>;
  const T* src[TB];
#pragma GCC unroll 8
  for (int t = 0; t < TB; ++t) src[t] = in + offsets[t];
  Vec<T> acc[OB * TB];
#pragma GCC unroll 32
  for (int k = 0; k < OB * TB; ++k) acc[k] = Vec<T>{};
  for (std::size_t p = 0; p < padded; p += L) {
    Vec<T> a[OB];
    Vec<T> b[TB];
#pragma GCC unroll 8
    for (int o = 0; o < OB; ++o) a[o] = load(go + o * go_stride + p);
#pragma GCC unroll 8
    for (int t = 0; t < TB; ++t) b[t] = load(src[t] + p);
#pragma GCC unroll 8
    for (int o = 0; o < OB; ++o) {
#pragma GCC unroll 8
      for (int t = 0; t < TB; ++t) acc[o * TB + t] += a[o] * b[t];
    }
  }
  // Lanes are summed in order 0..L-1 for every output; interleaving the
  // outputs keeps the adds independent.
  T sums[OB * TB] = {};
  for (int l = 0; l < L; ++l) {
#pragma GCC unroll 32
    for (int k = 0; k < OB * TB; ++k) sums[k] += acc[k][l];
  }
  for (int k = 0; k < OB * TB; ++k) grad[(k / TB) * grad_stride + k % TB] = sums[k];
}

template <typename T, int OB>
void weight_grad_rows(const T* go, std::size_t go_stride, const T* in, const std::vector<std::size_t>& offsets,
                      std::size_t padded, T* grad, std::size_t grad_stride) {
  const std::size_t taps = offsets.size();
  std::size_t t = 0;
  for (; t + 4 <= taps; t += 4) {
    weight_grad_block<T, OB, 4>(go, go_stride, in, offsets.data() + t, padded, grad + t, grad_stride);
  }
  for (; t < taps; ++t) {
    weight_grad_block<T, OB, 1>(go, go_stride, in, offsets.data() + t, padded, grad + t, grad_stride);
  }
}

template <typename T>
void check_bank(const BasicFilterBank<T>& b) {
  if (b.n_out <= 0 || b.n_in <= 0 || b.f <= 0) throw ConfigError("filter bank dimensions must be positive");
  if (b.weights.size() != static_cast<std::size_t>(b.n_out) * b.n_in * b.f * b.f) {
    throw ConfigError("filter bank weight count does not match its dimensions");
  }
  if (b.biases.size() != static_cast<std::size_t>(b.n_out)) {
    throw ConfigError("filter bank bias count does not match n_out");
  }
}

template <typename T>
void check_input(const BasicTensor<T>& input, const BasicFilterBank<T>& bank) {
  check_bank(bank);
  if (input.channels() != bank.n_in) {
    throw ConfigError("input has " + std::to_string(input.channels()) +
                      " channels, filter bank expects " + std::to_string(bank.n_in));
  }
  valid_extent(input.height(), bank.f);
  valid_extent(input.width(), bank.f);
}

}  // namespace

std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

int valid_extent(int input, int filter) {
  if (input < filter) {
    throw ShapeError("input extent " + std::to_string(input) + " smaller than filter " +
                     std::to_string(filter));
  }
  return input - filter + 1;
}

template <typename T>
BasicFilterBank<T>::BasicFilterBank(int n_out_, int n_in_, int f_)
    : n_out(n_out_),
      n_in(n_in_),
      f(f_),
      weights(static_cast<std::size_t>(n_out_) * n_in_ * f_ * f_, T{0}),
      biases(static_cast<std::size_t>(n_out_), T{0}) {
  check_bank(*this);
}

template <typename T>
BasicFilterBank<T>::BasicFilterBank(int n_out_, int n_in_, int f_, std::vector<T> w, std::vector<T> b)
    : n_out(n_out_), n_in(n_in_), f(f_), weights(std::move(w)), biases(std::move(b)) {
  check_bank(*this);
}

template <typename T>
BasicTensor<T> conv2d_valid(const BasicTensor<T>& input, const BasicFilterBank<T>& bank) {
  check_input(input, bank);
  const Geometry<T> g(input.height(), input.width(), bank.f);
  const auto wrapped = correlate(pad_planes(input, g.plane), g, bank.n_in, bank.weights.data(), bank.n_out);
  BasicTensor<T> out(bank.n_out, g.out_h, g.out_w);
  for (int o = 0; o < bank.n_out; ++o) {
    const T b = bank.biases[o];
    for (int y = 0; y < g.out_h; ++y) {
      const T* src = wrapped.data() + o * g.padded + static_cast<std::size_t>(y) * g.width;
      T* dst = &out.at(o, y, 0);
      for (int x = 0; x < g.out_w; ++x) dst[x] = src[x] + b;
    }
  }
  return out;
}

template <typename T>
ConvGradients<T> conv2d_backward(const BasicTensor<T>& input, const BasicFilterBank<T>& bank,
                                 const BasicTensor<T>& grad_out, bool want_input_grad) {
  check_input(input, bank);
  const Geometry<T> g(input.height(), input.width(), bank.f);
  if (grad_out.shape() != Shape{bank.n_out, g.out_h, g.out_w}) {
    throw ShapeError("grad_out " + to_string(grad_out.shape()) + " does not match conv output " +
                     to_string(Shape{bank.n_out, g.out_h, g.out_w}));
  }
  ConvGradients<T> grads;
  grads.biases.assign(bank.biases.size(), T{0});
  for (int o = 0; o < bank.n_out; ++o) {
    T s{0};
    for (T v : grad_out.channel(o)) s += v;
    grads.biases[o] = s;
  }

  // Weight gradients: grad_out in the wrapped layout, zero at discarded positions.
  std::vector<T> go(static_cast<std::size_t>(bank.n_out) * g.padded, T{0});
  for (int o = 0; o < bank.n_out; ++o) {
    for (int y = 0; y < g.out_h; ++y) {
      const T* src = &grad_out.at(o, y, 0);
      std::copy(src, src + g.out_w, go.begin() + static_cast<std::ptrdiff_t>(o * g.padded + y * g.width));
    }
  }
  const auto in = pad_planes(input, g.plane);
  std::vector<std::size_t> offsets;
  offsets.reserve(bank.weights_per_output());
  for (int i = 0; i < bank.n_in; ++i) {
    for (int r = 0; r < bank.f; ++r) {
      for (int c = 0; c < bank.f; ++c) offsets.push_back(i * g.plane + static_cast<std::size_t>(r) * g.width + c);
    }
  }
  const std::size_t k = bank.weights_per_output();
  grads.weights.assign(bank.weights.size(), T{0});
  int o = 0;
  for (; o + 4 <= bank.n_out; o += 4) {
    weight_grad_rows<T, 4>(go.data() + o * g.padded, g.padded, in.data(), offsets, g.padded,
                           grads.weights.data() + o * k, k);
  }
  for (; o < bank.n_out; ++o) {
    weight_grad_rows<T, 1>(go.data() + o * g.padded, g.padded, in.data(), offsets, g.padded,
                           grads.weights.data() + o * k, k);
  }

  if (want_input_grad) {
    // Full correlation with the flipped, transposed bank over zero-padded grad_out.
    const int f = bank.f;
    BasicTensor<T> padded_go(bank.n_out, g.out_h + 2 * (f - 1), g.out_w + 2 * (f - 1));
    for (int q = 0; q < bank.n_out; ++q) {
      for (int y = 0; y < g.out_h; ++y) {
        const T* src = &grad_out.at(q, y, 0);
        std::copy(src, src + g.out_w, &padded_go.at(q, y + f - 1, f - 1));
      }
    }
    std::vector<T> flipped(bank.weights.size());
    for (int q = 0; q < bank.n_out; ++q) {
      for (int i = 0; i < bank.n_in; ++i) {
        for (int r = 0; r < f; ++r) {
          for (int c = 0; c < f; ++c) {
            flipped[((static_cast<std::size_t>(i) * bank.n_out + q) * f + r) * f + c] =
                bank.weight(q, i, f - 1 - r, f - 1 - c);
          }
        }
      }
    }
    const Geometry<T> gi(padded_go.height(), padded_go.width(), f);
    const auto wrapped = correlate(pad_planes(padded_go, gi.plane), gi, bank.n_out, flipped.data(), bank.n_in);
    grads.input = BasicTensor<T>(input.shape());
    for (int i = 0; i < bank.n_in; ++i) {
      for (int y = 0; y < gi.out_h; ++y) {
        const T* src = wrapped.data() + i * gi.padded + static_cast<std::size_t>(y) * gi.width;
        std::copy(src, src + gi.out_w, &grads.input.at(i, y, 0));
      }
    }
  }
  return grads;
}

template <typename T>
BasicTensor<T> relu(BasicTensor<T> t) {
  for (T& v : t.data()) v = v > T{0} ? v : T{0};
  return t;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& pre_activation, const BasicTensor<T>& grad_out) {
  if (pre_activation.shape() != grad_out.shape()) {
    throw ShapeError("relu_backward shape mismatch: " + to_string(pre_activation.shape()) + " vs " +
                     to_string(grad_out.shape()));
  }
  BasicTensor<T> g = grad_out;
  auto pre = pre_activation.data();
  auto out = g.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(pre[i] > T{0})) out[i] = T{0};
  }
  return g;
}

#define SRLAB_INSTANTIATE_CONV(T)                                                              \
  template struct BasicFilterBank<T>;                                                          \
  template BasicTensor<T> conv2d_valid(const BasicTensor<T>&, const BasicFilterBank<T>&);      \
  template ConvGradients<T> conv2d_backward(const BasicTensor<T>&, const BasicFilterBank<T>&,  \
                                            const BasicTensor<T>&, bool);                      \
  template BasicTensor<T> relu(BasicTensor<T>);                                                \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&, const BasicTensor<T>&);

SRLAB_INSTANTIATE_CONV(float)
SRLAB_INSTANTIATE_CONV(double)

#undef SRLAB_INSTANTIATE_CONV

}  // namespace srlab
