#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srlab/error.hpp"

namespace srlab {

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Planar dense array: channels outermost, then rows, then columns.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  BasicTensor(int channels, int height, int width, T fill = T{0})
      : shape_{channels, height, width} {
    if (channels < 0 || height < 0 || width < 0) {
      throw ShapeError("negative tensor dimension");
    }
    data_.assign(shape_.size(), fill);
  }

  explicit BasicTensor(Shape shape, T fill = T{0})
      : BasicTensor(shape.channels, shape.height, shape.width, fill) {}

  BasicTensor(int channels, int height, int width, std::vector<T> data)
      : shape_{channels, height, width}, data_(std::move(data)) {
    if (channels < 0 || height < 0 || width < 0) {
      throw ShapeError("negative tensor dimension");
    }
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match " + to_string(shape_));
    }
  }

  [[nodiscard]] int channels() const { return shape_.channels; }
  [[nodiscard]] int height() const { return shape_.height; }
  [[nodiscard]] int width() const { return shape_.width; }
  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  [[nodiscard]] std::span<T> data() & { return data_; }
  [[nodiscard]] std::span<const T> data() const& { return data_; }
  // A span into a temporary would dangle.
  std::span<const T> data() const&& = delete;
  [[nodiscard]] const std::vector<T>& vector() const { return data_; }

  [[nodiscard]] std::span<T> channel(int c) & {
    const std::size_t plane = plane_size();
    return std::span<T>(data_).subspan(c * plane, plane);
  }
  [[nodiscard]] std::span<const T> channel(int c) const& {
    const std::size_t plane = plane_size();
    return std::span<const T>(data_).subspan(c * plane, plane);
  }
  std::span<const T> channel(int c) const&& = delete;

  [[nodiscard]] T& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  [[nodiscard]] const T& at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  [[nodiscard]] std::size_t plane_size() const {
    return static_cast<std::size_t>(shape_.height) * shape_.width;
  }

  template <typename U>
  [[nodiscard]] BasicTensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_.channels, shape_.height, shape_.width, std::move(out));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  [[nodiscard]] std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x;
  }

  Shape shape_{};
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

/// Copies a rectangular window of every channel.
template <typename T>
BasicTensor<T> crop(const BasicTensor<T>& t, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height <= 0 || width <= 0 || top + height > t.height() ||
      left + width > t.width()) {
    throw ShapeError("crop window outside " + to_string(t.shape()));
  }
  BasicTensor<T> out(t.channels(), height, width);
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) out.at(c, y, x) = t.at(c, top + y, left + x);
    }
  }
  return out;
}

/// Extracts a subset of channels, in the given order.
template <typename T>
BasicTensor<T> select_channels(const BasicTensor<T>& t, std::span<const int> which) {
  BasicTensor<T> out(static_cast<int>(which.size()), t.height(), t.width());
  for (std::size_t i = 0; i < which.size(); ++i) {
    if (which[i] < 0 || which[i] >= t.channels()) throw ShapeError("channel index out of range");
    auto src = t.channel(which[i]);
    auto dst = out.channel(static_cast<int>(i));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

/// Replaces channel `index` of `dst` by the single channel of `src`.
template <typename T>
void set_channel(BasicTensor<T>& dst, int index, const BasicTensor<T>& src) {
  if (src.channels() != 1 || src.height() != dst.height() || src.width() != dst.width()) {
    throw ShapeError("set_channel: source " + to_string(src.shape()) + " vs " +
                     to_string(dst.shape()));
  }
  auto s = src.channel(0);
  std::copy(s.begin(), s.end(), dst.channel(index).begin());
}

/// Edge-replicating pad by `amount` on every side.
template <typename T>
BasicTensor<T> pad_replicate(const BasicTensor<T>& t, int amount) {
  if (amount < 0) throw ShapeError("negative padding");
  if (t.empty()) throw ShapeError("cannot pad an empty tensor");
  const int h = t.height() + 2 * amount;
  const int w = t.width() + 2 * amount;
  BasicTensor<T> out(t.channels(), h, w);
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      const int sy = std::clamp(y - amount, 0, t.height() - 1);
      for (int x = 0; x < w; ++x) {
        const int sx = std::clamp(x - amount, 0, t.width() - 1);
        out.at(c, y, x) = t.at(c, sy, sx);
      }
    }
  }
  return out;
}

}  // namespace srlab
