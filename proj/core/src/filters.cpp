#include "srlab/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace srlab {
namespace {

double kernel_variance(const FilterBank& bank, int tile) {
  const std::size_t area = static_cast<std::size_t>(bank.f) * bank.f;
  const float* k = bank.weights.data() + tile * area;
  double mean = 0.0;
  for (std::size_t i = 0; i < area; ++i) mean += k[i];
  mean /= static_cast<double>(area);
  double var = 0.0;
  for (std::size_t i = 0; i < area; ++i) var += (k[i] - mean) * (k[i] - mean);
  return var / static_cast<double>(area);
}

}  // namespace

std::vector<int> filter_order_by_variance(const FilterBank& bank) {
  const int tiles = bank.n_out * bank.n_in;
  std::vector<double> var(tiles);
  for (int t = 0; t < tiles; ++t) var[t] = kernel_variance(bank, t);
  std::vector<int> order(tiles);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return var[a] > var[b]; });
  return order;
}

ImageU8 filter_grid(const Network& net, int layer) {
  if (layer < 0 || layer >= static_cast<int>(net.banks.size())) {
    throw ConfigError("layer " + std::to_string(layer) + " out of range (network has " +
                      std::to_string(net.banks.size()) + " layers)");
  }
  const FilterBank& bank = net.banks[layer];
  const auto order = filter_order_by_variance(bank);
  const int tiles = static_cast<int>(order.size());
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(tiles))));
  const int rows = (tiles + cols - 1) / cols;
  const int f = bank.f;
  const int pitch = f + 1;
  ImageU8 img(1, rows * pitch + 1, cols * pitch + 1);
  std::fill(img.data.begin(), img.data.end(), 255);

  const std::size_t area = static_cast<std::size_t>(f) * f;
  for (int slot = 0; slot < tiles; ++slot) {
    const float* k = bank.weights.data() + order[slot] * area;
    const auto [lo, hi] = std::minmax_element(k, k + area);
    const int oy = 1 + (slot / cols) * pitch;
    const int ox = 1 + (slot % cols) * pitch;
    for (int r = 0; r < f; ++r) {
      for (int c = 0; c < f; ++c) {
        const float v = k[r * f + c];
        const double n = *hi > *lo ? (v - *lo) / static_cast<double>(*hi - *lo) * 255.0 : 128.0;
        img.at(oy + r, ox + c, 0) = static_cast<std::uint8_t>(std::round(n));
      }
    }
  }
  return img;
}

void export_filters(const Network& net, int layer, const std::filesystem::path& path) {
  save_image(path, filter_grid(net, layer));
}

}  // namespace srlab
