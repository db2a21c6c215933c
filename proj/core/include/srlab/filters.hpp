#pragma once

#include <filesystem>
#include <vector>

#include "srlab/image_io.hpp"
#include "srlab/model.hpp"

namespace srlab {

/// Tile order for a bank's 2-D kernels (index o * n_in + i), by descending variance.
std::vector<int> filter_order_by_variance(const FilterBank& bank);

/// Tiles every f x f kernel of layer `layer` into one gray image, most varied first.
/// Each tile is min-max stretched to [0,255]; a constant kernel renders as 128.
/// Tiles are separated by a 1-pixel white gutter.
ImageU8 filter_grid(const Network& net, int layer);

void export_filters(const Network& net, int layer, const std::filesystem::path& path);

}  // namespace srlab
