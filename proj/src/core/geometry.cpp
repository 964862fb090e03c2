#include "geometry.hpp"

#include <string>

namespace nlch {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

Grid::Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells, int max_cells)
    : dim_(dim), extent_(extent), cells_(cells) {
    if (dim != 1 && dim != 2) fail_invalid("grid dimension must be 1 or 2");
    if (dim == 1) {
        cells_[1] = 1;
        extent_[1] = 1.0;
    }
    for (int a = 0; a < dim_; ++a) {
        if (extent_[static_cast<std::size_t>(a)] <= 0.0) fail_invalid("grid extent must be positive");
        if (cells_[static_cast<std::size_t>(a)] < 2) fail_invalid("grid needs at least 2 cells per axis");
    }
    total_ = cells_[0] * cells_[1];
    if (total_ > max_cells)
        fail_invalid("grid has " + std::to_string(total_) + " cells, exceeding the cap of " +
                     std::to_string(max_cells));
    h_[0] = extent_[0] / cells_[0];
    h_[1] = dim_ == 2 ? extent_[1] / cells_[1] : 1.0;
    volume_ = dim_ == 2 ? h_[0] * h_[1] : h_[0];
}

std::uint64_t Grid::hash() const {
    std::string desc = std::to_string(dim_) + "|" + std::to_string(extent_[0]) + "|" +
                       std::to_string(extent_[1]) + "|" + std::to_string(cells_[0]) + "|" +
                       std::to_string(cells_[1]);
    return fnv1a(desc);
}

} // namespace nlch
