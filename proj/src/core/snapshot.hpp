// snapshot.hpp -- binary state snapshots and coupling-matrix export, both
// little-endian with the "NLCH" magic; byte-exact round trips.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>

#include "geometry.hpp"
#include "stepper.hpp"

namespace nlch {

constexpr std::uint32_t snapshot_version = 1;

struct SnapshotData {
    int dim = 1;
    std::array<int, 2> cells{0, 1};
    double time = 0.0;
    double mean = 0.0;
    double alpha = 0.0;
    std::uint32_t potential_family = 0; // 0 logarithmic, 1 polynomial
    Vec payload;                        // row-major cell values
};

// Header: "NLCH" | u32 version | u32 dim | u32 cells per axis (dim of them) |
// f64 time | f64 mean | f64 alpha | u32 potential family | f64 payload.
void write_snapshot(const std::string& path, const SnapshotData& snapshot);
SnapshotData read_snapshot(const std::string& path);

SnapshotData snapshot_of(const Grid& grid, const State& state, double alpha,
                         std::uint32_t potential_family);

// Matrix export: "NLCH" | u32 version | u32 N | N*N f64 row-major.
void write_matrix(const std::string& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix(const std::string& path);

} // namespace nlch
