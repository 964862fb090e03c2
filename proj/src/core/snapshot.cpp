#include "snapshot.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "errors.hpp"

namespace nlch {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'C', 'H'};

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

void put_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
    std::uint32_t v;
    if (!in.read(reinterpret_cast<char*>(&v), 4)) fail_io("truncated file while reading " + what);
    return v;
}

double get_f64(std::istream& in, const std::string& what) {
    double v;
    if (!in.read(reinterpret_cast<char*>(&v), 8)) fail_io("truncated file while reading " + what);
    return v;
}

void check_magic(std::istream& in, const std::string& path) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        fail_io("'" + path + "' is not an NLCH file (magic mismatch)");
}

void check_version(std::uint32_t v, const std::string& path) {
    if (v != snapshot_version)
        fail_io("'" + path + "' has format version " + std::to_string(v) +
                "; this reader accepts version " + std::to_string(snapshot_version) + " only");
}

} // namespace

void write_snapshot(const std::string& path, const SnapshotData& snap) {
    const long n = snap.cells[0] * (snap.dim == 2 ? snap.cells[1] : 1);
    if (snap.payload.size() != n) fail_invalid("snapshot payload length mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write snapshot '" + path + "'");
    out.write(kMagic, 4);
    put_u32(out, snapshot_version);
    put_u32(out, static_cast<std::uint32_t>(snap.dim));
    for (int a = 0; a < snap.dim; ++a)
        put_u32(out, static_cast<std::uint32_t>(snap.cells[static_cast<std::size_t>(a)]));
    put_f64(out, snap.time);
    put_f64(out, snap.mean);
    put_f64(out, snap.alpha);
    put_u32(out, snap.potential_family);
    out.write(reinterpret_cast<const char*>(snap.payload.data()),
              static_cast<std::streamsize>(sizeof(double)) * snap.payload.size());
    if (!out) fail_io("short write on snapshot '" + path + "'");
}

SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read snapshot '" + path + "'");
    check_magic(in, path);
    check_version(get_u32(in, "version"), path);

    SnapshotData snap;
    snap.dim = static_cast<int>(get_u32(in, "dimension"));
    if (snap.dim != 1 && snap.dim != 2) fail_io("snapshot dimension must be 1 or 2");
    for (int a = 0; a < snap.dim; ++a)
        snap.cells[static_cast<std::size_t>(a)] = static_cast<int>(get_u32(in, "cells"));
    snap.time = get_f64(in, "time");
    snap.mean = get_f64(in, "mean");
    snap.alpha = get_f64(in, "alpha");
    snap.potential_family = get_u32(in, "potential family");

    const long n = snap.cells[0] * (snap.dim == 2 ? snap.cells[1] : 1);
    if (n <= 0) fail_io("snapshot has no cells");
    snap.payload.resize(n);
    if (!in.read(reinterpret_cast<char*>(snap.payload.data()),
                 static_cast<std::streamsize>(sizeof(double)) * n))
        fail_io("truncated snapshot payload in '" + path + "'");

    double mean = snap.payload.mean();
    if (std::abs(mean - snap.mean) > 1e-12)
        fail_io("snapshot mean " + std::to_string(mean) + " disagrees with header " +
                std::to_string(snap.mean));
    return snap;
}

SnapshotData snapshot_of(const Grid& grid, const State& state, double alpha,
                         std::uint32_t potential_family) {
    SnapshotData snap;
    snap.dim = grid.dim();
    snap.cells = {grid.cells(0), grid.cells(1)};
    snap.time = state.time;
    snap.mean = state.c.mean();
    snap.alpha = alpha;
    snap.potential_family = potential_family;
    snap.payload = state.c;
    return snap;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols()) fail_invalid("matrix export requires a square matrix");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write matrix '" + path + "'");
    out.write(kMagic, 4);
    put_u32(out, snapshot_version);
    put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
    const long n = matrix.rows();
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) put_f64(out, matrix(i, j));
    if (!out) fail_io("short write on matrix '" + path + "'");
}

Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read matrix '" + path + "'");
    check_magic(in, path);
    check_version(get_u32(in, "version"), path);
    const long n = static_cast<long>(get_u32(in, "size"));
    Eigen::MatrixXd m(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) m(i, j) = get_f64(in, "matrix entry");
    return m;
}

} // namespace nlch
