#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "steadynet/networks.hpp"

namespace testutil {

/// Fresh empty directory under the test scratch root.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::path(STEADYNET_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

/// G(n, p) redrawn until connected, so heterogeneous frequencies can lock.
inline steadynet::PairwiseNetwork connected_er(std::size_t n, double p, steadynet::Rng& rng) {
    auto net = steadynet::gen_er(n, p, steadynet::Directedness::undirected, rng);
    while (!steadynet::is_connected(net)) net = steadynet::gen_er(n, p, steadynet::Directedness::undirected, rng);
    return net;
}

}  // namespace testutil
