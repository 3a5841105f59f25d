#ifndef DIVPRUNE_SYNTHETIC_HPP
#define DIVPRUNE_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "divprune/dataset.hpp"

namespace divprune {

// Two spherical Gaussians with means +/- (separation/2) on every coordinate.
// Labels alternate so both classes are always present; flip_rate injects
// label noise after placement.
Dataset make_two_gaussian(std::size_t n, std::size_t dim, double separation,
                          std::uint64_t seed, const std::string& name = "two-gaussian",
                          double flip_rate = 0.0);

// Structured generators with labels that are deterministic functions of the
// observed features. Each keeps a margin gap around its decision boundary so
// no instance sits arbitrarily close to it.
Dataset make_band(std::size_t n, std::size_t dim, double width, double gap,
                  std::uint64_t seed, const std::string& name = "band");
Dataset make_band_cross(std::size_t n, double width, double gap,
                        std::uint64_t seed, const std::string& name = "band-cross");
Dataset make_checkerboard(std::size_t n, int cells, double gap, double scale,
                          std::uint64_t seed, const std::string& name = "checker");
Dataset make_parity_blobs(std::size_t n, std::size_t dim, double spread,
                          std::uint64_t seed, const std::string& name = "parity-blobs");
Dataset make_radial(std::size_t n, double radius, double gap,
                    std::uint64_t seed, const std::string& name = "radial");

// The eight-dataset suite used by the benchmark harness when no data files
// are supplied. Deterministic under seed.
std::vector<Dataset> benchmark_suite(std::uint64_t seed);

}  // namespace divprune

#endif
