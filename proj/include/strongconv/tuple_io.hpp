#pragma once

// On-disk matrix tuples: `<path>` holds r k x k matrices back to back, each
// row-major, every entry as little-endian float64 (re, im). The sidecar
// `<path>.json` records {k, r, hermitian_flags}.

#include <filesystem>

#include "strongconv/mattuple.hpp"

namespace strongconv {

void write_tuple(const std::filesystem::path& path, const MatTuple& a);

/// Throws std::runtime_error on IO failure or a size mismatch with the sidecar.
MatTuple read_tuple(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace strongconv
