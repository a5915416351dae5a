#pragma once

#include <cstdint>
#include <cstring>
#include <string>

#include "ffqls/tensor.hpp"

namespace ffqls {

/// FNV-1a over raw bytes; stable across runs for identical input.
inline std::uint64_t fnv1a(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

/// Hex digest of a matrix (dimensions + entry bit patterns).
inline std::string operator_hash(const Matrix& M) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t rows = M.rows(), cols = M.cols();
  mix(&rows, sizeof rows);
  mix(&cols, sizeof cols);
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      const double re = M(i, j).real(), im = M(i, j).imag();
      mix(&re, sizeof re);
      mix(&im, sizeof im);
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace ffqls
