// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <string>

#include "waveroute/errors.hpp"

namespace waveroute {

// A 3x3 Boolean convolution kernel. weights[p][q]: p runs along x (grid i),
// q along y (grid j).
struct HaarKernel {
  std::array<std::array<bool, 3>, 3> weights{};

  int ones() const {
    int n = 0;
    for (const auto& row : weights) n += static_cast<int>(std::count(row.begin(), row.end(), true));
    return n;
  }

  void validate() const {
    if (ones() == 0) throw ParameterError("Haar kernel needs at least one weight equal to 1");
  }

  friend bool operator==(const HaarKernel&, const HaarKernel&) = default;
};

inline constexpr std::size_t kFilterCount = 9;

// Nine kernels F1..F9 plus the output-port assignment: filter f feeds the
// output port at position assignment[f] (row-major, position = 3 * i + j).
struct KernelSet {
  std::array<HaarKernel, kFilterCount> kernels{};
  std::array<int, kFilterCount> assignment{0, 1, 2, 3, 4, 5, 6, 7, 8};

  void validate() const {
    for (const auto& k : kernels) k.validate();
    std::array<int, kFilterCount> sorted = assignment;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < kFilterCount; ++i) {
      if (sorted[i] != static_cast<int>(i)) {
        throw ParameterError("kernel assignment must be a permutation of 0..8");
      }
    }
  }

  friend bool operator==(const KernelSet&, const KernelSet&) = default;
};

inline HaarKernel kernel_from_rows(const char* r0, const char* r1, const char* r2) {
  HaarKernel k;
  const char* rows[3] = {r0, r1, r2};
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) k.weights[p][q] = rows[p][q] == '1';
  }
  return k;
}

/// Shipped default: one decomposition with 37 connections in total.
/// Rows are indexed by p (x), columns by q (y); "top" is p = 0, "left" q = 0.
inline KernelSet default_kernel_set() {
  KernelSet ks;
  ks.kernels = {
      kernel_from_rows("111", "111", "111"),  // F1 all ones
      kernel_from_rows("110", "110", "110"),  // F2 left two columns
      kernel_from_rows("111", "111", "000"),  // F3 top two rows
      kernel_from_rows("100", "100", "100"),  // F4 left column
      kernel_from_rows("001", "001", "001"),  // F5 right column
      kernel_from_rows("111", "000", "000"),  // F6 top row
      kernel_from_rows("000", "000", "111"),  // F7 bottom row
      kernel_from_rows("010", "010", "010"),  // F8 center column
      kernel_from_rows("000", "010", "000"),  // F9 center pixel
  };
  return ks;
}

inline int connection_count(const KernelSet& ks) {
  return std::accumulate(ks.kernels.begin(), ks.kernels.end(), 0,
                         [](int acc, const HaarKernel& k) { return acc + k.ones(); });
}

}  // namespace waveroute
