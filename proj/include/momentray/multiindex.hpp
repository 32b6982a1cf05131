// Copyright 2026 The momentray Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace momentray {

/// Exponent vector of a monomial in n variables.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  std::size_t size() const { return exponents_.size(); }
  int operator[](std::size_t i) const { return exponents_[i]; }
  int degree() const { return degree_; }
  std::span<const int> exponents() const { return exponents_; }

  /// Graded lex: lower total degree first; within a degree the exponent
  /// vectors are compared lexicographically with larger leading entries
  /// first, so (2,0) < (1,1) < (0,2).
  std::strong_ordering operator<=>(const MultiIndex &other) const;
  bool operator==(const MultiIndex &other) const = default;

private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Componentwise sum. Throws std::invalid_argument on length mismatch.
MultiIndex add(const MultiIndex &a, const MultiIndex &b);

/// Exact C(a, b); 0 when b > a. Throws std::overflow_error if the value does
/// not fit in 64 bits.
std::uint64_t binomial(std::uint64_t a, std::uint64_t b);

enum class DegreeMode { Exact, UpTo };

class MultiIndexTable {
public:
  /// Throws std::invalid_argument for n == 0 or d < 0.
  static MultiIndexTable build(int n, int d, DegreeMode mode);

  int variables() const { return n_; }
  int degree() const { return d_; }
  DegreeMode mode() const { return mode_; }
  std::size_t size() const { return entries_.size(); }
  const MultiIndex &operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<MultiIndex> &entries() const { return entries_; }

  std::optional<std::size_t> find(const MultiIndex &alpha) const;
  /// Like find() but throws std::out_of_range when alpha is absent.
  std::size_t index_of(const MultiIndex &alpha) const;

private:
  int n_ = 0;
  int d_ = 0;
  DegreeMode mode_ = DegreeMode::UpTo;
  std::vector<MultiIndex> entries_;
  std::map<std::vector<int>, std::size_t> index_;
};

} // namespace momentray
