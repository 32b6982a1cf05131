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

#include "momentray/multiindex.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace momentray {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0)
      throw std::invalid_argument("multi-index exponents must be nonnegative");
  }
  degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex &other) const {
  if (degree_ != other.degree_)
    return degree_ <=> other.degree_;
  // Reversed lexicographic comparison: the larger exponent vector sorts first.
  return other.exponents_ <=> exponents_;
}

MultiIndex add(const MultiIndex &a, const MultiIndex &b) {
  if (a.size() != b.size())
    throw std::invalid_argument("multi-index length mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  std::vector<int> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    sum[i] = a[i] + b[i];
  return MultiIndex(std::move(sum));
}

std::uint64_t binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a)
    return 0;
  b = std::min(b, a - b);
  // Multiplicative formula; every partial product C(a-b+i, i) is an integer.
  unsigned __int128 value = 1;
  for (std::uint64_t i = 1; i <= b; ++i) {
    value = value * (a - b + i) / i;
    if (value > UINT64_MAX)
      throw std::overflow_error("binomial coefficient exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

namespace {

// Appends all exponent vectors of total degree `remaining` over positions
// [pos, n), largest leading exponent first.
void enumerate_degree(std::vector<int> &current, std::size_t pos, int remaining,
                      std::vector<MultiIndex> &out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    enumerate_degree(current, pos + 1, remaining - e, out);
  }
  current[pos] = 0;
}

} // namespace

MultiIndexTable MultiIndexTable::build(int n, int d, DegreeMode mode) {
  if (n < 1)
    throw std::invalid_argument("multi-index table needs at least one variable");
  if (d < 0)
    throw std::invalid_argument("multi-index table degree must be nonnegative");

  MultiIndexTable table;
  table.n_ = n;
  table.d_ = d;
  table.mode_ = mode;

  std::vector<int> scratch(static_cast<std::size_t>(n), 0);
  const int lowest = mode == DegreeMode::Exact ? d : 0;
  for (int k = lowest; k <= d; ++k)
    enumerate_degree(scratch, 0, k, table.entries_);

  for (std::size_t i = 0; i < table.entries_.size(); ++i) {
    const auto exps = table.entries_[i].exponents();
    table.index_.emplace(std::vector<int>(exps.begin(), exps.end()), i);
  }
  return table;
}

std::optional<std::size_t> MultiIndexTable::find(const MultiIndex &alpha) const {
  const auto exps = alpha.exponents();
  auto it = index_.find(std::vector<int>(exps.begin(), exps.end()));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

std::size_t MultiIndexTable::index_of(const MultiIndex &alpha) const {
  if (auto idx = find(alpha))
    return *idx;
  throw std::out_of_range("multi-index not present in table");
}

} // namespace momentray
