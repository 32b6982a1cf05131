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


#include "momentray/experiments.hpp"

#include "momentray/multiindex.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace momentray {
namespace {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void validate_options(const SweepOptions &o) {
  if (o.n < 1 || o.d < 1)
    throw std::invalid_argument("need n >= 1 and d >= 1");
  if (o.trials < 1)
    throw std::invalid_argument("need at least one trial");
  if (o.workers < 0)
    throw std::invalid_argument("worker count must be non-negative");
  const auto N = binomial(o.n + o.d, o.d);
  if (o.s_min < 2 || o.s_min > o.s_max || static_cast<std::uint64_t>(o.s_max) > N)
    throw std::invalid_argument("atom counts must satisfy 2 <= s_min <= s_max <= C(n+d, d)");
}

/// Runs job(i) for i in [0, count) on `workers` threads. Each job writes only
/// its own output slot, so the result does not depend on scheduling.
template <class Job> void parallel_for(std::size_t count, int workers, Job job) {
  std::size_t threads = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                     : static_cast<std::size_t>(workers);
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace

std::uint64_t decomposition_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

TrialResult run_trial(const SubspaceProjector &projector, int s, std::uint64_t seed,
                      const ToleranceConfig &cfg) {
  const auto &system = projector.system();
  TrialResult out;
  out.instance = random_instance(system.variables(), system.degree(), s, seed);

  Rng rng(decomposition_seed(seed));
  const auto start = std::chrono::steady_clock::now();
  out.decomposition = ray_decomp_restart(projector, out.instance.X, cfg, rng);
  const auto stop = std::chrono::steady_clock::now();

  out.recovery = recover_atoms(out.decomposition, system.table(), static_cast<std::size_t>(s));
  out.errors = recovery_errors(out.instance, out.recovery);

  auto &rec = out.record;
  rec.d = system.degree();
  rec.n = system.variables();
  rec.s = s;
  rec.seed = seed;
  rec.r = static_cast<int>(out.decomposition.steps.size());
  rec.e_w = out.errors.e_w;
  rec.e_z = out.errors.e_z;
  for (const auto &step : out.decomposition.steps) {
    rec.ranks.push_back(step.rank);
    rec.max_rank = std::max(rec.max_rank, step.rank);
  }
  rec.success = out.decomposition.success && out.recovery.success;
  rec.restarts = out.decomposition.restarts;
  rec.wall_time_s = std::chrono::duration<double>(stop - start).count();
  return out;
}

SweepResult sweep(const SweepOptions &options, const ToleranceConfig &cfg) {
  validate_options(options);
  cfg.validate();
  const auto system = ConstraintSystem::hankel(options.n, options.d);
  const SubspaceProjector projector(system);

  const auto per_s = static_cast<std::size_t>(options.trials);
  const auto count = static_cast<std::size_t>(options.s_max - options.s_min + 1) * per_s;
  SweepResult result;
  result.records.resize(count);
  parallel_for(count, options.workers, [&](std::size_t job) {
    const int s = options.s_min + static_cast<int>(job / per_s);
    const std::uint64_t seed = options.base_seed + job % per_s;
    result.records[job] = run_trial(projector, s, seed, cfg).record;
  });
  std::sort(result.records.begin(), result.records.end(), [](const auto &a, const auto &b) {
    return std::pair(a.s, a.seed) < std::pair(b.s, b.seed);
  });

  for (int s = options.s_min; s <= options.s_max; ++s) {
    SweepSummary sum;
    sum.d = options.d;
    sum.n = options.n;
    sum.s = s;
    for (const auto &rec : result.records) {
      if (rec.s != s)
        continue;
      ++sum.trials;
      sum.success_rate += rec.success ? 1.0 : 0.0;
      sum.mean_e_w += rec.e_w;
      sum.mean_e_z += rec.e_z;
    }
    sum.success_rate /= sum.trials;
    sum.mean_e_w /= sum.trials;
    sum.mean_e_z /= sum.trials;
    result.summaries.push_back(sum);
  }
  return result;
}

std::string sweep_csv(const SweepResult &result) {
  std::string out = "d,n,s,seed,r,e_w,e_z,max_rank,ranks,success,restarts,wall_time_s\n";
  for (const auto &rec : result.records) {
    std::string ranks;
    for (std::size_t i = 0; i < rec.ranks.size(); ++i)
      ranks += (i ? "|" : "") + std::to_string(rec.ranks[i]);
    out += std::to_string(rec.d) + ',' + std::to_string(rec.n) + ',' + std::to_string(rec.s) + ',' +
           std::to_string(rec.seed) + ',' + std::to_string(rec.r) + ',' + format_double(rec.e_w) + ',' +
           format_double(rec.e_z) + ',' + std::to_string(rec.max_rank) + ',' + ranks + ',' +
           (rec.success ? "1" : "0") + ',' + std::to_string(rec.restarts) + ',' +
           format_double(rec.wall_time_s) + '\n';
  }
  out += "# summary\nd,n,s,trials,success_rate,mean_e_w,mean_e_z\n";
  for (const auto &sum : result.summaries) {
    out += std::to_string(sum.d) + ',' + std::to_string(sum.n) + ',' + std::to_string(sum.s) + ',' +
           std::to_string(sum.trials) + ',' + format_double(sum.success_rate) + ',' +
           format_double(sum.mean_e_w) + ',' + format_double(sum.mean_e_z) + '\n';
  }
  return out;
}

std::vector<RankRecord> rank_histogram(const SweepOptions &options, const ToleranceConfig &cfg) {
  validate_options(options);
  if (options.s_min != options.s_max)
    throw std::invalid_argument("rank histogram takes a single atom count");
  cfg.validate();
  const auto system = ConstraintSystem::hankel(options.n, options.d);
  const SubspaceProjector projector(system);

  const auto count = static_cast<std::size_t>(options.trials);
  std::vector<std::vector<RankRecord>> per_trial(count);
  parallel_for(count, options.workers, [&](std::size_t i) {
    const std::uint64_t seed = options.base_seed + i;
    const auto trial = run_trial(projector, options.s_min, seed, cfg);
    int index = 0;
    for (const auto &step : trial.decomposition.steps) {
      const auto verdict = verify_extremality(step.M, system, kExtremalityEps);
      RankRecord rec;
      rec.d = options.d;
      rec.n = options.n;
      rec.s = options.s_min;
      rec.seed = seed;
      rec.step = ++index;
      rec.rank = step.rank;
      rec.extreme = verdict.extreme;
      rec.null_dim = verdict.nullspace_dim;
      rec.t = step.t;
      per_trial[i].push_back(rec);
    }
  });

  std::vector<RankRecord> out;
  for (auto &recs : per_trial)
    out.insert(out.end(), recs.begin(), recs.end());
  return out;
}

std::string rank_csv(const std::vector<RankRecord> &records) {
  std::string out = "d,n,s,seed,step,rank,extreme,null_dim,t\n";
  for (const auto &rec : records) {
    out += std::to_string(rec.d) + ',' + std::to_string(rec.n) + ',' + std::to_string(rec.s) + ',' +
           std::to_string(rec.seed) + ',' + std::to_string(rec.step) + ',' + std::to_string(rec.rank) +
           ',' + (rec.extreme ? "1" : "0") + ',' + std::to_string(rec.null_dim) + ',' +
           format_double(rec.t) + '\n';
  }
  return out;
}

void write_file_atomic(const std::string &path, const std::string &text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.close();
    if (!out)
      throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + target.string());
  }
}

std::vector<Table1Row> table1_check() {
  // Published theoretical bounds on s for uniqueness.
  static constexpr std::array<std::array<int, 3>, 12> kTable = {{
      {2, 3, 2}, {2, 4, 3}, {2, 5, 5}, {2, 6, 7}, {2, 7, 9}, {2, 8, 12},
      {2, 9, 15}, {2, 10, 18}, {3, 2, 2}, {3, 3, 6}, {3, 4, 12}, {3, 5, 20},
  }};
  std::vector<Table1Row> rows;
  for (const auto &[d, n, expected] : kTable) {
    Table1Row row;
    row.d = d;
    row.n = n;
    row.expected = expected;
    row.computed = theoretical_atom_bound(n, d);
    row.match = row.expected == row.computed;
    rows.push_back(row);
  }
  return rows;
}

} // namespace momentray
