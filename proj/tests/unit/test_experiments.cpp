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

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace momentray;

namespace {

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    out.push_back(line);
  return out;
}

/// CSV text with the wall-clock column blanked out.
std::string without_timing(const std::string &csv) {
  std::string out;
  for (const auto &line : lines(csv)) {
    if (line.rfind("#", 0) == 0 || line.find("wall_time_s") != std::string::npos ||
        line.rfind("d,n,s,trials", 0) == 0) {
      out += line + '\n';
      continue;
    }
    const auto cut = line.rfind(',');
    out += (cut == std::string::npos ? line : line.substr(0, cut)) + '\n';
  }
  return out;
}

} // namespace

TEST_CASE("table check reproduces every published bound") {
  const auto rows = table1_check();
  CHECK(rows.size() == 12);
  for (const auto &row : rows) {
    CAPTURE(row.d);
    CAPTURE(row.n);
    CHECK(row.match);
  }
}

TEST_CASE("a trial records its decomposition") {
  const auto sys = ConstraintSystem::hankel(3, 2);
  const SubspaceProjector P(sys);
  const auto trial = run_trial(P, 3, 17, {});
  CHECK(trial.record.seed == 17);
  CHECK(trial.record.s == 3);
  CHECK(trial.record.r == static_cast<int>(trial.decomposition.steps.size()));
  CHECK(trial.record.success);
  CHECK(trial.record.max_rank == 1);
  CHECK(trial.record.e_w < 1e-6);
  CHECK(trial.record.e_z < 1e-6);
  CHECK(trial.record.wall_time_s >= 0.0);
  CHECK(trial.instance.X == random_instance(3, 2, 3, 17).X);
}

TEST_CASE("sweep output is deterministic and independent of the worker count") {
  SweepOptions opts;
  opts.d = 2;
  opts.n = 3;
  opts.s_min = 2;
  opts.s_max = 4;
  opts.trials = 4;
  opts.base_seed = 100;
  const auto serial = sweep(opts, {});
  opts.workers = 3;
  const auto parallel = sweep(opts, {});
  const std::string a = sweep_csv(serial);
  CHECK(without_timing(a) == without_timing(sweep_csv(parallel)));
  CHECK(without_timing(a) == without_timing(sweep_csv(sweep(opts, {}))));

  const auto rows = lines(a);
  CHECK(rows.front() == "d,n,s,seed,r,e_w,e_z,max_rank,ranks,success,restarts,wall_time_s");
  CHECK(rows.size() == 1 + 12 + 2 + 3);
  CHECK(rows[1].rfind("2,3,2,100,", 0) == 0);
  CHECK(rows[12].rfind("2,3,4,103,", 0) == 0);
  CHECK(rows[13] == "# summary");
  CHECK(rows[14] == "d,n,s,trials,success_rate,mean_e_w,mean_e_z");
  CHECK(serial.summaries.size() == 3);
  for (const auto &sum : serial.summaries) {
    CHECK(sum.trials == 4);
    CHECK(sum.success_rate == 1.0);
    CHECK(sum.mean_e_w < 1e-6);
  }
}

TEST_CASE("sweep rejects invalid ranges") {
  SweepOptions opts;
  opts.s_min = 1;
  CHECK_THROWS_AS(sweep(opts, {}), std::invalid_argument);
  opts.s_min = 5;
  opts.s_max = 4;
  CHECK_THROWS_AS(sweep(opts, {}), std::invalid_argument);
  opts.s_min = 2;
  opts.s_max = 11; // C(5, 2) = 10
  CHECK_THROWS_AS(sweep(opts, {}), std::invalid_argument);
  opts.s_max = 3;
  opts.trials = 0;
  CHECK_THROWS_AS(sweep(opts, {}), std::invalid_argument);
}

TEST_CASE("rank histogram below the threshold has only rank one") {
  SweepOptions opts;
  opts.s_min = opts.s_max = 6;
  opts.trials = 5;
  const auto records = rank_histogram(opts, {});
  CHECK(records.size() == 30);
  for (const auto &rec : records) {
    CHECK(rec.rank == 1);
    CHECK(rec.extreme);
    CHECK(rec.null_dim == 1);
  }
  const auto csv = lines(rank_csv(records));
  CHECK(csv.front() == "d,n,s,seed,step,rank,extreme,null_dim,t");
  CHECK(csv.size() == 31);
  opts.s_max = 7;
  CHECK_THROWS_AS(rank_histogram(opts, {}), std::invalid_argument);
}

TEST_CASE("atomic write replaces the file and reports unwritable paths") {
  const auto dir = std::filesystem::temp_directory_path() / "momentray_write_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "out.csv").string(), "x"), std::runtime_error);
  std::filesystem::remove_all(dir);
}
