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


// Command-line front end. Talks to the library only through the C API.

#include "momentray/momentray.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

/// Input or argument problem; maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Library failure other than bad input; maps to the failed-check exit code.
struct LibraryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(mr_status status, const char *what) {
  if (status == MR_OK)
    return;
  const std::string message = std::string(what) + ": " + mr_last_error();
  if (status == MR_ERR_INVALID_ARGUMENT)
    throw UsageError(message);
  throw LibraryError(message);
}

template <class T, void (*Free)(T *)> struct Deleter {
  void operator()(T *p) const { Free(p); }
};
using ConstraintsPtr = std::unique_ptr<mr_constraints, Deleter<mr_constraints, mr_constraints_free>>;
using InstancePtr = std::unique_ptr<mr_instance, Deleter<mr_instance, mr_instance_free>>;
using DecompositionPtr =
    std::unique_ptr<mr_decomposition, Deleter<mr_decomposition, mr_decomposition_free>>;
using RecoveryPtr = std::unique_ptr<mr_recovery, Deleter<mr_recovery, mr_recovery_free>>;

json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_json(const std::string &path, const json &doc) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out)
      throw LibraryError("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out)
      throw LibraryError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec)
    throw LibraryError("cannot rename onto " + path);
}

/// Row-major square matrix from an array of arrays.
std::vector<double> read_square(const json &rows, std::size_t N, const char *what) {
  if (!rows.is_array() || rows.size() != N)
    throw UsageError(std::string(what) + " must have " + std::to_string(N) + " rows");
  std::vector<double> out;
  out.reserve(N * N);
  for (const auto &row : rows) {
    if (!row.is_array() || row.size() != N)
      throw UsageError(std::string(what) + " must be square");
    for (const auto &v : row) {
      if (!v.is_number())
        throw UsageError(std::string(what) + " has a non-numeric entry");
      out.push_back(v.get<double>());
    }
  }
  return out;
}

json matrix_json(const std::vector<double> &data, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t i = 0; i < rows; ++i)
    out.push_back(std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(i * cols),
                                      data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)));
  return out;
}

json config_json(const mr_config &cfg) {
  return {{"tol_rank", cfg.eps_rank}, {"tol_break", cfg.eps_break}, {"tol_col", cfg.eps_col},
          {"tol_alt", cfg.eps_alt},   {"t_alt", cfg.t_alt},         {"sdp_tol_gap", cfg.sdp_tol_gap},
          {"sdp_tol_feas", cfg.sdp_tol_feas}, {"sdp_max_iters", cfg.sdp_max_iters}};
}

int get_int(const json &doc, const char *key) {
  if (!doc.contains(key) || !doc[key].is_number_integer())
    throw UsageError(std::string("missing integer field '") + key + "'");
  return doc[key].get<int>();
}

// ---- decompose ----------------------------------------------------------

struct DecomposeArgs {
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  mr_config cfg{};
};

int run_decompose(const DecomposeArgs &args) {
  const json doc = read_json(args.input);
  const int n = get_int(doc, "n");
  const int d = get_int(doc, "d");
  mr_constraints *raw_sys = nullptr;
  check(mr_constraints_create(n, d, &raw_sys), "constraint system");
  const ConstraintsPtr sys(raw_sys);
  const std::size_t N = mr_constraints_dimension(sys.get());
  if (doc.contains("N") && doc["N"] != N)
    throw UsageError("field N does not match C(n+d, d) = " + std::to_string(N));
  if (!doc.contains("entries"))
    throw UsageError("missing field 'entries'");
  const auto X = read_square(doc["entries"], N, "entries");

  mr_decomposition *raw_dec = nullptr;
  check(mr_decompose(sys.get(), X.data(), &args.cfg, args.seed, &raw_dec), "decompose");
  const DecompositionPtr dec(raw_dec);
  mr_decomposition_info info{};
  mr_decomposition_get_info(dec.get(), &info);

  json result;
  json steps = json::array();
  std::vector<double> M(N * N);
  for (std::size_t k = 0; k < info.steps; ++k) {
    mr_step_info step{};
    check(mr_decomposition_step(dec.get(), k, &step), "step");
    check(mr_decomposition_step_matrix(dec.get(), k, M.data()), "step matrix");
    steps.push_back({{"t", step.t},
                     {"rank", step.rank},
                     {"M", matrix_json(M, N, N)},
                     {"sdp_gap", step.sdp_gap},
                     {"sdp_iters", step.sdp_iters}});
  }
  result["n"] = n;
  result["d"] = d;
  result["N"] = N;
  result["steps"] = steps;
  result["residual_norm"] = info.residual_norm;
  result["success"] = info.success != 0;
  result["restarts"] = info.restarts;
  result["wall_time_s"] = info.wall_time_s;
  result["config"] = config_json(args.cfg);

  // Instances carry the planted atoms; report how well they were recovered.
  if (doc.contains("weights") && doc.contains("atoms")) {
    const auto weights = doc["weights"].get<std::vector<double>>();
    const auto atom_rows = doc["atoms"].get<std::vector<std::vector<double>>>();
    if (atom_rows.size() != weights.size())
      throw UsageError("weights and atoms differ in length");
    std::vector<double> atoms;
    for (const auto &z : atom_rows) {
      if (z.size() != static_cast<std::size_t>(n))
        throw UsageError("atom of the wrong dimension");
      atoms.insert(atoms.end(), z.begin(), z.end());
    }
    mr_recovery *raw_rec = nullptr;
    check(mr_recover(dec.get(), weights.size(), &raw_rec), "recover");
    const RecoveryPtr rec(raw_rec);
    double e_w = 1.0;
    double e_z = 1.0;
    check(mr_recovery_errors(rec.get(), weights.size(), weights.data(), atoms.data(), &e_w, &e_z),
          "recovery errors");
    const std::size_t count = mr_recovery_count(rec.get());
    std::vector<double> rw(count);
    std::vector<double> rz(count * static_cast<std::size_t>(n));
    mr_recovery_weights(rec.get(), rw.data());
    mr_recovery_atoms(rec.get(), rz.data());
    result["recovery"] = {{"weights", rw},
                          {"atoms", matrix_json(rz, count, static_cast<std::size_t>(n))},
                          {"success", mr_recovery_success(rec.get()) != 0},
                          {"failure_reason", mr_recovery_failure(rec.get())},
                          {"e_w", e_w},
                          {"e_z", e_z}};
  }

  write_json(args.out, result);
  std::printf("steps=%zu success=%d residual_norm=%.3e restarts=%d\n", info.steps, info.success,
              info.residual_norm, info.restarts);
  return info.success ? kExitOk : kExitFailed;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  int n = 3;
  int d = 2;
  int s = 2;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs &args) {
  mr_instance *raw = nullptr;
  check(mr_instance_random(args.n, args.d, args.s, args.seed, &raw), "instance");
  const InstancePtr inst(raw);
  const std::size_t N = mr_instance_dimension(inst.get());
  const std::size_t s = mr_instance_atom_count(inst.get());
  std::vector<double> X(N * N);
  std::vector<double> w(s);
  std::vector<double> z(s * static_cast<std::size_t>(args.n));
  mr_instance_matrix(inst.get(), X.data());
  mr_instance_weights(inst.get(), w.data());
  mr_instance_atoms(inst.get(), z.data());
  const json doc = {{"n", args.n},
                    {"d", args.d},
                    {"N", N},
                    {"entries", matrix_json(X, N, N)},
                    {"s", s},
                    {"seed", args.seed},
                    {"weights", w},
                    {"atoms", matrix_json(z, s, static_cast<std::size_t>(args.n))}};
  write_json(args.out, doc);
  return kExitOk;
}

// ---- sweep / ranks --------------------------------------------------------

struct SweepArgs {
  mr_sweep_options opts{2, 3, 2, 2, 20, 0, 1};
  std::string out;
  mr_config cfg{};
};

int run_sweep(const SweepArgs &args) {
  std::vector<mr_sweep_summary> summaries(
      static_cast<std::size_t>(std::max(0, args.opts.s_max - args.opts.s_min + 1)));
  std::size_t count = 0;
  check(mr_sweep(&args.opts, &args.cfg, args.out.c_str(), summaries.data(), summaries.size(), &count),
        "sweep");
  std::printf("s,trials,success_rate,mean_e_w,mean_e_z\n");
  for (std::size_t i = 0; i < count && i < summaries.size(); ++i) {
    const auto &sum = summaries[i];
    std::printf("%d,%d,%.4f,%.3e,%.3e\n", sum.s, sum.trials, sum.success_rate, sum.mean_e_w, sum.mean_e_z);
  }
  return kExitOk;
}

int run_ranks(const SweepArgs &args) {
  mr_rank_summary sum{};
  check(mr_rank_histogram(&args.opts, &args.cfg, args.out.c_str(), &sum), "rank histogram");
  std::printf("trials=%d steps=%zu max_rank=%d seeds_with_max_rank=%d high_rank_steps=%zu "
              "high_rank_extreme=%zu\n",
              sum.trials, sum.steps, sum.max_rank, sum.seeds_with_max_rank, sum.high_rank_steps,
              sum.high_rank_extreme);
  return kExitOk;
}

// ---- table1 ---------------------------------------------------------------

int run_table1() {
  std::vector<mr_table1_row> rows(16);
  std::size_t count = 0;
  check(mr_table1(rows.data(), rows.size(), &count), "table1");
  bool ok = true;
  std::printf("d,n,expected,computed,match\n");
  for (std::size_t i = 0; i < count && i < rows.size(); ++i) {
    const auto &row = rows[i];
    std::printf("%d,%d,%d,%d,%s\n", row.d, row.n, row.expected, row.computed, row.match ? "yes" : "NO");
    ok = ok && row.match;
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitFailed;
}

// ---- sdp-solve ------------------------------------------------------------

struct SdpArgs {
  std::string input;
  std::string out;
};

int run_sdp(const SdpArgs &args) {
  const json doc = read_json(args.input);
  if (!doc.contains("B") || !doc["B"].is_array())
    throw UsageError("missing matrix field 'B'");
  const std::size_t r = doc["B"].size();
  if (r == 0)
    throw UsageError("B must be nonempty");
  const auto B = read_square(doc["B"], r, "B");
  std::vector<double> A;
  std::vector<double> b;
  if (doc.contains("constraints")) {
    for (const auto &row : doc["constraints"]) {
      if (!row.contains("A") || !row.contains("b") || !row["b"].is_number())
        throw UsageError("each constraint needs 'A' and numeric 'b'");
      const auto Ai = read_square(row["A"], r, "A");
      A.insert(A.end(), Ai.begin(), Ai.end());
      b.push_back(row["b"].get<double>());
    }
  }
  mr_sdp_result res{};
  std::vector<double> Y(r * r);
  std::vector<double> y(b.size());
  check(mr_sdp_solve(r, B.data(), b.size(), A.data(), b.data(), &res, Y.data(), y.data()), "sdp");
  const char *status = res.status == MR_SDP_OPTIMAL     ? "optimal"
                       : res.status == MR_SDP_MAX_ITERS ? "max_iters"
                                                        : "infeasible_or_failed";
  const json report = {{"status", status},
                       {"message", res.message},
                       {"objective", res.objective},
                       {"dual_objective", res.dual_objective},
                       {"gap", res.gap},
                       {"primal_res", res.primal_res},
                       {"dual_res", res.dual_res},
                       {"iters", res.iters},
                       {"rounded_rank", res.rounded_rank},
                       {"active_rows", res.active_rows},
                       {"Y", matrix_json(Y, r, r)},
                       {"y", y}};
  if (args.out.empty())
    std::cout << report.dump(2) << '\n';
  else
    write_json(args.out, report);
  return res.status == MR_SDP_OPTIMAL ? kExitOk : kExitFailed;
}

void add_tolerances(CLI::App *cmd, mr_config &cfg) {
  cmd->add_option("--tol-rank", cfg.eps_rank, "eigenvalue cut for numerical rank")->capture_default_str();
  cmd->add_option("--tol-break", cfg.eps_break, "stop once the remainder norm drops below this")
      ->capture_default_str();
  cmd->add_option("--tol-col", cfg.eps_col, "relative pivot cut for redundant constraints")
      ->capture_default_str();
  cmd->add_option("--tol-alt", cfg.eps_alt, "alternating-projection residual target")->capture_default_str();
  cmd->add_option("--t-alt", cfg.t_alt, "alternating-projection iteration cap")->capture_default_str();
}

void add_sweep_options(CLI::App *cmd, SweepArgs &args, bool range) {
  cmd->add_option("--d", args.opts.d, "half degree")->capture_default_str();
  cmd->add_option("--n", args.opts.n, "number of variables")->capture_default_str();
  if (range) {
    cmd->add_option("--s-min", args.opts.s_min, "smallest atom count")->capture_default_str();
    cmd->add_option("--s-max", args.opts.s_max, "largest atom count")->capture_default_str();
  } else {
    cmd->add_option("--s", args.opts.s_min, "atom count")->capture_default_str();
  }
  cmd->add_option("--trials", args.opts.trials, "seeds per atom count")->capture_default_str();
  cmd->add_option("--seed", args.opts.base_seed, "seed of the first trial")->capture_default_str();
  cmd->add_option("--workers", args.opts.workers, "worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--out", args.out, "output CSV")->required();
  add_tolerances(cmd, args.cfg);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Extreme-ray decomposition of pseudo-moment matrices"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  mr_config_default(&dec.cfg);
  auto *dec_cmd = app.add_subcommand("decompose", "decompose a moment matrix into extreme rays");
  dec_cmd->add_option("--input", dec.input, "matrix or instance JSON")->required()->check(CLI::ExistingFile);
  dec_cmd->add_option("--out", dec.out, "result JSON")->required();
  dec_cmd->add_option("--seed", dec.seed, "seed of the random objectives")->capture_default_str();
  add_tolerances(dec_cmd, dec.cfg);

  GenArgs gen;
  auto *gen_cmd = app.add_subcommand("gen", "generate a random instance");
  gen_cmd->add_option("--n", gen.n, "number of variables")->required();
  gen_cmd->add_option("--d", gen.d, "half degree")->required();
  gen_cmd->add_option("--s", gen.s, "number of atoms")->required();
  gen_cmd->add_option("--seed", gen.seed, "instance seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "instance JSON")->required();

  SweepArgs sw;
  mr_config_default(&sw.cfg);
  auto *sweep_cmd = app.add_subcommand("sweep", "recovery error against the number of atoms");
  add_sweep_options(sweep_cmd, sw, true);

  SweepArgs rk;
  mr_config_default(&rk.cfg);
  rk.opts.s_min = 10;
  auto *ranks_cmd = app.add_subcommand("ranks", "ranks and extremality of the returned rays");
  add_sweep_options(ranks_cmd, rk, false);

  auto *table_cmd = app.add_subcommand("table1", "check the generic atom-count bounds");

  SdpArgs sdp;
  auto *sdp_cmd = app.add_subcommand("sdp-solve", "solve a small SDP from a problem JSON");
  sdp_cmd->add_option("--input", sdp.input, "problem JSON")->required()->check(CLI::ExistingFile);
  sdp_cmd->add_option("--out", sdp.out, "report JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*dec_cmd)
      return run_decompose(dec);
    if (*gen_cmd)
      return run_gen(gen);
    if (*sweep_cmd)
      return run_sweep(sw);
    if (*ranks_cmd) {
      rk.opts.s_max = rk.opts.s_min;
      return run_ranks(rk);
    }
    if (*table_cmd)
      return run_table1();
    if (*sdp_cmd)
      return run_sdp(sdp);
  } catch (const UsageError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const json::exception &e) {
    std::fprintf(stderr, "error: malformed input: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailed;
  }
  return kExitUsage;
}
