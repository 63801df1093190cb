// One PASS/FAIL line per acceptance criterion. With no arguments every
// criterion runs; otherwise only the named ones.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "qprep/cli/config.hpp"
#include "qprep/cli/oracle_suite.hpp"
#include "qprep/cli/run_config.hpp"
#include "qprep/rl/trainer.hpp"

using namespace qprep;
using namespace qprep::cli;

namespace {

const std::vector<std::string> kOracleCriteria = {
    "backend-equivalence", "krylov-propagator", "gibbs-stochastic",   "gge-roundtrip-L8", "gge-roundtrip-L60",
    "gge-roundtrip-L120",  "gaussian-functionals", "gradient-fd", "tgge-locality",      "planted-power-law"};

constexpr double kSmokeBudgetSeconds = 1800.0;
constexpr double kSmokeDeviationFactor = 3.0;

/// Desk preset, 5 seeds: trained greedy reward above untrained, and the
/// energy-density deviation at the end of the episode down by 3x (medians).
OracleResult rl_smoke() {
  OracleResult r;
  r.name = "rl-smoke";
  r.relation = ">=";
  r.tolerance = kSmokeDeviationFactor;
  r.time_limit = kSmokeBudgetSeconds;
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = load_run_config(QPREP_SOURCE_DIR "/configs/gibbs_desk.ini");
  const env::EnsembleTarget target = env::compute_target(c.env);
  const auto e = std::find(target.names.begin(), target.names.end(), "energy_density") - target.names.begin();
  std::vector<double> r0, r1, d0, d1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const rl::TrainResult res = rl::train(c.env, target, c.train, seed);
    r0.push_back(res.curve.front().eval_total_reward);
    d0.push_back(res.curve.front().eval_deviation[static_cast<std::size_t>(e)]);
    r1.push_back(res.final_eval.total_reward);
    d1.push_back(res.final_eval.final_deviation[e]);
    std::fprintf(stderr, "  seed %llu: reward %.1f -> %.1f, |dE| %.3f -> %.3f\n",
                 static_cast<unsigned long long>(seed), r0.back(), r1.back(), d0.back(), d1.back());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double mr0 = rl::median(r0), mr1 = rl::median(r1), md0 = rl::median(d0), md1 = rl::median(d1);
  r.measured = md0 / md1;
  r.pass = mr1 > mr0 && r.measured >= kSmokeDeviationFactor && r.seconds < kSmokeBudgetSeconds;
  r.detail = "median |dE| ratio untrained/trained (" + format_double(md0) + " / " + format_double(md1) +
             "); median reward " + format_double(mr0) + " -> " + format_double(mr1) + " (must increase); L=6, " +
             std::to_string(c.env.total_steps) + " steps, " + std::to_string(c.train.updates) + " updates, 5 seeds";
  if (r.seconds >= kSmokeBudgetSeconds) r.detail += " [over the 30 min budget]";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> names(argv + 1, argv + argc);
  if (names.empty()) {
    names = kOracleCriteria;
    names.insert(names.begin() + 9, "rl-smoke");
  }
  bool all = true;
  for (const auto& n : names) {
    const OracleResult r = n == "rl-smoke" ? rl_smoke() : run_oracle(n);
    std::cout << oracle_line(r) << std::endl;
    all = all && r.pass;
  }
  if (std::find(names.begin(), names.end(), "planted-power-law") != names.end()) {
    std::cout << "SKIP gge-exponent-long-run: optional; needs full-scale GGE training at L=60, 84, 120 "
                 "(configs/gge_L*.ini with --long-run, then qprep eval and qprep fit -c configs/fit_gge.ini)"
              << std::endl;
  }
  return all ? 0 : 1;
}
