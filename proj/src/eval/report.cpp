#include "qprep/eval/report.hpp"

#include <algorithm>
#include <limits>

#include "qprep/core/error.hpp"
#include "qprep/env/backends.hpp"

namespace qprep::eval {

std::vector<std::string> default_report_observables(const env::EnvConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.backend == env::BackendKind::IsingDense) {
    for (int r = 1; r <= std::min(3, cfg.n_sites); ++r) out.push_back("z" + std::to_string(r));
    return out;
  }
  const int n_max = std::min(8, cfg.n_sites / 2);
  for (int n = 1; n <= n_max; ++n) out.push_back("liom_plus_" + std::to_string(n));
  for (int n = 1; n <= n_max; ++n) out.push_back("gamma_" + std::to_string(n));
  return out;
}

fermion::GgeSpec relevant_gibbs(const fermion::GgeSpec& target) {
  fermion::GgeTarget t;
  t.n_sites = target.n_sites;
  t.J = target.J;
  t.sector = target.sector;
  t.n_local = 1;
  for (int n : {0, 1}) t.expectations[{n, +1}] = fermion::gge_moment(target, {n, +1});
  return fermion::solve_gge_multipliers(t);
}

namespace {

RealVector target_values(const env::EnvConfig& cfg, const env::EnsembleTarget& target,
                         const std::vector<std::string>& names) {
  if (cfg.target.kind == env::TargetKind::Gge) {
    QPREP_REQUIRE(target.gge.has_value(), "trajectory_report: GGE target without multipliers");
    const fermion::CorrelationMatrix c = fermion::gge_correlation_matrix(*target.gge);
    RealVector v(static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = env::measure_xx(c, names[i], cfg.physics.xx_J, cfg.physics.xx_h);
    }
    return v;
  }
  env::EnvConfig g = cfg;
  g.observables = names;
  return env::compute_target(g).values;
}

}  // namespace

TrajectoryReport trajectory_report(const env::EnvConfig& cfg, const env::EnsembleTarget& target,
                                   const std::vector<int>& protocol, const std::vector<std::string>& observables,
                                   double relaxation) {
  QPREP_REQUIRE(!observables.empty(), "trajectory_report: no observables");
  QPREP_REQUIRE(static_cast<int>(protocol.size()) == cfg.total_steps,
                "trajectory_report: protocol has " + std::to_string(protocol.size()) + " actions, expected " +
                    std::to_string(cfg.total_steps));
  QPREP_REQUIRE(relaxation >= 0.0, "trajectory_report: negative relaxation time");
  env::Environment e(cfg, target);
  e.reset();
  std::vector<int> ids;
  for (const auto& name : observables) ids.push_back(e.backend().register_observable(name));

  TrajectoryReport rep;
  rep.observables = observables;
  std::vector<std::vector<double>> rows;
  auto record = [&](const env::PhysicsBackend& b, double t, int action) {
    std::vector<double> row;
    for (int id : ids) row.push_back(b.measure(id));
    rows.push_back(std::move(row));
    rep.times.push_back(t);
    rep.actions.push_back(action);
  };
  record(e.backend(), 0.0, -1);
  for (std::size_t k = 0; k < protocol.size(); ++k) {
    e.step(protocol[k]);
    record(e.backend(), static_cast<double>(k + 1) * cfg.dt, protocol[k]);
  }
  if (relaxation > 0.0) {
    const double t0 = cfg.total_time();
    e.free_relaxation(relaxation, [&](env::PhysicsBackend& b, double t) { record(b, t0 + t, -1); });
  }
  rep.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < ids.size(); ++c) rep.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }

  rep.target = target_values(cfg, target, observables);
  rep.relevant_gibbs = RealVector::Constant(static_cast<Eigen::Index>(ids.size()), std::numeric_limits<double>::quiet_NaN());
  if (cfg.target.kind == env::TargetKind::Gge) {
    const fermion::CorrelationMatrix c = fermion::gge_correlation_matrix(relevant_gibbs(*target.gge));
    for (std::size_t i = 0; i < observables.size(); ++i) {
      rep.relevant_gibbs[static_cast<Eigen::Index>(i)] =
          env::measure_xx(c, observables[i], cfg.physics.xx_J, cfg.physics.xx_h);
    }
  }
  return rep;
}

}  // namespace qprep::eval
