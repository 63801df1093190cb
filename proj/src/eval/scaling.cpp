#include "qprep/eval/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "qprep/core/error.hpp"
#include "qprep/fermion/correlation.hpp"
#include "qprep/pauli/gibbs.hpp"

namespace qprep::eval {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

ScalingFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::vector<double>& sigmas) {
  const std::size_t n = xs.size();
  QPREP_REQUIRE(n == ys.size(), "fit_power_law: xs and ys differ in length");
  QPREP_REQUIRE(sigmas.empty() || sigmas.size() == n, "fit_power_law: sigmas must be empty or match xs");
  QPREP_REQUIRE(n >= 3, "fit_power_law: needs at least three points");
  for (std::size_t i = 0; i < n; ++i) {
    QPREP_REQUIRE(xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i]),
                  "fit_power_law: inputs must be positive and finite");
    QPREP_REQUIRE(i == 0 || xs[i] > xs[i - 1], "fit_power_law: xs must be strictly increasing");
  }
  bool weighted = !sigmas.empty();
  for (double s : sigmas) {
    QPREP_REQUIRE(s >= 0.0, "fit_power_law: negative sigma");
    if (!(s > 0.0)) weighted = false;
  }

  // log y = alpha + slope log x, slope = -b
  std::vector<double> u(n), v(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::log(xs[i]);
    v[i] = std::log(ys[i]);
    if (weighted) w[i] = (ys[i] / sigmas[i]) * (ys[i] / sigmas[i]);
  }
  double sw = 0, su = 0, sv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    su += w[i] * u[i];
    sv += w[i] * v[i];
  }
  const double ubar = su / sw, vbar = sv / sw;
  double suu = 0, suv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += w[i] * (u[i] - ubar) * (u[i] - ubar);
    suv += w[i] * (u[i] - ubar) * (v[i] - vbar);
  }
  const double slope = suv / suu;
  const double alpha = vbar - slope * ubar;

  ScalingFit fit;
  fit.xs = xs;
  fit.ys = ys;
  fit.sigmas = sigmas;
  fit.b = -slope;
  fit.a = std::exp(alpha);
  double rss = 0.0, wrss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - alpha - slope * u[i];
    rss += r * r;
    wrss += w[i] * r * r;
  }
  fit.residual = rss;
  // with weights the covariance is (X^T W X)^{-1}; without, it is scaled by
  // the residual variance
  const double scale = weighted ? 1.0 : wrss / static_cast<double>(n - 2);
  const double var_slope = scale / suu;
  const double var_alpha = scale * (1.0 / sw + ubar * ubar / suu);
  fit.b_err = std::sqrt(var_slope);
  fit.a_err = fit.a * std::sqrt(var_alpha);
  QPREP_REQUIRE(std::isfinite(fit.b), "fit_power_law: degenerate fit");
  return fit;
}

double ising_thermal_energy(int n_sites, double beta, const pauli::IsingCouplings& params, int cap) {
  const pauli::SpinHamiltonian h = pauli::build_ising(n_sites, params);
  pauli::GibbsOptions opts;
  opts.exact_cap = cap;
  return pauli::gibbs_expectations(h, beta, {{"energy", h}}, opts).expectations.at("energy");
}

std::vector<ShellSweepRow> shell_width_sweep(const pauli::IsingCouplings& params, const std::vector<ShellPoint>& points,
                                             const std::vector<double>& widths, pauli::ShellSector sector, int cap) {
  QPREP_REQUIRE(!points.empty(), "shell_width_sweep: no system sizes");
  for (double w : widths) QPREP_REQUIRE(w > 0.0 && std::isfinite(w), "shell_width_sweep: widths must be positive");
  std::map<int, RealVector> spectra;
  for (const auto& p : points) {
    QPREP_REQUIRE(p.dbar > 0.0, "shell_width_sweep: distances must be positive");
    if (!spectra.count(p.n_sites)) {
      spectra[p.n_sites] = pauli::sector_spectrum(pauli::build_ising(p.n_sites, params), sector, cap);
    }
  }
  std::vector<ShellSweepRow> out;
  for (double w : widths) {
    std::vector<ShellSweepRow> rows;
    for (const auto& p : points) {
      ShellSweepRow r;
      r.width = w;
      r.n_sites = p.n_sites;
      r.d = pauli::count_in_shell(spectra.at(p.n_sites), p.energy, w, p.n_sites);
      r.included = r.d > 1;
      rows.push_back(r);
    }
    // fit over included points in increasing d; equal d values cannot be
    // ordered, so all but the first are dropped
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].included) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rows[a].d < rows[b].d; });
    std::vector<double> xs, ys, sig;
    bool all_sigma = true;
    for (std::size_t k = 0; k < order.size(); ++k) {
      ShellSweepRow& r = rows[order[k]];
      if (!xs.empty() && static_cast<double>(r.d) <= xs.back()) {
        r.included = false;
        continue;
      }
      xs.push_back(static_cast<double>(r.d));
      ys.push_back(points[order[k]].dbar);
      sig.push_back(points[order[k]].sigma);
      all_sigma = all_sigma && points[order[k]].sigma > 0.0;
    }
    double b = kNaN, b_err = kNaN;
    if (xs.size() >= 3) {
      const ScalingFit f = fit_power_law(xs, ys, all_sigma ? sig : std::vector<double>{});
      b = f.b;
      b_err = f.b_err;
    }
    for (auto& r : rows) {
      r.b = b;
      r.b_err = b_err;
      out.push_back(r);
    }
  }
  return out;
}

std::pair<double, double> sweep_plateau(const std::vector<ShellSweepRow>& rows, double rel_tol) {
  std::vector<std::pair<double, double>> wb;
  for (const auto& r : rows) {
    if (wb.empty() || wb.back().first != r.width) wb.emplace_back(r.width, r.b);
  }
  std::sort(wb.begin(), wb.end());
  std::pair<double, double> best{kNaN, kNaN};
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < wb.size(); ++i) {
    if (!std::isfinite(wb[i].second)) continue;
    std::size_t j = i;
    while (j + 1 < wb.size() && std::isfinite(wb[j + 1].second) &&
           std::abs(wb[j + 1].second - wb[i].second) <= rel_tol * std::abs(wb[i].second)) {
      ++j;
    }
    if (j - i + 1 > best_len) {
      best_len = j - i + 1;
      best = {wb[i].first, wb[j].first};
    }
  }
  return best;
}

std::vector<TggeRow> tgge_vs_gge(const fermion::GgeSpec& target, int n_local, const std::vector<int>& las,
                                 DistanceNorm norm) {
  QPREP_REQUIRE(n_local >= 0 && n_local <= target.n_sites / 2, "tgge_vs_gge: n_local must lie in [0, L/2]");
  const fermion::GgeSpec truncated = fermion::solve_gge_multipliers(fermion::truncated_targets(target, n_local));
  const fermion::CorrelationMatrix c = fermion::gge_correlation_matrix(target);
  const fermion::CorrelationMatrix ct = fermion::gge_correlation_matrix(truncated);
  std::vector<TggeRow> out;
  for (int la : las) {
    QPREP_REQUIRE(la >= 1 && la <= target.n_sites, "tgge_vs_gge: block size out of range");
    out.push_back({la, gaussian_distance(fermion::block_correlation(c, 0, la), fermion::block_correlation(ct, 0, la), norm)});
  }
  return out;
}

}  // namespace qprep::eval
