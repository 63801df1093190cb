#include "qprep/env/backends.hpp"

#include <bit>
#include <cmath>

#include "qprep/core/error.hpp"
#include "qprep/fermion/gaussian.hpp"
#include "qprep/pauli/state_vector.hpp"

namespace qprep::env {

std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::IsingDense: return "ising-dense";
    case BackendKind::XxGauss: return "xx-gauss";
    case BackendKind::XxDense: return "xx-dense";
  }
  return "?";
}

BackendKind parse_backend(const std::string& s) {
  if (s == "ising-dense") return BackendKind::IsingDense;
  if (s == "xx-gauss") return BackendKind::XxGauss;
  if (s == "xx-dense") return BackendKind::XxDense;
  throw InvalidArgument("unknown backend '" + s + "' (expected ising-dense, xx-gauss or xx-dense)");
}

namespace {

void check_action(int action, int count) {
  QPREP_REQUIRE(action >= 0 && action < count,
                "action index " + std::to_string(action) + " outside [0, " + std::to_string(count) + ")");
}

/// Parses "<prefix><n>" with n a positive integer.
bool parse_indexed(const std::string& name, const std::string& prefix, int& n) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return false;
  const std::string tail = name.substr(prefix.size());
  for (char ch : tail) {
    if (ch < '0' || ch > '9') return false;
  }
  n = std::stoi(tail);
  return true;
}

[[noreturn]] void unknown_observable(const std::string& name, BackendKind kind, int n_sites) {
  std::string msg = "observable '" + name + "' is not available on backend " + to_string(kind) + "; known:";
  for (const auto& k : known_observables(kind, n_sites)) msg += " " + k;
  throw InvalidArgument(msg);
}

fermion::BoundarySector sector_for(int n_particles) {
  return n_particles % 2 == 0 ? fermion::BoundarySector::Antiperiodic : fermion::BoundarySector::Periodic;
}

void check_particles(const PhysicsParams& p, int n_sites) {
  QPREP_REQUIRE(p.n_particles >= 0 && p.n_particles <= n_sites,
                "XX backend: n_particles must be in [0, L] (got " + std::to_string(p.n_particles) + ")");
}

/// Single-particle form of an XX observable name, or nullopt for gamma_n.
std::optional<fermion::SingleParticleOperator> xx_quadratic(const std::string& name, int n_sites, double J, double h,
                                                            fermion::BoundarySector sector, BackendKind kind,
                                                            int& gamma_range) {
  const double inv_l = 1.0 / n_sites;
  int n = 0;
  gamma_range = 0;
  fermion::SingleParticleOperator op;
  if (name == "energy_density") {
    op = fermion::tb_matrix(n_sites, J, h, sector);
  } else if (name == "density") {
    op = fermion::number_operator(n_sites);
  } else if (name == "magnetization_density") {
    op = fermion::number_operator(n_sites);
    op.matrix *= 2.0;
    op.scalar_offset = -n_sites;
  } else if (parse_indexed(name, "liom_plus_", n) && n <= n_sites / 2) {
    op = fermion::liom_matrix(n_sites, n, +1, sector, J);
  } else if (parse_indexed(name, "liom_minus_", n) && n <= n_sites / 2) {
    op = fermion::liom_matrix(n_sites, n, -1, sector, J);
  } else if (parse_indexed(name, "gamma_", n) && n >= 1 && n < n_sites) {
    gamma_range = n;
    return std::nullopt;
  } else {
    unknown_observable(name, kind, n_sites);
  }
  op.matrix *= inv_l;
  op.scalar_offset *= inv_l;
  return op;
}

}  // namespace

double measure_xx(const fermion::CorrelationMatrix& c, const std::string& name, double J, double h) {
  int gamma_range = 0;
  auto op = xx_quadratic(name, c.size(), J, h, c.sector, BackendKind::XxGauss, gamma_range);
  if (!op) return fermion::gamma_correlation(c, gamma_range);
  return fermion::observable_expectation(c, *op);
}

double measure_xx_variance(const fermion::CorrelationMatrix& c, const std::string& name, double J, double h) {
  int gamma_range = 0;
  auto op = xx_quadratic(name, c.size(), J, h, c.sector, BackendKind::XxGauss, gamma_range);
  if (!op) throw InvalidArgument("variance of gamma_n is not available on the Gaussian backend");
  return fermion::quadratic_variance(c, *op);
}

std::vector<std::string> known_observables(BackendKind kind, int n_sites) {
  if (kind == BackendKind::IsingDense) {
    std::vector<std::string> out{"energy_density", "magnetization_density"};
    for (int r = 1; r <= std::min(n_sites, 3); ++r) out.push_back("z" + std::to_string(r));
    return out;
  }
  return {"energy_density", "density", "magnetization_density", "liom_plus_<n>", "liom_minus_<n>", "gamma_<n>"};
}

pauli::SpinHamiltonian jordan_wigner_spin_form(const fermion::SingleParticleOperator& op) {
  using pauli::Axis;
  const int n = op.size();
  QPREP_REQUIRE(n >= 1, "jordan_wigner_spin_form: empty operator");
  QPREP_REQUIRE((op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, op.matrix.cwiseAbs().maxCoeff()),
                "jordan_wigner_spin_form: operator must be Hermitian");
  pauli::SpinHamiltonian out(n);
  double offset = op.scalar_offset;
  for (int i = 0; i < n; ++i) {
    const double d = op.matrix(i, i).real();
    offset += 0.5 * d;
    if (d != 0.0) out.add(0.5 * d, {{i, Axis::Z}});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const cplx m = op.matrix(i, j);
      if (m == cplx{0.0, 0.0}) continue;
      std::vector<pauli::PauliFactor> string;
      for (int s = i + 1; s < j; ++s) string.push_back({s, Axis::Z});
      const double sign = ((j - i - 1) % 2 == 0) ? 1.0 : -1.0;
      auto add = [&](double c, Axis a, Axis b) {
        if (c == 0.0) return;
        auto f = string;
        f.push_back({i, a});
        f.push_back({j, b});
        out.add(pauli::PauliString(sign * c, std::move(f)));
      };
      add(0.5 * m.real(), Axis::X, Axis::X);
      add(0.5 * m.real(), Axis::Y, Axis::Y);
      add(0.5 * m.imag(), Axis::X, Axis::Y);
      add(-0.5 * m.imag(), Axis::Y, Axis::X);
    }
  }
  if (offset != 0.0) out.add(pauli::PauliString(offset, {}));
  return out;
}

pauli::SpinHamiltonian gamma_spin_operator(int n_sites, int n) {
  using pauli::Axis;
  QPREP_REQUIRE(n >= 1 && n < n_sites, "gamma_spin_operator: range must be in [1, L)");
  pauli::SpinHamiltonian out(n_sites);
  for (int l = 0; l < n_sites; ++l) {
    const int r = (l + n) % n_sites;
    out.add(0.5 / n_sites, {{l, Axis::X}, {r, Axis::X}});
    out.add(0.5 / n_sites, {{l, Axis::Y}, {r, Axis::Y}});
  }
  return out;
}

// ---------------------------------------------------------------- Ising

IsingBackend::IsingBackend(int n_sites, double dt, const PhysicsParams& p) : n_sites_(n_sites) {
  QPREP_REQUIRE(n_sites >= 2 && n_sites <= 24, "IsingBackend: L must be in [2, 24]");
  auto props = std::make_shared<std::vector<pauli::GeneratorPropagator>>();
  for (int k = 0; k < pauli::kIsingGeneratorCount; ++k) {
    props->emplace_back(pauli::build_generator_ising(k, n_sites, p.ising), dt, p.propagator);
  }
  propagators_ = std::move(props);
  model_ = std::make_shared<const pauli::SpinHamiltonian>(pauli::build_ising(n_sites, p.ising));
  reset();
}

std::string IsingBackend::action_name(int action) const {
  check_action(action, action_count());
  return pauli::ising_generator_name(action);
}

void IsingBackend::reset() { state_ = pauli::StateVector::all_down(n_sites_); }

void IsingBackend::apply_action(int action) {
  check_action(action, action_count());
  state_ = (*propagators_)[static_cast<std::size_t>(action)].apply(state_);
}

void IsingBackend::free_step() { apply_action(0); }

int IsingBackend::register_observable(const std::string& name) {
  pauli::SpinHamiltonian op;
  int r = 0;
  if (name == "energy_density") {
    op = model_->scaled(1.0 / n_sites_);
  } else if (name == "magnetization_density") {
    op = pauli::magnetization_density(n_sites_);
  } else if (parse_indexed(name, "z", r) && r >= 1 && r <= n_sites_) {
    op = pauli::z_string_density(n_sites_, r);
  } else {
    unknown_observable(name, kind(), n_sites_);
  }
  observables_.push_back(std::make_shared<const pauli::CompiledOperator>(op));
  return static_cast<int>(observables_.size()) - 1;
}

double IsingBackend::measure(int id) const {
  return pauli::expectation(state_, *observables_.at(static_cast<std::size_t>(id)));
}

double IsingBackend::measure_variance(int id) const {
  return pauli::variance(state_, *observables_.at(static_cast<std::size_t>(id)));
}

std::unique_ptr<PhysicsBackend> IsingBackend::clone() const { return std::make_unique<IsingBackend>(*this); }

void IsingBackend::set_state(pauli::StateVector s) {
  QPREP_REQUIRE(s.n_sites() == n_sites_, "IsingBackend::set_state: size mismatch");
  state_ = std::move(s);
}

// ---------------------------------------------------------------- Gaussian

GaussBackend::GaussBackend(int n_sites, double dt, const PhysicsParams& p)
    : n_sites_(n_sites), sector_(sector_for(p.n_particles)), J_(p.xx_J), h_(p.xx_h) {
  QPREP_REQUIRE(n_sites >= 4, "GaussBackend: L must be at least 4");
  check_particles(p, n_sites);
  auto us = std::make_shared<std::vector<ComplexMatrix>>();
  for (int k = 0; k < fermion::kXxGeneratorCount; ++k) {
    us->push_back(fermion::single_particle_unitary(fermion::build_generator_xx(k, n_sites, p.xx_J, p.xx_h, sector_), dt));
  }
  unitaries_ = std::move(us);
  initial_ = std::make_shared<const fermion::CorrelationMatrix>(
      fermion::ground_state_correlation(fermion::tb_matrix(n_sites, p.xx_J, p.xx_h, sector_), p.n_particles, sector_));
  reset();
}

std::string GaussBackend::action_name(int action) const {
  check_action(action, action_count());
  return fermion::xx_generator_name(action);
}

void GaussBackend::reset() { state_ = *initial_; }

void GaussBackend::apply_action(int action) {
  check_action(action, action_count());
  state_ = fermion::evolve_correlation(state_, (*unitaries_)[static_cast<std::size_t>(action)]);
}

void GaussBackend::free_step() { apply_action(0); }

int GaussBackend::register_observable(const std::string& name) {
  Observable o;
  auto op = xx_quadratic(name, n_sites_, J_, h_, sector_, kind(), o.gamma_range);
  if (op) o.op = std::move(*op);
  observables_.push_back(std::move(o));
  return static_cast<int>(observables_.size()) - 1;
}

double GaussBackend::measure(int id) const {
  const auto& o = observables_.at(static_cast<std::size_t>(id));
  if (o.gamma_range > 0) return fermion::gamma_correlation(state_, o.gamma_range);
  return fermion::observable_expectation(state_, o.op);
}

double GaussBackend::measure_variance(int id) const {
  const auto& o = observables_.at(static_cast<std::size_t>(id));
  if (o.gamma_range > 0) throw InvalidArgument("variance of gamma_n is not available on the Gaussian backend");
  return fermion::quadratic_variance(state_, o.op);
}

std::unique_ptr<PhysicsBackend> GaussBackend::clone() const { return std::make_unique<GaussBackend>(*this); }

// ---------------------------------------------------------------- dense XX

XxDenseBackend::XxDenseBackend(int n_sites, double dt, const PhysicsParams& p)
    : n_sites_(n_sites), sector_(sector_for(p.n_particles)), J_(p.xx_J), h_(p.xx_h) {
  QPREP_REQUIRE(n_sites >= 4 && n_sites <= 14, "XxDenseBackend: L must be in [4, 14]");
  check_particles(p, n_sites);
  auto props = std::make_shared<std::vector<pauli::GeneratorPropagator>>();
  for (int k = 0; k < fermion::kXxGeneratorCount; ++k) {
    props->emplace_back(jordan_wigner_spin_form(fermion::build_generator_xx(k, n_sites, p.xx_J, p.xx_h, sector_)), dt,
                        p.propagator);
  }
  propagators_ = std::move(props);

  // ground state inside the fixed-particle-number block of the spin Hamiltonian
  const pauli::SpinHamiltonian h = jordan_wigner_spin_form(fermion::tb_matrix(n_sites, p.xx_J, p.xx_h, sector_));
  const ComplexMatrix full = h.dense();
  std::vector<Eigen::Index> block;
  for (Eigen::Index b = 0; b < full.rows(); ++b) {
    if (std::popcount(static_cast<std::uint64_t>(b)) == p.n_particles) block.push_back(b);
  }
  const auto nb = static_cast<Eigen::Index>(block.size());
  ComplexMatrix sub(nb, nb);
  for (Eigen::Index a = 0; a < nb; ++a) {
    for (Eigen::Index c = 0; c < nb; ++c) sub(a, c) = full(block[a], block[c]);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sub);
  const RealVector& e = eig.eigenvalues();
  if (nb > 1 && e[1] - e[0] <= 1e-10 * std::max(1.0, std::abs(e[0]))) {
    throw DegeneracyError("XxDenseBackend: degenerate ground state in the N=" + std::to_string(p.n_particles) + " block");
  }
  ComplexVector psi = ComplexVector::Zero(full.rows());
  for (Eigen::Index a = 0; a < nb; ++a) psi[block[a]] = eig.eigenvectors()(a, 0);
  initial_ = std::make_shared<const pauli::StateVector>(n_sites, std::move(psi));
  reset();
}

std::string XxDenseBackend::action_name(int action) const {
  check_action(action, action_count());
  return fermion::xx_generator_name(action);
}

void XxDenseBackend::reset() { state_ = *initial_; }

void XxDenseBackend::apply_action(int action) {
  check_action(action, action_count());
  state_ = (*propagators_)[static_cast<std::size_t>(action)].apply(state_);
}

void XxDenseBackend::free_step() { apply_action(0); }

int XxDenseBackend::register_observable(const std::string& name) {
  int gamma_range = 0;
  auto op = xx_quadratic(name, n_sites_, J_, h_, sector_, kind(), gamma_range);
  const pauli::SpinHamiltonian spin = op ? jordan_wigner_spin_form(*op) : gamma_spin_operator(n_sites_, gamma_range);
  observables_.push_back(std::make_shared<const pauli::CompiledOperator>(spin));
  return static_cast<int>(observables_.size()) - 1;
}

double XxDenseBackend::measure(int id) const {
  return pauli::expectation(state_, *observables_.at(static_cast<std::size_t>(id)));
}

double XxDenseBackend::measure_variance(int id) const {
  return pauli::variance(state_, *observables_.at(static_cast<std::size_t>(id)));
}

std::unique_ptr<PhysicsBackend> XxDenseBackend::clone() const { return std::make_unique<XxDenseBackend>(*this); }

ComplexMatrix XxDenseBackend::two_point() const {
  const int n = n_sites_;
  ComplexMatrix c(n, n);
  for (int i = 0; i < n; ++i) {
    fermion::SingleParticleOperator num{ComplexMatrix::Zero(n, n), 0.0};
    num.matrix(i, i) = 1.0;
    c(i, i) = pauli::expectation(state_, jordan_wigner_spin_form(num));
    for (int j = i + 1; j < n; ++j) {
      // <m a+_i a_j + h.c.> = 2 Re(m C_ij): m = 1 gives the real part, m = i the imaginary part
      fermion::SingleParticleOperator re{ComplexMatrix::Zero(n, n), 0.0};
      re.matrix(i, j) = re.matrix(j, i) = 1.0;
      fermion::SingleParticleOperator im{ComplexMatrix::Zero(n, n), 0.0};
      im.matrix(i, j) = kI;
      im.matrix(j, i) = -kI;
      const double x = 0.5 * pauli::expectation(state_, jordan_wigner_spin_form(re));
      const double y = -0.5 * pauli::expectation(state_, jordan_wigner_spin_form(im));
      c(i, j) = {x, y};
      c(j, i) = std::conj(c(i, j));
    }
  }
  return c;
}

std::unique_ptr<PhysicsBackend> make_backend(BackendKind kind, int n_sites, double dt, const PhysicsParams& p) {
  switch (kind) {
    case BackendKind::IsingDense: return std::make_unique<IsingBackend>(n_sites, dt, p);
    case BackendKind::XxGauss: return std::make_unique<GaussBackend>(n_sites, dt, p);
    case BackendKind::XxDense: return std::make_unique<XxDenseBackend>(n_sites, dt, p);
  }
  throw InvalidArgument("make_backend: unknown backend");
}

}  // namespace qprep::env
