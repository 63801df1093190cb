#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qprep/fermion/correlation.hpp"
#include "qprep/pauli/krylov.hpp"
#include "qprep/pauli/pauli_string.hpp"

namespace qprep::env {

enum class BackendKind { IsingDense, XxGauss, XxDense };

std::string to_string(BackendKind k);
BackendKind parse_backend(const std::string& s);

struct PhysicsParams {
  pauli::IsingCouplings ising{};
  double xx_J = 1.0;
  double xx_h = 2.0;
  /// Particle number of the XX initial state; must be set before building an XX backend.
  int n_particles = -1;
  pauli::PropagatorOptions propagator{};
};

/// A controllable many-body state together with its action set and
/// observables. Observables are resolved by name once, then measured by index.
class PhysicsBackend {
 public:
  virtual ~PhysicsBackend() = default;

  virtual BackendKind kind() const = 0;
  virtual int n_sites() const = 0;
  virtual int action_count() const = 0;
  virtual std::string action_name(int action) const = 0;

  /// Back to the initial state.
  virtual void reset() = 0;
  /// exp(-i G_action dt).
  virtual void apply_action(int action) = 0;
  /// exp(-i H_model dt); the model Hamiltonian is action 0 in both action sets.
  virtual void free_step() = 0;

  /// Index into the measurement vector; throws InvalidArgument for names the
  /// backend does not know.
  virtual int register_observable(const std::string& name) = 0;
  virtual double measure(int id) const = 0;
  virtual double measure_variance(int id) const = 0;

  virtual std::unique_ptr<PhysicsBackend> clone() const = 0;
};

/// Pure spin state under the Ising generators, starting from all down.
class IsingBackend final : public PhysicsBackend {
 public:
  IsingBackend(int n_sites, double dt, const PhysicsParams& p);

  BackendKind kind() const override { return BackendKind::IsingDense; }
  int n_sites() const override { return n_sites_; }
  int action_count() const override { return pauli::kIsingGeneratorCount; }
  std::string action_name(int action) const override;
  void reset() override;
  void apply_action(int action) override;
  void free_step() override;
  int register_observable(const std::string& name) override;
  double measure(int id) const override;
  double measure_variance(int id) const override;
  std::unique_ptr<PhysicsBackend> clone() const override;

  const pauli::StateVector& state() const { return state_; }
  void set_state(pauli::StateVector s);

 private:
  int n_sites_;
  std::shared_ptr<const std::vector<pauli::GeneratorPropagator>> propagators_;
  std::vector<std::shared_ptr<const pauli::CompiledOperator>> observables_;
  std::shared_ptr<const pauli::SpinHamiltonian> model_;
  pauli::StateVector state_;
};

/// Slater determinant tracked through its correlation matrix. The initial
/// state is the N-particle ground state of the tight-binding Hamiltonian.
class GaussBackend final : public PhysicsBackend {
 public:
  GaussBackend(int n_sites, double dt, const PhysicsParams& p);

  BackendKind kind() const override { return BackendKind::XxGauss; }
  int n_sites() const override { return n_sites_; }
  int action_count() const override { return fermion::kXxGeneratorCount; }
  std::string action_name(int action) const override;
  void reset() override;
  void apply_action(int action) override;
  void free_step() override;
  int register_observable(const std::string& name) override;
  double measure(int id) const override;
  double measure_variance(int id) const override;
  std::unique_ptr<PhysicsBackend> clone() const override;

  const fermion::CorrelationMatrix& correlation() const { return state_; }
  fermion::BoundarySector sector() const { return sector_; }

 private:
  struct Observable {
    fermion::SingleParticleOperator op;
    int gamma_range = 0;  // > 0 selects the Gamma_n string correlator
  };
  int n_sites_;
  fermion::BoundarySector sector_;
  double J_, h_;
  std::shared_ptr<const std::vector<ComplexMatrix>> unitaries_;
  std::shared_ptr<const fermion::CorrelationMatrix> initial_;
  std::vector<Observable> observables_;
  fermion::CorrelationMatrix state_;
};

/// The XX control problem in the full 2^L spin basis, with every generator
/// obtained from its fermionic form through the Jordan-Wigner map. Exists to
/// cross-check GaussBackend; limited to small L.
class XxDenseBackend final : public PhysicsBackend {
 public:
  XxDenseBackend(int n_sites, double dt, const PhysicsParams& p);

  BackendKind kind() const override { return BackendKind::XxDense; }
  int n_sites() const override { return n_sites_; }
  int action_count() const override { return fermion::kXxGeneratorCount; }
  std::string action_name(int action) const override;
  void reset() override;
  void apply_action(int action) override;
  void free_step() override;
  int register_observable(const std::string& name) override;
  double measure(int id) const override;
  double measure_variance(int id) const override;
  std::unique_ptr<PhysicsBackend> clone() const override;

  const pauli::StateVector& state() const { return state_; }
  /// <a^dagger_i a_j> evaluated in the spin basis.
  ComplexMatrix two_point() const;

 private:
  int n_sites_;
  fermion::BoundarySector sector_;
  double J_, h_;
  std::shared_ptr<const std::vector<pauli::GeneratorPropagator>> propagators_;
  std::shared_ptr<const pauli::StateVector> initial_;
  std::vector<std::shared_ptr<const pauli::CompiledOperator>> observables_;
  pauli::StateVector state_;
};

/// sum_ij m_ij a^dagger_i a_j + offset written as Pauli strings, with
/// a^dagger_i a_j = sigma^+_i prod_{i<m<j} (-Z_m) sigma^-_j for i < j.
pauli::SpinHamiltonian jordan_wigner_spin_form(const fermion::SingleParticleOperator& op);

/// L^{-1} sum_l (sigma^+_l sigma^-_{l+n} + h.c.).
pauli::SpinHamiltonian gamma_spin_operator(int n_sites, int n);

/// An XX observable evaluated directly on a correlation matrix (pure or
/// mixed), with the same naming as the XX backends.
double measure_xx(const fermion::CorrelationMatrix& c, const std::string& name, double J, double h);
/// Wick variance; throws for gamma_<n>.
double measure_xx_variance(const fermion::CorrelationMatrix& c, const std::string& name, double J, double h);

/// Names understood by each backend, for diagnostics.
std::vector<std::string> known_observables(BackendKind kind, int n_sites);

std::unique_ptr<PhysicsBackend> make_backend(BackendKind kind, int n_sites, double dt, const PhysicsParams& p);

}  // namespace qprep::env
