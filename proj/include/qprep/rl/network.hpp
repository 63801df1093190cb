#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qprep/core/types.hpp"
#include "qprep/env/environment.hpp"

namespace qprep::rl {

enum class DuelingMode { Sum, MeanSubtracted };

/// Linear+ReLU -> Linear+ReLU -> concat(one-hot previous action, previous
/// reward) -> LSTM -> dueling head.
struct NetworkShape {
  int history_length = 240;
  int n_actions = 6;
  int hidden1 = 512;
  int hidden2 = 512;
  int lstm = 512;
  /// Feed the history as one-hot blocks instead of raw indices.
  bool one_hot_history = false;
  DuelingMode dueling = DuelingMode::Sum;

  int input_dim() const { return one_hot_history ? history_length * n_actions : history_length; }
  int aux_dim() const { return n_actions + 1; }
  int lstm_input_dim() const { return hidden2 + aux_dim(); }
  void validate() const;
  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Offsets of every parameter block inside the flat parameter vector.
struct ParamLayout {
  explicit ParamLayout(const NetworkShape& s);
  Eigen::Index w1, b1, w2, b2, wx, wh, bl, wv, bv, wa, ba, total;
};

struct LstmState {
  RealMatrix h;  // lstm x batch
  RealMatrix c;
  static LstmState zeros(int width, int batch = 1);
};

/// Network inputs for one time step of a batch: columns are batch entries.
struct StepInput {
  RealMatrix history;  // input_dim x batch
  RealMatrix aux;      // (n_actions + 1) x batch
};

/// Encodes the observation of a single environment step as column `col`.
void encode_observation(const NetworkShape& s, const env::Observation& o, StepInput& in, Eigen::Index col);
StepInput encode_observation(const NetworkShape& s, const env::Observation& o);

struct HeadOutput {
  RealMatrix q;  // n_actions x batch
  RealMatrix v;  // 1 x batch
  RealMatrix a;  // n_actions x batch
};

/// Activations kept by forward_sequence for backward_sequence.
struct SequenceCache {
  std::vector<StepInput> inputs;
  std::vector<RealMatrix> h1, h2, z, gates, c, h;  // per step
  LstmState initial;
};

class QNetwork {
 public:
  QNetwork() = default;
  explicit QNetwork(const NetworkShape& shape);

  const NetworkShape& shape() const { return shape_; }
  const ParamLayout& layout() const { return layout_; }
  RealVector& params() { return params_; }
  const RealVector& params() const { return params_; }
  Eigen::Index parameter_count() const { return layout_.total; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every block.
  void initialize(std::mt19937_64& rng);

  /// One time step; `state` is advanced in place.
  HeadOutput step(const StepInput& in, LstmState& state) const;

  /// Runs `inputs` in order from `state` (advanced in place). Fills `cache`
  /// when given. With `active`, column b only advances at steps where
  /// active[t](b) != 0; inactive columns keep their state.
  std::vector<HeadOutput> forward_sequence(const std::vector<StepInput>& inputs, LstmState& state,
                                           SequenceCache* cache = nullptr,
                                           const std::vector<Eigen::VectorXi>* active = nullptr) const;

  /// Gradient of sum_t <dq[t], Q[t]> for a cached forward pass.
  RealVector backward_sequence(const SequenceCache& cache, const std::vector<RealMatrix>& dq) const;

 private:
  using ConstMap = Eigen::Map<const RealMatrix>;
  ConstMap block(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) const;
  void lstm_cell(const RealMatrix& z, const LstmState& prev, RealMatrix& gates, RealMatrix& c, RealMatrix& h) const;
  HeadOutput head(const RealMatrix& h) const;

  NetworkShape shape_{};
  ParamLayout layout_{NetworkShape{}};
  RealVector params_;
};

/// Argmax with ties broken by the lowest index.
int greedy_action(const Eigen::Ref<const RealVector>& q);

/// Throws NumericalError when any entry is non-finite.
void check_finite(const RealMatrix& m, const char* what);

}  // namespace qprep::rl
