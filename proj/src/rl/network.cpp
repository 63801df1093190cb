#include "qprep/rl/network.hpp"

#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::rl {

void NetworkShape::validate() const {
  QPREP_REQUIRE(history_length >= 1, "network: history_length must be positive");
  QPREP_REQUIRE(n_actions >= 1, "network: n_actions must be positive");
  QPREP_REQUIRE(hidden1 >= 1 && hidden2 >= 1 && lstm >= 1, "network: layer widths must be positive");
}

ParamLayout::ParamLayout(const NetworkShape& s) {
  Eigen::Index at = 0;
  auto take = [&at](Eigen::Index n) {
    const Eigen::Index here = at;
    at += n;
    return here;
  };
  const Eigen::Index h4 = 4 * Eigen::Index{s.lstm};
  w1 = take(Eigen::Index{s.hidden1} * s.input_dim());
  b1 = take(s.hidden1);
  w2 = take(Eigen::Index{s.hidden2} * s.hidden1);
  b2 = take(s.hidden2);
  wx = take(h4 * s.lstm_input_dim());
  wh = take(h4 * s.lstm);
  bl = take(h4);
  wv = take(s.lstm);
  bv = take(1);
  wa = take(Eigen::Index{s.n_actions} * s.lstm);
  ba = take(s.n_actions);
  total = at;
}

LstmState LstmState::zeros(int width, int batch) {
  return {RealMatrix::Zero(width, batch), RealMatrix::Zero(width, batch)};
}

void encode_observation(const NetworkShape& s, const env::Observation& o, StepInput& in, Eigen::Index col) {
  QPREP_REQUIRE(static_cast<int>(o.history.size()) == s.history_length,
                "encode_observation: history length " + std::to_string(o.history.size()) + " does not match the network input " +
                    std::to_string(s.history_length));
  auto hist = in.history.col(col);
  if (s.one_hot_history) {
    hist.setZero();
    for (int t = 0; t < s.history_length; ++t) {
      const int a = o.history[static_cast<std::size_t>(t)];
      if (a >= 0) hist[Eigen::Index{t} * s.n_actions + a] = 1.0;
    }
  } else {
    for (int t = 0; t < s.history_length; ++t) hist[t] = o.history[static_cast<std::size_t>(t)];
  }
  auto aux = in.aux.col(col);
  aux.setZero();
  if (o.prev_action >= 0) {
    QPREP_REQUIRE(o.prev_action < s.n_actions, "encode_observation: previous action out of range");
    aux[o.prev_action] = 1.0;
  }
  aux[s.n_actions] = o.prev_reward;
}

StepInput encode_observation(const NetworkShape& s, const env::Observation& o) {
  StepInput in{RealMatrix(s.input_dim(), 1), RealMatrix(s.aux_dim(), 1)};
  encode_observation(s, o, in, 0);
  return in;
}

void check_finite(const RealMatrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string("numerical health: non-finite values in ") + what);
}

int greedy_action(const Eigen::Ref<const RealVector>& q) {
  QPREP_REQUIRE(q.size() >= 1, "greedy_action: empty Q vector");
  int best = 0;
  for (Eigen::Index a = 1; a < q.size(); ++a) {
    if (q[a] > q[best]) best = static_cast<int>(a);
  }
  return best;
}

QNetwork::QNetwork(const NetworkShape& shape) : shape_(shape), layout_(shape) {
  shape_.validate();
  params_ = RealVector::Zero(layout_.total);
}

QNetwork::ConstMap QNetwork::block(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) const {
  return ConstMap(params_.data() + offset, rows, cols);
}

void QNetwork::initialize(std::mt19937_64& rng) {
  auto fill = [&](Eigen::Index offset, Eigen::Index count, Eigen::Index fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < count; ++i) params_[offset + i] = u(rng);
  };
  const auto& s = shape_;
  const auto& l = layout_;
  fill(l.w1, l.b1 - l.w1, s.input_dim());
  fill(l.b1, s.hidden1, s.input_dim());
  fill(l.w2, l.b2 - l.w2, s.hidden1);
  fill(l.b2, s.hidden2, s.hidden1);
  fill(l.wx, l.bv - l.wx, s.lstm);  // wx, wh, bl, wv share the LSTM fan-in scale
  fill(l.bv, 1, s.lstm);
  fill(l.wa, l.total - l.wa, s.lstm);
}

void QNetwork::lstm_cell(const RealMatrix& z, const LstmState& prev, RealMatrix& gates, RealMatrix& c,
                         RealMatrix& h) const {
  const Eigen::Index H = shape_.lstm;
  const auto wx = block(layout_.wx, 4 * H, shape_.lstm_input_dim());
  const auto wh = block(layout_.wh, 4 * H, H);
  const auto bl = block(layout_.bl, 4 * H, 1);
  gates.noalias() = wx * z;
  gates.noalias() += wh * prev.h;
  gates.colwise() += bl.col(0);
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  gates.topRows(2 * H) = gates.topRows(2 * H).unaryExpr(sigmoid);
  gates.middleRows(2 * H, H) = gates.middleRows(2 * H, H).array().tanh().matrix();
  gates.bottomRows(H) = gates.bottomRows(H).unaryExpr(sigmoid);
  const auto i = gates.topRows(H).array();
  const auto f = gates.middleRows(H, H).array();
  const auto g = gates.middleRows(2 * H, H).array();
  const auto o = gates.bottomRows(H).array();
  c = (f * prev.c.array() + i * g).matrix();
  h = (o * c.array().tanh()).matrix();
}

HeadOutput QNetwork::head(const RealMatrix& h) const {
  const Eigen::Index H = shape_.lstm;
  const auto wv = block(layout_.wv, 1, H);
  const auto wa = block(layout_.wa, shape_.n_actions, H);
  HeadOutput out;
  out.v.noalias() = wv * h;
  out.v.array() += params_[layout_.bv];
  out.a.noalias() = wa * h;
  out.a.colwise() += block(layout_.ba, shape_.n_actions, 1).col(0);
  out.q = out.a;
  if (shape_.dueling == DuelingMode::MeanSubtracted) out.q.rowwise() -= out.a.colwise().mean();
  out.q.rowwise() += out.v.row(0);
  return out;
}

std::vector<HeadOutput> QNetwork::forward_sequence(const std::vector<StepInput>& inputs, LstmState& state,
                                                   SequenceCache* cache,
                                                   const std::vector<Eigen::VectorXi>* active) const {
  QPREP_REQUIRE(params_.size() == layout_.total, "QNetwork: parameters not allocated");
  QPREP_REQUIRE(!(cache && active), "forward_sequence: masked steps cannot be differentiated");
  QPREP_REQUIRE(!active || active->size() == inputs.size(), "forward_sequence: mask length mismatch");
  const auto& s = shape_;
  const auto w1 = block(layout_.w1, s.hidden1, s.input_dim());
  const auto b1 = block(layout_.b1, s.hidden1, 1);
  const auto w2 = block(layout_.w2, s.hidden2, s.hidden1);
  const auto b2 = block(layout_.b2, s.hidden2, 1);
  if (cache) {
    cache->inputs = inputs;
    cache->initial = state;
    for (auto* v : {&cache->h1, &cache->h2, &cache->z, &cache->gates, &cache->c, &cache->h}) v->resize(inputs.size());
  }
  std::vector<HeadOutput> out;
  out.reserve(inputs.size());
  RealMatrix h1, h2, z, gates, c, h;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const auto& in = inputs[t];
    const Eigen::Index batch = in.history.cols();
    QPREP_REQUIRE(in.history.rows() == s.input_dim() && in.aux.rows() == s.aux_dim() && in.aux.cols() == batch &&
                      state.h.cols() == batch && state.h.rows() == s.lstm,
                  "forward_sequence: input shape mismatch");
    h1.noalias() = w1 * in.history;
    h1.colwise() += b1.col(0);
    h1 = h1.cwiseMax(0.0);
    h2.noalias() = w2 * h1;
    h2.colwise() += b2.col(0);
    h2 = h2.cwiseMax(0.0);
    z.resize(s.lstm_input_dim(), batch);
    z.topRows(s.hidden2) = h2;
    z.bottomRows(s.aux_dim()) = in.aux;
    lstm_cell(z, state, gates, c, h);
    check_finite(h, "LSTM output");
    if (active) {
      const auto& mask = (*active)[t];
      for (Eigen::Index b = 0; b < batch; ++b) {
        if (mask[b]) {
          state.h.col(b) = h.col(b);
          state.c.col(b) = c.col(b);
        }
      }
    } else {
      state.h = h;
      state.c = c;
    }
    out.push_back(head(state.h));
    check_finite(out.back().q, "Q values");
    if (cache) {
      cache->h1[t] = h1;
      cache->h2[t] = h2;
      cache->z[t] = z;
      cache->gates[t] = gates;
      cache->c[t] = c;
      cache->h[t] = h;
    }
  }
  return out;
}

HeadOutput QNetwork::step(const StepInput& in, LstmState& state) const {
  return forward_sequence({in}, state).front();
}

RealVector QNetwork::backward_sequence(const SequenceCache& cache, const std::vector<RealMatrix>& dq) const {
  QPREP_REQUIRE(dq.size() == cache.h.size(), "backward_sequence: one dQ per cached step is required");
  const auto& s = shape_;
  const auto& l = layout_;
  const Eigen::Index H = s.lstm;
  RealVector grad = RealVector::Zero(l.total);
  using Map = Eigen::Map<RealMatrix>;
  Map g_w1(grad.data() + l.w1, s.hidden1, s.input_dim());
  Map g_b1(grad.data() + l.b1, s.hidden1, 1);
  Map g_w2(grad.data() + l.w2, s.hidden2, s.hidden1);
  Map g_b2(grad.data() + l.b2, s.hidden2, 1);
  Map g_wx(grad.data() + l.wx, 4 * H, s.lstm_input_dim());
  Map g_wh(grad.data() + l.wh, 4 * H, H);
  Map g_bl(grad.data() + l.bl, 4 * H, 1);
  Map g_wv(grad.data() + l.wv, 1, H);
  Map g_wa(grad.data() + l.wa, s.n_actions, H);
  Map g_ba(grad.data() + l.ba, s.n_actions, 1);
  const auto w2 = block(l.w2, s.hidden2, s.hidden1);
  const auto wx = block(l.wx, 4 * H, s.lstm_input_dim());
  const auto wh = block(l.wh, 4 * H, H);
  const auto wv = block(l.wv, 1, H);
  const auto wa = block(l.wa, s.n_actions, H);

  if (cache.h.empty()) return grad;
  const Eigen::Index batch = cache.h.front().cols();
  RealMatrix dh_next = RealMatrix::Zero(H, batch);
  RealMatrix dc_next = RealMatrix::Zero(H, batch);
  RealMatrix da(4 * H, batch);
  for (std::size_t tt = cache.h.size(); tt-- > 0;) {
    const RealMatrix& dQ = dq[tt];
    QPREP_REQUIRE(dQ.rows() == s.n_actions && dQ.cols() == batch, "backward_sequence: dQ shape mismatch");
    const RealMatrix& h = cache.h[tt];
    const RealMatrix& c = cache.c[tt];
    const RealMatrix& h_prev = tt > 0 ? cache.h[tt - 1] : cache.initial.h;
    const RealMatrix& c_prev = tt > 0 ? cache.c[tt - 1] : cache.initial.c;
    const RealMatrix& gates = cache.gates[tt];

    const RealMatrix dv = dQ.colwise().sum();
    RealMatrix dA = dQ;
    if (s.dueling == DuelingMode::MeanSubtracted) dA.rowwise() -= dQ.colwise().mean();
    g_wv.noalias() += dv * h.transpose();
    grad[l.bv] += dv.sum();
    g_wa.noalias() += dA * h.transpose();
    g_ba += dA.rowwise().sum();
    RealMatrix dh = dh_next;
    dh.noalias() += wv.transpose() * dv;
    dh.noalias() += wa.transpose() * dA;

    const auto i = gates.topRows(H).array();
    const auto f = gates.middleRows(H, H).array();
    const auto g = gates.middleRows(2 * H, H).array();
    const auto o = gates.bottomRows(H).array();
    const Eigen::ArrayXXd tc = c.array().tanh();
    const Eigen::ArrayXXd dc = dc_next.array() + dh.array() * o * (1.0 - tc * tc);
    da.topRows(H) = (dc * g * i * (1.0 - i)).matrix();
    da.middleRows(H, H) = (dc * c_prev.array() * f * (1.0 - f)).matrix();
    da.middleRows(2 * H, H) = (dc * i * (1.0 - g * g)).matrix();
    da.bottomRows(H) = (dh.array() * tc * o * (1.0 - o)).matrix();
    dc_next = (dc * f).matrix();

    g_wx.noalias() += da * cache.z[tt].transpose();
    g_wh.noalias() += da * h_prev.transpose();
    g_bl += da.rowwise().sum();
    dh_next.noalias() = wh.transpose() * da;
    const RealMatrix dz = wx.transpose() * da;

    const RealMatrix dh2 = dz.topRows(s.hidden2).cwiseProduct((cache.h2[tt].array() > 0.0).cast<double>().matrix());
    g_w2.noalias() += dh2 * cache.h1[tt].transpose();
    g_b2 += dh2.rowwise().sum();
    const RealMatrix dh1 = (w2.transpose() * dh2).cwiseProduct((cache.h1[tt].array() > 0.0).cast<double>().matrix());
    g_w1.noalias() += dh1 * cache.inputs[tt].history.transpose();
    g_b1 += dh1.rowwise().sum();
  }
  if (!grad.allFinite()) throw NumericalError("numerical health: non-finite gradient");
  return grad;
}

}  // namespace qprep::rl
