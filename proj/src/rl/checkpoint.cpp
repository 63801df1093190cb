#include "qprep/rl/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qprep/core/error.hpp"

namespace qprep::rl {

namespace {

constexpr char kMagic[8] = {'Q', 'P', 'R', 'P', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void pod(const T& v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void string(const std::string& s) {
    pod<std::uint64_t>(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void vector(const RealVector& v) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    os_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}
  template <class T>
  T pod() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  std::string string() {
    const auto n = pod<std::uint64_t>();
    if (n > (1u << 20)) fail("implausible string length");
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }
  RealVector vector(Eigen::Index expected) {
    const auto n = pod<std::uint64_t>();
    if (static_cast<Eigen::Index>(n) != expected) fail("parameter count mismatch");
    RealVector v(expected);
    is_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(expected * sizeof(double)));
    check();
    return v;
  }
  [[noreturn]] void fail(const std::string& why) const { throw InvalidArgument("checkpoint " + path_ + ": " + why); }

 private:
  void check() const {
    if (!is_) fail("truncated file");
  }
  std::istream& is_;
  std::string path_;
};

}  // namespace

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(const std::string& path, const TrainState& state, std::uint64_t config_hash) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidArgument("checkpoint: cannot open " + tmp + " for writing");
    Writer w(os);
    os.write(kMagic, sizeof(kMagic));
    w.pod(kCheckpointVersion);
    w.pod(config_hash);
    const NetworkShape& s = state.online.shape();
    for (int v : {s.history_length, s.n_actions, s.hidden1, s.hidden2, s.lstm, int{s.one_hot_history},
                  static_cast<int>(s.dueling)}) {
      w.pod<std::int32_t>(v);
    }
    for (std::int64_t v : {state.updates, state.episodes, state.collected_steps, state.trained_steps}) w.pod(v);
    std::ostringstream rng;
    rng << state.learner_rng;
    w.string(rng.str());
    w.vector(state.online.params());
    w.vector(state.target.params());
    w.pod<std::int64_t>(state.adam.step_count());
    w.vector(state.adam.first_moment());
    w.vector(state.adam.second_moment());
    if (!os) throw InvalidArgument("checkpoint: write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw InvalidArgument("checkpoint: cannot move " + tmp + " into place");
}

LoadedCheckpoint load_checkpoint(const std::string& path, const AdamConfig& adam) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("checkpoint: cannot open " + path);
  Reader r(is, path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || !std::equal(magic, magic + 8, kMagic)) r.fail("not a checkpoint file");
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version));
  LoadedCheckpoint out;
  out.config_hash = r.pod<std::uint64_t>();
  NetworkShape s;
  s.history_length = r.pod<std::int32_t>();
  s.n_actions = r.pod<std::int32_t>();
  s.hidden1 = r.pod<std::int32_t>();
  s.hidden2 = r.pod<std::int32_t>();
  s.lstm = r.pod<std::int32_t>();
  s.one_hot_history = r.pod<std::int32_t>() != 0;
  const auto dueling = r.pod<std::int32_t>();
  if (dueling != 0 && dueling != 1) r.fail("bad dueling mode");
  s.dueling = static_cast<DuelingMode>(dueling);
  TrainState& st = out.state;
  st.updates = r.pod<std::int64_t>();
  st.episodes = r.pod<std::int64_t>();
  st.collected_steps = r.pod<std::int64_t>();
  st.trained_steps = r.pod<std::int64_t>();
  std::istringstream rng(r.string());
  rng >> st.learner_rng;
  if (!rng) r.fail("bad RNG state");
  st.online = QNetwork(s);
  st.target = QNetwork(s);
  st.online.params() = r.vector(st.online.parameter_count());
  st.target.params() = r.vector(st.target.parameter_count());
  st.adam = Adam(st.online.parameter_count(), adam);
  const auto t = r.pod<std::int64_t>();
  RealVector m = r.vector(st.online.parameter_count());
  RealVector v = r.vector(st.online.parameter_count());
  st.adam.restore(t, std::move(m), std::move(v));
  return out;
}

}  // namespace qprep::rl
