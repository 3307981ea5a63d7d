#include "covertrack/qnetwork.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "covertrack/error.hpp"

namespace covertrack {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MapM = Eigen::Map<MatrixXd>;
using MapV = Eigen::Map<VectorXd>;
using CMapM = Eigen::Map<const MatrixXd>;
using CMapV = Eigen::Map<const VectorXd>;

constexpr std::array<char, 8> kMagic{'C', 'V', 'T', 'K', 'Q', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

// Written through exp, which Eigen vectorises for doubles; its scalar tanh is not.
MatrixXd tanh_of(const MatrixXd& m) { return (1.0 - 2.0 / ((2.0 * m.array()).exp() + 1.0)).matrix(); }
MatrixXd sigmoid_of(const MatrixXd& m) { return (1.0 / (1.0 + (-m.array()).exp())).matrix(); }
// d tanh given its output.
MatrixXd tanh_grad(const MatrixXd& y) { return (1.0 - y.array().square()).matrix(); }

template <class T>
void write_le(std::ostream& os, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) os.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <class T>
T read_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw ArtifactError("checkpoint truncated");
    bits |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<double> order_observation(const CentralizedObservation& obs, int camera, const FieldSpec& field) {
  const int n = obs.num_cameras();
  if (camera < 0 || camera >= n) throw std::out_of_range("camera index out of range");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * (4 + 3 * obs.num_targets())));

  auto append = [&](const CameraObservation& c) {
    const double a = c.pose.alpha * std::numbers::pi / 180.0;
    out.push_back(std::sin(a));
    out.push_back(std::cos(a));
    out.push_back(c.pose.pos.x / field.width);
    out.push_back(c.pose.pos.y / field.height);
    for (const auto& t : c.targets) {
      if (t.observed()) {
        out.push_back(t.d / field.vis_distance);
        out.push_back(t.sin_theta);
        out.push_back(t.cos_theta);
      } else {
        out.insert(out.end(), {-1.0, -1.0, -1.0});
      }
    }
  };

  append(obs.cameras[static_cast<std::size_t>(camera)]);
  for (int k = 0; k < n; ++k)
    if (k != camera) append(obs.cameras[static_cast<std::size_t>(k)]);
  return out;
}

Eigen::MatrixXd encode_agents(const CentralizedObservation& obs, const FieldSpec& field) {
  const int n = obs.num_cameras();
  MatrixXd out(n * (4 + 3 * obs.num_targets()), n);
  for (int i = 0; i < n; ++i) {
    const auto v = order_observation(obs, i, field);
    out.col(i) = CMapV(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return out;
}

QNetwork::Layout QNetwork::make_layout(const NetworkShape& s) {
  const std::size_t in = static_cast<std::size_t>(s.input());
  const std::size_t h = static_cast<std::size_t>(s.hidden);
  const std::size_t out = NetworkShape::kOutputs;
  Layout l{};
  std::size_t off = 0;
  auto take = [&off](std::size_t count) {
    const std::size_t at = off;
    off += count;
    return at;
  };
  l.w1 = take(h * in);
  l.b1 = take(h);
  l.w2 = take(h * h);
  l.b2 = take(h);
  l.w3 = take(h * h);
  l.b3 = take(h);
  l.w_ih = take(3 * h * h);
  l.b_ih = take(3 * h);
  l.w_hh = take(3 * h * h);
  l.b_hh = take(3 * h);
  l.w4 = take(h * h);
  l.b4 = take(h);
  l.w5 = take(out * h);
  l.b5 = take(out);
  l.total = off;
  return l;
}

QNetwork::QNetwork(NetworkShape shape) : shape_(shape), layout_(make_layout(shape)), params_(layout_.total, 0.0) {
  if (shape.cameras < 1 || shape.targets < 1 || shape.hidden < 1) throw ConfigError("invalid network shape");
}

QNetwork QNetwork::initialized(NetworkShape shape, Rng& rng) {
  QNetwork net(shape);
  const auto& l = net.layout_;
  const double in = shape.input();
  const double h = shape.hidden;
  auto fill = [&](std::size_t from, std::size_t to, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (std::size_t k = from; k < to; ++k) net.params_[k] = rng.uniform(-bound, bound);
  };
  fill(l.w1, l.w2, in);
  fill(l.w2, l.w_ih, h);
  fill(l.w_ih, l.w4, h);
  fill(l.w4, l.total, h);
  return net;
}

SequenceCache QNetwork::forward_sequence(const MatrixXd& inputs, int steps, const MatrixXd& h0) const {
  const int in = shape_.input();
  const int h = shape_.hidden;
  const int out = NetworkShape::kOutputs;
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  if (inputs.rows() != in) {
    throw std::invalid_argument("input width " + std::to_string(inputs.rows()) + " does not match network input " +
                                std::to_string(in));
  }
  if (inputs.cols() % steps != 0) throw std::invalid_argument("input columns not divisible by steps");
  const int batch = static_cast<int>(inputs.cols() / steps);
  if (h0.rows() != h || h0.cols() != batch) throw std::invalid_argument("hidden state shape mismatch");

  const double* p = params_.data();
  CMapM w1(p + layout_.w1, h, in);
  CMapV b1(p + layout_.b1, h);
  CMapM w2(p + layout_.w2, h, h);
  CMapV b2(p + layout_.b2, h);
  CMapM w3(p + layout_.w3, h, h);
  CMapV b3(p + layout_.b3, h);
  CMapM w_ih(p + layout_.w_ih, 3 * h, h);
  CMapV b_ih(p + layout_.b_ih, 3 * h);
  CMapM w_hh(p + layout_.w_hh, 3 * h, h);
  CMapV b_hh(p + layout_.b_hh, 3 * h);
  CMapM w4(p + layout_.w4, h, h);
  CMapV b4(p + layout_.b4, h);
  CMapM w5(p + layout_.w5, out, h);
  CMapV b5(p + layout_.b5, out);

  SequenceCache c;
  c.steps = steps;
  c.batch = batch;
  c.x = inputs;
  c.a1 = tanh_of((w1 * c.x).colwise() + b1);
  c.a2 = tanh_of((w2 * c.a1).colwise() + b2);
  c.a3 = tanh_of((w3 * c.a2).colwise() + b3);

  const MatrixXd gi = (w_ih * c.a3).colwise() + b_ih;
  const Eigen::Index tb = c.x.cols();
  c.h.resize(h, tb + batch);
  c.h.leftCols(batch) = h0;
  c.r.resize(h, tb);
  c.z.resize(h, tb);
  c.n.resize(h, tb);
  c.gh_n.resize(h, tb);

  for (int t = 0; t < steps; ++t) {
    const Eigen::Index col = static_cast<Eigen::Index>(t) * batch;
    const auto hp = c.h.middleCols(col, batch);
    const MatrixXd gh = (w_hh * hp).colwise() + b_hh;
    const auto gi_t = gi.middleCols(col, batch);
    c.r.middleCols(col, batch) = sigmoid_of(gi_t.topRows(h) + gh.topRows(h));
    c.z.middleCols(col, batch) = sigmoid_of(gi_t.middleRows(h, h) + gh.middleRows(h, h));
    c.gh_n.middleCols(col, batch) = gh.bottomRows(h);
    c.n.middleCols(col, batch) =
        tanh_of(gi_t.bottomRows(h) + c.r.middleCols(col, batch).cwiseProduct(gh.bottomRows(h)));
    const auto z = c.z.middleCols(col, batch).array();
    c.h.middleCols(col + batch, batch) =
        ((1.0 - z) * c.n.middleCols(col, batch).array() + z * hp.array()).matrix();
  }

  c.a4 = tanh_of((w4 * c.h.rightCols(tb)).colwise() + b4);
  c.q = (w5 * c.a4).colwise() + b5;
  return c;
}

QNetwork::Output QNetwork::forward(const MatrixXd& inputs, const MatrixXd& hidden) const {
  SequenceCache c = forward_sequence(inputs, 1, hidden);
  return {std::move(c.q), c.h.rightCols(c.batch)};
}

ParamVector QNetwork::backward_sequence(const SequenceCache& c, const MatrixXd& dq) const {
  const int in = shape_.input();
  const int h = shape_.hidden;
  const int out = NetworkShape::kOutputs;
  const int batch = c.batch;
  const Eigen::Index tb = c.x.cols();
  if (dq.rows() != out || dq.cols() != tb) throw std::invalid_argument("dq shape mismatch");

  const double* p = params_.data();
  CMapM w1(p + layout_.w1, h, in);
  CMapM w2(p + layout_.w2, h, h);
  CMapM w3(p + layout_.w3, h, h);
  CMapM w_ih(p + layout_.w_ih, 3 * h, h);
  CMapM w_hh(p + layout_.w_hh, 3 * h, h);
  CMapM w4(p + layout_.w4, h, h);
  CMapM w5(p + layout_.w5, out, h);

  ParamVector grad(layout_.total, 0.0);
  double* g = grad.data();
  MapM gw1(g + layout_.w1, h, in);
  MapV gb1(g + layout_.b1, h);
  MapM gw2(g + layout_.w2, h, h);
  MapV gb2(g + layout_.b2, h);
  MapM gw3(g + layout_.w3, h, h);
  MapV gb3(g + layout_.b3, h);
  MapM gw_ih(g + layout_.w_ih, 3 * h, h);
  MapV gb_ih(g + layout_.b_ih, 3 * h);
  MapM gw_hh(g + layout_.w_hh, 3 * h, h);
  MapV gb_hh(g + layout_.b_hh, 3 * h);
  MapM gw4(g + layout_.w4, h, h);
  MapV gb4(g + layout_.b4, h);
  MapM gw5(g + layout_.w5, out, h);
  MapV gb5(g + layout_.b5, out);

  // Head.
  gw5.noalias() = dq * c.a4.transpose();
  gb5 = dq.rowwise().sum();
  const MatrixXd dpre4 = (w5.transpose() * dq).cwiseProduct(tanh_grad(c.a4));
  const auto h_out = c.h.rightCols(tb);
  gw4.noalias() = dpre4 * h_out.transpose();
  gb4 = dpre4.rowwise().sum();
  const MatrixXd dh_head = w4.transpose() * dpre4;

  // GRU, backwards in time.
  MatrixXd dgi(3 * h, tb);
  MatrixXd dgh(3 * h, batch);
  MatrixXd dh_next = MatrixXd::Zero(h, batch);
  for (int t = c.steps - 1; t >= 0; --t) {
    const Eigen::Index col = static_cast<Eigen::Index>(t) * batch;
    const MatrixXd dh = dh_head.middleCols(col, batch) + dh_next;
    const auto hp = c.h.middleCols(col, batch).array();
    const auto r = c.r.middleCols(col, batch).array();
    const auto z = c.z.middleCols(col, batch).array();
    const auto n = c.n.middleCols(col, batch).array();
    const auto ghn = c.gh_n.middleCols(col, batch).array();

    const auto dha = dh.array();
    const Eigen::ArrayXXd dpre_n = dha * (1.0 - z) * (1.0 - n.square());
    const Eigen::ArrayXXd dpre_z = dha * (hp - n) * z * (1.0 - z);
    const Eigen::ArrayXXd dpre_r = dpre_n * ghn * r * (1.0 - r);

    auto dgi_t = dgi.middleCols(col, batch);
    dgi_t.topRows(h) = dpre_r.matrix();
    dgi_t.middleRows(h, h) = dpre_z.matrix();
    dgi_t.bottomRows(h) = dpre_n.matrix();
    dgh.topRows(h) = dpre_r.matrix();
    dgh.middleRows(h, h) = dpre_z.matrix();
    dgh.bottomRows(h) = (dpre_n * r).matrix();

    gw_hh.noalias() += dgh * c.h.middleCols(col, batch).transpose();
    gb_hh += dgh.rowwise().sum();
    dh_next = (dha * z).matrix();
    dh_next.noalias() += w_hh.transpose() * dgh;
  }
  gw_ih.noalias() = dgi * c.a3.transpose();
  gb_ih = dgi.rowwise().sum();

  // Encoder.
  const MatrixXd dpre3 = (w_ih.transpose() * dgi).cwiseProduct(tanh_grad(c.a3));
  gw3.noalias() = dpre3 * c.a2.transpose();
  gb3 = dpre3.rowwise().sum();
  const MatrixXd dpre2 = (w3.transpose() * dpre3).cwiseProduct(tanh_grad(c.a2));
  gw2.noalias() = dpre2 * c.a1.transpose();
  gb2 = dpre2.rowwise().sum();
  const MatrixXd dpre1 = (w2.transpose() * dpre2).cwiseProduct(tanh_grad(c.a1));
  gw1.noalias() = dpre1 * c.x.transpose();
  gb1 = dpre1.rowwise().sum();
  return grad;
}

void QNetwork::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ArtifactError("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(os, kVersion);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(shape_.cameras));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(shape_.targets));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(shape_.hidden));
  write_le<std::uint64_t>(os, static_cast<std::uint64_t>(params_.size()));
  for (double v : params_) write_le<double>(os, v);
  if (!os) throw ArtifactError("failed writing checkpoint: " + path.string());
}

QNetwork QNetwork::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArtifactError("cannot open checkpoint: " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw ArtifactError("not a covertrack checkpoint (bad magic): " + path.string());
  const auto version = read_le<std::uint32_t>(is);
  if (version != kVersion) throw ArtifactError("unsupported checkpoint version " + std::to_string(version));
  NetworkShape shape;
  shape.cameras = static_cast<int>(read_le<std::uint32_t>(is));
  shape.targets = static_cast<int>(read_le<std::uint32_t>(is));
  shape.hidden = static_cast<int>(read_le<std::uint32_t>(is));
  if (shape.cameras < 1 || shape.targets < 1 || shape.hidden < 1 || shape.cameras > 4096 || shape.targets > 4096 ||
      shape.hidden > 65536)
    throw ArtifactError("checkpoint header has an invalid shape");
  const auto count = read_le<std::uint64_t>(is);
  QNetwork net(shape);
  if (count != net.params_.size()) throw ArtifactError("checkpoint parameter count does not match its header");
  for (double& v : net.params_) {
    v = read_le<double>(is);
    if (!std::isfinite(v)) throw ArtifactError("checkpoint contains non-finite parameters");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw ArtifactError("trailing bytes after checkpoint payload");
  return net;
}

QNetwork QNetwork::load(const std::filesystem::path& path, int cameras, int targets) {
  QNetwork net = load(path);
  if (net.shape_.cameras != cameras || net.shape_.targets != targets) {
    throw ArtifactError("checkpoint shape (n=" + std::to_string(net.shape_.cameras) +
                        ", m=" + std::to_string(net.shape_.targets) + ") does not match run (n=" +
                        std::to_string(cameras) + ", m=" + std::to_string(targets) + ")");
  }
  return net;
}

int argmax_action(std::span<const double> q) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(q.size()); ++k)
    if (q[static_cast<std::size_t>(k)] > q[static_cast<std::size_t>(best)]) best = k;
  return best;
}

ActResult act(const QNetwork& net, const CentralizedObservation& obs, const FieldSpec& field,
              const HiddenState& hidden, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  const int n = obs.num_cameras();
  auto out = net.forward(encode_agents(obs, field), hidden);

  ActResult res;
  res.q = out.q.transpose();
  res.hidden = std::move(out.hidden);
  res.action.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int a = 0;
    if (epsilon > 0.0 && rng.bernoulli(epsilon)) {
      a = rng.uniform_int(0, CameraAction::kCount - 1);
    } else {
      const Eigen::VectorXd row = res.q.row(i).transpose();
      a = argmax_action(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    }
    res.action[static_cast<std::size_t>(i)] = CameraAction::from_index(a);
  }
  return res;
}

}  // namespace covertrack
