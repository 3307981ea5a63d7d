#include "covertrack/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "covertrack/error.hpp"

namespace covertrack {

void TrainConfig::validate() const {
  if (episodes < 1) throw ConfigError("train.episodes must be positive");
  if (hidden < 1) throw ConfigError("train.hidden must be positive");
  if (batch_size < 1) throw ConfigError("train.batch_size must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("train.buffer_capacity must be >= train.batch_size");
  if (target_sync < 1) throw ConfigError("train.target_sync must be positive");
  if (updates_per_episode < 0) throw ConfigError("train.updates_per_episode must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("train.gamma must lie in [0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0))
    throw ConfigError("train.epsilon_* must lie in [0, 1]");
  if (epsilon_anneal_episodes < 0) throw ConfigError("train.epsilon_anneal_episodes must be >= 0");
}

double TrainConfig::epsilon_at(int episode) const {
  if (epsilon_anneal_episodes == 0 || episode >= epsilon_anneal_episodes) return epsilon_end;
  const double frac = static_cast<double>(episode) / epsilon_anneal_episodes;
  return epsilon_start + frac * (epsilon_end - epsilon_start);
}

bool operator==(const CurvePoint& a, const CurvePoint& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.episode == b.episode && same(a.mean_coverage, b.mean_coverage) && same(a.loss, b.loss) &&
         same(a.epsilon, b.epsilon);
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

double td_loss_and_gradient(const QNetwork& online, const QNetwork& target,
                            const std::vector<const EpisodeRecord*>& batch, double gamma, ParamVector& grad) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const int steps = batch.front()->steps;
  const int n = batch.front()->cameras;
  const int b = static_cast<int>(batch.size());
  const int cols = b * n;  // sequences per step
  const int in = online.shape().input();

  // Column layout: t * cols + e * n + i.
  Eigen::MatrixXd x(in, static_cast<Eigen::Index>(steps + 1) * cols);
  for (int e = 0; e < b; ++e) {
    const auto& ep = *batch[static_cast<std::size_t>(e)];
    if (ep.steps != steps || ep.cameras != n) throw std::invalid_argument("batch episodes differ in shape");
    for (int t = 0; t <= steps; ++t) x.middleCols(static_cast<Eigen::Index>(t) * cols + e * n, n) = ep.inputs.middleCols(t * n, n);
  }

  const Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(online.shape().hidden, cols);
  const SequenceCache cache = online.forward_sequence(x, steps + 1, h0);
  const SequenceCache tcache = target.forward_sequence(x, steps + 1, h0);

  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(NetworkShape::kOutputs, cache.q.cols());
  const double count = static_cast<double>(steps) * cols;
  double loss = 0.0;
  for (int t = 0; t < steps; ++t) {
    for (int e = 0; e < b; ++e) {
      const auto& ep = *batch[static_cast<std::size_t>(e)];
      for (int i = 0; i < n; ++i) {
        const Eigen::Index col = static_cast<Eigen::Index>(t) * cols + e * n + i;
        const Eigen::Index next = col + cols;
        const auto k = static_cast<std::size_t>(t * n + i);
        const double y = ep.rewards[k] + gamma * tcache.q.col(next).maxCoeff();
        const int a = ep.actions[k];
        const double err = cache.q(a, col) - y;
        loss += err * err;
        dq(a, col) = 2.0 * err / count;
      }
    }
  }
  grad = online.backward_sequence(cache, dq);
  return loss / count;
}

std::pair<EpisodeRecord, double> collect_episode(const QNetwork& net, const EnvConfig& env, InitMode mode,
                                                 std::uint64_t seed, double epsilon) {
  Environment world(env, mode, seed);
  Rng explore = make_stream(seed, Stream::exploration);
  const int n = env.cameras;
  const int steps = env.episode_length;

  EpisodeRecord rec;
  rec.steps = steps;
  rec.cameras = n;
  rec.inputs.resize(net.shape().input(), static_cast<Eigen::Index>(steps + 1) * n);
  rec.actions.reserve(static_cast<std::size_t>(steps * n));
  rec.rewards.reserve(static_cast<std::size_t>(steps * n));

  const CentralizedObservation* obs = &world.reset();
  HiddenState hidden = net.zero_hidden(n);
  double coverage_sum = 0.0;
  for (int t = 0; t < steps; ++t) {
    rec.inputs.middleCols(static_cast<Eigen::Index>(t) * n, n) = encode_agents(*obs, env.field);
    ActResult r = act(net, *obs, env.field, hidden, epsilon, explore);
    hidden = std::move(r.hidden);
    const StepResult& s = world.step(r.action);
    for (int i = 0; i < n; ++i) {
      rec.actions.push_back(r.action[static_cast<std::size_t>(i)].index());
      rec.rewards.push_back(s.rewards[static_cast<std::size_t>(i)]);
    }
    coverage_sum += team_reward(s.coverage);
    obs = &s.obs;
  }
  rec.inputs.middleCols(static_cast<Eigen::Index>(steps) * n, n) = encode_agents(*obs, env.field);
  return {std::move(rec), coverage_sum / steps};
}

namespace {

double clip_by_norm(ParamVector& grad, double max_norm) {
  const double norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
  if (max_norm > 0.0 && norm > max_norm) {
    const double k = max_norm / norm;
    for (double& g : grad) g *= k;
  }
  return norm;
}

}  // namespace

TrainResult train(const EnvConfig& env, const TrainConfig& config,
                  const std::function<void(const CurvePoint&)>& on_episode) {
  env.validate();
  config.validate();

  const NetworkShape shape{env.cameras, env.targets, config.hidden};
  Rng weight_rng = make_stream(config.seed, Stream::weights);
  Rng replay_rng = make_stream(config.seed, Stream::replay);
  QNetwork online = QNetwork::initialized(shape, weight_rng);
  QNetwork target = online;
  Adam optimizer(online.parameter_count(), config.learning_rate);
  ReplayBuffer buffer(static_cast<std::size_t>(config.buffer_capacity));

  TrainResult result{online, {}};
  result.curve.reserve(static_cast<std::size_t>(config.episodes));
  long updates = 0;
  ParamVector grad;

  for (int ep = 0; ep < config.episodes; ++ep) {
    const double eps = config.epsilon_at(ep);
    auto [record, coverage] = collect_episode(online, env, config.init_mode, derive_seed(config.seed, ep), eps);
    buffer.push(std::move(record));

    double loss_sum = 0.0;
    int loss_count = 0;
    if (buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
      for (int u = 0; u < config.updates_per_episode; ++u) {
        const auto batch = buffer.sample(static_cast<std::size_t>(config.batch_size), replay_rng);
        const double loss = td_loss_and_gradient(online, target, batch, config.gamma, grad);
        const double gnorm = clip_by_norm(grad, config.grad_clip);
        if (!std::isfinite(loss) || !std::isfinite(gnorm)) {
          std::ostringstream msg;
          msg << "training diverged at episode " << ep << ", update " << updates << " (loss=" << loss
              << ", grad norm=" << gnorm << ")";
          throw NumericError(msg.str());
        }
        optimizer.step(online.parameters(), grad);
        ++updates;
        if (updates % config.target_sync == 0) target = online;
        loss_sum += loss;
        ++loss_count;
      }
    }
    CurvePoint point{ep, coverage, loss_count > 0 ? loss_sum / loss_count : std::numeric_limits<double>::quiet_NaN(),
                     eps};
    result.curve.push_back(point);
    if (on_episode) on_episode(point);
  }
  result.net = std::move(online);
  return result;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ArtifactError("cannot write learning curve: " + path.string());
  os.precision(17);
  os << "episode,mean_coverage,loss,epsilon\n";
  for (const auto& p : curve) os << p.episode << ',' << p.mean_coverage << ',' << p.loss << ',' << p.epsilon << '\n';
}

}  // namespace covertrack
