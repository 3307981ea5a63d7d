#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "covertrack/env.hpp"
#include "covertrack/rng.hpp"

namespace covertrack {

// Flat parameter or gradient buffer. Eigen picks its vectorised summation
// order from the data address, so the base must be aligned for results not
// to depend on where the heap put it.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

struct NetworkShape {
  int cameras = 1;
  int targets = 1;
  int hidden = 128;

  static constexpr int kOutputs = CameraAction::kCount;
  /// Per-camera block: (sin a, cos a, x/W, y/H) followed by 3 values per target.
  int block() const { return 4 + 3 * targets; }
  int input() const { return cameras * block(); }

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Recurrent state of every camera, one column per camera (hidden x n).
using HiddenState = Eigen::MatrixXd;
/// q-values, one row per camera and one column per action (n x 9).
using QMatrix = Eigen::MatrixXd;

/// Network input for camera i: its own block first, then the other cameras in
/// index order. Angles enter as sin/cos, positions scaled by the field size,
/// distances by vis_distance; unobserved (-1, -1, -1) tuples pass through as is.
std::vector<double> order_observation(const CentralizedObservation& obs, int camera, const FieldSpec& field);
/// All n ordered inputs as columns (input x n).
Eigen::MatrixXd encode_agents(const CentralizedObservation& obs, const FieldSpec& field);

/// Activations kept by forward_sequence for backpropagation through time.
/// Column t * batch + b holds sample b at step t.
struct SequenceCache {
  int steps = 0;
  int batch = 0;
  Eigen::MatrixXd x, a1, a2, a3;  // encoder
  Eigen::MatrixXd h;              // hidden x (steps + 1) * batch, block 0 is h0
  Eigen::MatrixXd r, z, n, gh_n;  // gru gates
  Eigen::MatrixXd a4, q;          // head
};

/// Parameter-shared recurrent Q-network: three tanh encoder layers, a GRU
/// cell, a tanh layer and a linear output of 9 q-values. All weights live in
/// one flat buffer; one instance serves every camera.
class QNetwork {
 public:
  explicit QNetwork(NetworkShape shape);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
  static QNetwork initialized(NetworkShape shape, Rng& rng);

  const NetworkShape& shape() const { return shape_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  HiddenState zero_hidden(int columns) const { return HiddenState::Zero(shape_.hidden, columns); }

  struct Output {
    Eigen::MatrixXd q;       // 9 x batch
    Eigen::MatrixXd hidden;  // hidden x batch
  };
  /// One recurrent step for a batch of columns. The caller's hidden state is not modified.
  Output forward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& hidden) const;

  /// Unrolls `steps` steps; `inputs` holds steps * batch columns, step-major.
  SequenceCache forward_sequence(const Eigen::MatrixXd& inputs, int steps, const Eigen::MatrixXd& h0) const;
  /// Gradient of a scalar loss given dLoss/dq for every cached column (9 x steps * batch).
  ParamVector backward_sequence(const SequenceCache& cache, const Eigen::MatrixXd& dq) const;

  void save(const std::filesystem::path& path) const;
  static QNetwork load(const std::filesystem::path& path);
  /// Loads and checks the camera/target counts against the run.
  static QNetwork load(const std::filesystem::path& path, int cameras, int targets);

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  struct Layout {
    std::size_t w1, b1, w2, b2, w3, b3;
    std::size_t w_ih, b_ih, w_hh, b_hh;
    std::size_t w4, b4, w5, b5;
    std::size_t total;

    friend bool operator==(const Layout&, const Layout&) = default;
  };
  static Layout make_layout(const NetworkShape& s);

  NetworkShape shape_;
  Layout layout_;
  ParamVector params_;
};

struct ActResult {
  JointAction action;
  QMatrix q;
  HiddenState hidden;
};

/// Index of the largest entry; ties go to the lowest index.
int argmax_action(std::span<const double> q);

/// Epsilon-greedy joint action for all cameras from one shared network.
/// With epsilon == 0 no random numbers are drawn.
ActResult act(const QNetwork& net, const CentralizedObservation& obs, const FieldSpec& field,
              const HiddenState& hidden, double epsilon, Rng& rng);

}  // namespace covertrack
