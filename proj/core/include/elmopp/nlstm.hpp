#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace elmopp {

/// Nested LSTM cell of configurable depth.
///
/// Level 0 is an ordinary LSTM (sigmoid gates, tanh candidate and output).
/// Instead of the additive update c' = f*c + i*g, the pair (i*g, f*c) is fed
/// to the level below as (input, previous hidden); that level's output becomes
/// the new cell state of the level above. Inner levels use linear candidate and
/// output activations. The deepest level applies the additive update, so a
/// depth-1 cell is exactly the classic LSTM.
///
/// Parameters live in one flat buffer owned by the caller. For each level the
/// gate matrix W (4H x (in + H), column-major, gate rows ordered i, f, o, g)
/// is followed by its bias (4H).
class NlstmCell {
 public:
  struct State {
    Eigen::VectorXd h;               // outer hidden output
    std::vector<Eigen::VectorXd> c;  // one memory vector per level
  };

  struct LevelCache {
    Eigen::VectorXd u;  // [input; hidden] fed to the gates
    Eigen::VectorXd z;
    Eigen::VectorXd i, f, o, g;
    Eigen::VectorXd a, b;  // i*g and f*c_prev, handed to the level below
    Eigen::VectorXd c_prev, c_new, phi, out;
  };

  struct StepCache {
    std::vector<LevelCache> levels;
  };

  /// Gradient flowing backwards in time: into h_{t-1} and into every level's
  /// previous memory vector.
  struct Carry {
    Eigen::VectorXd dh;
    std::vector<Eigen::VectorXd> dc;
  };

  NlstmCell(std::size_t input_size, std::size_t hidden_size, std::size_t depth);

  std::size_t input_size() const { return input_; }
  std::size_t hidden_size() const { return hidden_; }
  std::size_t depth() const { return depth_; }
  std::size_t param_count() const { return param_count_; }

  /// Offset of level `level`'s gate matrix in the parameter buffer; its bias
  /// follows the matrix.
  std::size_t weight_offset(std::size_t level) const { return offsets_[level]; }
  std::size_t level_input_size(std::size_t level) const { return level == 0 ? input_ : hidden_; }

  State zero_state() const;
  StepCache make_cache() const;
  Carry zero_carry() const;

  /// Advances `state` by one input and records everything needed for the
  /// backward pass in `cache`. Throws std::invalid_argument on non-finite x.
  void step(std::span<const double> params, State& state, const Eigen::VectorXd& x,
            StepCache& cache) const;

  /// Backpropagates dL/dh_t (excluding the part already in `carry`) through
  /// one recorded step, accumulating into `grad` and updating `carry` to refer
  /// to the previous step.
  void backward(std::span<const double> params, const StepCache& cache,
                const Eigen::VectorXd& dh, Carry& carry, std::span<double> grad) const;

 private:
  const Eigen::VectorXd& forward_level(std::span<const double> params, std::size_t level,
                                       State& state, StepCache& cache) const;
  const Eigen::VectorXd& backward_level(std::span<const double> params, std::size_t level,
                                        const StepCache& cache, const Eigen::VectorXd& d_out,
                                        Carry& carry, std::span<double> grad) const;

  std::size_t input_;
  std::size_t hidden_;
  std::size_t depth_;
  std::vector<std::size_t> offsets_;
  std::size_t param_count_ = 0;

  // Scratch for backward_level, one slot per level.
  struct Scratch {
    Eigen::VectorXd dc, dz, du;
  };
  mutable std::vector<Scratch> scratch_;
};

/// An NLSTM cell followed by an affine readout y = W_out h + b_out. Parameter
/// layout: cell parameters, then W_out (out x H, column-major), then b_out.
class NlstmRegressor {
 public:
  NlstmRegressor(std::size_t input_size, std::size_t hidden_size, std::size_t depth,
                 std::size_t output_size);

  const NlstmCell& cell() const { return cell_; }
  std::size_t output_size() const { return output_; }
  std::size_t param_count() const { return cell_.param_count() + output_ * (cell_.hidden_size() + 1); }

  /// Readout of a hidden vector.
  Eigen::VectorXd readout(std::span<const double> params, const Eigen::VectorXd& h) const;

  /// Runs a window from `state`, returning mean squared error over all
  /// outputs and steps, and adding its exact gradient (BPTT truncated at the
  /// window start) to `grad`. `state` is advanced past the window.
  double window_loss_and_gradient(std::span<const double> params, NlstmCell::State& state,
                                  std::span<const Eigen::VectorXd> inputs,
                                  std::span<const Eigen::VectorXd> targets,
                                  std::span<double> grad) const;

  /// Same loss without gradients.
  double window_loss(std::span<const double> params, NlstmCell::State& state,
                     std::span<const Eigen::VectorXd> inputs,
                     std::span<const Eigen::VectorXd> targets) const;

 private:
  NlstmCell cell_;
  std::size_t output_;
  mutable std::vector<NlstmCell::StepCache> caches_;
};

}  // namespace elmopp
