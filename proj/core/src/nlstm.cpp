#include "elmopp/nlstm.hpp"

#include <cmath>
#include <stdexcept>

namespace elmopp {

namespace {

using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

NlstmCell::NlstmCell(std::size_t input_size, std::size_t hidden_size, std::size_t depth)
    : input_(input_size), hidden_(hidden_size), depth_(depth) {
  if (input_ == 0 || hidden_ == 0 || depth_ == 0) {
    throw std::invalid_argument("NlstmCell: sizes and depth must be positive");
  }
  std::size_t off = 0;
  for (std::size_t l = 0; l < depth_; ++l) {
    offsets_.push_back(off);
    off += 4 * hidden_ * (level_input_size(l) + hidden_) + 4 * hidden_;
  }
  param_count_ = off;
  scratch_.resize(depth_);
  for (auto& s : scratch_) {
    s.dc.setZero(hidden_);
    s.dz.setZero(4 * hidden_);
  }
  for (std::size_t l = 0; l < depth_; ++l) scratch_[l].du.setZero(level_input_size(l) + hidden_);
}

NlstmCell::State NlstmCell::zero_state() const {
  State s;
  s.h = VectorXd::Zero(hidden_);
  s.c.assign(depth_, VectorXd::Zero(hidden_));
  return s;
}

NlstmCell::StepCache NlstmCell::make_cache() const {
  StepCache cache;
  cache.levels.resize(depth_);
  for (std::size_t l = 0; l < depth_; ++l) {
    auto& lc = cache.levels[l];
    lc.u.setZero(level_input_size(l) + hidden_);
    lc.z.setZero(4 * hidden_);
    for (auto* v : {&lc.i, &lc.f, &lc.o, &lc.g, &lc.a, &lc.b, &lc.c_prev, &lc.c_new, &lc.phi, &lc.out}) {
      v->setZero(hidden_);
    }
  }
  return cache;
}

NlstmCell::Carry NlstmCell::zero_carry() const {
  Carry c;
  c.dh = VectorXd::Zero(hidden_);
  c.dc.assign(depth_, VectorXd::Zero(hidden_));
  return c;
}

void NlstmCell::step(std::span<const double> params, State& state, const VectorXd& x,
                     StepCache& cache) const {
  if (static_cast<std::size_t>(x.size()) != input_) {
    throw std::invalid_argument("NlstmCell::step: input size mismatch");
  }
  if (!x.allFinite()) throw std::invalid_argument("NlstmCell::step: non-finite input");
  if (params.size() < param_count_) throw std::invalid_argument("NlstmCell::step: short parameter buffer");
  auto& top = cache.levels[0];
  top.u.head(input_) = x;
  top.u.tail(hidden_) = state.h;
  state.h = forward_level(params, 0, state, cache);
}

const VectorXd& NlstmCell::forward_level(std::span<const double> params, std::size_t level,
                                         State& state, StepCache& cache) const {
  auto& lc = cache.levels[level];
  const std::size_t H = hidden_;
  const std::size_t n = level_input_size(level) + H;
  const double* base = params.data() + offsets_[level];
  Map<const MatrixXd> W(base, 4 * H, n);
  Map<const VectorXd> bias(base + 4 * H * n, 4 * H);

  lc.z.noalias() = W * lc.u;
  lc.z += bias;
  for (std::size_t j = 0; j < H; ++j) {
    lc.i[j] = sigmoid(lc.z[j]);
    lc.f[j] = sigmoid(lc.z[H + j]);
    lc.o[j] = sigmoid(lc.z[2 * H + j]);
    lc.g[j] = level == 0 ? std::tanh(lc.z[3 * H + j]) : lc.z[3 * H + j];
  }
  lc.c_prev = state.c[level];
  lc.a = lc.i.cwiseProduct(lc.g);
  lc.b = lc.f.cwiseProduct(lc.c_prev);

  if (level + 1 == depth_) {
    lc.c_new = lc.a + lc.b;
  } else {
    auto& inner = cache.levels[level + 1];
    inner.u.head(H) = lc.a;
    inner.u.tail(H) = lc.b;
    lc.c_new = forward_level(params, level + 1, state, cache);
  }
  state.c[level] = lc.c_new;
  if (level == 0) {
    lc.phi = lc.c_new.array().tanh().matrix();
  } else {
    lc.phi = lc.c_new;
  }
  lc.out = lc.o.cwiseProduct(lc.phi);
  return lc.out;
}

void NlstmCell::backward(std::span<const double> params, const StepCache& cache,
                         const VectorXd& dh, Carry& carry, std::span<double> grad) const {
  if (grad.size() < param_count_) throw std::invalid_argument("NlstmCell::backward: short gradient buffer");
  VectorXd d_out = dh + carry.dh;
  const VectorXd& du = backward_level(params, 0, cache, d_out, carry, grad);
  carry.dh = du.tail(hidden_);
}

const VectorXd& NlstmCell::backward_level(std::span<const double> params, std::size_t level,
                                          const StepCache& cache, const VectorXd& d_out,
                                          Carry& carry, std::span<double> grad) const {
  const auto& lc = cache.levels[level];
  auto& s = scratch_[level];
  const std::size_t H = hidden_;
  const std::size_t n = level_input_size(level) + H;
  const double* base = params.data() + offsets_[level];
  Map<const MatrixXd> W(base, 4 * H, n);
  Map<MatrixXd> dW(grad.data() + offsets_[level], 4 * H, n);
  Map<VectorXd> db(grad.data() + offsets_[level] + 4 * H * n, 4 * H);

  // d(out)/d(c_new) through the output activation, plus the carried gradient
  // from the next timestep.
  for (std::size_t j = 0; j < H; ++j) {
    const double dphi = d_out[j] * lc.o[j];
    const double act = level == 0 ? dphi * (1.0 - lc.phi[j] * lc.phi[j]) : dphi;
    s.dc[j] = carry.dc[level][j] + act;
    s.dz[2 * H + j] = d_out[j] * lc.phi[j] * lc.o[j] * (1.0 - lc.o[j]);
  }

  // Gradients w.r.t. a = i*g and b = f*c_prev.
  const double* da;
  const double* dbv;
  if (level + 1 == depth_) {
    da = s.dc.data();
    dbv = s.dc.data();
  } else {
    const VectorXd& du_inner = backward_level(params, level + 1, cache, s.dc, carry, grad);
    da = du_inner.data();
    dbv = du_inner.data() + H;
  }

  for (std::size_t j = 0; j < H; ++j) {
    const double di = da[j] * lc.g[j];
    const double dg = da[j] * lc.i[j];
    const double df = dbv[j] * lc.c_prev[j];
    carry.dc[level][j] = dbv[j] * lc.f[j];
    s.dz[j] = di * lc.i[j] * (1.0 - lc.i[j]);
    s.dz[H + j] = df * lc.f[j] * (1.0 - lc.f[j]);
    s.dz[3 * H + j] = level == 0 ? dg * (1.0 - lc.g[j] * lc.g[j]) : dg;
  }

  dW.noalias() += s.dz * lc.u.transpose();
  db += s.dz;
  s.du.noalias() = W.transpose() * s.dz;
  return s.du;
}

NlstmRegressor::NlstmRegressor(std::size_t input_size, std::size_t hidden_size, std::size_t depth,
                               std::size_t output_size)
    : cell_(input_size, hidden_size, depth), output_(output_size) {
  if (output_ == 0) throw std::invalid_argument("NlstmRegressor: output size must be positive");
}

VectorXd NlstmRegressor::readout(std::span<const double> params, const VectorXd& h) const {
  const std::size_t H = cell_.hidden_size();
  const double* base = params.data() + cell_.param_count();
  Map<const MatrixXd> W(base, output_, H);
  Map<const VectorXd> b(base + output_ * H, output_);
  return W * h + b;
}

double NlstmRegressor::window_loss_and_gradient(std::span<const double> params,
                                                NlstmCell::State& state,
                                                std::span<const VectorXd> inputs,
                                                std::span<const VectorXd> targets,
                                                std::span<double> grad) const {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw std::invalid_argument("window_loss_and_gradient: inputs/targets size mismatch");
  }
  if (params.size() != param_count() || grad.size() != param_count()) {
    throw std::invalid_argument("window_loss_and_gradient: buffer size mismatch");
  }
  const std::size_t T = inputs.size();
  const std::size_t H = cell_.hidden_size();
  while (caches_.size() < T) caches_.push_back(cell_.make_cache());

  std::vector<VectorXd> hs(T);
  std::vector<VectorXd> residuals(T);
  double loss = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    cell_.step(params, state, inputs[t], caches_[t]);
    hs[t] = state.h;
    residuals[t] = readout(params, state.h) - targets[t];
    loss += residuals[t].squaredNorm();
  }
  const double scale = 1.0 / static_cast<double>(T * output_);
  loss *= scale;

  const double* head = params.data() + cell_.param_count();
  Map<const MatrixXd> W_out(head, output_, H);
  Map<MatrixXd> dW_out(grad.data() + cell_.param_count(), output_, H);
  Map<VectorXd> db_out(grad.data() + cell_.param_count() + output_ * H, output_);

  auto carry = cell_.zero_carry();
  VectorXd dy(output_);
  VectorXd dh(H);
  for (std::size_t t = T; t-- > 0;) {
    dy = 2.0 * scale * residuals[t];
    dW_out.noalias() += dy * hs[t].transpose();
    db_out += dy;
    dh.noalias() = W_out.transpose() * dy;
    cell_.backward(params, caches_[t], dh, carry, grad);
  }
  return loss;
}

double NlstmRegressor::window_loss(std::span<const double> params, NlstmCell::State& state,
                                   std::span<const VectorXd> inputs,
                                   std::span<const VectorXd> targets) const {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw std::invalid_argument("window_loss: inputs/targets size mismatch");
  }
  if (caches_.empty()) caches_.push_back(cell_.make_cache());
  double loss = 0.0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    cell_.step(params, state, inputs[t], caches_[0]);
    loss += (readout(params, state.h) - targets[t]).squaredNorm();
  }
  return loss / static_cast<double>(inputs.size() * output_);
}

}  // namespace elmopp
