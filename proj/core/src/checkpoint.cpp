#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "elmopp/csv.hpp"
#include "elmopp/predictor.hpp"

namespace elmopp {

namespace {

constexpr const char* kMagic = "elmopp-nlstm-checkpoint";
constexpr int kVersion = 1;

template <typename Range>
void write_values(std::ostream& out, const char* key, const Range& values) {
  out << key << ' ' << values.size();
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& key) {
    std::string raw;
    if (!std::getline(in_, raw)) throw std::runtime_error("checkpoint: missing '" + key + "' line");
    std::istringstream ss(raw);
    std::string got;
    ss >> got;
    if (got != key) throw std::runtime_error("checkpoint: expected '" + key + "', found '" + got + "'");
    return ss;
  }

  template <typename T>
  T scalar(const std::string& key) {
    auto ss = line(key);
    std::string tok;
    ss >> tok;
    return parse<T>(key, tok);
  }

  std::vector<double> values(const std::string& key, std::size_t expected) {
    auto ss = line(key);
    std::size_t n = 0;
    ss >> n;
    if (n != expected) {
      throw std::runtime_error("checkpoint: '" + key + "' has " + std::to_string(n) +
                               " values, expected " + std::to_string(expected));
    }
    std::vector<double> out(n);
    std::string tok;
    for (auto& v : out) {
      if (!(ss >> tok)) throw std::runtime_error("checkpoint: truncated '" + key + "'");
      v = parse<double>(key, tok);
    }
    return out;
  }

 private:
  template <typename T>
  static T parse(const std::string& key, const std::string& tok) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        return parse_double(tok);
      } else {
        return static_cast<T>(std::stoull(tok));
      }
    } catch (const std::exception&) {
      throw std::runtime_error("checkpoint: bad value '" + tok + "' for '" + key + "'");
    }
  }

  std::istream& in_;
};

}  // namespace

void save_checkpoint(std::ostream& out, const PredictorModel& m) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "depth " << m.depth() << '\n';
  out << "hidden " << m.hidden_size() << '\n';
  out << "channels " << PredictorModel::kChannels << '\n';
  out << "seed " << m.seed_ << '\n';
  write_values(out, "scale", m.scale_);
  out << "learning_rate " << format_double(m.adam_cfg_.learning_rate) << '\n';
  out << "beta1 " << format_double(m.adam_cfg_.beta1) << '\n';
  out << "beta2 " << format_double(m.adam_cfg_.beta2) << '\n';
  out << "epsilon " << format_double(m.adam_cfg_.epsilon) << '\n';
  out << "adam_step " << m.adam_.step << '\n';
  write_values(out, "params", m.params_);
  write_values(out, "adam_m", m.adam_.m);
  write_values(out, "adam_v", m.adam_.v);
  write_values(out, "state_h", m.state_.h);
  for (const auto& c : m.state_.c) write_values(out, "state_c", c);
}

PredictorModel load_checkpoint(std::istream& in) {
  Reader r(in);
  {
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kMagic || version != kVersion) throw std::runtime_error("checkpoint: bad header");
    std::string rest;
    std::getline(in, rest);
  }
  const auto depth = r.scalar<std::size_t>("depth");
  const auto hidden = r.scalar<std::size_t>("hidden");
  const auto channels = r.scalar<std::size_t>("channels");
  if (channels != PredictorModel::kChannels) throw std::runtime_error("checkpoint: channel count mismatch");
  const auto seed = r.scalar<std::uint64_t>("seed");
  const auto scale = r.values("scale", PredictorModel::kChannels);
  AdamConfig adam;
  adam.learning_rate = r.scalar<double>("learning_rate");
  adam.beta1 = r.scalar<double>("beta1");
  adam.beta2 = r.scalar<double>("beta2");
  adam.epsilon = r.scalar<double>("epsilon");

  PredictorModel m(depth, hidden, seed, adam);
  m.adam_.step = r.scalar<std::uint64_t>("adam_step");
  const std::size_t n = m.params_.size();
  m.params_ = r.values("params", n);
  m.adam_.m = r.values("adam_m", n);
  m.adam_.v = r.values("adam_v", n);
  std::copy(scale.begin(), scale.end(), m.scale_.begin());
  const auto h = r.values("state_h", hidden);
  m.state_.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(hidden));
  for (std::size_t l = 0; l < depth; ++l) {
    const auto c = r.values("state_c", hidden);
    m.state_.c[l] = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(hidden));
  }
  return m;
}

void save_checkpoint_file(const std::string& path, const PredictorModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_checkpoint(out, model);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

PredictorModel load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace elmopp
