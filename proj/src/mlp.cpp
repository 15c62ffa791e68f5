#include "rbo/mlp.hpp"

#include <cmath>
#include <random>

#include "rbo/errors.hpp"

namespace rbo {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Index kChunkRows = 1024;

struct Slot {
  Index weights;  // offset of the weight block
  Index bias;     // offset of the bias block
  Index fan_in;
  Index fan_out;
};

std::vector<Slot> layout(const MlpSpec& spec) {
  std::vector<Slot> slots;
  Index offset = 0;
  for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
    const Index in = spec.layers[l];
    const Index out = spec.layers[l + 1];
    slots.push_back({offset, offset + in * out, in, out});
    offset += (in + 1) * out;
  }
  return slots;
}

Matrix activate(const Matrix& z, Activation a) {
  return a == Activation::relu ? Matrix(z.cwiseMax(0.0)) : Matrix(z.array().tanh().matrix());
}

struct ChunkResult {
  double loss_sum = 0.0;
  Index correct = 0;
};

// Summed (not averaged) loss over rows [lo, lo + count) of `data`; adds the
// summed gradient into *grad when given.
ChunkResult chunk_pass(const MlpSpec& spec, const std::vector<Slot>& slots, const Vector& params, const Dataset& data,
                       Index lo, Index count, Vector* grad) {
  const std::size_t depth = slots.size();
  std::vector<Matrix> acts(depth);  // input of each layer
  std::vector<Matrix> pre(depth);   // pre-activation of each layer
  acts[0] = data.images.middleRows(lo, count).cast<double>();
  for (std::size_t l = 0; l < depth; ++l) {
    const Slot& s = slots[l];
    const Eigen::Map<const RowMatrix> W(params.data() + s.weights, s.fan_out, s.fan_in);
    const Eigen::Map<const Vector> b(params.data() + s.bias, s.fan_out);
    pre[l].noalias() = acts[l] * W.transpose();
    pre[l].rowwise() += b.transpose();
    if (l + 1 < depth) acts[l + 1] = activate(pre[l], spec.activation);
  }

  Matrix& logits = pre[depth - 1];
  if (!logits.allFinite()) throw NumericalError("mlp: non-finite activations");
  ChunkResult out;
  Matrix probs(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const auto row = logits.row(i);
    Index arg = 0;
    for (Index k = 1; k < row.size(); ++k) {
      if (row(k) > row(arg)) arg = k;
    }
    const double m = row(arg);
    const double lse = m + std::log((row.array() - m).exp().sum());
    const auto y = static_cast<Index>(data.labels[static_cast<std::size_t>(lo + i)]);
    out.loss_sum += lse - row(y);
    if (arg == y) ++out.correct;
    probs.row(i) = (row.array() - lse).exp().matrix();
  }
  if (!std::isfinite(out.loss_sum)) throw NumericalError("mlp: non-finite loss");
  if (grad == nullptr) return out;

  Matrix delta = std::move(probs);
  for (Index i = 0; i < delta.rows(); ++i) delta(i, data.labels[static_cast<std::size_t>(lo + i)]) -= 1.0;
  for (std::size_t l = depth; l-- > 0;) {
    const Slot& s = slots[l];
    Eigen::Map<RowMatrix> gW(grad->data() + s.weights, s.fan_out, s.fan_in);
    Eigen::Map<Vector> gb(grad->data() + s.bias, s.fan_out);
    gW.noalias() += delta.transpose() * acts[l];
    gb += delta.colwise().sum().transpose();
    if (l == 0) break;
    const Eigen::Map<const RowMatrix> W(params.data() + s.weights, s.fan_out, s.fan_in);
    Matrix upstream = delta * W;
    if (spec.activation == Activation::relu) {
      delta = upstream.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = upstream.cwiseProduct((1.0 - acts[l].array().square()).matrix());
    }
  }
  return out;
}

void check_params(const MlpSpec& spec, const Vector& params) {
  spec.validate();
  if (params.size() != spec.parameter_count()) {
    throw InvalidArgument("mlp: parameter vector has length " + std::to_string(params.size()) + ", expected " +
                          std::to_string(spec.parameter_count()));
  }
}

void check_data(const MlpSpec& spec, const Dataset& data) {
  if (data.size() == 0) throw InvalidArgument("mlp: empty batch");
  if (data.features() != spec.layers.front()) throw InvalidArgument("mlp: input width does not match the first layer");
  if (data.images.rows() != data.size()) throw InvalidArgument("mlp: image and label counts differ");
}

}  // namespace

Activation activation_by_name(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw InvalidArgument("unknown activation '" + name + "'");
}

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

void MlpSpec::validate() const {
  if (layers.size() < 3) throw InvalidArgument("mlp: need input, at least one hidden layer and output");
  for (Index n : layers) {
    if (n < 1) throw InvalidArgument("mlp: layer sizes must be positive");
  }
}

Index MlpSpec::parameter_count() const {
  Index total = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) total += (layers[l] + 1) * layers[l + 1];
  return total;
}

std::vector<LayerParams> unflatten(const MlpSpec& spec, const Vector& params) {
  check_params(spec, params);
  std::vector<LayerParams> out;
  for (const Slot& s : layout(spec)) {
    out.push_back({Eigen::Map<const RowMatrix>(params.data() + s.weights, s.fan_out, s.fan_in),
                   Eigen::Map<const Vector>(params.data() + s.bias, s.fan_out)});
  }
  return out;
}

Vector flatten(const MlpSpec& spec, const std::vector<LayerParams>& layers) {
  spec.validate();
  const auto slots = layout(spec);
  if (layers.size() != slots.size()) throw InvalidArgument("mlp: wrong number of layers");
  Vector out(spec.parameter_count());
  for (std::size_t l = 0; l < slots.size(); ++l) {
    const Slot& s = slots[l];
    if (layers[l].weights.rows() != s.fan_out || layers[l].weights.cols() != s.fan_in ||
        layers[l].bias.size() != s.fan_out) {
      throw InvalidArgument("mlp: layer " + std::to_string(l) + " has the wrong shape");
    }
    Eigen::Map<RowMatrix>(out.data() + s.weights, s.fan_out, s.fan_in) = layers[l].weights;
    out.segment(s.bias, s.fan_out) = layers[l].bias;
  }
  return out;
}

Vector init_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  Vector out = Vector::Zero(spec.parameter_count());
  for (const Slot& s : layout(spec)) {
    const double scale = std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Index i = 0; i < s.fan_in * s.fan_out; ++i) out(s.weights + i) = dist(rng);
  }
  return out;
}

double loss_and_grad(const MlpSpec& spec, const Vector& params, const Dataset& batch, Vector* grad) {
  check_params(spec, params);
  check_data(spec, batch);
  const auto slots = layout(spec);
  if (grad != nullptr) *grad = Vector::Zero(params.size());
  double loss_sum = 0.0;
  for (Index lo = 0; lo < batch.size(); lo += kChunkRows) {
    loss_sum += chunk_pass(spec, slots, params, batch, lo, std::min(kChunkRows, batch.size() - lo), grad).loss_sum;
  }
  const double n = static_cast<double>(batch.size());
  if (grad != nullptr) *grad /= n;
  return loss_sum / n;
}

Metrics evaluate(const MlpSpec& spec, const Vector& params, const Dataset& data) {
  check_params(spec, params);
  check_data(spec, data);
  const auto slots = layout(spec);
  double loss_sum = 0.0;
  Index correct = 0;
  for (Index lo = 0; lo < data.size(); lo += kChunkRows) {
    const auto r = chunk_pass(spec, slots, params, data, lo, std::min(kChunkRows, data.size() - lo), nullptr);
    loss_sum += r.loss_sum;
    correct += r.correct;
  }
  const double n = static_cast<double>(data.size());
  return {loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace rbo
