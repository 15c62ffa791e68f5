#include "rbo/mlp_landscape.hpp"

#include "rbo/errors.hpp"

namespace rbo {

MlpLandscape::MlpLandscape(MlpSpec spec, std::shared_ptr<const Dataset> data, Index batch_size)
    : MlpLandscape(std::move(spec), data, batch_size, data) {}

MlpLandscape::MlpLandscape(MlpSpec spec, std::shared_ptr<const Dataset> data, Index batch_size,
                           std::shared_ptr<const Dataset> batch)
    : spec_(std::move(spec)), data_(std::move(data)), batch_size_(batch_size), batch_(std::move(batch)) {
  spec_.validate();
  if (!data_ || data_->size() == 0) throw InvalidArgument("mlp landscape: empty dataset");
  if (batch_size_ < 1) throw InvalidArgument("mlp landscape: batch size must be positive");
  if (data_->features() != spec_.layers.front()) throw InvalidArgument("mlp landscape: input width mismatch");
}

double MlpLandscape::value(const Vector& theta) const { return loss_and_grad(spec_, theta, *batch_, nullptr); }

Vector MlpLandscape::gradient(const Vector& theta) const {
  Vector grad;
  loss_and_grad(spec_, theta, *batch_, &grad);
  return grad;
}

double MlpLandscape::value_and_gradient(const Vector& theta, Vector& grad) const {
  return loss_and_grad(spec_, theta, *batch_, &grad);
}

LandscapePtr MlpLandscape::view(const BatchContext& context) const {
  if (context.full) {
    return std::shared_ptr<const MlpLandscape>(new MlpLandscape(spec_, data_, batch_size_, data_));
  }
  if (context.indices.empty()) throw InvalidArgument("mlp landscape: empty minibatch");
  for (Index i : context.indices) {
    if (i < 0 || i >= data_->size()) throw InvalidArgument("mlp landscape: batch index out of range");
  }
  auto batch = std::make_shared<const Dataset>(data_->gather(context.indices));
  return std::shared_ptr<const MlpLandscape>(new MlpLandscape(spec_, data_, batch_size_, std::move(batch)));
}

std::shared_ptr<const MlpLandscape> as_landscape(const MlpSpec& spec, std::shared_ptr<const Dataset> data,
                                                 Index batch_size) {
  return std::make_shared<const MlpLandscape>(spec, std::move(data), batch_size);
}

}  // namespace rbo
