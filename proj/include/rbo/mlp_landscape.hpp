#pragma once

#include <memory>

#include "rbo/idx.hpp"
#include "rbo/landscape.hpp"
#include "rbo/mlp.hpp"

namespace rbo {

// Training loss of an MLP as a function of its flat parameters. The landscape
// itself evaluates on the full dataset; view() binds a minibatch, gathered
// once so repeated evaluations inside an optimizer step stay cheap.
class MlpLandscape : public StochasticLandscape {
 public:
  MlpLandscape(MlpSpec spec, std::shared_ptr<const Dataset> data, Index batch_size);

  Index dim() const override { return spec_.parameter_count(); }
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  double value_and_gradient(const Vector& theta, Vector& grad) const override;
  std::string id() const override { return "mlp"; }

  Index num_samples() const override { return data_->size(); }
  Index batch_size() const override { return batch_size_; }
  LandscapePtr view(const BatchContext& context) const override;

  const MlpSpec& spec() const { return spec_; }
  const Dataset& batch() const { return *batch_; }

 private:
  MlpLandscape(MlpSpec spec, std::shared_ptr<const Dataset> data, Index batch_size,
               std::shared_ptr<const Dataset> batch);

  MlpSpec spec_;
  std::shared_ptr<const Dataset> data_;
  Index batch_size_;
  std::shared_ptr<const Dataset> batch_;
};

// A batch size >= the dataset size gives the deterministic full-batch
// landscape.
std::shared_ptr<const MlpLandscape> as_landscape(const MlpSpec& spec, std::shared_ptr<const Dataset> data,
                                                 Index batch_size);

}  // namespace rbo
