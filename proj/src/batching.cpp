#include "rbo/batching.hpp"

#include <algorithm>
#include <numeric>

#include "rbo/errors.hpp"

namespace rbo {

BatchSampler::BatchSampler(Index num_samples, Index batch_size, std::uint64_t seed)
    : n_(num_samples), batch_(batch_size), rng_(seed) {
  if (n_ <= 0) throw InvalidArgument("BatchSampler: empty dataset");
  if (batch_ <= 0) throw InvalidArgument("BatchSampler: batch size must be positive");
  order_.resize(static_cast<std::size_t>(n_));
  cursor_ = n_;
}

void BatchSampler::reshuffle() {
  std::iota(order_.begin(), order_.end(), Index{0});
  // Fisher-Yates with our own index draws: std::shuffle's output is
  // library-specific.
  for (Index i = n_ - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng_() % static_cast<std::uint64_t>(i + 1));
    std::swap(order_[static_cast<std::size_t>(i)], order_[static_cast<std::size_t>(j)]);
  }
  cursor_ = 0;
}

BatchContext BatchSampler::next() {
  if (batch_ >= n_) {
    ++epoch_;
    return BatchContext{};
  }
  if (cursor_ >= n_) {
    ++epoch_;
    reshuffle();
  }
  const Index end = std::min(n_, cursor_ + batch_);
  BatchContext ctx;
  ctx.full = false;
  ctx.indices.assign(order_.begin() + cursor_, order_.begin() + end);
  cursor_ = end;
  return ctx;
}

Index BatchSampler::batches_per_epoch() const { return batch_ >= n_ ? 1 : (n_ + batch_ - 1) / batch_; }

}  // namespace rbo
