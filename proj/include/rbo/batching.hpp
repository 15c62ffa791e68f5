#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rbo/landscape.hpp"

namespace rbo {

// Minibatches from successive seeded permutations of [0, n). The last batch
// of an epoch may be short. A batch size >= n always yields the full-data
// context.
class BatchSampler {
 public:
  BatchSampler(Index num_samples, Index batch_size, std::uint64_t seed);

  BatchContext next();
  Index batches_per_epoch() const;
  // Number of epochs started so far.
  Index epoch() const { return epoch_; }

 private:
  void reshuffle();

  Index n_;
  Index batch_;
  std::mt19937_64 rng_;
  std::vector<Index> order_;
  Index cursor_ = 0;
  Index epoch_ = 0;
};

}  // namespace rbo
