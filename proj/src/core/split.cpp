#include <algorithm>
#include <numeric>

#include "dvr/core.hpp"
#include "dvr/random.hpp"

namespace dvr {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count, std::uint64_t seed) {
  if (count < 2)
    throw Error(ErrorKind::InsufficientData, "splitting needs at least 2 persons, got " + std::to_string(count));

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  auto rng = seed_stream(seed, "split");
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t train_count = (count + 1) / 2;
  return {std::vector<std::size_t>(order.begin(), order.begin() + train_count),
          std::vector<std::size_t>(order.begin() + train_count, order.end())};
}

TrainingSplit split_dataset(std::vector<PersonPair> pairs, std::uint64_t seed) {
  const auto [train, test] = split_indices(pairs.size(), seed);
  TrainingSplit split;
  split.seed = seed;
  for (std::size_t i : train) split.train_pairs.push_back(std::move(pairs[i]));
  for (std::size_t i : test) split.test_pairs.push_back(std::move(pairs[i]));
  return split;
}

}  // namespace dvr
