#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

#include "dvr/random.hpp"
#include "dvr/ranker.hpp"

namespace dvr::ranker {

std::vector<InstanceBags> build_bags(std::span<const PersonViews> persons, double negative_fraction,
                                     std::uint64_t seed) {
  if (persons.size() < 2)
    throw Error(ErrorKind::InsufficientData,
                "bag construction needs at least 2 persons, got " + std::to_string(persons.size()));
  if (!(negative_fraction > 0.0 && negative_fraction <= 1.0))
    throw Error(ErrorKind::ConfigError, "negative fraction must lie in (0, 1]");

  Eigen::Index dim = -1;
  for (const auto& p : persons) {
    if (!p.a || !p.b || p.a->descriptors.empty() || p.b->descriptors.empty())
      throw Error(ErrorKind::MissingView, "person " + p.person + " lacks descriptors for one camera");
    for (const auto* set : {&*p.a, &*p.b})
      for (const auto& d : set->descriptors) {
        if (dim < 0) dim = d.combined.size();
        if (d.combined.size() != dim) throw Error(ErrorKind::ShapeError, "descriptor lengths differ across persons");
      }
  }

  std::vector<InstanceBags> bags;
  bags.reserve(persons.size());
  for (std::size_t i = 0; i < persons.size(); ++i) {
    const auto& xa = persons[i].a->descriptors;
    const auto& xb = persons[i].b->descriptors;

    InstanceBags bag;
    bag.person = persons[i].person;
    bag.negative_fraction = negative_fraction;
    bag.seed = seed;
    bag.positive.resize(dim, static_cast<Eigen::Index>(xa.size() * xb.size()));
    Eigen::Index col = 0;
    for (const auto& da : xa)
      for (const auto& db : xb) bag.positive.col(col++) = (da.combined - db.combined).cwiseAbs();

    // Negative pool enumerated as (j, m, n) in input order.
    struct PoolEntry {
      std::size_t other;
      std::size_t m;
      std::size_t n;
    };
    std::vector<PoolEntry> pool;
    for (std::size_t j = 0; j < persons.size(); ++j) {
      if (j == i) continue;
      for (std::size_t m = 0; m < xa.size(); ++m)
        for (std::size_t n = 0; n < persons[j].b->descriptors.size(); ++n) pool.push_back({j, m, n});
    }
    const auto wanted = static_cast<std::size_t>(std::floor(negative_fraction * pool.size() + 1e-9));
    const std::size_t count = std::clamp<std::size_t>(wanted, 1, pool.size());

    std::vector<PoolEntry> picked;
    picked.reserve(count);
    auto rng = seed_stream(seed, "negatives", i);
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), count, rng);

    bag.negative.resize(dim, static_cast<Eigen::Index>(picked.size()));
    for (std::size_t c = 0; c < picked.size(); ++c) {
      const auto& e = picked[c];
      bag.negative.col(static_cast<Eigen::Index>(c)) =
          (xa[e.m].combined - persons[e.other].b->descriptors[e.n].combined).cwiseAbs();
    }
    bags.push_back(std::move(bag));
  }
  return bags;
}

}  // namespace dvr::ranker
