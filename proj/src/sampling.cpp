#include "matchcert/sampling.hpp"

#include <algorithm>

#include "matchcert/bounds.hpp"

namespace matchcert {

std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw Error("sample-too-large", std::to_string(k) + " > " + std::to_string(n));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t pick = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[pick]);
  }
  pool.resize(k);
  return pool;
}

std::int64_t hypergeometric_draw(std::int64_t n, std::int64_t t, std::int64_t s, Rng& rng) {
  if (n < 0 || t < 0 || t > n || s < 0 || s > n) {
    throw Error("invalid-hypergeom-params",
                "n=" + std::to_string(n) + " t=" + std::to_string(t) + " s=" + std::to_string(s));
  }
  const std::int64_t lo = std::max<std::int64_t>(0, s - (n - t));
  const std::int64_t hi = std::min(s, t);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) {
    cumulative += hypergeom_pmf(t, n, s, i);
    if (u < cumulative) return i;
  }
  return hi;
}

std::int64_t hypergeometric_draw(std::int64_t n, std::int64_t t, std::int64_t s,
                                 std::uint64_t seed) {
  Rng rng(seed);
  return hypergeometric_draw(n, t, s, rng);
}

std::vector<std::size_t> RngChoices::subset(std::size_t n, std::size_t k) {
  return sample_positions(n, k, rng_);
}

std::int64_t RngChoices::hypergeometric(std::int64_t population, std::int64_t successes,
                                        std::int64_t draws) {
  return hypergeometric_draw(population, successes, draws, rng_);
}

void SplitSpec::validate() const {
  if (t + s != labeled.size()) {
    throw Error("invalid-split", "t + s = " + std::to_string(t + s) + " but |L| = " +
                                     std::to_string(labeled.size()));
  }
  if (population_n < static_cast<std::int64_t>(labeled.size())) {
    throw Error("invalid-split", "|L| exceeds the population size");
  }
}

TrainValidation<std::string> split_train_validation(const SplitSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  RngChoices choices(rng);
  return split_train_validation<std::string>(spec.labeled, spec.population_n, spec.t, spec.s,
                                             choices);
}

TrainValidation<std::string> disjoint_split(const SplitSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  auto order = sample_positions(spec.labeled.size(), spec.labeled.size(), rng);
  TrainValidation<std::string> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < spec.t ? out.train : out.validation).push_back(spec.labeled[order[i]]);
  }
  return out;
}

}  // namespace matchcert
