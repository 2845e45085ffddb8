#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "matchcert/error.hpp"
#include "matchcert/rng.hpp"

namespace matchcert {

/// Source of the random choices made by the sampling procedures. The
/// production implementation draws from an Rng; tests substitute a source
/// that walks every branch to compute exact laws.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  /// A uniformly random k-subset of positions [0, n), in draw order.
  virtual std::vector<std::size_t> subset(std::size_t n, std::size_t k) = 0;
  /// Number of successes in `draws` draws without replacement from
  /// `population` items of which `successes` are successes.
  virtual std::int64_t hypergeometric(std::int64_t population, std::int64_t successes,
                                      std::int64_t draws) = 0;
};

class RngChoices final : public ChoiceSource {
 public:
  explicit RngChoices(Rng& rng) : rng_(rng) {}
  std::vector<std::size_t> subset(std::size_t n, std::size_t k) override;
  std::int64_t hypergeometric(std::int64_t population, std::int64_t successes,
                              std::int64_t draws) override;

 private:
  Rng& rng_;
};

/// Partial Fisher-Yates: k distinct positions of [0, n) in draw order.
std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k, Rng& rng);

/// Inverse-CDF draw from the hypergeometric law.
std::int64_t hypergeometric_draw(std::int64_t n, std::int64_t t, std::int64_t s, Rng& rng);
std::int64_t hypergeometric_draw(std::int64_t n, std::int64_t t, std::int64_t s,
                                 std::uint64_t seed);

template <typename T>
std::vector<T> sample_without_replacement(std::span<const T> universe, std::size_t s, Rng& rng) {
  if (s > universe.size()) {
    throw Error("sample-too-large", std::to_string(s) + " > " + std::to_string(universe.size()));
  }
  std::vector<T> out;
  out.reserve(s);
  for (std::size_t pos : sample_positions(universe.size(), s, rng)) out.push_back(universe[pos]);
  return out;
}

template <typename T>
std::vector<T> sample_without_replacement(std::span<const T> universe, std::size_t s,
                                          std::uint64_t seed) {
  Rng rng(seed);
  return sample_without_replacement(universe, s, rng);
}

/// Draws one item at a time without replacement, so a sample can be
/// extended until some subset of it reaches a target size.
template <typename T>
class SequentialSampler {
 public:
  SequentialSampler(std::vector<T> universe, Rng rng)
      : pool_(std::move(universe)), rng_(std::move(rng)) {}

  bool exhausted() const { return drawn_ == pool_.size(); }
  std::size_t drawn() const { return drawn_; }

  const T& next() {
    if (exhausted()) throw Error("sample-too-large", "population exhausted");
    const std::size_t pick = drawn_ + static_cast<std::size_t>(rng_.below(pool_.size() - drawn_));
    std::swap(pool_[drawn_], pool_[pick]);
    return pool_[drawn_++];
  }

  /// Items drawn so far, in draw order.
  std::span<const T> sample() const { return std::span<const T>(pool_.data(), drawn_); }

 private:
  std::vector<T> pool_;
  Rng rng_;
  std::size_t drawn_ = 0;
};

struct SplitSpec {
  std::int64_t population_n = 0;
  std::vector<std::string> labeled;
  std::size_t t = 0;
  std::size_t s = 0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

template <typename T>
struct TrainValidation {
  std::vector<T> train;
  std::vector<T> validation;
  std::int64_t overlap = 0;
};

/// Splits a labeled sample L of a population into a training subsample T
/// and a validation subsample S that are distributed as two independent
/// uniform draws (sizes t and s) from the whole population:
///   1. T = t items of L,
///   2. i ~ Hypergeometric(population n, successes t, draws s),
///   3. i items of T,
///   4. s - i items of L \ T,
///   5. S = union of 3 and 4.
/// T and S may overlap.
template <typename T>
TrainValidation<T> split_train_validation(std::span<const T> labeled, std::int64_t population_n,
                                          std::size_t t, std::size_t s, ChoiceSource& choices) {
  if (t + s != labeled.size()) throw Error("invalid-split", "t + s must equal |L|");
  if (population_n < static_cast<std::int64_t>(labeled.size())) {
    throw Error("invalid-split", "|L| exceeds the population size");
  }
  TrainValidation<T> out;
  std::vector<bool> in_train(labeled.size(), false);
  for (std::size_t pos : choices.subset(labeled.size(), t)) {
    in_train[pos] = true;
    out.train.push_back(labeled[pos]);
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (!in_train[i]) rest.push_back(i);
  }
  const std::int64_t overlap = choices.hypergeometric(population_n, static_cast<std::int64_t>(t),
                                                      static_cast<std::int64_t>(s));
  out.overlap = overlap;
  for (std::size_t pos : choices.subset(out.train.size(), static_cast<std::size_t>(overlap))) {
    out.validation.push_back(out.train[pos]);
  }
  for (std::size_t pos : choices.subset(rest.size(), s - static_cast<std::size_t>(overlap))) {
    out.validation.push_back(labeled[rest[pos]]);
  }
  return out;
}

TrainValidation<std::string> split_train_validation(const SplitSpec& spec);

/// Plain partition of L into disjoint halves of sizes t and s. This does NOT
/// give the independent-draw law, so bounds must not be computed on it.
TrainValidation<std::string> disjoint_split(const SplitSpec& spec);

}  // namespace matchcert
