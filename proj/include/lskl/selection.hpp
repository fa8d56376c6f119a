#pragma once

// Marginal likelihoods, Bayes factors and posterior odds for two candidate
// families, plus a simulation that tracks how posterior mass concentrates on
// the KL-nearest candidate as the sample grows. All odds are kept in logs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lskl/distributions.hpp"
#include "lskl/priors.hpp"

namespace lskl {

// log of sum_i w_i L(theta_i | data); -inf when no node explains the data.
// Throws Error(kInvalidArgument) on an empty dataset.
double log_marginal_likelihood(const ParameterPrior& prior, const Dataset& data);

struct PosteriorOdds {
  double log_bayes_factor = 0.0;
  double log_prior_odds = 0.0;
  double log_posterior_odds = 0.0;

  double bayes_factor() const;
  double prior_odds() const;
  double posterior_odds() const;
  // P(M1 | data) = 1 / (1 + exp(-log posterior odds)).
  double posterior_probability_m1() const;
};

// Throws Error(kNoModelExplainsData) when both marginals are -inf.
PosteriorOdds posterior_odds(const Dataset& data, const ParameterPrior& prior1, const ParameterPrior& prior2,
                             const ModelPriorPair& model_priors);

struct DefaultPriorOptions {
  std::size_t nodes_1d = 401;
  std::size_t nodes_2d = 81;  // per axis
  double location_halfwidth = 3.0;  // in units of the estimated scale
  double scale_ratio = 3.0;         // scale grid spans [s / r, s * r]
};

// Proper grid prior centred on moment estimates from the data: uniform in
// location and log-uniform in scale on the family's location-scale image.
ParameterPrior data_centred_prior(Family family, const Dataset& data, const DefaultPriorOptions& opts = {});

struct Candidate {
  Family family;
  // Fixed parameter prior; data_centred_prior per dataset when absent.
  std::optional<ParameterPrior> prior;
};

struct BerkOptions {
  std::vector<std::size_t> n_grid;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  ModelPriorPair model_priors = uniform_model_priors();
  DefaultPriorOptions default_prior;
  MinKLOptions minkl;
};

struct BerkRow {
  std::size_t n;
  std::size_t rep;
  double posterior_prob;  // of the nearest candidate
  double log_posterior_odds;  // M1 against M2
};

struct BerkReport {
  ModelInstance truth;
  Family m1;
  Family m2;
  int nearest = 1;  // 1 or 2
  double min_kl_m1 = 0.0;
  double min_kl_m2 = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<double> median_posterior;  // per n, nearest candidate
  bool median_nondecreasing = false;
  std::vector<BerkRow> rows;  // ordered by (n index, rep)
};

// Seed for replication `rep` at sample size n; independent of thread count.
std::uint64_t replication_seed(std::uint64_t seed, std::size_t n, std::size_t rep);

BerkReport berk_consistency_sim(const ModelInstance& truth, const Candidate& m1, const Candidate& m2,
                                const BerkOptions& opts);

}  // namespace lskl
