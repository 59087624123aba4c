#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vseclda/corpus.hpp"
#include "vseclda/mat.hpp"
#include "vseclda/rng.hpp"

namespace vsec {

enum class LengthDist { fixed, poisson };

struct SynthConfig {
  int K = 20;
  std::int64_t C_rel = 800;  // relevant primary vocabulary
  std::int64_t T_rel = 80;   // relevant conditioned vocabulary
  std::int64_t C_irr = 200;
  std::int64_t T_irr = 20;
  std::int64_t D = 8000;
  double alpha = 0.2;
  double beta = 0.1;
  double gamma = 0.1;
  LengthDist len_dist = LengthDist::fixed;
  std::int64_t len_primary = 50;   // relevant tokens per document (mean, if poisson)
  std::int64_t len_conditioned = 5;
  double irr_fraction = 0.2;  // expected share of irrelevant tokens per modality
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Planted parameters and relevance masks for scoring vocabulary selection.
struct GroundTruth {
  MatD theta_star;  // D x K
  MatD phi_star;    // K x C_rel
  MatD psi_star;    // K x T_rel
  std::vector<std::uint8_t> relevant_mask_primary;      // per primary word id
  std::vector<std::uint8_t> relevant_mask_conditioned;  // per conditioned word id
  // planted per-document token counts
  std::vector<std::int64_t> M_d, IM_d, N_d, IN_d;
};

// One draw from Dirichlet(concentration); sums to 1 within 1e-12.
std::vector<double> sample_dirichlet(const std::vector<double>& concentration, Rng& rng);

// Document d of the planted model: relevant primary tokens topic-first,
// conditioned topics from the empirical primary-topic histogram, irrelevant
// tokens uniform over the irrelevant id range, all shuffled into one bag.
// Fills truth.M_d/IM_d/N_d/IN_d for d.
Document generate_document(const SynthConfig& config, GroundTruth& truth, std::int64_t d, Rng& rng);

// Whole corpus plus ground truth; deterministic given config.seed.
std::pair<Corpus, GroundTruth> generate_corpus(const SynthConfig& config);

// truth.json persistence (written next to the corpus directory).
void save_truth(const GroundTruth& truth, const std::filesystem::path& file);
GroundTruth load_truth(const std::filesystem::path& file);

}  // namespace vsec
