#include "vseclda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace vsec {

void SynthConfig::validate() const {
  if (K < 2) throw ValidationError("synth: K must be >= 2");
  if (C_rel < 1 || T_rel < 1 || C_irr < 1 || T_irr < 1)
    throw ValidationError("synth: vocabulary sizes must be >= 1");
  if (D < 1) throw ValidationError("synth: D must be >= 1");
  if (len_primary < 1 || len_conditioned < 1)
    throw ValidationError("synth: document lengths must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw ValidationError("synth: alpha, beta, gamma must be positive");
  if (!(irr_fraction >= 0.0 && irr_fraction < 1.0))
    throw ValidationError("synth: irr_fraction must be in [0, 1)");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("synth: test_fraction must be in (0, 1)");
}

std::vector<double> sample_dirichlet(const std::vector<double>& concentration, Rng& rng) {
  if (concentration.empty()) throw ValidationError("sample_dirichlet: empty concentration");
  for (double a : concentration)
    if (!(a > 0.0)) throw ValidationError("sample_dirichlet: concentrations must be positive");
  return rng.dirichlet(concentration);
}

namespace {

// Per-row CDFs over a stochastic matrix, for binary-search multinomial draws.
struct RowCdf {
  MatD cums;

  explicit RowCdf(const MatD& probs) : cums(probs.rows, probs.cols) {
    for (std::int64_t r = 0; r < probs.rows; ++r) {
      double acc = 0.0;
      for (std::int64_t c = 0; c < probs.cols; ++c) {
        acc += probs(r, c);
        cums(r, c) = acc;
      }
    }
  }

  std::int64_t sample(std::int64_t row, Rng& rng) const {
    const double* begin = cums.row(row);
    const double* end = begin + cums.cols;
    const double u = rng.uniform01() * *(end - 1);
    const double* it = std::upper_bound(begin, end, u);
    if (it == end) --it;
    return it - begin;
  }
};

std::int64_t draw_poisson(double lambda, Rng& rng) {
  // Knuth; fine for the document-length scale this generator targets.
  const double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform01();
  } while (p > limit);
  return k - 1;
}

std::int64_t draw_length(LengthDist dist, std::int64_t mean, Rng& rng) {
  if (dist == LengthDist::fixed) return mean;
  std::int64_t n;
  do {
    n = draw_poisson(static_cast<double>(mean), rng);
  } while (n == 0);  // empty modality would leave the document unusable
  return n;
}

int sample_topic(const double* theta, int K, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (int k = 0; k < K; ++k) {
    acc += theta[k];
    if (u < acc) return k;
  }
  return K - 1;
}

Document generate_document_impl(const SynthConfig& config, GroundTruth& truth, std::int64_t d,
                                Rng& rng, const RowCdf& phi_cdf, const RowCdf& psi_cdf) {
  Document doc;
  doc.id = "d" + std::to_string(d);

  const std::int64_t M = draw_length(config.len_dist, config.len_primary, rng);
  const std::int64_t N = draw_length(config.len_dist, config.len_conditioned, rng);
  const double f = config.irr_fraction;
  const std::int64_t IM =
      f > 0.0 ? std::llround(f * static_cast<double>(config.len_primary) / (1.0 - f)) : 0;
  const std::int64_t IN =
      f > 0.0 ? std::llround(f * static_cast<double>(config.len_conditioned) / (1.0 - f)) : 0;

  const double* theta = truth.theta_star.row(d);
  std::vector<std::int64_t> topic_count(static_cast<std::size_t>(config.K), 0);

  doc.primary.reserve(static_cast<std::size_t>(M + IM));
  for (std::int64_t i = 0; i < M; ++i) {
    const int z = sample_topic(theta, config.K, rng);
    ++topic_count[static_cast<std::size_t>(z)];
    doc.primary.push_back(static_cast<WordId>(phi_cdf.sample(z, rng)));
  }

  doc.conditioned.reserve(static_cast<std::size_t>(N + IN));
  for (std::int64_t j = 0; j < N; ++j) {
    // y from the empirical distribution of this document's primary topic draws
    std::int64_t r = static_cast<std::int64_t>(rng.uniform_uint(static_cast<std::uint64_t>(M)));
    int y = 0;
    while (r >= topic_count[static_cast<std::size_t>(y)]) {
      r -= topic_count[static_cast<std::size_t>(y)];
      ++y;
    }
    doc.conditioned.push_back(static_cast<WordId>(psi_cdf.sample(y, rng)));
  }

  for (std::int64_t i = 0; i < IM; ++i)
    doc.primary.push_back(static_cast<WordId>(
        config.C_rel + static_cast<std::int64_t>(rng.uniform_uint(static_cast<std::uint64_t>(config.C_irr)))));
  for (std::int64_t j = 0; j < IN; ++j)
    doc.conditioned.push_back(static_cast<WordId>(
        config.T_rel + static_cast<std::int64_t>(rng.uniform_uint(static_cast<std::uint64_t>(config.T_irr)))));

  const auto shuffle = [&rng](std::vector<WordId>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[rng.uniform_uint(i)]);
  };
  shuffle(doc.primary);
  shuffle(doc.conditioned);

  truth.M_d[static_cast<std::size_t>(d)] = M;
  truth.IM_d[static_cast<std::size_t>(d)] = IM;
  truth.N_d[static_cast<std::size_t>(d)] = N;
  truth.IN_d[static_cast<std::size_t>(d)] = IN;
  return doc;
}

Vocabulary make_vocab(Modality role, const char* prefix, std::int64_t n_rel, std::int64_t n_irr) {
  Vocabulary v;
  v.role = role;
  v.tokens.reserve(static_cast<std::size_t>(n_rel + n_irr));
  for (std::int64_t i = 0; i < n_rel + n_irr; ++i)
    v.tokens.push_back(prefix + std::to_string(i));
  v.active.assign(static_cast<std::size_t>(n_rel + n_irr), 1);
  return v;
}

MatD sample_simplex_rows(std::int64_t rows, std::int64_t cols, double concentration, Rng& rng) {
  MatD out(rows, cols);
  const std::vector<double> conc(static_cast<std::size_t>(cols), concentration);
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto row = rng.dirichlet(conc);
    std::copy(row.begin(), row.end(), out.row(r));
  }
  return out;
}

}  // namespace

Document generate_document(const SynthConfig& config, GroundTruth& truth, std::int64_t d, Rng& rng) {
  if (d < 0 || d >= truth.theta_star.rows)
    throw ValidationError("generate_document: no ground-truth row for document " + std::to_string(d));
  const RowCdf phi_cdf(truth.phi_star);
  const RowCdf psi_cdf(truth.psi_star);
  return generate_document_impl(config, truth, d, rng, phi_cdf, psi_cdf);
}

std::pair<Corpus, GroundTruth> generate_corpus(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  GroundTruth truth;
  truth.theta_star = sample_simplex_rows(config.D, config.K, config.alpha, rng);
  truth.phi_star = sample_simplex_rows(config.K, config.C_rel, config.beta, rng);
  truth.psi_star = sample_simplex_rows(config.K, config.T_rel, config.gamma, rng);
  truth.relevant_mask_primary.assign(static_cast<std::size_t>(config.C_rel + config.C_irr), 0);
  std::fill_n(truth.relevant_mask_primary.begin(), config.C_rel, 1);
  truth.relevant_mask_conditioned.assign(static_cast<std::size_t>(config.T_rel + config.T_irr), 0);
  std::fill_n(truth.relevant_mask_conditioned.begin(), config.T_rel, 1);
  truth.M_d.assign(static_cast<std::size_t>(config.D), 0);
  truth.IM_d.assign(static_cast<std::size_t>(config.D), 0);
  truth.N_d.assign(static_cast<std::size_t>(config.D), 0);
  truth.IN_d.assign(static_cast<std::size_t>(config.D), 0);

  Corpus corpus;
  corpus.vocab_primary = make_vocab(Modality::primary, "p", config.C_rel, config.C_irr);
  corpus.vocab_conditioned = make_vocab(Modality::conditioned, "c", config.T_rel, config.T_irr);

  const RowCdf phi_cdf(truth.phi_star);
  const RowCdf psi_cdf(truth.psi_star);
  corpus.documents.reserve(static_cast<std::size_t>(config.D));
  for (std::int64_t d = 0; d < config.D; ++d)
    corpus.documents.push_back(generate_document_impl(config, truth, d, rng, phi_cdf, psi_cdf));

  // held-out split: exactly round(test_fraction * D) documents
  const std::int64_t n_test = std::llround(config.test_fraction * static_cast<double>(config.D));
  std::vector<std::int64_t> order(static_cast<std::size_t>(config.D));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_uint(i)]);
  for (std::int64_t i = 0; i < config.D; ++i)
    corpus.documents[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].split =
        i < n_test ? Split::test : Split::train;

  return {std::move(corpus), std::move(truth)};
}

namespace {

json mat_to_json(const MatD& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

MatD mat_from_json(const json& j) {
  MatD m(j.at("rows").get<std::int64_t>(), j.at("cols").get<std::int64_t>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != static_cast<std::size_t>(m.rows * m.cols))
    throw ValidationError("truth matrix: data length does not match rows*cols");
  return m;
}

std::vector<bool> to_bools(const std::vector<std::uint8_t>& v) {
  return std::vector<bool>(v.begin(), v.end());
}

std::vector<std::uint8_t> from_bools(const std::vector<bool>& v) {
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] ? 1 : 0;
  return out;
}

}  // namespace

void save_truth(const GroundTruth& truth, const fs::path& file) {
  json j;
  j["relevant_mask_primary"] = to_bools(truth.relevant_mask_primary);
  j["relevant_mask_conditioned"] = to_bools(truth.relevant_mask_conditioned);
  j["theta_star"] = mat_to_json(truth.theta_star);
  j["phi_star"] = mat_to_json(truth.phi_star);
  j["psi_star"] = mat_to_json(truth.psi_star);
  j["M_d"] = truth.M_d;
  j["IM_d"] = truth.IM_d;
  j["N_d"] = truth.N_d;
  j["IN_d"] = truth.IN_d;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

GroundTruth load_truth(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  GroundTruth t;
  try {
    t.relevant_mask_primary = from_bools(j.at("relevant_mask_primary").get<std::vector<bool>>());
    t.relevant_mask_conditioned =
        from_bools(j.at("relevant_mask_conditioned").get<std::vector<bool>>());
    t.theta_star = mat_from_json(j.at("theta_star"));
    t.phi_star = mat_from_json(j.at("phi_star"));
    t.psi_star = mat_from_json(j.at("psi_star"));
    t.M_d = j.at("M_d").get<std::vector<std::int64_t>>();
    t.IM_d = j.at("IM_d").get<std::vector<std::int64_t>>();
    t.N_d = j.at("N_d").get<std::vector<std::int64_t>>();
    t.IN_d = j.at("IN_d").get<std::vector<std::int64_t>>();
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  return t;
}

}  // namespace vsec
