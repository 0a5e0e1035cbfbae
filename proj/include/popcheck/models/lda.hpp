#pragma once

// Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "popcheck/dataset.hpp"
#include "popcheck/discrepancy.hpp"
#include "popcheck/rng.hpp"

namespace popcheck {

inline constexpr double kDefaultTopicDirichlet = 0.1;
inline constexpr double kDefaultProportionDirichlet = 0.1;

/// Count tables of a Gibbs state.
struct LdaCounts {
  std::size_t topics = 0;
  std::size_t vocab = 0;
  std::size_t docs = 0;
  std::vector<int> doc_topic;   // docs x topics
  std::vector<int> topic_word;  // topics x vocab
  std::vector<int> topic_total;

  int& dt(std::size_t d, std::size_t k) { return doc_topic[d * topics + k]; }
  int& tw(std::size_t k, std::size_t w) { return topic_word[k * vocab + w]; }
  int dt(std::size_t d, std::size_t k) const { return doc_topic[d * topics + k]; }
  int tw(std::size_t k, std::size_t w) const { return topic_word[k * vocab + w]; }
};

struct LdaState {
  /// topics x vocab, rows sum to 1.
  Eigen::MatrixXd topics;
  /// docs x topics, rows sum to 1.
  Eigen::MatrixXd doc_proportions;
  /// Final per-token topic labels.
  std::vector<int> assignments;
  LdaCounts counts;
  double eta = kDefaultTopicDirichlet;
  double alpha = kDefaultProportionDirichlet;
};

struct LdaFitOptions {
  /// Vocabulary and document counts; inferred from the largest ids when unset.
  std::optional<std::size_t> vocab;
  std::optional<std::size_t> docs;
  /// Called after every sweep with the current counts.
  std::function<void(std::size_t sweep, const LdaCounts&)> on_sweep;
};

/// Collapsed Gibbs over token assignments. Topic and proportion estimates
/// average the count-based posterior means over the second half of the sweeps
/// (the first half is burn-in).
LdaState lda_gibbs_fit(const Corpus& corpus, std::size_t topics, double eta, double alpha, std::size_t sweeps,
                       Rng& rng, const LdaFitOptions& options = {});

/// Local variables of one document: topic proportions and the topic labels
/// of the tokens they are attached to.
struct LdaLocal {
  Eigen::VectorXd proportions;
  std::vector<int> assignments;
};

/// Gibbs over a document's token labels with the topics held fixed,
/// followed by a proportions draw from Dirichlet(counts + alpha). An empty
/// document yields a prior draw.
LdaLocal lda_local_posterior(const Corpus& doc, const Eigen::MatrixXd& topics, double alpha, std::size_t sweeps,
                             Rng& rng);

/// Per token: topic ~ Categorical(proportions), word ~ Categorical(topics[topic]).
struct GeneratedDoc {
  Corpus tokens;
  std::vector<int> assignments;
};

GeneratedDoc lda_generate(const Eigen::MatrixXd& topics, const Eigen::VectorXd& proportions, std::size_t length,
                          Rng& rng, std::int32_t doc_id = 0);

/// Synthetic corpus drawn from the LDA generative process.
struct SyntheticCorpus {
  Corpus corpus;
  Eigen::MatrixXd topics;
  Eigen::MatrixXd proportions;
  std::vector<int> assignments;
};

SyntheticCorpus simulate_lda_corpus(std::size_t docs, std::size_t vocab, std::size_t topics, std::size_t doc_length,
                                    double eta, double alpha, Rng& rng);

/// Grouped LDA with fixed topics, exposing the local sampling contract used
/// by per-group population checks. The global latent is the topic matrix.
class LdaGroupModel {
 public:
  using observation_type = Token;
  using global_type = Eigen::MatrixXd;
  using local_type = LdaLocal;

  LdaGroupModel(std::size_t docs, double alpha, std::size_t local_sweeps);

  bool has_group(GroupLabel label) const noexcept;
  /// z ~ Dirichlet(alpha).
  LdaLocal local_prior_sample(const Eigen::MatrixXd& topics, Rng& rng) const;
  /// Generates `size` tokens for document `label`; records their labels in z.
  Corpus local_predictive_sample(const Eigen::MatrixXd& topics, LdaLocal& z, GroupLabel label, std::size_t size,
                                 Rng& rng) const;
  /// z ~ p(z | y_obs_j, topics).
  LdaLocal local_posterior_sample(const Eigen::MatrixXd& topics, const Corpus& y_obs_j, Rng& rng) const;
  /// Keeps the proportions of z and labels each token of y with
  /// topic ~ p(k | word, z, topics), proportional to z_k topics(k, word).
  LdaLocal align_local(const Eigen::MatrixXd& topics, const LdaLocal& z, const Corpus& y, Rng& rng) const;

 private:
  std::size_t docs_;
  double alpha_;
  std::size_t local_sweeps_;
};

/// IMI over a collection of documents and their local labels.
IMIMatrix imi_of_collection(std::span<const Corpus> docs, std::span<const LdaLocal> locals, std::size_t topics,
                            std::size_t vocab);

}  // namespace popcheck
