#include "popcheck/models/lda.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace popcheck {

namespace {

std::size_t infer_extent(const Corpus& corpus, bool words) {
  std::size_t extent = 0;
  for (const auto& t : corpus.observations) {
    const int v = words ? t.word : t.doc;
    if (v < 0) throw std::invalid_argument(std::string("lda: negative ") + (words ? "word" : "doc") + " id");
    extent = std::max(extent, static_cast<std::size_t>(v) + 1);
  }
  return extent;
}

}  // namespace

LdaState lda_gibbs_fit(const Corpus& corpus, std::size_t topics, double eta, double alpha, std::size_t sweeps,
                       Rng& rng, const LdaFitOptions& options) {
  if (topics < 1) throw std::invalid_argument("lda_gibbs_fit: need at least one topic");
  if (!(eta > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("lda_gibbs_fit: Dirichlet parameters must be > 0");
  if (corpus.empty()) throw std::invalid_argument("lda_gibbs_fit: empty corpus");

  const std::size_t K = topics;
  const std::size_t V = options.vocab.value_or(infer_extent(corpus, true));
  const std::size_t D = options.docs.value_or(infer_extent(corpus, false));
  if (V < infer_extent(corpus, true) || D < infer_extent(corpus, false)) {
    throw std::invalid_argument("lda_gibbs_fit: ids exceed the declared vocabulary or document count");
  }

  LdaState state;
  state.eta = eta;
  state.alpha = alpha;
  auto& c = state.counts;
  c.topics = K;
  c.vocab = V;
  c.docs = D;
  c.doc_topic.assign(D * K, 0);
  c.topic_word.assign(K * V, 0);
  c.topic_total.assign(K, 0);

  const std::size_t N = corpus.size();
  state.assignments.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& t = corpus[i];
    const int k = static_cast<int>(rng.index(K));
    state.assignments[i] = k;
    ++c.dt(static_cast<std::size_t>(t.doc), static_cast<std::size_t>(k));
    ++c.tw(static_cast<std::size_t>(k), static_cast<std::size_t>(t.word));
    ++c.topic_total[static_cast<std::size_t>(k)];
  }

  Eigen::MatrixXd topic_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
  Eigen::MatrixXd prop_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(K));
  std::vector<double> doc_len(D, 0.0);
  for (const auto& t : corpus.observations) doc_len[static_cast<std::size_t>(t.doc)] += 1.0;
  std::size_t kept = 0;

  auto accumulate_estimate = [&] {
    const double v_eta = static_cast<double>(V) * eta;
    const double k_alpha = static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) {
      const double denom = static_cast<double>(c.topic_total[k]) + v_eta;
      for (std::size_t w = 0; w < V; ++w) {
        topic_sum(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) += (c.tw(k, w) + eta) / denom;
      }
    }
    for (std::size_t d = 0; d < D; ++d) {
      const double denom = doc_len[d] + k_alpha;
      for (std::size_t k = 0; k < K; ++k) {
        prop_sum(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) += (c.dt(d, k) + alpha) / denom;
      }
    }
    ++kept;
  };

  const std::size_t burn_in = sweeps / 2;
  const double v_eta = static_cast<double>(V) * eta;
  std::vector<double> weights(K);
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < N; ++i) {
      const auto d = static_cast<std::size_t>(corpus[i].doc);
      const auto w = static_cast<std::size_t>(corpus[i].word);
      const auto old = static_cast<std::size_t>(state.assignments[i]);
      --c.dt(d, old);
      --c.tw(old, w);
      --c.topic_total[old];
      for (std::size_t k = 0; k < K; ++k) {
        weights[k] = (c.dt(d, k) + alpha) * (c.tw(k, w) + eta) / (c.topic_total[k] + v_eta);
      }
      const std::size_t k = rng.categorical(weights);
      state.assignments[i] = static_cast<int>(k);
      ++c.dt(d, k);
      ++c.tw(k, w);
      ++c.topic_total[k];
    }
    if (options.on_sweep) options.on_sweep(s, c);
    if (s >= burn_in) accumulate_estimate();
  }
  if (kept == 0) accumulate_estimate();

  state.topics = topic_sum / static_cast<double>(kept);
  state.doc_proportions = prop_sum / static_cast<double>(kept);
  return state;
}

LdaLocal lda_local_posterior(const Corpus& doc, const Eigen::MatrixXd& topics, double alpha, std::size_t sweeps,
                             Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("lda_local_posterior: alpha must be > 0");
  const auto K = static_cast<std::size_t>(topics.rows());
  if (K == 0) throw std::invalid_argument("lda_local_posterior: no topics");

  LdaLocal out;
  out.assignments.resize(doc.size());
  std::vector<int> counts(K, 0);
  std::vector<double> weights(K);

  auto word_column = [&](const Token& t) {
    if (t.word < 0 || t.word >= topics.cols()) throw std::invalid_argument("lda_local_posterior: word id out of range");
    return static_cast<Eigen::Index>(t.word);
  };

  // Initialise each label from its word likelihood alone.
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto w = word_column(doc[i]);
    for (std::size_t k = 0; k < K; ++k) weights[k] = topics(static_cast<Eigen::Index>(k), w);
    const std::size_t k = rng.categorical(weights);
    out.assignments[i] = static_cast<int>(k);
    ++counts[k];
  }

  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto w = word_column(doc[i]);
      --counts[static_cast<std::size_t>(out.assignments[i])];
      for (std::size_t k = 0; k < K; ++k) weights[k] = (counts[k] + alpha) * topics(static_cast<Eigen::Index>(k), w);
      const std::size_t k = rng.categorical(weights);
      out.assignments[i] = static_cast<int>(k);
      ++counts[k];
    }
  }

  std::vector<double> conc(K);
  for (std::size_t k = 0; k < K; ++k) conc[k] = counts[k] + alpha;
  out.proportions.resize(static_cast<Eigen::Index>(K));
  rng.dirichlet(conc, std::span<double>(out.proportions.data(), K));
  return out;
}

GeneratedDoc lda_generate(const Eigen::MatrixXd& topics, const Eigen::VectorXd& proportions, std::size_t length,
                          Rng& rng, std::int32_t doc_id) {
  if (proportions.size() != topics.rows()) throw std::invalid_argument("lda_generate: proportions/topics mismatch");
  const auto K = static_cast<std::size_t>(topics.rows());
  const auto V = static_cast<std::size_t>(topics.cols());
  GeneratedDoc out;
  out.tokens.observations.reserve(length);
  out.assignments.reserve(length);
  std::vector<double> row(V);
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t k = rng.categorical(std::span<const double>(proportions.data(), K));
    for (std::size_t w = 0; w < V; ++w) row[w] = topics(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w));
    const std::size_t w = rng.categorical(row);
    out.tokens.observations.push_back({doc_id, static_cast<std::int32_t>(w)});
    out.assignments.push_back(static_cast<int>(k));
  }
  return out;
}

SyntheticCorpus simulate_lda_corpus(std::size_t docs, std::size_t vocab, std::size_t topics, std::size_t doc_length,
                                    double eta, double alpha, Rng& rng) {
  SyntheticCorpus out;
  const auto K = static_cast<Eigen::Index>(topics);
  const auto V = static_cast<Eigen::Index>(vocab);
  out.topics.resize(K, V);
  std::vector<double> conc_w(vocab, eta);
  std::vector<double> row(vocab);
  for (Eigen::Index k = 0; k < K; ++k) {
    rng.dirichlet(conc_w, row);
    for (Eigen::Index w = 0; w < V; ++w) out.topics(k, w) = row[static_cast<std::size_t>(w)];
  }
  out.proportions.resize(static_cast<Eigen::Index>(docs), K);
  std::vector<double> conc_k(topics, alpha);
  Eigen::VectorXd z(K);
  for (std::size_t d = 0; d < docs; ++d) {
    rng.dirichlet(conc_k, std::span<double>(z.data(), topics));
    out.proportions.row(static_cast<Eigen::Index>(d)) = z.transpose();
    auto doc = lda_generate(out.topics, z, doc_length, rng, static_cast<std::int32_t>(d));
    out.corpus.observations.insert(out.corpus.observations.end(), doc.tokens.observations.begin(),
                                   doc.tokens.observations.end());
    out.assignments.insert(out.assignments.end(), doc.assignments.begin(), doc.assignments.end());
  }
  return out;
}

LdaGroupModel::LdaGroupModel(std::size_t docs, double alpha, std::size_t local_sweeps)
    : docs_(docs), alpha_(alpha), local_sweeps_(local_sweeps) {
  if (!(alpha > 0.0)) throw std::invalid_argument("LdaGroupModel: alpha must be > 0");
}

bool LdaGroupModel::has_group(GroupLabel label) const noexcept {
  return label >= 0 && static_cast<std::size_t>(label) < docs_;
}

LdaLocal LdaGroupModel::local_prior_sample(const Eigen::MatrixXd& topics, Rng& rng) const {
  const auto K = static_cast<std::size_t>(topics.rows());
  LdaLocal z;
  z.proportions.resize(static_cast<Eigen::Index>(K));
  std::vector<double> conc(K, alpha_);
  rng.dirichlet(conc, std::span<double>(z.proportions.data(), K));
  return z;
}

Corpus LdaGroupModel::local_predictive_sample(const Eigen::MatrixXd& topics, LdaLocal& z, GroupLabel label,
                                              std::size_t size, Rng& rng) const {
  auto doc = lda_generate(topics, z.proportions, size, rng, static_cast<std::int32_t>(label));
  z.assignments = std::move(doc.assignments);
  return std::move(doc.tokens);
}

LdaLocal LdaGroupModel::local_posterior_sample(const Eigen::MatrixXd& topics, const Corpus& y_obs_j,
                                               Rng& rng) const {
  return lda_local_posterior(y_obs_j, topics, alpha_, local_sweeps_, rng);
}

LdaLocal LdaGroupModel::align_local(const Eigen::MatrixXd& topics, const LdaLocal& z, const Corpus& y,
                                    Rng& rng) const {
  const auto K = static_cast<std::size_t>(topics.rows());
  LdaLocal out;
  out.proportions = z.proportions;
  out.assignments.resize(y.size());
  std::vector<double> weights(K);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto w = static_cast<Eigen::Index>(y[i].word);
    if (w < 0 || w >= topics.cols()) throw std::invalid_argument("align_local: word id out of range");
    for (std::size_t k = 0; k < K; ++k) {
      weights[k] = z.proportions(static_cast<Eigen::Index>(k)) * topics(static_cast<Eigen::Index>(k), w);
    }
    out.assignments[i] = static_cast<int>(rng.categorical(weights));
  }
  return out;
}

IMIMatrix imi_of_collection(std::span<const Corpus> docs, std::span<const LdaLocal> locals, std::size_t topics,
                            std::size_t vocab) {
  if (docs.size() != locals.size()) throw std::invalid_argument("imi_of_collection: one local state per document");
  Corpus all;
  std::vector<int> labels;
  for (std::size_t j = 0; j < docs.size(); ++j) {
    if (docs[j].size() != locals[j].assignments.size()) {
      throw std::invalid_argument("imi_of_collection: local labels do not cover document " + std::to_string(j));
    }
    all.observations.insert(all.observations.end(), docs[j].observations.begin(), docs[j].observations.end());
    labels.insert(labels.end(), locals[j].assignments.begin(), locals[j].assignments.end());
  }
  return imi_d(all, labels, topics, vocab);
}

}  // namespace popcheck
