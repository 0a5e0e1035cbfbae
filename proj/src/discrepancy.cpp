#include "popcheck/discrepancy.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace popcheck {

double entropy_from_counts(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw std::invalid_argument("entropy_from_counts: negative count");
    total += c;
  }
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double q = c / total;
      h -= q * std::log(q);
    }
  }
  return h;
}

double mean_d(const ScalarData& y) {
  if (y.empty()) throw std::invalid_argument("mean_d: empty data");
  return std::accumulate(y.observations.begin(), y.observations.end(), 0.0) / static_cast<double>(y.size());
}

double chi_squared_d(const ScalarData& y, std::span<const Moments> moments) {
  if (moments.size() != y.size()) throw std::invalid_argument("chi_squared_d: one moment pair per point required");
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(moments[i].variance > 0.0)) {
      throw std::invalid_argument("chi_squared_d: variance must be positive at point " + std::to_string(i));
    }
    const double r = y[i] - moments[i].mean;
    total += r * r / moments[i].variance;
  }
  return total;
}

double mse_d(const RegressionData& y, const Eigen::VectorXd& theta) {
  if (y.empty()) throw std::invalid_argument("mse_d: empty data");
  double total = 0.0;
  for (const auto& pt : y.observations) {
    if (pt.covariates.size() != static_cast<std::size_t>(theta.size())) {
      throw std::invalid_argument("mse_d: covariate dimension " + std::to_string(pt.covariates.size()) +
                                  " does not match theta dimension " + std::to_string(theta.size()));
    }
    const Eigen::Map<const Eigen::VectorXd> x(pt.covariates.data(), theta.size());
    const double r = pt.response - x.dot(theta);
    total += r * r;
  }
  return total / static_cast<double>(y.size());
}

namespace {

// Entropy of a run of already-sorted doc ids.
template <class It>
double run_entropy(It first, It last, std::vector<double>& scratch) {
  scratch.clear();
  while (first != last) {
    auto next = std::find_if(first, last, [&](const auto& t) { return std::get<2>(t) != std::get<2>(*first); });
    scratch.push_back(static_cast<double>(std::distance(first, next)));
    first = next;
  }
  return entropy_from_counts(scratch);
}

}  // namespace

IMIMatrix imi_d(const Corpus& tokens, std::span<const int> assignments, std::size_t topics, std::size_t vocab) {
  if (assignments.size() != tokens.size()) throw std::invalid_argument("imi_d: one assignment per token required");
  if (topics == 0) throw std::invalid_argument("imi_d: need at least one topic");

  // (topic, word, doc) triples sorted so each topic, and each (topic, word),
  // is a contiguous run ordered by doc.
  std::vector<std::tuple<int, int, int>> keyed;
  keyed.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int k = assignments[i];
    const Token& t = tokens[i];
    if (k < 0 || static_cast<std::size_t>(k) >= topics) throw std::invalid_argument("imi_d: topic label out of range");
    if (t.word < 0 || static_cast<std::size_t>(t.word) >= vocab) throw std::invalid_argument("imi_d: word id out of range");
    keyed.emplace_back(k, t.word, t.doc);
  }
  std::sort(keyed.begin(), keyed.end());

  IMIMatrix out;
  out.topics = topics;
  out.vocab = vocab;
  out.values.assign(topics * vocab, std::numeric_limits<double>::quiet_NaN());
  out.conditional_entropy.assign(topics, 0.0);

  std::vector<double> scratch;
  std::vector<double> doc_counts;
  auto topic_begin = keyed.begin();
  while (topic_begin != keyed.end()) {
    const int k = std::get<0>(*topic_begin);
    auto topic_end = std::find_if(topic_begin, keyed.end(), [&](const auto& t) { return std::get<0>(t) != k; });

    // H(d | k): doc counts irrespective of word.
    std::vector<int> docs;
    docs.reserve(static_cast<std::size_t>(std::distance(topic_begin, topic_end)));
    for (auto it = topic_begin; it != topic_end; ++it) docs.push_back(std::get<2>(*it));
    std::sort(docs.begin(), docs.end());
    doc_counts.clear();
    for (std::size_t i = 0; i < docs.size();) {
      std::size_t j = i;
      while (j < docs.size() && docs[j] == docs[i]) ++j;
      doc_counts.push_back(static_cast<double>(j - i));
      i = j;
    }
    const double h_topic = entropy_from_counts(doc_counts);
    out.conditional_entropy[static_cast<std::size_t>(k)] = h_topic;

    auto word_begin = topic_begin;
    while (word_begin != topic_end) {
      const int w = std::get<1>(*word_begin);
      auto word_end = std::find_if(word_begin, topic_end, [&](const auto& t) { return std::get<1>(t) != w; });
      const double h_word = run_entropy(word_begin, word_end, scratch);
      out.values[static_cast<std::size_t>(k) * vocab + static_cast<std::size_t>(w)] = h_topic - h_word;
      word_begin = word_end;
    }
    topic_begin = topic_end;
  }
  return out;
}

std::vector<double> imi_topic_deviance(const IMIMatrix& a, const IMIMatrix& b) {
  if (a.topics != b.topics || a.vocab != b.vocab) throw std::invalid_argument("imi_topic_deviance: shape mismatch");
  std::vector<double> out(a.topics, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < a.topics; ++k) {
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t w = 0; w < a.vocab; ++w) {
      if (!a.defined(k, w) || !b.defined(k, w)) continue;
      total += std::abs(a.at(k, w) - b.at(k, w));
      ++n;
    }
    if (n > 0) out[k] = total / static_cast<double>(n);
  }
  return out;
}

}  // namespace popcheck
