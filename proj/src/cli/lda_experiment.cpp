#include <cmath>
#include <limits>
#include <map>

#include "json_util.hpp"
#include "popcheck/hierarchy.hpp"
#include "popcheck/io.hpp"
#include "popcheck/models/lda.hpp"

namespace popcheck {

namespace {

enum : std::uint64_t { kDataStream = 0, kSplitStream = 1, kFitStream = 2, kCheckStream = 3 };
enum : std::uint64_t { kPpc = 0, kPopc = 1 };

/// Mean |a - b| per topic over cells defined in both; NaN when none are.
std::vector<double> topic_deviance(const std::vector<double>& a, const std::vector<double>& b, std::size_t topics,
                                   std::size_t vocab) {
  std::vector<double> out(topics, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < topics; ++k) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t w = 0; w < vocab; ++w) {
      const double x = a[k * vocab + w], y = b[k * vocab + w];
      if (std::isnan(x) || std::isnan(y)) continue;
      sum += std::abs(x - y);
      ++count;
    }
    if (count) out[k] = sum / static_cast<double>(count);
  }
  return out;
}

}  // namespace

void LdaExperimentConfig::validate() const {
  if (topics.empty()) throw ConfigError("lda: topic grid is empty");
  for (auto k : topics) {
    if (k < 1) throw ConfigError("lda: topic counts must be >= 1");
  }
  if (!(eta > 0.0) || !(alpha > 0.0)) throw ConfigError("lda: Dirichlet parameters must be positive");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ConfigError("lda: split_fraction must lie in (0, 1)");
  if (heldout_docs < 1) throw ConfigError("lda: need at least one held-out document");
  if (!corpus) {
    if (docs <= heldout_docs) throw ConfigError("lda: docs must exceed heldout_docs");
    if (vocab < 1 || true_topics < 1 || doc_length < 2) throw ConfigError("lda: invalid synthetic corpus shape");
  }
}

LdaExperimentConfig LdaExperimentConfig::from_json(const nlohmann::json& j) {
  using detail::get_or;
  detail::require_keys(j, "lda config",
                       {"topics", "docs", "vocab", "true_topics", "doc_length", "corpus", "eta", "alpha",
                        "heldout_docs", "split_fraction", "fit_sweeps", "local_sweeps"});
  LdaExperimentConfig c;
  c.topics = get_or(j, "topics", c.topics);
  c.docs = get_or(j, "docs", c.docs);
  c.vocab = get_or(j, "vocab", c.vocab);
  c.true_topics = get_or(j, "true_topics", c.true_topics);
  c.doc_length = get_or(j, "doc_length", c.doc_length);
  if (j.contains("corpus")) c.corpus = get_or<std::string>(j, "corpus", {});
  c.eta = get_or(j, "eta", c.eta);
  c.alpha = get_or(j, "alpha", c.alpha);
  c.heldout_docs = get_or(j, "heldout_docs", c.heldout_docs);
  c.split_fraction = get_or(j, "split_fraction", c.split_fraction);
  c.fit_sweeps = get_or(j, "fit_sweeps", c.fit_sweeps);
  c.local_sweeps = get_or(j, "local_sweeps", c.local_sweeps);
  c.validate();
  return c;
}

std::vector<LdaRow> run_lda_experiment(const LdaExperimentConfig& cfg, const RunSettings& run) {
  cfg.validate();
  Corpus corpus;
  std::size_t vocab = cfg.vocab;
  if (cfg.corpus) {
    corpus = read_corpus_tsv(*cfg.corpus);
    if (corpus.empty()) throw std::runtime_error(cfg.corpus->string() + ": corpus has no tokens");
    vocab = 0;
    for (const auto& t : corpus.observations) vocab = std::max(vocab, static_cast<std::size_t>(t.word) + 1);
  } else {
    Rng rng = Rng::substream(run.seed, {kDataStream});
    corpus = simulate_lda_corpus(cfg.docs, cfg.vocab, cfg.true_topics, cfg.doc_length, cfg.eta, cfg.alpha, rng).corpus;
  }

  // Tokens by document, in corpus order.
  std::map<GroupLabel, std::vector<std::size_t>> by_doc;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_doc[corpus[i].doc].push_back(i);
  std::vector<GroupLabel> labels;
  for (const auto& [doc, idx] : by_doc) {
    if (idx.size() >= 2) labels.push_back(doc);
  }
  if (labels.size() <= cfg.heldout_docs) throw ConfigError("lda: fewer usable documents than heldout_docs + 1");
  const std::size_t total_docs = static_cast<std::size_t>(by_doc.rbegin()->first) + 1;

  Rng split_rng = Rng::substream(run.seed, {kSplitStream});
  const auto heldout = subsample_groups(labels, cfg.heldout_docs, split_rng);
  std::vector<GroupSplit<Token>> splits;
  splits.reserve(heldout.size());
  for (GroupLabel doc : heldout) {
    const auto& idx = by_doc.at(doc);
    Corpus tokens = corpus.subset(idx);
    tokens.group_ids.reset();
    splits.push_back(within_group_split(tokens, cfg.split_fraction, split_rng, doc));
  }

  Corpus train;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!std::binary_search(heldout.begin(), heldout.end(), static_cast<GroupLabel>(corpus[i].doc))) {
      train.observations.push_back(corpus[i]);
    }
  }

  const LdaGroupModel model(total_docs, cfg.alpha, cfg.local_sweeps);
  std::vector<LdaRow> rows;
  for (std::size_t gi = 0; gi < cfg.topics.size(); ++gi) {
    const std::size_t K = cfg.topics[gi];
    Rng fit_rng = Rng::substream(run.seed, {kFitStream, gi});
    LdaFitOptions opts;
    opts.vocab = vocab;
    opts.docs = total_docs;
    const auto state = lda_gibbs_fit(train, K, cfg.eta, cfg.alpha, cfg.fit_sweeps, fit_rng, opts);

    CollectionDiscrepancy<LdaGroupModel> d{
        Arity::vector(K * vocab),
        [K, vocab](std::span<const Corpus> docs, std::span<const LdaLocal> z, const Eigen::MatrixXd&) {
          return DiscrepancyValue{imi_of_collection(docs, z, K, vocab).values};
        },
        "imi"};

    CheckConfig check;
    check.replications = run.replications;
    check.threads = run.threads;

    check.seed = derive_seed(run.seed, {kCheckStream, gi, kPpc});
    const auto ppc = collection_check(model, state.topics, std::span<const GroupSplit<Token>>(splits), d,
                                      DistanceKind::vector_deviance, check, GroupReference::observed);

    std::vector<std::vector<double>> per_topic(run.replications);
    check.seed = derive_seed(run.seed, {kCheckStream, gi, kPopc});
    const auto popc = collection_check(
        model, state.topics, std::span<const GroupSplit<Token>>(splits), d, DistanceKind::vector_deviance, check,
        GroupReference::fresh, [&](std::size_t r, const DiscrepancyValue& rep, const DiscrepancyValue& ref) {
          per_topic[r] = topic_deviance(std::get<std::vector<double>>(rep), std::get<std::vector<double>>(ref), K, vocab);
        });

    double min_dev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < K; ++k) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& v : per_topic) {
        if (!std::isnan(v[k])) {
          sum += v[k];
          ++count;
        }
      }
      if (count == 0) continue;
      const double mean = sum / static_cast<double>(count);
      if (std::isnan(min_dev) || mean < min_dev) min_dev = mean;
    }
    rows.push_back({K, ppc.estimate, popc.estimate, popc.estimate / ppc.estimate, min_dev});
  }
  return rows;
}

void write_lda_csv(const std::filesystem::path& path, const std::vector<LdaRow>& rows) {
  CsvWriter csv(path, {"K", "ppc_deviance", "popc_deviance", "ratio", "per_topic_min_deviance"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.topics), format_double(r.ppc_deviance), format_double(r.popc_deviance),
             format_double(r.ratio), format_double(r.per_topic_min_deviance)});
  }
  csv.close();
}

}  // namespace popcheck
