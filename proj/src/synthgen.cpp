#include "pivotrepr/synthgen.hpp"

#include <set>
#include <sstream>

namespace pivotrepr {

GeneratorConfig default_generator_config() {
  GeneratorConfig cfg;
  auto fill = [](std::vector<std::string>& v, const std::string& stem, int n) {
    for (int i = 0; i < n; ++i) v.push_back(stem + std::to_string(i));
  };
  fill(cfg.shared_sentiment_vocab[1], "sharedpos", 8);
  fill(cfg.shared_sentiment_vocab[0], "sharedneg", 8);
  fill(cfg.source_sentiment_vocab[1], "srcpos", 8);
  fill(cfg.source_sentiment_vocab[0], "srcneg", 8);
  fill(cfg.target_sentiment_vocab[1], "tgtpos", 8);
  fill(cfg.target_sentiment_vocab[0], "tgtneg", 8);
  fill(cfg.filler_vocab, "filler", 100);
  return cfg;
}

namespace {

void check_disjoint(const GeneratorConfig& cfg) {
  std::set<std::string> source_words, target_words;
  for (int pol = 0; pol < 2; ++pol) {
    source_words.insert(cfg.source_sentiment_vocab[pol].begin(), cfg.source_sentiment_vocab[pol].end());
    target_words.insert(cfg.target_sentiment_vocab[pol].begin(), cfg.target_sentiment_vocab[pol].end());
  }
  for (const auto& w : source_words)
    if (target_words.count(w))
      throw std::invalid_argument("generate: per-domain sentiment vocabularies overlap on \"" + w + "\"");
}

Corpus make_corpus(const GeneratorConfig& cfg, const std::string& domain, bool is_source, bool labeled,
                   int size, const std::string& id_prefix, std::uint64_t seed) {
  Corpus corpus;
  corpus.domain_name = domain;
  corpus.kind = labeled ? CorpusKind::Labeled : CorpusKind::Unlabeled;
  Rng rng(seed);

  const auto& domain_vocab = is_source ? cfg.source_sentiment_vocab : cfg.target_sentiment_vocab;
  for (int i = 0; i < size; ++i) {
    // exact label balance in labeled corpora
    const int polarity = labeled ? i % 2 : static_cast<int>(rng.uniform_int(2));
    Document doc;
    doc.id = id_prefix + std::to_string(i);
    if (labeled) doc.label = polarity;

    for (const auto& w : cfg.shared_sentiment_vocab[polarity])
      if (rng.uniform() < cfg.pivot_emission_prob) doc.tokens.push_back(w);
    for (const auto& w : domain_vocab[polarity])
      if (rng.uniform() < cfg.domain_word_emission_prob) doc.tokens.push_back(w);
    const int n_fillers = cfg.filler_len_min +
                          static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(cfg.filler_len_max - cfg.filler_len_min + 1)));
    for (int f = 0; f < n_fillers; ++f)
      doc.tokens.push_back(cfg.filler_vocab[rng.uniform_int(cfg.filler_vocab.size())]);
    rng.shuffle(doc.tokens);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace

SyntheticCorpora generate(const GeneratorConfig& cfg) {
  if (cfg.pivot_emission_prob <= 0.0 || cfg.pivot_emission_prob >= 1.0 ||
      cfg.domain_word_emission_prob <= 0.0 || cfg.domain_word_emission_prob >= 1.0)
    throw std::invalid_argument("generate: emission probabilities must be in (0,1)");
  if (cfg.filler_vocab.empty()) throw std::invalid_argument("generate: empty filler vocabulary");
  if (cfg.filler_len_min < 0 || cfg.filler_len_max < cfg.filler_len_min)
    throw std::invalid_argument("generate: bad filler length range");
  check_disjoint(cfg);

  SyntheticCorpora out;
  out.source_labeled = make_corpus(cfg, "synth-source", true, true, cfg.source_labeled_size, "sl",
                                   derive_seed(cfg.seed, "synth-source-labeled"));
  out.source_unlabeled = make_corpus(cfg, "synth-source", true, false, cfg.source_unlabeled_size, "su",
                                     derive_seed(cfg.seed, "synth-source-unlabeled"));
  out.target_unlabeled = make_corpus(cfg, "synth-target", false, false, cfg.target_unlabeled_size, "tu",
                                     derive_seed(cfg.seed, "synth-target-unlabeled"));
  out.target_test = make_corpus(cfg, "synth-target", false, true, cfg.target_test_size, "tt",
                                derive_seed(cfg.seed, "synth-target-test"));
  return out;
}

}  // namespace pivotrepr
