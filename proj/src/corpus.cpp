#include "pivotrepr/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pivotrepr {

std::vector<std::string> tokenize(const std::string& raw_text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : raw_text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens) {
  std::vector<std::string> keys;
  keys.reserve(tokens.size() * 2);
  for (const auto& t : tokens) keys.push_back(t);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) keys.push_back(tokens[i] + " " + tokens[i + 1]);
  return keys;
}

Corpus load_corpus(const std::string& path, CorpusKind kind, const std::string& domain_name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);

  Corpus corpus;
  corpus.domain_name = domain_name;
  corpus.kind = kind;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    const std::string where = path + ":" + std::to_string(line_no);
    if (!obj.is_object()) throw std::runtime_error(where + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
      if (key != "id" && key != "text" && key != "label")
        throw std::runtime_error(where + ": unknown key \"" + key + "\"");
    }
    if (!obj.contains("text") || !obj["text"].is_string())
      throw std::runtime_error(where + ": missing string field \"text\"");

    Document doc;
    doc.id = obj.contains("id") ? obj["id"].get<std::string>() : std::to_string(line_no);
    doc.tokens = tokenize(obj["text"].get<std::string>());

    if (kind == CorpusKind::Labeled) {
      if (!obj.contains("label"))
        throw std::runtime_error(where + ": labeled corpus line is missing \"label\"");
      int label = obj["label"].get<int>();
      if (label != 0 && label != 1) throw std::runtime_error(where + ": label must be 0 or 1");
      doc.label = label;
    } else if (obj.contains("label")) {
      throw std::runtime_error(where + ": unlabeled corpus line carries a \"label\"");
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const auto& doc : corpus.documents) {
    nlohmann::json obj;
    obj["id"] = doc.id;
    std::string text;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) text += ' ';
      text += doc.tokens[i];
    }
    obj["text"] = text;
    if (doc.label) obj["label"] = *doc.label;
    out << obj.dump() << '\n';
  }
}

std::vector<FoldSplit> make_folds(const Corpus& corpus, int k, int train_size, int dev_size,
                                  std::uint64_t seed) {
  if (corpus.kind != CorpusKind::Labeled) throw std::invalid_argument("make_folds: corpus must be labeled");
  if (train_size % 2 != 0 || dev_size % 2 != 0)
    throw std::invalid_argument("make_folds: train_size and dev_size must be even");

  std::vector<std::string> pos_ids, neg_ids;
  for (const auto& doc : corpus.documents) {
    if (!doc.label) throw std::invalid_argument("make_folds: unlabeled document in labeled corpus");
    (*doc.label == 1 ? pos_ids : neg_ids).push_back(doc.id);
  }

  const std::size_t need = static_cast<std::size_t>(train_size + dev_size) / 2;
  if (pos_ids.size() < need || neg_ids.size() < need) {
    std::ostringstream msg;
    msg << "make_folds: need " << need << " documents per class, have " << pos_ids.size()
        << " positive and " << neg_ids.size() << " negative";
    throw std::invalid_argument(msg.str());
  }

  std::vector<FoldSplit> folds;
  for (int f = 0; f < k; ++f) {
    Rng rng(derive_seed(seed, "fold", static_cast<std::uint64_t>(f)));
    auto pos = pos_ids;
    auto neg = neg_ids;
    rng.shuffle(pos);
    rng.shuffle(neg);

    FoldSplit split;
    split.fold_index = f;
    const int half_train = train_size / 2;
    const int half_dev = dev_size / 2;
    for (int i = 0; i < half_train; ++i) {
      split.train_ids.push_back(pos[i]);
      split.train_ids.push_back(neg[i]);
    }
    for (int i = 0; i < half_dev; ++i) {
      split.dev_ids.push_back(pos[half_train + i]);
      split.dev_ids.push_back(neg[half_train + i]);
    }
    folds.push_back(std::move(split));
  }
  return folds;
}

UnlabeledSplit split_unlabeled_holdout(const Corpus& source, const Corpus& target, double ratio,
                                       std::uint64_t seed) {
  if (ratio <= 0.0 || ratio >= 1.0) throw std::invalid_argument("split_unlabeled_holdout: ratio must be in (0,1)");
  if (source.documents.empty() || target.documents.empty())
    throw std::invalid_argument("split_unlabeled_holdout: empty corpus");

  UnlabeledSplit result;
  const Corpus* corpora[2] = {&source, &target};
  const char* tags[2] = {"usplit-source", "usplit-target"};
  for (int d = 0; d < 2; ++d) {
    std::vector<std::string> ids;
    for (const auto& doc : corpora[d]->documents) ids.push_back(doc.id);
    Rng rng(derive_seed(seed, tags[d]));
    rng.shuffle(ids);
    const std::size_t n_validation =
        static_cast<std::size_t>(ratio * static_cast<double>(ids.size()) + 0.5);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_validation ? result.validation_ids : result.train_ids).push_back(ids[i]);
    }
  }
  return result;
}

}  // namespace pivotrepr
