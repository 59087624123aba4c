#include "vseclda/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace vsec {

const char* to_string(Modality m) {
  return m == Modality::primary ? "primary" : "conditioned";
}

const char* to_string(Split s) { return s == Split::train ? "train" : "test"; }

std::int64_t Vocabulary::active_count() const {
  return std::count_if(active.begin(), active.end(), [](std::uint8_t b) { return b != 0; });
}

void Vocabulary::validate() const {
  if (active.size() != tokens.size())
    throw ValidationError(std::string("vocabulary(") + to_string(role) +
                          "): active mask length does not match token count");
  std::unordered_set<std::string> seen;
  for (const auto& t : tokens) {
    if (!seen.insert(t).second)
      throw ValidationError(std::string("vocabulary(") + to_string(role) +
                            "): duplicate token '" + t + "'");
  }
}

std::vector<int> Corpus::doc_indices(Split s) const {
  std::vector<int> out;
  for (std::size_t d = 0; d < documents.size(); ++d)
    if (documents[d].split == s) out.push_back(static_cast<int>(d));
  return out;
}

void Corpus::validate() const {
  if (documents.empty()) throw ValidationError("corpus: document list is empty");
  vocab_primary.validate();
  vocab_conditioned.validate();
  const auto check_ids = [](const Document& doc, const std::vector<WordId>& ids,
                            const Vocabulary& vocab) {
    for (WordId w : ids) {
      if (w < 0 || w >= vocab.size())
        throw ValidationError("document '" + doc.id + "': word id " + std::to_string(w) +
                              " out of range for " + to_string(vocab.role) +
                              " vocabulary of size " + std::to_string(vocab.size()));
    }
  };
  std::unordered_set<std::string> ids;
  for (const auto& doc : documents) {
    if (!ids.insert(doc.id).second)
      throw ValidationError("corpus: duplicate document id '" + doc.id + "'");
    check_ids(doc, doc.primary, vocab_primary);
    check_ids(doc, doc.conditioned, vocab_conditioned);
    if (doc.split == Split::train && (doc.primary.empty() || doc.conditioned.empty()))
      throw ValidationError("document '" + doc.id +
                            "': training documents need at least one token in each modality");
  }
}

std::int64_t ModalityCounts::count(std::size_t row, WordId w) const {
  const auto& r = rows[row];
  auto it = std::lower_bound(r.begin(), r.end(), w,
                             [](const auto& p, WordId v) { return p.first < v; });
  return (it != r.end() && it->first == w) ? it->second : 0;
}

namespace {

ModalityCounts count_modality(const Corpus& corpus, const std::vector<int>& docs, Modality m) {
  ModalityCounts out;
  out.vocab_size = corpus.vocab(m).size();
  out.rows.resize(docs.size());
  out.row_totals.resize(docs.size(), 0);
  std::vector<std::int32_t> scratch(static_cast<std::size_t>(out.vocab_size), 0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& toks = corpus.documents[static_cast<std::size_t>(docs[i])].tokens(m);
    for (WordId w : toks) ++scratch[static_cast<std::size_t>(w)];
    auto& row = out.rows[i];
    for (WordId w : toks) {
      auto& c = scratch[static_cast<std::size_t>(w)];
      if (c > 0) {
        row.emplace_back(w, c);
        c = 0;  // emit once, reset for next document
      }
    }
    std::sort(row.begin(), row.end());
    out.row_totals[i] = static_cast<std::int64_t>(toks.size());
    out.total += out.row_totals[i];
  }
  return out;
}

}  // namespace

DocWordCounts build_counts(const Corpus& corpus, Split subset) {
  DocWordCounts out;
  out.docs = corpus.doc_indices(subset);
  if (out.docs.empty())
    throw ValidationError(std::string("build_counts: no documents in split '") +
                          to_string(subset) + "'");
  out.primary = count_modality(corpus, out.docs, Modality::primary);
  out.conditioned = count_modality(corpus, out.docs, Modality::conditioned);
  return out;
}

Corpus apply_mask(const Corpus& corpus) {
  Corpus out = corpus;
  const auto filter = [](std::vector<WordId>& toks, const Vocabulary& vocab) {
    std::erase_if(toks, [&](WordId w) { return !vocab.is_active(w); });
  };
  for (auto& doc : out.documents) {
    filter(doc.primary, out.vocab_primary);
    filter(doc.conditioned, out.vocab_conditioned);
  }
  return out;
}

namespace {

Vocabulary load_vocab(const fs::path& file, Modality role) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  Vocabulary v;
  v.role = role;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": expected <id>\\t<token>");
    std::int64_t id = 0;
    try {
      id = std::stoll(line.substr(0, tab));
    } catch (const std::exception&) {
      throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": bad word id");
    }
    if (id != static_cast<std::int64_t>(v.tokens.size()))
      throw ValidationError(file.string() + ":" + std::to_string(lineno) +
                            ": ids must be contiguous from 0 (got " + std::to_string(id) + ")");
    v.tokens.push_back(line.substr(tab + 1));
  }
  v.active.assign(v.tokens.size(), 1);
  return v;
}

void save_vocab(const Vocabulary& v, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  for (std::size_t i = 0; i < v.tokens.size(); ++i)
    out << i << '\t' << v.tokens[i] << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

}  // namespace

Corpus load_corpus(const fs::path& dir) {
  Corpus corpus;
  corpus.vocab_primary = load_vocab(dir / "vocab_primary.tsv", Modality::primary);
  corpus.vocab_conditioned = load_vocab(dir / "vocab_conditioned.tsv", Modality::conditioned);

  const fs::path docs_file = dir / "documents.jsonl";
  std::ifstream in(docs_file);
  if (!in) throw IoError("cannot open " + docs_file.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(docs_file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    Document doc;
    try {
      doc.id = j.at("id").get<std::string>();
      doc.primary = j.at("primary").get<std::vector<WordId>>();
      doc.conditioned = j.at("conditioned").get<std::vector<WordId>>();
      const auto split = j.at("split").get<std::string>();
      if (split == "train")
        doc.split = Split::train;
      else if (split == "test")
        doc.split = Split::test;
      else
        throw ValidationError(docs_file.string() + ":" + std::to_string(lineno) +
                              ": split must be \"train\" or \"test\"");
    } catch (const json::exception& e) {
      throw ValidationError(docs_file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    corpus.documents.push_back(std::move(doc));
  }

  const fs::path mask_file = dir / "mask.json";
  if (fs::exists(mask_file)) {
    std::ifstream min(mask_file);
    if (!min) throw IoError("cannot open " + mask_file.string());
    json j;
    try {
      j = json::parse(min);
    } catch (const json::exception& e) {
      throw ValidationError(mask_file.string() + ": " + e.what());
    }
    const auto read_mask = [&](const char* key, Vocabulary& v) {
      auto m = j.at(key).get<std::vector<bool>>();
      if (m.size() != v.tokens.size())
        throw ValidationError(mask_file.string() + ": '" + key +
                              "' length does not match vocabulary size");
      for (std::size_t i = 0; i < m.size(); ++i) v.active[i] = m[i] ? 1 : 0;
    };
    try {
      read_mask("primary", corpus.vocab_primary);
      read_mask("conditioned", corpus.vocab_conditioned);
    } catch (const json::exception& e) {
      throw ValidationError(mask_file.string() + ": " + e.what());
    }
  }

  corpus.validate();
  return corpus;
}

void save_corpus(const Corpus& corpus, const fs::path& dir) {
  corpus.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  save_vocab(corpus.vocab_primary, dir / "vocab_primary.tsv");
  save_vocab(corpus.vocab_conditioned, dir / "vocab_conditioned.tsv");

  const fs::path docs_file = dir / "documents.jsonl";
  std::ofstream out(docs_file, std::ios::binary);
  if (!out) throw IoError("cannot write " + docs_file.string());
  for (const auto& doc : corpus.documents) {
    json j;
    j["id"] = doc.id;
    j["primary"] = doc.primary;
    j["conditioned"] = doc.conditioned;
    j["split"] = to_string(doc.split);
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + docs_file.string());

  const auto any_inactive = [](const Vocabulary& v) {
    return v.active_count() != v.size();
  };
  if (any_inactive(corpus.vocab_primary) || any_inactive(corpus.vocab_conditioned)) {
    json j;
    j["primary"] = std::vector<bool>(corpus.vocab_primary.active.begin(),
                                     corpus.vocab_primary.active.end());
    j["conditioned"] = std::vector<bool>(corpus.vocab_conditioned.active.begin(),
                                         corpus.vocab_conditioned.active.end());
    std::ofstream mout(dir / "mask.json", std::ios::binary);
    if (!mout) throw IoError("cannot write " + (dir / "mask.json").string());
    mout << j.dump(2) << '\n';
    if (!mout) throw IoError("write failed: " + (dir / "mask.json").string());
  }
}

}  // namespace vsec
