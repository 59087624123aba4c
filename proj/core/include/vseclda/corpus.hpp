#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vseclda/errors.hpp"

namespace vsec {

enum class Modality { primary, conditioned };
enum class Split { train, test };

const char* to_string(Modality m);
const char* to_string(Split s);

using WordId = std::int32_t;

// Word list for one modality. Ids are dense 0-based indices into `tokens`;
// filtering only flips `active` bits and never renumbers, so count-matrix
// columns stay aligned across filtering rounds.
struct Vocabulary {
  Modality role = Modality::primary;
  std::vector<std::string> tokens;
  std::vector<std::uint8_t> active;  // same length as tokens

  std::int64_t size() const { return static_cast<std::int64_t>(tokens.size()); }
  std::int64_t active_count() const;
  bool is_active(WordId w) const { return active[static_cast<std::size_t>(w)] != 0; }

  void validate() const;
};

// A document is a bag per modality; files store token sequences for
// readability but the semantics are multiset.
struct Document {
  std::string id;
  std::vector<WordId> primary;
  std::vector<WordId> conditioned;
  Split split = Split::train;

  const std::vector<WordId>& tokens(Modality m) const {
    return m == Modality::primary ? primary : conditioned;
  }
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocab_primary;
  Vocabulary vocab_conditioned;

  const Vocabulary& vocab(Modality m) const {
    return m == Modality::primary ? vocab_primary : vocab_conditioned;
  }
  Vocabulary& vocab(Modality m) {
    return m == Modality::primary ? vocab_primary : vocab_conditioned;
  }

  std::vector<int> doc_indices(Split s) const;

  // Full structural validation; throws ValidationError with the offending
  // document / word id in the message.
  void validate() const;
};

// Sparse per-document word counts for one modality. Row order follows `docs`.
struct ModalityCounts {
  std::vector<std::vector<std::pair<WordId, std::int32_t>>> rows;  // (word, count), word-sorted
  std::vector<std::int64_t> row_totals;
  std::int64_t total = 0;
  std::int64_t vocab_size = 0;

  std::int64_t count(std::size_t row, WordId w) const;
};

struct DocWordCounts {
  std::vector<int> docs;  // corpus document indices
  ModalityCounts primary;
  ModalityCounts conditioned;
};

// Frequency tables M_{d,c} / N_{d,t} for the selected split. Counts include
// inactive words; masking is apply_mask's job, not build_counts'.
DocWordCounts build_counts(const Corpus& corpus, Split subset);

// Drops every token of an inactive word from every document. Vocabularies
// (and their masks) are left untouched; M_d / N_d shrink accordingly.
// Documents emptied in a modality are retained; training decides how to
// handle them.
Corpus apply_mask(const Corpus& corpus);

// Directory layout: vocab_primary.tsv / vocab_conditioned.tsv
// (id <TAB> token, ids contiguous from 0), documents.jsonl, optional
// mask.json. UTF-8, LF line endings.
Corpus load_corpus(const std::filesystem::path& dir);
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace vsec
