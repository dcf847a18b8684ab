#pragma once

#include "seqbirds/codec.hpp"

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqbirds {

/// One level-matrix row.
using Word = std::array<int, kMaxCol>;

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

Word row_word(const LevelMatrix& matrix, int row);
inline Word space_word() { return Word{}; }

/// Bijection between distinct matrix rows and [0, size()). The index size()
/// is reserved for UNK.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<Word> words);

  int size() const { return static_cast<int>(words_.size()); }
  int unk() const { return size(); }
  int space_index() const { return space_index_; }
  const Word& word(int index) const;
  /// -1 when absent.
  int index_of(const Word& w) const;
  const std::vector<Word>& words() const { return words_; }

 private:
  std::vector<Word> words_;
  std::unordered_map<Word, int, WordHash> index_;
  int space_index_ = -1;
};

/// Distinct rows in first-appearance order; the all-Space row is appended
/// when no matrix contains it.
Vocabulary build_vocab(const std::vector<LevelMatrix>& dataset);

/// Rows missing from the vocabulary map to UNK and bump `unknown_rows`.
Sentence matrix_to_sentence(const Vocabulary& vocab, const LevelMatrix& matrix, int* unknown_rows = nullptr);
/// UNK words become all-Space rows.
LevelMatrix sentence_to_matrix(const Vocabulary& vocab, const Sentence& sentence);

std::string format_vocab(const Vocabulary& vocab);
Vocabulary parse_vocab(std::string_view text, int n_types);
Vocabulary read_vocab_file(const std::string& path, int n_types);
void write_vocab_file(const Vocabulary& vocab, const std::string& path);

}  // namespace seqbirds
