#include "seqbirds/vocabulary.hpp"

#include <fstream>
#include <sstream>

namespace seqbirds {

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int v : w) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

Word row_word(const LevelMatrix& matrix, int row) {
  Word w;
  for (int c = 0; c < kMaxCol; ++c) w[static_cast<std::size_t>(c)] = matrix(row, c);
  return w;
}

Vocabulary::Vocabulary(std::vector<Word> words) : words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<int>(i)).second)
      throw DataError("vocabulary word " + std::to_string(i) + " is a duplicate");
  }
  space_index_ = index_of(space_word());
  if (space_index_ < 0) throw DataError("vocabulary lacks the all-Space word");
}

const Word& Vocabulary::word(int index) const {
  if (index < 0 || index >= size()) throw DataError("word index " + std::to_string(index) + " out of range");
  return words_[static_cast<std::size_t>(index)];
}

int Vocabulary::index_of(const Word& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? -1 : it->second;
}

Vocabulary build_vocab(const std::vector<LevelMatrix>& dataset) {
  if (dataset.empty()) throw DataError("cannot build a vocabulary from an empty dataset");
  std::vector<Word> words;
  std::unordered_map<Word, int, WordHash> seen;
  for (const auto& m : dataset) {
    for (int r = 0; r < kMaxRow; ++r) {
      Word w = row_word(m, r);
      if (seen.emplace(w, static_cast<int>(words.size())).second) words.push_back(w);
    }
  }
  if (!seen.count(space_word())) words.push_back(space_word());
  return Vocabulary(std::move(words));
}

Sentence matrix_to_sentence(const Vocabulary& vocab, const LevelMatrix& matrix, int* unknown_rows) {
  Sentence s(kMaxRow);
  int unknown = 0;
  for (int r = 0; r < kMaxRow; ++r) {
    int idx = vocab.index_of(row_word(matrix, r));
    if (idx < 0) {
      idx = vocab.unk();
      ++unknown;
    }
    s[static_cast<std::size_t>(r)] = idx;
  }
  if (unknown_rows) *unknown_rows += unknown;
  return s;
}

LevelMatrix sentence_to_matrix(const Vocabulary& vocab, const Sentence& sentence) {
  if (sentence.size() != static_cast<std::size_t>(kMaxRow))
    throw DataError("sentence length " + std::to_string(sentence.size()) + " != 30");
  LevelMatrix m = empty_matrix();
  for (int r = 0; r < kMaxRow; ++r) {
    const int idx = sentence[static_cast<std::size_t>(r)];
    if (idx == vocab.unk()) continue;
    const Word& w = vocab.word(idx);
    for (int c = 0; c < kMaxCol; ++c) m(r, c) = w[static_cast<std::size_t>(c)];
  }
  return m;
}

std::string format_vocab(const Vocabulary& vocab) {
  std::ostringstream out;
  for (int i = 0; i < vocab.size(); ++i) {
    out << i << '\t';
    const Word& w = vocab.word(i);
    for (int c = 0; c < kMaxCol; ++c) {
      if (c) out << ',';
      out << w[static_cast<std::size_t>(c)];
    }
    out << '\n';
  }
  return out.str();
}

Vocabulary parse_vocab(std::string_view text, int n_types) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Word> words;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": " + what);
    };
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail("missing tab");
    if (line.substr(0, tab) != std::to_string(words.size())) fail("index out of sequence");
    std::istringstream cells(line.substr(tab + 1));
    std::string cell;
    Word w{};
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col >= kMaxCol) fail("too many columns");
      std::size_t used = 0;
      int v = -1;
      try {
        v = std::stoi(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size() || v < 0 || v > n_types) fail("bad type id '" + cell + "'");
      w[static_cast<std::size_t>(col++)] = v;
    }
    if (col != kMaxCol) fail("expected 94 columns");
    words.push_back(w);
  }
  if (words.empty()) throw DataError("vocabulary file is empty");
  return Vocabulary(std::move(words));
}

Vocabulary read_vocab_file(const std::string& path, int n_types) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_vocab(ss.str(), n_types);
}

void write_vocab_file(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << format_vocab(vocab);
}

}  // namespace seqbirds
