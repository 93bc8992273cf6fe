#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "termrank/measures.hpp"

namespace termrank {

struct TaggedToken {
  std::string surface;  // lowercased
  std::string tag;
};

using Sentence = std::vector<TaggedToken>;

class TagSet {
 public:
  // Universal Dependencies UPOS tags.
  TagSet();
  explicit TagSet(std::set<std::string> tags) : tags_(std::move(tags)) {}

  // Comma-separated list, e.g. "NOUN,ADJ".
  static TagSet parse(std::string_view list);

  bool contains(std::string_view tag) const {
    return tags_.find(std::string(tag)) != tags_.end();
  }
  const std::set<std::string>& tags() const noexcept { return tags_; }

 private:
  std::set<std::string> tags_;
};

struct TagPattern {
  std::string first;
  std::string second;

  // "NOUN,NOUN"
  static TagPattern parse(std::string_view text);
  std::string str() const { return first + "," + second; }
};

struct CandidateEntry {
  std::string first;
  std::string second;
  ContingencyTable table;

  // Words joined by a single space; the key used in the TSV files.
  std::string id() const;
};

struct CandidateSet {
  std::optional<TagPattern> pattern;
  std::vector<CandidateEntry> entries;  // sorted by (first, second)
  Count n_total = 0;
};

// Single-pass counter over adjacent token pairs within sentences. Margins
// and the instance total cover every pattern instance, including pairs
// later dropped by the frequency threshold.
class CandidateCounter {
 public:
  // Throws UnknownTag when a pattern tag is not in `tags`.
  CandidateCounter(TagPattern pattern, const TagSet& tags);

  void add_sentence(std::span<const TaggedToken> sentence);

  // Throws EmptyCorpus when no instance matched at all. A threshold that
  // removes every pair yields an empty entry list with n_total kept.
  CandidateSet finish(Count min_freq) const;

 private:
  TagPattern pattern_;
  std::map<std::pair<std::string, std::string>, Count> pairs_;
  std::map<std::string, Count> first_margin_;
  std::map<std::string, Count> second_margin_;
  Count total_ = 0;
};

CandidateSet extract_candidates(std::span<const Sentence> sentences,
                                const TagPattern& pattern, Count min_freq,
                                const TagSet& tags = TagSet());

// `surface<TAB>tag` per line, blank line between sentences. Surfaces are
// lowercased (ASCII) and inner spaces become '_'. Tags outside `tags`
// throw UnknownTag; malformed lines throw ParseError.
std::vector<Sentence> read_tagged_corpus(std::istream& in,
                                         const TagSet& tags = TagSet());

// Streams sentences to `sink` instead of materializing the corpus.
template <typename Sink>
void for_each_sentence(std::istream& in, const TagSet& tags, Sink&& sink);

namespace detail {
// Returns false at end of input. Blank lines end a sentence.
bool read_sentence(std::istream& in, const TagSet& tags, Sentence& out,
                   std::size_t& line_no);
}  // namespace detail

template <typename Sink>
void for_each_sentence(std::istream& in, const TagSet& tags, Sink&& sink) {
  Sentence sentence;
  std::size_t line_no = 0;
  while (detail::read_sentence(in, tags, sentence, line_no)) {
    if (!sentence.empty()) sink(std::as_const(sentence));
  }
}

}  // namespace termrank
