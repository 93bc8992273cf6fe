#include "termrank/corpus.hpp"

#include <algorithm>

#include "termrank/error.hpp"

namespace termrank {

namespace {

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    if (ch == ' ') ch = '_';
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

TagSet::TagSet()
    : tags_{"ADJ",   "ADP",  "ADV",  "AUX",   "CCONJ", "DET",
            "INTJ",  "NOUN", "NUM",  "PART",  "PRON",  "PROPN",
            "PUNCT", "SCONJ", "SYM", "VERB",  "X"} {}

TagSet TagSet::parse(std::string_view list) {
  std::set<std::string> tags;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (!item.empty()) tags.emplace(item);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (tags.empty()) throw ConfigError("empty tag set");
  return TagSet(std::move(tags));
}

TagPattern TagPattern::parse(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos || comma == 0 ||
      comma + 1 >= text.size() ||
      text.find(',', comma + 1) != std::string_view::npos) {
    throw ConfigError("pattern must look like TAG,TAG, got '" +
                      std::string(text) + "'");
  }
  return {std::string(text.substr(0, comma)),
          std::string(text.substr(comma + 1))};
}

std::string CandidateEntry::id() const { return first + " " + second; }

CandidateCounter::CandidateCounter(TagPattern pattern, const TagSet& tags)
    : pattern_(std::move(pattern)) {
  for (const auto* tag : {&pattern_.first, &pattern_.second}) {
    if (!tags.contains(*tag)) {
      throw UnknownTag("pattern tag '" + *tag + "' is not in the tag set");
    }
  }
}

void CandidateCounter::add_sentence(std::span<const TaggedToken> sentence) {
  for (std::size_t i = 0; i + 1 < sentence.size(); ++i) {
    const auto& a = sentence[i];
    const auto& b = sentence[i + 1];
    if (a.tag != pattern_.first || b.tag != pattern_.second) continue;
    ++pairs_[{a.surface, b.surface}];
    ++first_margin_[a.surface];
    ++second_margin_[b.surface];
    ++total_;
  }
}

CandidateSet CandidateCounter::finish(Count min_freq) const {
  if (min_freq < 1) throw ConfigError("min_freq must be at least 1");
  if (total_ == 0) {
    throw EmptyCorpus("no " + pattern_.str() + " instance in the corpus");
  }
  CandidateSet out;
  out.pattern = pattern_;
  out.n_total = total_;
  // std::map iteration is already (first, second) order.
  for (const auto& [key, n11] : pairs_) {
    if (n11 < min_freq) continue;
    out.entries.push_back(
        {key.first, key.second,
         contingency(n11, first_margin_.at(key.first),
                     second_margin_.at(key.second), total_)});
  }
  return out;
}

CandidateSet extract_candidates(std::span<const Sentence> sentences,
                                const TagPattern& pattern, Count min_freq,
                                const TagSet& tags) {
  CandidateCounter counter(pattern, tags);
  for (const auto& s : sentences) counter.add_sentence(s);
  return counter.finish(min_freq);
}

namespace detail {

bool read_sentence(std::istream& in, const TagSet& tags, Sentence& out,
                   std::size_t& line_no) {
  out.clear();
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    any = true;
    const std::string_view view = strip_cr(line);
    if (view.empty()) {
      if (out.empty()) continue;
      return true;
    }
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos || tab == 0 ||
        view.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 'surface<TAB>tag'");
    }
    const auto tag = view.substr(tab + 1);
    if (!tags.contains(tag)) {
      throw UnknownTag("line " + std::to_string(line_no) + ": tag '" +
                       std::string(tag) + "' is not in the tag set");
    }
    out.push_back({fold_case(view.substr(0, tab)), std::string(tag)});
  }
  return any || !out.empty();
}

}  // namespace detail

std::vector<Sentence> read_tagged_corpus(std::istream& in, const TagSet& tags) {
  std::vector<Sentence> sentences;
  for_each_sentence(in, tags,
                    [&](const Sentence& s) { sentences.push_back(s); });
  return sentences;
}

}  // namespace termrank
