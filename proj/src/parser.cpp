#include "langcheck/parser.hpp"

#include <string>

#include "langcheck/text.hpp"

namespace langcheck {
namespace {

constexpr std::string_view kMentionsCue = "the claim mentions that";
constexpr std::string_view kRelated = "related";
constexpr std::string_view kEllipsis = "\xE2\x80\xA6";
// A category header without "Related" longer than this is treated as prose.
constexpr std::size_t kMaxBareCategoryWords = 3;

bool word_boundary_before(std::string_view s, std::size_t pos) {
  return pos == 0 || !text::is_ascii_alpha(s[pos - 1]);
}

bool word_boundary_after(std::string_view s, std::size_t end) {
  return end >= s.size() || !text::is_ascii_alpha(s[end]);
}

struct FactMarker {
  std::size_t start = std::string_view::npos;  // index of "fact"
  std::size_t colon = std::string_view::npos;
};

FactMarker find_fact_marker(std::string_view s) {
  std::size_t pos = 0;
  while ((pos = text::ifind(s, "fact", pos)) != std::string_view::npos) {
    std::size_t j = pos + 4;
    if (word_boundary_before(s, pos)) {
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '*')) ++j;
      if (j < s.size() && s[j] == ':') return {pos, j};
    }
    pos += 4;
  }
  return {};
}

std::size_t rfind_word(std::string_view s, std::string_view word) {
  std::size_t found = std::string_view::npos;
  std::size_t pos = 0;
  while ((pos = text::ifind(s, word, pos)) != std::string_view::npos) {
    if (word_boundary_before(s, pos) && word_boundary_after(s, pos + word.size())) found = pos;
    pos += word.size();
  }
  return found;
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    if (text::is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::string_view strip_decoration(std::string_view s) {
  constexpr std::string_view kDecoration = " \t\r\n*_`\"'-:#";
  auto b = s.find_first_not_of(kDecoration);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(kDecoration);
  return s.substr(b, e - b + 1);
}

std::string clean_summary(std::string_view part) {
  std::size_t cue = text::ifind(part, kMentionsCue);
  if (cue != std::string_view::npos) part = part.substr(cue + kMentionsCue.size());
  std::string summary = text::single_line(part);
  constexpr std::string_view kTrailing = ". \t*_`";
  const auto end = summary.find_last_not_of(kTrailing);
  summary.erase(end == std::string::npos ? 0 : end + 1);
  const auto begin = summary.find_first_not_of(" \t*_`");
  return begin == std::string::npos ? std::string() : summary.substr(begin);
}

bool starts_new_section(std::string_view line) {
  line = text::trim(line);
  return text::istarts_with(line, "claim:") || text::istarts_with(line, "question:") ||
         text::istarts_with(line, "answer:");
}

bool is_decoration(char c) {
  return text::is_space(c) || c == '"' || c == '\'' || c == '*' || c == '`' || c == '_' ||
         c == '(' || c == '[';
}

}  // namespace

GroundingResult parse_fact_prediction(std::string_view completion) {
  GroundingResult result;
  result.raw = std::string(completion);

  auto degrade = [&] {
    result.degraded = true;
    result.summary.clear();
    result.category.reset();
    result.fact = std::string(text::trim(completion));
    return result;
  };

  const FactMarker marker = find_fact_marker(completion);
  if (marker.start == std::string_view::npos) return degrade();

  std::string_view prefix = completion.substr(0, marker.start);
  std::size_t header_start = prefix.find_last_of(".!?\n");
  header_start = header_start == std::string_view::npos ? 0 : header_start + 1;
  if (std::size_t ellipsis = prefix.rfind(kEllipsis);
      ellipsis != std::string_view::npos && ellipsis + kEllipsis.size() > header_start) {
    header_start = ellipsis + kEllipsis.size();
  }

  std::size_t cut = header_start;
  std::string_view category_text = prefix.substr(header_start);
  std::size_t related = rfind_word(category_text, kRelated);
  if (related != std::string_view::npos) {
    cut = header_start + related;
    category_text = category_text.substr(related + kRelated.size());
  } else if (count_words(category_text) > kMaxBareCategoryWords) {
    cut = prefix.size();
    category_text = {};
  }

  result.summary = clean_summary(prefix.substr(0, cut));
  std::string category = text::squeeze_spaces(text::lower(strip_decoration(category_text)));
  if (!category.empty()) result.category = std::move(category);

  std::string fact;
  bool first = true;
  for (std::string_view line : text::split_lines(completion.substr(marker.colon + 1))) {
    std::string_view trimmed = text::trim(line);
    if (!first && starts_new_section(trimmed)) break;
    first = false;
    if (trimmed.empty()) {
      if (fact.empty()) continue;
      break;
    }
    if (!fact.empty()) fact += '\n';
    fact += trimmed;
  }
  std::string_view fact_view = text::trim(fact);
  while (!fact_view.empty() && fact_view.front() == '*') fact_view = text::trim_left(fact_view.substr(1));
  result.fact = std::string(fact_view);
  if (result.fact.empty()) return degrade();
  return result;
}

Verdict parse_yes_no(std::string_view completion) {
  std::size_t i = 0;
  auto skip = [&] {
    while (i < completion.size() && is_decoration(completion[i])) ++i;
  };
  skip();
  if (text::istarts_with(completion.substr(i), "answer")) {
    std::size_t j = i + 6;
    while (j < completion.size() && (completion[j] == ' ' || completion[j] == '\t' ||
                                     completion[j] == '*')) {
      ++j;
    }
    if (j < completion.size() && completion[j] == ':') {
      i = j + 1;
      skip();
    }
  }
  std::size_t end = i;
  while (end < completion.size()) {
    if (text::is_ascii_alpha(completion[end])) {
      ++end;
    } else if ((completion[end] == '-' || completion[end] == '\'') && end > i &&
               end + 1 < completion.size() && text::is_ascii_alpha(completion[end + 1])) {
      end += 2;  // "no-one", "don't" stay one word
    } else {
      break;
    }
  }
  const std::string token = text::ascii_lower(completion.substr(i, end - i));

  DecisionPath path = DecisionPath::GenerativeNonAnswer;
  if (token == "no") {
    path = DecisionPath::GenerativeExplicitNo;
  } else if (token == "yes") {
    path = DecisionPath::GenerativeYes;
  }
  return Verdict(path, std::string(completion));
}

std::string first_line(std::string_view completion) {
  for (std::string_view line : text::split_lines(completion)) {
    std::string_view t = text::trim(line);
    if (t.empty()) continue;
    for (std::string_view label : {"question:", "answer:"}) {
      if (text::istarts_with(t, label)) t = text::trim(t.substr(label.size()));
    }
    if (!t.empty()) return std::string(t);
  }
  return {};
}

}  // namespace langcheck
