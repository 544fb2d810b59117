#include "hkg/text.hpp"

#include <algorithm>
#include <array>

namespace hkg::text {
namespace {

constexpr std::array<std::string_view, 50> kStopwords = {
    "a",     "about", "after", "all",   "also",  "an",    "and",   "any",
    "are",   "as",    "at",    "be",    "because", "but", "by",    "during",
    "for",   "from",  "had",   "has",   "have",  "he",    "her",   "his",
    "however", "if",  "in",    "into",  "is",    "it",    "its",   "many",
    "of",    "on",    "or",    "she",   "since", "some",  "that",  "the",
    "their", "there", "these", "they",  "this",  "to",    "under", "was",
    "were",  "with",
};

}  // namespace

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

bool is_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && !is_alnum(c) && !is_space(c) && u > 0x20;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::vector<Token> words(std::string_view s, std::size_t base_offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    std::size_t e = i;
    while (b < e && is_punct(s[b])) ++b;
    while (e > b && is_punct(s[e - 1])) --e;
    if (e - b > 2 && s[e - 2] == '\'' && (s[e - 1] == 's' || s[e - 1] == 'S')) {
      e -= 2;
    }
    if (b < e) out.push_back({s.substr(b, e - b), base_offset + b, base_offset + e});
  }
  return out;
}

std::vector<std::string> alnum_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !is_alnum(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && is_alnum(s[i])) ++i;
    if (b < i) out.push_back(to_lower(s.substr(b, i - b)));
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (b < i) out.emplace_back(s.substr(b, i - b));
  }
  return out;
}

bool is_stopword(std::string_view lowered) {
  return std::find(kStopwords.begin(), kStopwords.end(), lowered) !=
         kStopwords.end();
}

std::size_t stopword_count() { return kStopwords.size(); }

}  // namespace hkg::text
