#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hkg::text {

struct Token {
  std::string_view text;
  std::size_t start = 0;  // byte offset in the scanned buffer
  std::size_t end = 0;
};

bool is_space(char c);
bool is_upper(char c);
bool is_alnum(char c);
bool is_punct(char c);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Whitespace-delimited words with leading/trailing punctuation and a
// possessive "'s" suffix stripped. Offsets are relative to `base_offset`.
// Words that are pure punctuation are dropped.
std::vector<Token> words(std::string_view s, std::size_t base_offset = 0);

// Lower-cased alphanumeric runs; used for retrieval scoring and relation
// similarity.
std::vector<std::string> alnum_tokens(std::string_view s);

// Whitespace-separated pieces, verbatim.
std::vector<std::string> split_whitespace(std::string_view s);

// Fixed English stopword list (50 entries).
bool is_stopword(std::string_view lowered);
std::size_t stopword_count();

}  // namespace hkg::text
