// Shared tokenizer: whitespace split, surrounding punctuation stripped,
// ASCII lowercased. Internal hyphens, carets and non-ASCII bytes are kept, so
// "g-1", "m^2" and Greek letters survive as tokens.
#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace arix {

namespace detail {

// bytes >= 0x80 are UTF-8 continuation/lead bytes; treat them as letters
inline bool token_char(unsigned char c) {
  return c >= 0x80 || std::isalnum(c);
}

}  // namespace detail

inline std::vector<std::string> tokenize(std::string_view text, bool lowercase = true) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::size_t b = i, e = j;
      while (b < e && !detail::token_char(static_cast<unsigned char>(text[b]))) ++b;
      while (e > b && !detail::token_char(static_cast<unsigned char>(text[e - 1]))) --e;
      if (e > b) {
        std::string tok(text.substr(b, e - b));
        if (lowercase)
          for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(tok));
      }
    }
    i = j;
  }
  return out;
}

}  // namespace arix
