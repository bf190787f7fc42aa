#ifndef MICA_STRSIM_HPP
#define MICA_STRSIM_HPP

// String metrics over Unicode scalar values.
//
// damerau_levenshtein is the optimal-string-alignment (OSA) variant: unit
// cost insert/delete/substitute plus adjacent transposition, with no
// substring edited more than once. OSA does not satisfy the triangle
// inequality ("ca" -> "abc" is 3, via "ac" it would be 2).
//
// Similarities are normalized by the longer length, so both live in [0, 1].
// None of these functions case-fold; callers fold first if they want to.

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "mica/unicode.hpp"

namespace mica::strsim {

inline std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;

  // Three rolling rows: i-2, i-1, i.
  std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;

  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        best = std::min(best, prev2[j - 2] + 1);
      cur[j] = best;
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

/// Length of the longest contiguous run shared by both strings.
inline std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

/// 1 - dl(a, b) / max(|a|, |b|); 1 when both are empty.
inline double lev_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(damerau_levenshtein(a, b)) / static_cast<double>(longest);
}

/// lcs(a, b) / max(|a|, |b|); 1 when both are empty.
inline double lcs_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return static_cast<double>(longest_common_substring(a, b)) / static_cast<double>(longest);
}

// UTF-8 conveniences.

inline std::size_t damerau_levenshtein(std::string_view a, std::string_view b) {
  return damerau_levenshtein(unicode::decode(a), unicode::decode(b));
}
inline std::size_t longest_common_substring(std::string_view a, std::string_view b) {
  return longest_common_substring(unicode::decode(a), unicode::decode(b));
}
inline double lev_similarity(std::string_view a, std::string_view b) {
  return lev_similarity(unicode::decode(a), unicode::decode(b));
}
inline double lcs_similarity(std::string_view a, std::string_view b) {
  return lcs_similarity(unicode::decode(a), unicode::decode(b));
}

}  // namespace mica::strsim

#endif  // MICA_STRSIM_HPP
