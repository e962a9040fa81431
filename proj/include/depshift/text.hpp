// Lemma keys: Unicode NFC normalization and optional case folding.
#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace depshift {

enum class CasePolicy { insensitive, sensitive };

namespace detail {

inline bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

}  // namespace detail

/// Returns `s` in Unicode normalization form C.
inline std::string to_nfc(std::string_view s) {
  if (detail::is_ascii(s)) return std::string(s);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString out = nfc->normalize(in, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

/// Comparison key for a lemma: NFC, then full case folding unless the
/// policy is case-sensitive. Two lemmas match iff their keys are equal.
inline std::string lemma_key(std::string_view lemma, CasePolicy policy) {
  if (detail::is_ascii(lemma)) {
    std::string key(lemma);
    if (policy == CasePolicy::insensitive) {
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c);
      });
    }
    return key;
  }
  std::string key = to_nfc(lemma);
  if (policy == CasePolicy::sensitive) return key;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(key.data(), static_cast<int32_t>(key.size())));
  u.foldCase(U_FOLD_CASE_DEFAULT);
  // Folding can denormalize (e.g. U+0130), so renormalize.
  std::string folded;
  u.toUTF8String(folded);
  return to_nfc(folded);
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace depshift
