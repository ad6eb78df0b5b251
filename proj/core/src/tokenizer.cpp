#include "qmine/tokenizer.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cctype>

namespace qmine {

namespace {

const icu::Normalizer2& nfkc_casefold() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status) || norm == nullptr) {
        // ICU data is baked into libicu; this cannot fail on a sane install.
        std::abort();
    }
    return *norm;
}

bool is_ascii(std::string_view text) {
    for (unsigned char c : text) {
        if (c >= 0x80) return false;
    }
    return true;
}

// NFKC_Casefold is the identity on lowercase ASCII alphanumerics, so plain
// ASCII text skips the ICU round-trip entirely.
TokenList tokenize_ascii(std::string_view text) {
    TokenList tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace

TokenList tokenize(std::string_view text) {
    if (text.empty()) return {};
    if (is_ascii(text)) return tokenize_ascii(text);

    icu::UnicodeString raw = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString norm = nfkc_casefold().normalize(raw, status);
    if (U_FAILURE(status)) norm = raw;

    TokenList tokens;
    icu::UnicodeString current;
    for (int32_t i = 0; i < norm.length();) {
        UChar32 cp = norm.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isalnum(cp)) {
            current.append(cp);
        } else if (!current.isEmpty()) {
            std::string out;
            current.toUTF8String(out);
            tokens.push_back(std::move(out));
            current.remove();
        }
    }
    if (!current.isEmpty()) {
        std::string out;
        current.toUTF8String(out);
        tokens.push_back(std::move(out));
    }
    return tokens;
}

std::string join_tokens(const TokenList& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

uint32_t decode_utf8(std::string_view text, size_t& pos) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    int32_t i = static_cast<int32_t>(pos);
    int32_t length = static_cast<int32_t>(text.size());
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) {
        cp = 0xFFFD;
        i = static_cast<int32_t>(pos) + 1;
    }
    pos = static_cast<size_t>(i);
    return static_cast<uint32_t>(cp);
}

bool is_alnum_cp(uint32_t cp) { return u_isalnum(static_cast<UChar32>(cp)); }
bool is_alpha_cp(uint32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }
bool is_space_cp(uint32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

bool is_valid_utf8(std::string_view text) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    int32_t i = 0;
    int32_t length = static_cast<int32_t>(text.size());
    while (i < length) {
        UChar32 cp;
        U8_NEXT(bytes, i, length, cp);
        if (cp < 0) return false;
    }
    return true;
}

size_t count_codepoints(std::string_view text) {
    size_t count = 0;
    for (size_t pos = 0; pos < text.size(); ++count) decode_utf8(text, pos);
    return count;
}

}  // namespace qmine
