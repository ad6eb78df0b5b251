#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qmine {

// Ordered lowercase tokens; no token is empty or contains whitespace.
using TokenList = std::vector<std::string>;

// NFKC-normalizes (case-folding variant), then splits on every
// non-alphanumeric code point. Deterministic: same text, same tokens,
// on every platform. Pure and safe to call from any thread.
TokenList tokenize(std::string_view text);

std::string join_tokens(const TokenList& tokens);

// Code-point classification on raw UTF-8, shared with the language and
// cleaning heuristics. Decodes one code point at `pos` (advancing it);
// invalid sequences decode as U+FFFD and advance one byte.
uint32_t decode_utf8(std::string_view text, size_t& pos);
bool is_alnum_cp(uint32_t cp);
bool is_alpha_cp(uint32_t cp);
bool is_space_cp(uint32_t cp);

bool is_valid_utf8(std::string_view text);
size_t count_codepoints(std::string_view text);

}  // namespace qmine
