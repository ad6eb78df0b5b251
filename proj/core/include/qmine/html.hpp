#pragma once

#include <string>
#include <string_view>

namespace qmine {

// Best-effort HTML-to-text: drops <script>/<style> bodies and comments,
// replaces every other tag with a single space, decodes common named and
// numeric entities, collapses whitespace runs, trims. Malformed markup is
// tolerated; an unclosed tag runs to end of input.
std::string strip_html(std::string_view html);

// Collapses ASCII whitespace runs to single spaces and trims.
std::string collapse_whitespace(std::string_view text);

}  // namespace qmine
