#include "qmine/html.hpp"

#include <array>
#include <cctype>
#include <cstdint>

namespace qmine {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

// Name of the tag starting at html[pos] == '<'; empty if not a tag opener.
std::string_view tag_name(std::string_view html, size_t pos) {
    size_t i = pos + 1;
    if (i < html.size() && html[i] == '/') ++i;
    size_t start = i;
    while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-'))
        ++i;
    return html.substr(start, i - start);
}

// Scans past a tag starting at '<', honoring quoted attribute values.
// Returns the index one past '>' (or end of input for an unclosed tag).
size_t skip_tag(std::string_view html, size_t pos) {
    char quote = 0;
    for (size_t i = pos + 1; i < html.size(); ++i) {
        char c = html[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return i + 1;
        }
    }
    return html.size();
}

void append_utf8(std::string& out, uint32_t cp) {
    if (cp == 0xA0) cp = ' ';  // NBSP folds into the whitespace collapse
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the entity at html[pos] == '&'. On success appends the decoded
// text to out and returns the index past the ';'; otherwise returns pos.
size_t decode_entity(std::string_view html, size_t pos, std::string& out) {
    size_t semi = html.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12) return pos;
    std::string_view body = html.substr(pos + 1, semi - pos - 1);
    if (body.empty()) return pos;

    if (body[0] == '#') {
        uint32_t cp = 0;
        bool ok = false;
        if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
            for (size_t i = 2; i < body.size(); ++i) {
                unsigned char c = static_cast<unsigned char>(body[i]);
                if (!std::isxdigit(c)) return pos;
                cp = cp * 16 + static_cast<uint32_t>(std::isdigit(c) ? c - '0' : (std::tolower(c) - 'a' + 10));
                ok = true;
            }
        } else {
            for (size_t i = 1; i < body.size(); ++i) {
                unsigned char c = static_cast<unsigned char>(body[i]);
                if (!std::isdigit(c)) return pos;
                cp = cp * 10 + static_cast<uint32_t>(c - '0');
                ok = true;
            }
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) || cp == 0) return pos;
        append_utf8(out, cp);
        return semi + 1;
    }

    struct Named {
        std::string_view name;
        char ch;
    };
    static constexpr std::array<Named, 6> kNamed{{{"amp", '&'},
                                                  {"lt", '<'},
                                                  {"gt", '>'},
                                                  {"quot", '"'},
                                                  {"apos", '\''},
                                                  {"nbsp", ' '}}};
    for (const auto& e : kNamed) {
        if (body == e.name) {
            out.push_back(e.ch);
            return semi + 1;
        }
    }
    return pos;
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string strip_html(std::string_view html) {
    std::string raw;
    raw.reserve(html.size());

    size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            if (html.compare(i, 4, "<!--") == 0) {
                size_t end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                raw.push_back(' ');
                continue;
            }
            size_t next = i + 1 < html.size() ? i + 1 : i;
            char n = i + 1 < html.size() ? html[next] : 0;
            bool looks_like_tag =
                std::isalpha(static_cast<unsigned char>(n)) || n == '/' || n == '!' || n == '?';
            if (!looks_like_tag) {
                raw.push_back(c);  // bare '<' in prose stays
                ++i;
                continue;
            }
            std::string_view name = tag_name(html, i);
            size_t after = skip_tag(html, i);
            if (iequals(name, "script") || iequals(name, "style")) {
                // Drop element content up to the matching close tag; an
                // unclosed element swallows the rest of the input.
                std::string close = "</";
                for (char nc : name) close.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(nc))));
                size_t search = after;
                size_t found = std::string_view::npos;
                while (search < html.size()) {
                    size_t lt = html.find('<', search);
                    if (lt == std::string_view::npos) break;
                    if (lt + close.size() <= html.size() &&
                        iequals(html.substr(lt, close.size()), close)) {
                        found = lt;
                        break;
                    }
                    search = lt + 1;
                }
                i = found == std::string_view::npos ? html.size() : skip_tag(html, found);
            } else {
                i = after;
            }
            raw.push_back(' ');
        } else if (c == '&') {
            size_t advanced = decode_entity(html, i, raw);
            if (advanced == i) {
                raw.push_back(c);
                ++i;
            } else {
                i = advanced;
            }
        } else {
            raw.push_back(c);
            ++i;
        }
    }

    return collapse_whitespace(raw);
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_ws(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace qmine
