#include "toolspin/gateway.hpp"

#include <cctype>
#include <cstdlib>

namespace toolspin {

namespace {

// Recursive-descent parser for python-style call lists:
//   [calculate_sum(a=5, b=10), f(x='a, b', opts={'k': [1, 2]})]
// Values cover quoted strings, numbers, booleans, null and nested
// lists/mappings. Anything else makes the whole input unparseable.
struct call_parser {
    const std::string & text;
    size_t pos = 0;
    std::string error;

    explicit call_parser(const std::string & t) : text(t) {}

    bool at_end() const { return pos >= text.size(); }
    char peek() const { return at_end() ? '\0' : text[pos]; }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool fail(const std::string & what) {
        if (error.empty()) {
            error = what + " at offset " + std::to_string(pos);
        }
        return false;
    }

    bool expect(char c) {
        if (peek() != c) return fail(std::string("expected '") + c + "'");
        ++pos;
        return true;
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    }

    bool parse_ident(std::string & out) {
        if (!ident_start(peek())) return fail("expected identifier");
        size_t begin = pos;
        while (!at_end() && ident_char(text[pos])) ++pos;
        out = text.substr(begin, pos - begin);
        return true;
    }

    bool parse_string(std::string & out) {
        char quote = peek();
        ++pos;
        out.clear();
        while (!at_end()) {
            char c = text[pos++];
            if (c == quote) return true;
            if (c == '\\') {
                if (at_end()) break;
                char esc = text[pos++];
                switch (esc) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    default: out += esc; break; // \\ \' \" and anything else verbatim
                }
            } else {
                out += c;
            }
        }
        return fail("unterminated string");
    }

    bool parse_number(json & out) {
        size_t begin = pos;
        if (peek() == '+' || peek() == '-') ++pos;
        bool has_digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) { ++pos; has_digits = true; }
        bool is_float = false;
        if (peek() == '.') {
            is_float = true;
            ++pos;
            while (std::isdigit(static_cast<unsigned char>(peek()))) { ++pos; has_digits = true; }
        }
        if (peek() == 'e' || peek() == 'E') {
            is_float = true;
            ++pos;
            if (peek() == '+' || peek() == '-') ++pos;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) return fail("bad exponent");
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
        }
        if (!has_digits) return fail("expected number");
        const std::string token = text.substr(begin, pos - begin);
        if (is_float) {
            out = std::strtod(token.c_str(), nullptr);
        } else {
            out = static_cast<int64_t>(std::strtoll(token.c_str(), nullptr, 10));
        }
        return true;
    }

    bool parse_value(json & out) {
        skip_ws();
        char c = peek();
        if (c == '\'' || c == '"') {
            std::string s;
            if (!parse_string(s)) return false;
            out = s;
            return true;
        }
        if (c == '[') {
            ++pos;
            out = json::array();
            skip_ws();
            if (peek() == ']') { ++pos; return true; }
            while (true) {
                json item;
                if (!parse_value(item)) return false;
                out.push_back(std::move(item));
                skip_ws();
                if (peek() == ',') { ++pos; continue; }
                return expect(']');
            }
        }
        if (c == '{') {
            ++pos;
            out = json::object();
            skip_ws();
            if (peek() == '}') { ++pos; return true; }
            while (true) {
                skip_ws();
                std::string key;
                if (peek() == '\'' || peek() == '"') {
                    if (!parse_string(key)) return false;
                } else if (!parse_ident(key)) {
                    return false;
                }
                skip_ws();
                if (!expect(':')) return false;
                json value;
                if (!parse_value(value)) return false;
                out[key] = std::move(value);
                skip_ws();
                if (peek() == ',') { ++pos; continue; }
                return expect('}');
            }
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            return parse_number(out);
        }
        std::string word;
        if (ident_start(c) && parse_ident(word)) {
            if (word == "true" || word == "True") { out = true; return true; }
            if (word == "false" || word == "False") { out = false; return true; }
            if (word == "null" || word == "None") { out = nullptr; return true; }
            return fail("bare word '" + word + "' is not a value");
        }
        return fail("expected a value");
    }

    bool parse_call(tool_call & out) {
        skip_ws();
        if (!parse_ident(out.name)) return false;
        skip_ws();
        if (!expect('(')) return false;
        out.arguments = json::object();
        skip_ws();
        if (peek() == ')') { ++pos; return true; }
        while (true) {
            skip_ws();
            std::string key;
            if (!parse_ident(key)) return false;
            skip_ws();
            if (!expect('=')) return false;
            json value;
            if (!parse_value(value)) return false;
            out.arguments[key] = std::move(value);
            skip_ws();
            if (peek() == ',') { ++pos; continue; }
            return expect(')');
        }
    }

    bool parse_calls(std::vector<tool_call> & out) {
        skip_ws();
        if (!expect('[')) return false;
        skip_ws();
        if (peek() == ']') {
            ++pos;
        } else {
            while (true) {
                tool_call call;
                if (!parse_call(call)) return false;
                out.push_back(std::move(call));
                skip_ws();
                if (peek() == ',') { ++pos; continue; }
                if (!expect(']')) return false;
                break;
            }
        }
        skip_ws();
        if (!at_end()) return fail("trailing content after call list");
        return true;
    }
};

void quote_string(const std::string & s, std::string & out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"':  out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:   out += c; break;
        }
    }
    out += '"';
}

void print_value(const json & v, std::string & out) {
    switch (v.type()) {
        case json::value_t::string:
            quote_string(v.get<std::string>(), out);
            break;
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto & item : v) {
                if (!first) out += ", ";
                first = false;
                print_value(item, out);
            }
            out += ']';
            break;
        }
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto & [key, value] : v.items()) {
                if (!first) out += ", ";
                first = false;
                quote_string(key, out);
                out += ": ";
                print_value(value, out);
            }
            out += '}';
            break;
        }
        default:
            out += v.dump();
            break;
    }
}

} // namespace

std::vector<tool_call> parse_call_text(const std::string & raw, std::vector<std::string> * warnings) {
    call_parser parser(raw);
    std::vector<tool_call> calls;
    if (!parser.parse_calls(calls)) {
        if (warnings && !raw.empty()) {
            warnings->push_back("not a call list: " + parser.error);
        }
        return {};
    }
    return calls;
}

std::string print_call_text(const std::vector<tool_call> & calls) {
    std::string out = "[";
    bool first_call = true;
    for (const auto & call : calls) {
        if (!first_call) out += ", ";
        first_call = false;
        out += call.name;
        out += '(';
        bool first_arg = true;
        for (const auto & [key, value] : call.arguments.items()) {
            if (!first_arg) out += ", ";
            first_arg = false;
            out += key;
            out += '=';
            print_value(value, out);
        }
        out += ')';
    }
    out += ']';
    return out;
}

} // namespace toolspin
