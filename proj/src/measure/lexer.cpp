#include "netobs/measure/lexer.hpp"

#include <cctype>

#include "netobs/measure/parse.hpp"

namespace netobs::measure {

namespace {

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_';
}

struct Cursor {
    const std::string& src;
    size_t i = 0;
    int line = 1;
    int col = 1;

    bool done() const { return i >= src.size(); }
    char peek(size_t ahead = 0) const {
        return i + ahead < src.size() ? src[i + ahead] : '\0';
    }
    char advance() {
        char c = src[i++];
        if (c == '\n') { ++line; col = 1; } else { ++col; }
        return c;
    }
    SourcePos pos() const { return {line, col}; }
};

double unit_factor(const std::string& unit, SourcePos pos) {
    if (unit == "ms") return 1e-3;
    if (unit == "s" || unit == "sec" || unit == "secs" || unit == "second" ||
        unit == "seconds")
        return 1.0;
    if (unit == "m" || unit == "min" || unit == "mins" || unit == "minute" ||
        unit == "minutes")
        return 60.0;
    if (unit == "h" || unit == "hour" || unit == "hours") return 3600.0;
    throw SyntaxError(pos, "unknown duration unit '" + unit + "'");
}

} // namespace

double parse_duration(const std::string& text, SourcePos pos) {
    size_t k = 0;
    while (k < text.size() && (std::isdigit((unsigned char)text[k]) ||
                               text[k] == '.' || text[k] == '-' || text[k] == '+'))
        ++k;
    if (k == 0) throw SyntaxError(pos, "duration must start with a number");
    double value = 0;
    try {
        value = std::stod(text.substr(0, k));
    } catch (const std::exception&) {
        throw SyntaxError(pos, "bad duration number in '" + text + "'");
    }
    size_t u = k;
    while (u < text.size() && text[u] == ' ') ++u;
    std::string unit = text.substr(u);
    if (unit.empty()) throw SyntaxError(pos, "duration '" + text + "' lacks a unit");
    double seconds = value * unit_factor(unit, pos);
    if (!(seconds > 0.0))
        throw SyntaxError(pos, "duration must be positive, got '" + text + "'");
    return seconds;
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    Cursor cur{text};

    auto push = [&](Token::Kind k, SourcePos p, std::string t = "", double n = 0) {
        out.push_back(Token{k, std::move(t), n, p});
    };

    while (!cur.done()) {
        char c = cur.peek();
        SourcePos p = cur.pos();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            cur.advance();
            continue;
        }
        if (c == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }
        if (c == '\'' || c == '"') {
            char quote = cur.advance();
            std::string body;
            bool closed = false;
            while (!cur.done()) {
                char d = cur.advance();
                if (d == '\\' && !cur.done()) {
                    body.push_back(cur.advance());
                    continue;
                }
                if (d == quote) { closed = true; break; }
                body.push_back(d);
            }
            if (!closed) throw SyntaxError(p, "unterminated string literal");
            push(Token::Kind::String, p, body);
            continue;
        }
        if (std::isdigit((unsigned char)c) ||
            (c == '-' && std::isdigit((unsigned char)cur.peek(1)))) {
            std::string num;
            if (c == '-') num.push_back(cur.advance());
            while (!cur.done() && (std::isdigit((unsigned char)cur.peek()) ||
                                   cur.peek() == '.'))
                num.push_back(cur.advance());
            if (!cur.done() && (cur.peek() == 'e' || cur.peek() == 'E') &&
                (std::isdigit((unsigned char)cur.peek(1)) ||
                 ((cur.peek(1) == '+' || cur.peek(1) == '-') &&
                  std::isdigit((unsigned char)cur.peek(2))))) {
                num.push_back(cur.advance());
                if (cur.peek() == '+' || cur.peek() == '-') num.push_back(cur.advance());
                while (!cur.done() && std::isdigit((unsigned char)cur.peek()))
                    num.push_back(cur.advance());
            }
            if (!cur.done() && cur.peek() == '%') {
                cur.advance();
                push(Token::Kind::Percent, p, num, std::stod(num));
                continue;
            }
            if (!cur.done() && std::isalpha((unsigned char)cur.peek())) {
                // bare duration: 30s, 10ms
                std::string unit;
                while (!cur.done() && std::isalpha((unsigned char)cur.peek()))
                    unit.push_back(cur.advance());
                double seconds = parse_duration(num + unit, p);
                push(Token::Kind::Duration, p, num + unit, seconds);
                continue;
            }
            push(Token::Kind::Number, p, num, std::stod(num));
            continue;
        }
        if (ident_start(c)) {
            std::string id;
            id.push_back(cur.advance());
            for (;;) {
                char d = cur.peek();
                if (ident_char(d)) {
                    id.push_back(cur.advance());
                    continue;
                }
                // hyphen stays in the ident (VNF1-1) unless it opens an
                // arrow (z1->z2)
                if (d == '-' && ident_char(cur.peek(1)) && cur.peek(1) != '\0') {
                    id.push_back(cur.advance());
                    continue;
                }
                break;
            }
            push(Token::Kind::Ident, p, id);
            continue;
        }
        cur.advance();
        switch (c) {
            case '{': push(Token::Kind::LBrace, p, "{"); break;
            case '}': push(Token::Kind::RBrace, p, "}"); break;
            case '(': push(Token::Kind::LParen, p, "("); break;
            case ')': push(Token::Kind::RParen, p, ")"); break;
            case ',': push(Token::Kind::Comma, p, ","); break;
            case ';': push(Token::Kind::Semi, p, ";"); break;
            case ':': push(Token::Kind::Colon, p, ":"); break;
            case '.': push(Token::Kind::Dot, p, "."); break;
            case '=':
                if (cur.peek() == '=') { cur.advance(); push(Token::Kind::CmpEq, p, "=="); }
                else push(Token::Kind::Assign, p, "=");
                break;
            case '<':
                if (cur.peek() == '=') { cur.advance(); push(Token::Kind::CmpLe, p, "<="); }
                else push(Token::Kind::CmpLt, p, "<");
                break;
            case '>':
                if (cur.peek() == '=') { cur.advance(); push(Token::Kind::CmpGe, p, ">="); }
                else push(Token::Kind::CmpGt, p, ">");
                break;
            case '!':
                if (cur.peek() == '=') { cur.advance(); push(Token::Kind::CmpNe, p, "!="); }
                else throw SyntaxError(p, "unexpected '!'");
                break;
            case '-':
                if (cur.peek() == '>') { cur.advance(); push(Token::Kind::Arrow, p, "->"); }
                else throw SyntaxError(p, "unexpected '-'");
                break;
            default:
                throw SyntaxError(p, std::string("unexpected character '") + c + "'");
        }
    }
    push(Token::Kind::End, cur.pos());
    return out;
}

const char* token_name(Token::Kind k) {
    switch (k) {
        case Token::Kind::Ident: return "identifier";
        case Token::Kind::Number: return "number";
        case Token::Kind::Percent: return "percentage";
        case Token::Kind::String: return "string";
        case Token::Kind::Duration: return "duration";
        case Token::Kind::LBrace: return "'{'";
        case Token::Kind::RBrace: return "'}'";
        case Token::Kind::LParen: return "'('";
        case Token::Kind::RParen: return "')'";
        case Token::Kind::Comma: return "','";
        case Token::Kind::Semi: return "';'";
        case Token::Kind::Colon: return "':'";
        case Token::Kind::Assign: return "'='";
        case Token::Kind::Arrow: return "'->'";
        case Token::Kind::Dot: return "'.'";
        case Token::Kind::CmpLt: return "'<'";
        case Token::Kind::CmpGt: return "'>'";
        case Token::Kind::CmpLe: return "'<='";
        case Token::Kind::CmpGe: return "'>='";
        case Token::Kind::CmpEq: return "'=='";
        case Token::Kind::CmpNe: return "'!='";
        case Token::Kind::End: return "end of input";
    }
    return "?";
}

} // namespace netobs::measure
