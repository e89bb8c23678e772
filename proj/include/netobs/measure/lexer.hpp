#pragma once

#include <string>
#include <vector>

#include "netobs/measure/ast.hpp"

namespace netobs::measure {

struct Token {
    enum class Kind {
        Ident,
        Number,    // 10.0, -3
        Percent,   // 90%  (number holds 90)
        String,    // '...' or "..."
        Duration,  // 30s, 10ms (number holds seconds)
        LBrace, RBrace, LParen, RParen,
        Comma, Semi, Colon, Assign, Arrow, Dot,
        CmpLt, CmpGt, CmpLe, CmpGe, CmpEq, CmpNe,
        End,
    };
    Kind kind;
    std::string text;
    double number = 0;
    SourcePos pos;
};

/// Tokenize MEASURE source. `#` comments run to end of line.
std::vector<Token> lex(const std::string& text);

const char* token_name(Token::Kind k);

} // namespace netobs::measure
