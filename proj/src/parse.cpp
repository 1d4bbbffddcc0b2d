#include "potsys/parse.hpp"

#include <algorithm>
#include <cctype>

namespace potsys {

namespace {

struct Pos {
    int line = 1, col = 1;
};

[[noreturn]] void parseFail(const Pos& p, const std::string& msg) {
    fail(Error::Kind::Input,
         std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg);
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

enum class Tok { End, Ident, Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma };

struct ExprLexer {
    const std::string& src;
    size_t i = 0;
    Pos pos;

    Tok kind = Tok::End;
    std::string text;
    Pos tokPos;

    explicit ExprLexer(const std::string& s) : src(s) { next(); }

    /// True when the character after the current token starts a number
    /// (used to keep `^p/q` exponents from swallowing a following division).
    bool upcomingNumber() const {
        size_t j = i;
        while (j < src.size() && std::isspace(static_cast<unsigned char>(src[j]))) ++j;
        return j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]));
    }

    void advance() {
        if (src[i] == '\n') {
            pos.line++;
            pos.col = 1;
        } else {
            pos.col++;
        }
        ++i;
    }

    void next() {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) advance();
        tokPos = pos;
        text.clear();
        if (i >= src.size()) {
            kind = Tok::End;
            return;
        }
        char c = src[i];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                text += src[i];
                advance();
            }
            kind = Tok::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                text += src[i];
                advance();
            }
            kind = Tok::Number;
            return;
        }
        advance();
        switch (c) {
        case '+': kind = Tok::Plus; return;
        case '-': kind = Tok::Minus; return;
        case '*': kind = Tok::Star; return;
        case '/': kind = Tok::Slash; return;
        case '^': kind = Tok::Caret; return;
        case '(': kind = Tok::LParen; return;
        case ')': kind = Tok::RParen; return;
        case ',': kind = Tok::Comma; return;
        default:
            parseFail(tokPos, std::string("unexpected character '") + c + "'");
        }
    }
};

class ExprParser {
public:
    ExprParser(const std::string& text, const SymbolTable& table)
        : lex_(text), table_(table) {}

    Expr parse() {
        Expr e = parseSum();
        if (lex_.kind != Tok::End)
            parseFail(lex_.tokPos, "unexpected trailing input, expected end of expression");
        return e;
    }

private:
    ExprLexer lex_;
    const SymbolTable& table_;

    void expect(Tok k, const char* what) {
        if (lex_.kind != k) parseFail(lex_.tokPos, std::string("expected ") + what);
        lex_.next();
    }

    Expr parseSum() {
        bool neg = false;
        if (lex_.kind == Tok::Minus) {
            neg = true;
            lex_.next();
        } else if (lex_.kind == Tok::Plus) {
            lex_.next();
        }
        Expr e = parseProduct();
        if (neg) e = -e;
        while (lex_.kind == Tok::Plus || lex_.kind == Tok::Minus) {
            bool minus = lex_.kind == Tok::Minus;
            lex_.next();
            Expr rhs = parseProduct();
            e = minus ? e - rhs : e + rhs;
        }
        return e;
    }

    Expr parseProduct() {
        Expr e = parsePower();
        while (lex_.kind == Tok::Star || lex_.kind == Tok::Slash) {
            bool div = lex_.kind == Tok::Slash;
            Pos opPos = lex_.tokPos;
            lex_.next();
            Expr rhs = parsePower();
            if (div && rhs.isZero()) parseFail(opPos, "division by zero");
            e = div ? e / rhs : e * rhs;
        }
        return e;
    }

    Expr parsePower() {
        Expr base = parseAtom();
        if (lex_.kind != Tok::Caret) return base;
        Pos caretPos = lex_.tokPos;
        lex_.next();
        Expr exponent = parseExponent();
        auto r = exponent.rationalValue();
        if (!r)
            parseFail(caretPos, "exponent must be a rational constant");
        return powRat(base, *r);
    }

    // exponent: number, -number, or a parenthesized sum (right-associative
    // towers like x^2^3 are not part of the grammar)
    Expr parseExponent() {
        if (lex_.kind == Tok::Minus) {
            lex_.next();
            return -parseExponent();
        }
        if (lex_.kind == Tok::Number) {
            Expr e(Rational(Integer(lex_.text)));
            lex_.next();
            if (lex_.kind == Tok::Slash && lex_.upcomingNumber()) {
                lex_.next();
                if (lex_.kind != Tok::Number)
                    parseFail(lex_.tokPos, "expected integer after '/' in exponent");
                Expr d(Rational(Integer(lex_.text)));
                lex_.next();
                return e / d;
            }
            return e;
        }
        if (lex_.kind == Tok::LParen) {
            lex_.next();
            Expr e = parseSum();
            expect(Tok::RParen, "')'");
            return e;
        }
        parseFail(lex_.tokPos, "expected a rational exponent");
    }

    Expr parseAtom() {
        Pos p = lex_.tokPos;
        switch (lex_.kind) {
        case Tok::Number: {
            Expr e(Rational(Integer(lex_.text)));
            lex_.next();
            return e;
        }
        case Tok::LParen: {
            lex_.next();
            Expr e = parseSum();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Minus: {
            lex_.next();
            return -parseAtom();
        }
        case Tok::Ident: {
            std::string name = lex_.text;
            lex_.next();
            if (lex_.kind == Tok::LParen) return parseCall(name, p);
            return resolveSymbol(name, p);
        }
        default:
            parseFail(p, "expected an expression");
        }
    }

    std::vector<Expr> parseArgs() {
        expect(Tok::LParen, "'('");
        std::vector<Expr> args;
        args.push_back(parseSum());
        while (lex_.kind == Tok::Comma) {
            lex_.next();
            args.push_back(parseSum());
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    Expr parseCall(const std::string& name, const Pos& p) {
        if (name == "exp" || name == "sin" || name == "cos" || name == "arctan" ||
            name == "sqrt") {
            auto args = parseArgs();
            if (args.size() != 1)
                parseFail(p, name + " takes exactly one argument");
            if (name == "exp") return makeExp(args[0]);
            if (name == "sin") return makeSin(args[0]);
            if (name == "cos") return makeCos(args[0]);
            if (name == "arctan") return makeArctan(args[0]);
            return powRat(args[0], Rational(1, 2));
        }
        if (name == "Diff" || name == "Int") return parseFormalOp(name, p);
        auto fd = table_.functions.find(name);
        if (fd == table_.functions.end())
            parseFail(p, "call of undeclared function " + name);
        auto args = parseArgs();
        if (args.size() != fd->second.formals.size())
            parseFail(p, name + " expects " +
                             std::to_string(fd->second.formals.size()) + " argument(s)");
        return makeFunc(name, std::move(args), {});
    }

    // Diff(A, u, u, ...) / Int(A, u): first argument is a declared function
    // name, the rest are formal-argument names.
    Expr parseFormalOp(const std::string& op, const Pos& p) {
        expect(Tok::LParen, "'('");
        if (lex_.kind != Tok::Ident)
            parseFail(lex_.tokPos, op + " expects a function name");
        std::string fname = lex_.text;
        auto fd = table_.functions.find(fname);
        if (fd == table_.functions.end())
            parseFail(lex_.tokPos, op + " of undeclared function " + fname);
        lex_.next();
        std::vector<std::string> vars;
        while (lex_.kind == Tok::Comma) {
            lex_.next();
            if (lex_.kind != Tok::Ident)
                parseFail(lex_.tokPos, "expected a variable name");
            vars.push_back(lex_.text);
            lex_.next();
        }
        expect(Tok::RParen, "')'");
        const auto& formals = fd->second.formals;
        if (op == "Int") {
            if (vars.size() != 1 || formals.size() != 1 || vars[0] != formals[0])
                parseFail(p, "Int(" + fname +
                                 ",v) requires the single formal argument of " + fname);
            return makeAntiDeriv(fname, vars[0]);
        }
        if (vars.empty()) parseFail(p, "Diff needs at least one differentiation variable");
        std::vector<int> dord(formals.size(), 0);
        for (const auto& v : vars) {
            auto it = std::find(formals.begin(), formals.end(), v);
            if (it == formals.end())
                parseFail(p, v + " is not a formal argument of " + fname);
            dord[static_cast<size_t>(it - formals.begin())]++;
        }
        std::vector<Expr> args;
        for (const auto& f : formals) args.push_back(resolveSymbol(f, p));
        return makeFunc(fname, std::move(args), std::move(dord));
    }

    Expr resolveSymbol(const std::string& name, const Pos& p) {
        if (table_.symbols.count(name)) return Expr::symbol(name);
        if (parseJetName(name, table_.jets)) return Expr::symbol(name);
        auto fd = table_.functions.find(name);
        if (fd != table_.functions.end()) {
            // bare function name: apply to its declared formals
            std::vector<Expr> args;
            for (const auto& f : fd->second.formals) args.push_back(resolveSymbol(f, p));
            return makeFunc(name, std::move(args), {});
        }
        parseFail(p, "undeclared symbol " + name);
    }
};

} // namespace

Expr parse_expression(const std::string& text, const SymbolTable& table) {
    return ExprParser(text, table).parse();
}

// ---------------------------------------------------------------------------
// Document parser
// ---------------------------------------------------------------------------

const DocValue* DocBlock::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v.get();
    return nullptr;
}

std::vector<const DocValue*> DocBlock::findAll(const std::string& key) const {
    std::vector<const DocValue*> out;
    for (const auto& [k, v] : entries)
        if (k == key) out.push_back(v.get());
    return out;
}

namespace {

[[noreturn]] void docFail(const DocValue& v, const std::string& msg) {
    fail(Error::Kind::Input,
         std::to_string(v.line) + ":" + std::to_string(v.col) + ": " + msg);
}

} // namespace

const std::string& DocValue::asString() const {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    docFail(*this, "expected a quoted string");
}

long DocValue::asInt() const {
    if (auto* n = std::get_if<long>(&v)) return *n;
    docFail(*this, "expected an integer");
}

bool DocValue::asBool() const {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    docFail(*this, "expected true or false");
}

const std::vector<DocValuePtr>& DocValue::asList() const {
    if (auto* l = std::get_if<std::vector<DocValuePtr>>(&v)) return *l;
    docFail(*this, "expected a list");
}

const DocBlock& DocValue::asBlock() const {
    if (auto* b = std::get_if<DocBlock>(&v)) return *b;
    docFail(*this, "expected a { ... } block");
}

namespace {

struct DocLexer {
    const std::string& src;
    size_t i = 0;
    Pos pos;

    enum class K { End, Ident, String, Number, Assign, LBrace, RBrace, LBracket, RBracket, Comma };
    K kind = K::End;
    std::string text;
    Pos tokPos;

    explicit DocLexer(const std::string& s) : src(s) { next(); }

    void advance() {
        if (src[i] == '\n') {
            pos.line++;
            pos.col = 1;
        } else {
            pos.col++;
        }
        ++i;
    }

    void next() {
        for (;;) {
            while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) advance();
            if (i < src.size() && src[i] == '#') {
                while (i < src.size() && src[i] != '\n') advance();
                continue;
            }
            break;
        }
        tokPos = pos;
        text.clear();
        if (i >= src.size()) {
            kind = K::End;
            return;
        }
        char c = src[i];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                text += src[i];
                advance();
            }
            kind = K::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            text += src[i];
            advance();
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                text += src[i];
                advance();
            }
            kind = K::Number;
            return;
        }
        if (c == '"') {
            advance();
            while (i < src.size() && src[i] != '"') {
                if (src[i] == '\n') parseFail(tokPos, "unterminated string");
                text += src[i];
                advance();
            }
            if (i >= src.size()) parseFail(tokPos, "unterminated string");
            advance();
            kind = K::String;
            return;
        }
        advance();
        switch (c) {
        case '=': kind = K::Assign; return;
        case '{': kind = K::LBrace; return;
        case '}': kind = K::RBrace; return;
        case '[': kind = K::LBracket; return;
        case ']': kind = K::RBracket; return;
        case ',': kind = K::Comma; return;
        default:
            parseFail(tokPos, std::string("unexpected character '") + c + "'");
        }
    }
};

class DocParser {
public:
    explicit DocParser(const std::string& text) : lex_(text) {}

    DocBlock parse() {
        DocBlock top = parseEntries();
        if (lex_.kind != DocLexer::K::End)
            parseFail(lex_.tokPos, "unexpected '}' at top level");
        return top;
    }

private:
    DocLexer lex_;

    DocBlock parseEntries() {
        DocBlock b;
        b.line = lex_.tokPos.line;
        b.col = lex_.tokPos.col;
        while (lex_.kind == DocLexer::K::Ident) {
            std::string key = lex_.text;
            lex_.next();
            DocValuePtr val;
            if (lex_.kind == DocLexer::K::Assign) {
                lex_.next();
                val = parseValue();
            } else if (lex_.kind == DocLexer::K::LBrace) {
                val = parseBlockValue();
            } else {
                parseFail(lex_.tokPos, "expected '=' or '{' after key " + key);
            }
            b.entries.emplace_back(std::move(key), std::move(val));
            if (lex_.kind == DocLexer::K::Comma) lex_.next();
        }
        return b;
    }

    DocValuePtr parseBlockValue() {
        auto v = std::make_shared<DocValue>();
        v->line = lex_.tokPos.line;
        v->col = lex_.tokPos.col;
        lex_.next(); // '{'
        v->v = parseEntries();
        if (lex_.kind != DocLexer::K::RBrace) parseFail(lex_.tokPos, "expected '}'");
        lex_.next();
        return v;
    }

    DocValuePtr parseValue() {
        auto v = std::make_shared<DocValue>();
        v->line = lex_.tokPos.line;
        v->col = lex_.tokPos.col;
        switch (lex_.kind) {
        case DocLexer::K::String:
            v->v = lex_.text;
            lex_.next();
            return v;
        case DocLexer::K::Number:
            v->v = std::stol(lex_.text);
            lex_.next();
            return v;
        case DocLexer::K::Ident:
            if (lex_.text == "true" || lex_.text == "false") {
                v->v = lex_.text == "true";
                lex_.next();
                return v;
            }
            parseFail(lex_.tokPos, "expected a value, got identifier " + lex_.text);
        case DocLexer::K::LBracket: {
            lex_.next();
            std::vector<DocValuePtr> items;
            while (lex_.kind != DocLexer::K::RBracket) {
                items.push_back(parseValue());
                if (lex_.kind == DocLexer::K::Comma) lex_.next();
            }
            lex_.next();
            v->v = std::move(items);
            return v;
        }
        case DocLexer::K::LBrace:
            return parseBlockValue();
        default:
            parseFail(lex_.tokPos, "expected a value");
        }
    }
};

} // namespace

DocBlock parse_document(const std::string& text) { return DocParser(text).parse(); }

namespace {

void printValue(std::ostream& os, const DocValue& v, int indent);

void printEntries(std::ostream& os, const DocBlock& b, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    for (const auto& [key, val] : b.entries) {
        os << pad << key;
        if (std::holds_alternative<DocBlock>(val->v)) {
            os << " {\n";
            printEntries(os, val->asBlock(), indent + 1);
            os << pad << "}\n";
        } else {
            os << " = ";
            printValue(os, *val, indent);
            os << "\n";
        }
    }
}

void printValue(std::ostream& os, const DocValue& v, int indent) {
    if (std::holds_alternative<std::string>(v.v)) {
        os << '"' << std::get<std::string>(v.v) << '"';
    } else if (std::holds_alternative<long>(v.v)) {
        os << std::get<long>(v.v);
    } else if (std::holds_alternative<bool>(v.v)) {
        os << (std::get<bool>(v.v) ? "true" : "false");
    } else if (std::holds_alternative<std::vector<DocValuePtr>>(v.v)) {
        os << "[";
        const auto& items = std::get<std::vector<DocValuePtr>>(v.v);
        for (size_t i = 0; i < items.size(); ++i) {
            if (i) os << ", ";
            printValue(os, *items[i], indent);
        }
        os << "]";
    } else {
        os << "{\n";
        printEntries(os, v.asBlock(), indent + 1);
        os << std::string(static_cast<size_t>(indent) * 2, ' ') << "}";
    }
}

} // namespace

std::string print_document(const DocBlock& doc) {
    std::ostringstream os;
    printEntries(os, doc, 0);
    return os.str();
}

} // namespace potsys
