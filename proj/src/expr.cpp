#include "ecgra/expr.hpp"

#include <cctype>
#include <functional>
#include <vector>

namespace ecgra {

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    const ExprEnv& env;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("expression '" + s + "' at " + std::to_string(pos) + ": " + msg);
    }

    int64_t parse() {
        int64_t v = sum();
        skip();
        if (pos != s.size()) fail("trailing input");
        return v;
    }

    int64_t sum() {
        int64_t v = product();
        for (;;) {
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }

    int64_t product() {
        int64_t v = unary();
        for (;;) {
            skip();
            if (eat('*')) v *= unary();
            else if (eat('/')) {
                int64_t d = unary();
                if (d == 0) fail("division by zero");
                // floor division
                int64_t q = v / d;
                if ((v % d != 0) && ((v < 0) != (d < 0))) --q;
                v = q;
            } else if (eat('%')) {
                int64_t d = unary();
                if (d == 0) fail("modulo by zero");
                int64_t m = v % d;
                if (m != 0 && ((m < 0) != (d < 0))) m += d;
                v = m;
            } else
                return v;
        }
    }

    int64_t unary() {
        skip();
        if (eat('-')) return -unary();
        return atom();
    }

    int64_t atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        if (eat('(')) {
            int64_t v = sum();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            if (s.compare(pos, 2, "0x") == 0 || s.compare(pos, 2, "0X") == 0) {
                pos += 2;
                while (pos < s.size() && std::isxdigit(static_cast<unsigned char>(s[pos])))
                    ++pos;
                return std::stoll(s.substr(start + 2, pos - start - 2), nullptr, 16);
            }
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            return std::stoll(s.substr(start, pos - start));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            skip();
            if (pos < s.size() && s[pos] == '(') {
                ++pos;
                std::vector<int64_t> args;
                if (!eat(')')) {
                    args.push_back(sum());
                    while (eat(',')) args.push_back(sum());
                    if (!eat(')')) fail("expected ')'");
                }
                if (name == "min" && args.size() == 2) return std::min(args[0], args[1]);
                if (name == "max" && args.size() == 2) return std::max(args[0], args[1]);
                if (name == "ceil_div" && args.size() == 2) {
                    if (args[1] == 0) fail("ceil_div by zero");
                    return (args[0] + args[1] - 1) / args[1];
                }
                if (name == "lt" && args.size() == 2) return args[0] < args[1] ? 1 : 0;
                fail("unknown function '" + name + "'");
            }
            auto it = env.find(name);
            if (it == env.end()) fail("unknown identifier '" + name + "'");
            return it->second;
        }
        fail("unexpected character");
    }
};

} // namespace

int64_t eval_expr(const std::string& text, const ExprEnv& env) {
    Parser p{text, 0, env};
    return p.parse();
}

} // namespace ecgra
