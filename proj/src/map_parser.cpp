#include "conf/map_parser.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace conf {

namespace {

std::string diagnostic(const std::string& message, const std::string& expr, std::size_t pos) {
    std::ostringstream os;
    os << "map expression error at position " << pos << ": " << message << "\n  " << expr
       << "\n  " << std::string(pos, ' ') << "^";
    return os.str();
}

class Parser {
public:
    explicit Parser(std::string expr) : s_(std::move(expr)) {}

    AngleMap parse() {
        AngleMap m = expression();
        skip_space();
        if (pos_ != s_.size()) fail("unexpected trailing characters");
        return m;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }
    [[noreturn]] void fail_at(std::size_t pos, const std::string& message) const {
        throw MapParseError(diagnostic(message, s_, pos), pos);
    }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek_is(char c) {
        skip_space();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    void expect(char c) {
        if (!peek_is(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string identifier() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected a map name");
        return s_.substr(start, pos_ - start);
    }

    double number() {
        skip_space();
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    // <re>+<im>i, <re>-<im>i, or a bare real
    cplx complex_number() {
        const double re = number();
        skip_space();
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
            const double im = number();  // strtod consumes the sign
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] != 'i') fail("expected 'i' after the imaginary part");
            ++pos_;
            return {re, im};
        }
        return {re, 0.0};
    }

    AngleMap expression() {
        skip_space();
        const std::size_t name_pos = pos_;
        const std::string name = identifier();
        if (name == "identity") return AngleMap::identity();
        if (name == "square") return AngleMap::square();
        if (name == "mobius") return mobius_args();
        if (name == "pwl") {
            expect(':');
            skip_space();
            const std::size_t key_pos = pos_;
            if (identifier() != "lambda") fail_at(key_pos, "pwl takes a single key 'lambda'");
            expect('=');
            return AngleMap::pwl(number());
        }
        if (name == "table") {
            expect(':');
            return table_map();
        }
        if (name == "inv") {
            expect('(');
            AngleMap inner = expression();
            expect(')');
            return inner.inverse();
        }
        if (name == "comp") {
            expect('(');
            AngleMap outer = expression();
            expect(',');
            AngleMap inner = expression();
            expect(')');
            return AngleMap::compose(std::move(outer), std::move(inner));
        }
        fail_at(name_pos, "unknown map name '" + name + "'");
    }

    AngleMap mobius_args() {
        expect(':');
        cplx a{0.0, 0.0};
        double rot = 0.0;
        bool have_a = false;
        while (true) {
            skip_space();
            const std::size_t key_pos = pos_;
            if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_]))) break;
            const std::string key = identifier();
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] != '=') {
                // not a key=value; belongs to the enclosing expression
                pos_ = key_pos;
                break;
            }
            ++pos_;
            if (key == "a") {
                a = complex_number();
                have_a = true;
            } else if (key == "rot") {
                rot = number();
            } else {
                fail_at(key_pos, "mobius takes keys 'a' and 'rot', not '" + key + "'");
            }
            if (peek_is(',')) {
                // a trailing map name after the comma ends the argument list
                const std::size_t comma = pos_;
                ++pos_;
                skip_space();
                if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
                    pos_ = comma;
                    break;
                }
                const std::size_t probe = pos_;
                identifier();
                skip_space();
                const bool key_value = pos_ < s_.size() && s_[pos_] == '=';
                pos_ = key_value ? probe : comma;
                if (!key_value) break;
            } else {
                break;
            }
        }
        if (!have_a) fail("mobius needs a=<re>+<im>i");
        return AngleMap::moebius(a, rot);
    }

    AngleMap table_map() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected a file path");
        const std::string path = s_.substr(start, pos_ - start);
        std::ifstream in(path);
        if (!in) throw std::runtime_error("table: cannot open '" + path + "'");
        std::vector<double> t, theta;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream row(line);
            double x = 0.0, y = 0.0;
            char comma = 0;
            if (!(row >> x >> comma >> y) || comma != ',') {
                if (lineno == 1) continue;  // tolerate a header row
                throw std::runtime_error("table: '" + path + "' line " +
                                         std::to_string(lineno) + " is not 't,theta'");
            }
            t.push_back(x);
            theta.push_back(y);
        }
        return AngleMap::tabulated(std::move(t), std::move(theta));
    }

    std::string s_;
    std::size_t pos_ = 0;
};

}  // namespace

MapParseError::MapParseError(const std::string& message, std::size_t pos)
    : std::invalid_argument(message), position(pos) {}

AngleMap parse_map(const std::string& expr) { return Parser(expr).parse(); }

}  // namespace conf
