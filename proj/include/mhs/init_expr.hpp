// init_expr.hpp — the initial-condition mini-language.
//
// Grammar (whitespace-insensitive):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := number ['*'] func | number | func
//   func   := ('sin'|'cos') '(' integer ['*'] 'pi' ['*'] 'x' ')'
//
// The integer inside a trig factor must be even: sin(2k*pi*x) is the
// k-th harmonic of the unit circle; odd multiples of pi are not
// 1-periodic and are rejected. Terms are merged per (kind, harmonic),
// exact zeros dropped, and the canonical serialization lists the
// constant first, then harmonics in increasing order with cos before sin.

#pragma once

#include "mhs/format.hpp"
#include "mhs/spectral_field.hpp"

#include <charconv>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mhs {

struct ParseError : std::invalid_argument {
    ParseError(std::size_t offset_, const std::string& what_)
        : std::invalid_argument("parse error at byte " + std::to_string(offset_) + ": " + what_),
          offset(offset_) {}
    std::size_t offset;
};

struct InitTerm {
    enum class Kind { Const, Sin, Cos };
    Kind kind = Kind::Const;
    double amplitude = 0.0;
    int harmonic = 0; // >= 1 for sin/cos, 0 for const
};

struct InitExpr {
    std::vector<InitTerm> terms; // normalized, canonical order
};

namespace detail {

inline constexpr double kAmplitudeCap = 1e6;

class InitParser {
public:
    explicit InitParser(std::string_view text) : s_(text) {}

    InitExpr parse() {
        std::map<std::pair<int, int>, double> acc; // (harmonic, kind-rank) -> amplitude
        skip_ws();
        if (at_end()) throw ParseError(pos_, "empty expression");
        bool first = true;
        while (true) {
            skip_ws();
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') {
                sign = (peek() == '-') ? -1.0 : 1.0;
                ++pos_;
            } else if (!first) {
                throw ParseError(pos_, "expected '+' or '-' between terms");
            }
            InitTerm t = parse_term();
            t.amplitude *= sign;
            if (std::abs(t.amplitude) > kAmplitudeCap)
                throw ParseError(pos_, "amplitude overflow (|a| > 1e6)");
            acc[{t.harmonic, rank(t.kind)}] += t.amplitude;
            first = false;
            skip_ws();
            if (at_end()) break;
            if (peek() != '+' && peek() != '-')
                throw ParseError(pos_, std::string("unexpected character '") + peek() + "'");
        }
        InitExpr e;
        for (const auto& [key, a] : acc) {
            if (a == 0.0) continue;
            if (std::abs(a) > kAmplitudeCap) throw ParseError(pos_, "amplitude overflow after merging");
            InitTerm t;
            t.harmonic = key.first;
            t.kind = key.second == 0 ? InitTerm::Kind::Const
                                     : (key.second == 1 ? InitTerm::Kind::Cos : InitTerm::Kind::Sin);
            t.amplitude = a;
            e.terms.push_back(t);
        }
        return e;
    }

private:
    static int rank(InitTerm::Kind k) {
        switch (k) {
            case InitTerm::Kind::Const: return 0;
            case InitTerm::Kind::Cos: return 1;
            case InitTerm::Kind::Sin: return 2;
        }
        return 0;
    }

    InitTerm parse_term() {
        skip_ws();
        if (at_end()) throw ParseError(pos_, "expected a term");
        const char c = peek();
        if (c == 's' || c == 'c') {
            return parse_func(1.0);
        }
        const double a = parse_number();
        skip_ws();
        if (!at_end() && peek() == '*') {
            ++pos_;
            skip_ws();
            return parse_func(a);
        }
        if (!at_end() && (peek() == 's' || peek() == 'c')) return parse_func(a);
        InitTerm t;
        t.kind = InitTerm::Kind::Const;
        t.amplitude = a;
        t.harmonic = 0;
        return t;
    }

    InitTerm parse_func(double amplitude) {
        skip_ws();
        InitTerm t;
        t.amplitude = amplitude;
        if (consume("sin")) {
            t.kind = InitTerm::Kind::Sin;
        } else if (consume("cos")) {
            t.kind = InitTerm::Kind::Cos;
        } else {
            throw ParseError(pos_, "expected 'sin' or 'cos'");
        }
        expect('(');
        skip_ws();
        const std::size_t int_pos = pos_;
        const long m = parse_integer();
        if (m <= 0) throw ParseError(int_pos, "pi multiple must be a positive integer");
        if (m % 2 != 0) throw ParseError(int_pos, "odd multiple of pi is not 1-periodic");
        if (m / 2 > 1000000) throw ParseError(int_pos, "harmonic overflow");
        t.harmonic = int(m / 2);
        skip_ws();
        if (!at_end() && peek() == '*') ++pos_;
        if (!consume("pi")) throw ParseError(pos_, "expected 'pi'");
        skip_ws();
        if (!at_end() && peek() == '*') ++pos_;
        skip_ws();
        if (at_end() || peek() != 'x') throw ParseError(pos_, "expected 'x'");
        ++pos_;
        expect(')');
        return t;
    }

    double parse_number() {
        skip_ws();
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        double value = 0.0;
        auto res = std::from_chars(begin, end, value);
        if (res.ec != std::errc{} || res.ptr == begin)
            throw ParseError(pos_, "expected a number");
        pos_ += std::size_t(res.ptr - begin);
        return value;
    }

    long parse_integer() {
        skip_ws();
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        long value = 0;
        auto res = std::from_chars(begin, end, value);
        if (res.ec != std::errc{} || res.ptr == begin)
            throw ParseError(pos_, "expected an integer");
        pos_ += std::size_t(res.ptr - begin);
        return value;
    }

    bool consume(std::string_view word) {
        skip_ws();
        if (s_.substr(pos_, word.size()) == word) {
            pos_ += word.size();
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (at_end() || peek() != c)
            throw ParseError(pos_, std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline InitExpr parse_init(std::string_view text) { return detail::InitParser(text).parse(); }

/// Canonical string form; parse(serialize(parse(t))) == parse(t).
inline std::string serialize(const InitExpr& e) {
    if (e.terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const InitTerm& t : e.terms) {
        const double a = t.amplitude;
        if (first) {
            if (a < 0) out += "-";
        } else {
            out += (a < 0) ? " - " : " + ";
        }
        first = false;
        const double mag = std::abs(a);
        switch (t.kind) {
            case InitTerm::Kind::Const:
                out += format_double(mag);
                break;
            case InitTerm::Kind::Cos:
                if (mag != 1.0) out += format_double(mag) + "*";
                out += "cos(" + std::to_string(2 * t.harmonic) + "*pi*x)";
                break;
            case InitTerm::Kind::Sin:
                if (mag != 1.0) out += format_double(mag) + "*";
                out += "sin(" + std::to_string(2 * t.harmonic) + "*pi*x)";
                break;
        }
    }
    return out;
}

/// Exact coefficient placement: cos k -> 1/2 at +-k, sin k -> -+ i/2,
/// const -> mode 0. Harmonics above N/3 have no dealias headroom and are
/// rejected.
inline SpectralField realize(const InitExpr& e, int n_modes) {
    SpectralField f(n_modes);
    const int cut = dealias_cutoff(n_modes);
    for (const InitTerm& t : e.terms) {
        switch (t.kind) {
            case InitTerm::Kind::Const:
                f.set_coeff(0, f.coeff(0) + cplx{t.amplitude, 0.0});
                break;
            case InitTerm::Kind::Cos:
            case InitTerm::Kind::Sin: {
                if (t.harmonic > cut)
                    throw std::invalid_argument("realize: harmonic " + std::to_string(t.harmonic) +
                                                " exceeds dealias headroom N/3 = " + std::to_string(cut));
                const cplx add = (t.kind == InitTerm::Kind::Cos)
                                     ? cplx{0.5 * t.amplitude, 0.0}
                                     : cplx{0.0, -0.5 * t.amplitude};
                f.set_coeff(t.harmonic, f.coeff(t.harmonic) + add);
                break;
            }
        }
    }
    return f;
}

} // namespace mhs
