#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "cqbm/error.hpp"

namespace cqbm {

// Compare a Rational against Rational(k), never against a bare integer:
// with C++20 rewritten comparison candidates boost's mixed rational/int
// operators call each other without end.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    if (r.denominator() == 1)
        os << r.numerator();
    else
        os << r.numerator() << '/' << r.denominator();
    return os.str();
}

/// Parses "3", "-3/2" or a finite decimal such as "0.25" into an exact fraction.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw Error("not an exact rational: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();

    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) fail();
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) fail();
        std::int64_t v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') fail();
            if (v > (INT64_MAX - 9) / 10) fail();
            v = v * 10 + (s[i] - '0');
        }
        return neg ? -v : v;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto den = parse_int(text.substr(slash + 1));
        if (den == 0) fail();
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto frac = text.substr(dot + 1);
        if (frac.size() > 15) fail();
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        auto whole_text = text.substr(0, dot);
        bool neg = !whole_text.empty() && whole_text[0] == '-';
        std::int64_t whole = (whole_text.empty() || whole_text == "-" || whole_text == "+")
                                 ? 0
                                 : parse_int(whole_text);
        std::int64_t f = frac.empty() ? 0 : parse_int(frac);
        Rational r(whole < 0 ? -whole : whole);
        r += Rational(f, scale);
        return neg ? -r : r;
    }
    return Rational(parse_int(text));
}

}  // namespace cqbm
