#include "tilesmith/rational.hpp"

#include <limits>
#include <ostream>

namespace tilesmith {

namespace {

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

__int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t narrow(__int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min()) {
        throw OverflowError(what);
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

Rat Rat::make(__int128 num, __int128 den) {
    if (den == 0) throw InputError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) return Rat();
    __int128 g = gcd128(num, den);
    num /= g;
    den /= g;
    Rat r;
    r.p_ = narrow(num, "rational numerator overflow");
    r.q_ = narrow(den, "rational denominator overflow");
    return r;
}

Rat::Rat(std::int64_t num, std::int64_t den) { *this = make(num, den); }

Rat Rat::operator-() const {
    if (p_ == std::numeric_limits<std::int64_t>::min()) throw OverflowError("negate overflow");
    Rat r;
    r.p_ = -p_;
    r.q_ = q_;
    return r;
}

Rat Rat::operator+(const Rat& o) const {
    __int128 num = static_cast<__int128>(p_) * o.q_ + static_cast<__int128>(o.p_) * q_;
    __int128 den = static_cast<__int128>(q_) * o.q_;
    return make(num, den);
}

Rat Rat::operator-(const Rat& o) const {
    __int128 num = static_cast<__int128>(p_) * o.q_ - static_cast<__int128>(o.p_) * q_;
    __int128 den = static_cast<__int128>(q_) * o.q_;
    return make(num, den);
}

Rat Rat::operator*(const Rat& o) const {
    return make(static_cast<__int128>(p_) * o.p_, static_cast<__int128>(q_) * o.q_);
}

Rat Rat::operator/(const Rat& o) const {
    if (o.p_ == 0) throw InputError("division by zero rational");
    return make(static_cast<__int128>(p_) * o.q_, static_cast<__int128>(q_) * o.p_);
}

bool Rat::operator<(const Rat& o) const {
    return static_cast<__int128>(p_) * o.q_ < static_cast<__int128>(o.p_) * q_;
}

std::string Rat::str() const {
    std::string s = std::to_string(p_);
    if (q_ != 1) {
        s += '/';
        s += std::to_string(q_);
    }
    return s;
}

Rat Rat::parse(const std::string& text) {
    if (text.empty()) throw InputError("empty rational literal");
    std::size_t slash = text.find('/');
    try {
        std::size_t used = 0;
        std::int64_t num = std::stoll(text.substr(0, slash), &used);
        if (used != (slash == std::string::npos ? text.size() : slash)) {
            throw InputError("bad rational literal: " + text);
        }
        std::int64_t den = 1;
        if (slash != std::string::npos) {
            std::string den_text = text.substr(slash + 1);
            den = std::stoll(den_text, &used);
            if (used != den_text.size()) throw InputError("bad rational literal: " + text);
        }
        return Rat(num, den);
    } catch (const std::invalid_argument&) {
        throw InputError("bad rational literal: " + text);
    } catch (const std::out_of_range&) {
        throw OverflowError("rational literal out of range: " + text);
    }
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace tilesmith
