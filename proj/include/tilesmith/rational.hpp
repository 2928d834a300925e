#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace tilesmith {

// Thrown when an exact computation would leave the representable range.
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed input (bad literals, invalid polygons, bad JSON, ...).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Exact rational number p/q with int64 components, always normalized:
// gcd(p,q) == 1 and q > 0. Intermediate products use 128-bit arithmetic;
// results that do not fit back into int64 raise OverflowError.
class Rat {
public:
    Rat() : p_(0), q_(1) {}
    Rat(std::int64_t value) : p_(value), q_(1) {}  // NOLINT(google-explicit-constructor)
    Rat(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return p_; }
    std::int64_t den() const { return q_; }

    bool is_zero() const { return p_ == 0; }
    bool is_integer() const { return q_ == 1; }
    int sign() const { return p_ > 0 ? 1 : (p_ < 0 ? -1 : 0); }

    Rat operator-() const;
    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    bool operator==(const Rat& o) const { return p_ == o.p_ && q_ == o.q_; }
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const;
    bool operator>(const Rat& o) const { return o < *this; }
    bool operator<=(const Rat& o) const { return !(o < *this); }
    bool operator>=(const Rat& o) const { return !(*this < o); }

    Rat abs() const { return p_ < 0 ? -*this : *this; }

    // Serialized as "p/q" ("p" accepted on input when q == 1).
    std::string str() const;
    static Rat parse(const std::string& text);

private:
    static Rat make(__int128 num, __int128 den);
    std::int64_t p_;
    std::int64_t q_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace tilesmith
