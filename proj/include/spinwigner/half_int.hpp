#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

namespace spinwigner {

// Angular-momentum label j, m, k or q. Stored as twice the value so that
// integer and half-integer spins share one exact, hashable representation.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr HalfInt(int integer_value) : twice_(2 * integer_value) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static constexpr HalfInt half() { return from_twice(1); }

  constexpr int twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  constexpr double value() const { return 0.5 * twice_; }

  // Exact integer part of an expression known to be a whole number
  // (e.g. j - m); throws if it is not.
  constexpr int to_int() const {
    if (twice_ % 2 != 0) throw std::invalid_argument("HalfInt: not an integer");
    return twice_ / 2;
  }

  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt abs() const { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

// (-1)^e for a HalfInt exponent that must be a whole number.
inline int parity_phase(HalfInt e) {
  const int n = e.to_int();
  return (n % 2 == 0) ? 1 : -1;
}

}  // namespace spinwigner

template <>
struct std::hash<spinwigner::HalfInt> {
  size_t operator()(const spinwigner::HalfInt& h) const noexcept {
    return std::hash<int>{}(h.twice());
  }
};
