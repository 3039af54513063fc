#ifndef QEXPLAIN_DEGREE_HPP
#define QEXPLAIN_DEGREE_HPP

#include <compare>
#include <cstddef>
#include <ostream>
#include <string>

namespace qexplain {

/// Exact degree value: either 0 or 1/n for a positive integer n.
/// Necessity, sufficiency and responsibility degrees all take this form.
class Degree {
public:
  constexpr Degree() = default;

  static constexpr Degree zero() { return Degree(); }
  static constexpr Degree inverse_of(std::size_t n) { return n == 0 ? Degree() : Degree(n); }

  constexpr std::size_t numerator() const noexcept { return den_ ? 1 : 0; }
  constexpr std::size_t denominator() const noexcept { return den_ ? den_ : 1; }
  constexpr bool is_zero() const noexcept { return den_ == 0; }
  double value() const noexcept { return den_ ? 1.0 / static_cast<double>(den_) : 0.0; }

  std::string to_string() const {
    if (den_ == 0) return "0";
    if (den_ == 1) return "1";
    return "1/" + std::to_string(den_);
  }

  friend constexpr bool operator==(Degree, Degree) = default;
  friend constexpr std::strong_ordering operator<=>(Degree a, Degree b) {
    if (a.den_ == b.den_) return std::strong_ordering::equal;
    if (a.den_ == 0) return std::strong_ordering::less;
    if (b.den_ == 0) return std::strong_ordering::greater;
    return b.den_ <=> a.den_;
  }
  friend std::ostream& operator<<(std::ostream& os, Degree d) { return os << d.to_string(); }

private:
  constexpr explicit Degree(std::size_t den) : den_(den) {}
  std::size_t den_ = 0;
};

} // namespace qexplain

#endif // QEXPLAIN_DEGREE_HPP
