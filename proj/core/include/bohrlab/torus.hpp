#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bohrlab {

/// Named irrationals available as high-precision rational torus points.
enum class NamedIrrational { sqrt2_minus_1, golden, e_minus_2 };

std::string irrational_name(NamedIrrational which);
NamedIrrational parse_irrational(const std::string& name);

/// A point p/q of the circle R/Z stored exactly (0 <= p < q).
///
/// Orbit arithmetic n*t mod 1 is carried out on the integers (n*p mod q), so
/// it is exact for any n below 2^63. Irrationals are represented by their
/// last continued-fraction convergent with denominator below 2^62.
class TorusPoint {
 public:
  TorusPoint() = default;
  /// num/den reduced mod 1; den >= 1.
  static TorusPoint rational(std::int64_t num, std::uint64_t den);
  /// Nearest dyadic with denominator 2^52.
  static TorusPoint from_double(double t);
  static TorusPoint named(NamedIrrational which);

  std::uint64_t numerator() const noexcept { return num_; }
  std::uint64_t denominator() const noexcept { return den_; }
  double value() const noexcept;

  /// Exact residue (n * p) mod q.
  std::uint64_t multiple_residue(std::int64_t n) const noexcept;
  /// {n t} in [0, 1).
  double multiple(std::int64_t n) const noexcept;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  TorusPoint(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {}
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

/// Arc [start, start + length) of the circle, possibly wrapping through 0.
struct Arc {
  double start = 0.0;
  double length = 1.0;

  /// Requires length in (0, 1]; start is reduced into [0, 1).
  static Arc make(double start, double length);
  bool contains(double x) const noexcept;
  double end() const noexcept { return start + length; }
};

}  // namespace bohrlab
