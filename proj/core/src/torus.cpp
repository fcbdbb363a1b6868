#include "bohrlab/torus.hpp"

#include <cmath>
#include <numeric>

#include "bohrlab/errors.hpp"
#include "int128.hpp"

namespace bohrlab {
namespace {

constexpr std::uint64_t kMaxDenominator = std::uint64_t{1} << 62;

// Last convergent of [0; a1, a2, ...] with denominator below kMaxDenominator.
TorusPoint from_partial_quotients(auto next_quotient) {
  // h_{-1}=1, h_{-2}=0; k_{-1}=0, k_{-2}=1, with a0 = 0.
  u128 h_prev = 1, h = 0;
  u128 k_prev = 0, k = 1;
  for (int i = 1; i < 200; ++i) {
    const u128 a = next_quotient(i);
    const u128 h_next = a * h + h_prev;
    const u128 k_next = a * k + k_prev;
    if (k_next >= kMaxDenominator) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return TorusPoint::rational(static_cast<std::int64_t>(h), static_cast<std::uint64_t>(k));
}

}  // namespace

std::string irrational_name(NamedIrrational which) {
  switch (which) {
    case NamedIrrational::sqrt2_minus_1: return "sqrt2_minus_1";
    case NamedIrrational::golden: return "golden";
    case NamedIrrational::e_minus_2: return "e_minus_2";
  }
  return "unknown";
}

NamedIrrational parse_irrational(const std::string& name) {
  if (name == "sqrt2_minus_1") return NamedIrrational::sqrt2_minus_1;
  if (name == "golden") return NamedIrrational::golden;
  if (name == "e_minus_2") return NamedIrrational::e_minus_2;
  throw ValidationError("unknown named irrational '" + name + "'");
}

TorusPoint TorusPoint::rational(std::int64_t num, std::uint64_t den) {
  require(den >= 1, "TorusPoint: denominator must be >= 1");
  const auto q = static_cast<i128>(den);
  i128 p = static_cast<i128>(num) % q;
  if (p < 0) p += q;
  const std::uint64_t g = std::gcd(static_cast<std::uint64_t>(p), den);
  return {static_cast<std::uint64_t>(p) / g, den / g};
}

TorusPoint TorusPoint::from_double(double t) {
  require(std::isfinite(t), "TorusPoint: non-finite value");
  const double frac = t - std::floor(t);
  const double scaled = std::ldexp(frac, 52);
  return rational(static_cast<std::int64_t>(std::llround(scaled)), std::uint64_t{1} << 52);
}

TorusPoint TorusPoint::named(NamedIrrational which) {
  switch (which) {
    case NamedIrrational::sqrt2_minus_1:
      return from_partial_quotients([](int) { return 2; });
    case NamedIrrational::golden:
      return from_partial_quotients([](int) { return 1; });
    case NamedIrrational::e_minus_2:
      // e - 2 = [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]
      return from_partial_quotients([](int i) { return i % 3 == 2 ? 2 * (i / 3 + 1) : 1; });
  }
  throw ValidationError("unknown named irrational");
}

double TorusPoint::value() const noexcept {
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::uint64_t TorusPoint::multiple_residue(std::int64_t n) const noexcept {
  const auto q = static_cast<i128>(den_);
  i128 r = (static_cast<i128>(n) % q) * static_cast<i128>(num_) % q;
  if (r < 0) r += q;
  return static_cast<std::uint64_t>(r);
}

double TorusPoint::multiple(std::int64_t n) const noexcept {
  return static_cast<double>(static_cast<long double>(multiple_residue(n)) / static_cast<long double>(den_));
}

Arc Arc::make(double start, double length) {
  require(std::isfinite(start), "arc: non-finite start");
  require(length > 0 && length <= 1, "arc: length must lie in (0, 1]");
  return {start - std::floor(start), length};
}

bool Arc::contains(double x) const noexcept {
  if (length >= 1.0) return true;
  double d = x - start;
  d -= std::floor(d);
  return d < length;
}

}  // namespace bohrlab
