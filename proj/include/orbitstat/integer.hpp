#pragma once

#include <cstdint>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace orbitstat {

// Integer that stays in an int64 until an operation would overflow, then
// promotes itself to a GMP integer. Values that fit back into int64 are
// demoted again, so equal values always have equal representations.
class Integer {
 public:
  Integer() = default;
  Integer(int v) : small_(v) {}
  Integer(long v) : small_(v) {}
  Integer(long long v) : small_(static_cast<std::int64_t>(v)) {}
  explicit Integer(const mpz_class& v) { assign(v); }

  static Integer from_string(const std::string& s) {
    mpz_class v;
    if (v.set_str(s, 10) != 0) throw std::invalid_argument("bad integer literal: " + s);
    return Integer(v);
  }

  bool is_small() const { return !big_; }
  std::int64_t small() const { return small_; }

  mpz_class to_mpz() const {
    if (big_) return *big_;
    return mpz_class(static_cast<long>(small_));
  }

  double to_double() const { return big_ ? big_->get_d() : static_cast<double>(small_); }

  // Magnitude as a double rounded up; used for error bounds.
  double abs_upper() const {
    double a = std::fabs(to_double());
    return std::nextafter(a, INFINITY);
  }

  int sign() const {
    if (big_) return sgn(*big_);
    return (small_ > 0) - (small_ < 0);
  }
  bool is_zero() const { return !big_ && small_ == 0; }

  std::string str() const { return big_ ? big_->get_str() : std::to_string(small_); }

  friend Integer operator+(const Integer& a, const Integer& b) {
    std::int64_t r;
    if (a.is_small() && b.is_small() && !__builtin_add_overflow(a.small_, b.small_, &r)) return Integer(r);
    return Integer(mpz_class(a.to_mpz() + b.to_mpz()));
  }
  friend Integer operator-(const Integer& a, const Integer& b) {
    std::int64_t r;
    if (a.is_small() && b.is_small() && !__builtin_sub_overflow(a.small_, b.small_, &r)) return Integer(r);
    return Integer(mpz_class(a.to_mpz() - b.to_mpz()));
  }
  friend Integer operator*(const Integer& a, const Integer& b) {
    std::int64_t r;
    if (a.is_small() && b.is_small() && !__builtin_mul_overflow(a.small_, b.small_, &r)) return Integer(r);
    return Integer(mpz_class(a.to_mpz() * b.to_mpz()));
  }
  Integer operator-() const {
    if (is_small() && small_ != INT64_MIN) return Integer(-small_);
    return Integer(mpz_class(-to_mpz()));
  }
  Integer& operator+=(const Integer& b) { return *this = *this + b; }
  Integer& operator-=(const Integer& b) { return *this = *this - b; }
  Integer& operator*=(const Integer& b) { return *this = *this * b; }

  friend bool operator==(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) return a.small_ == b.small_;
    if (a.is_small() != b.is_small()) return false;  // canonical form
    return *a.big_ == *b.big_;
  }
  friend bool operator<(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) return a.small_ < b.small_;
    return cmp(a.to_mpz(), b.to_mpz()) < 0;
  }
  friend bool operator!=(const Integer& a, const Integer& b) { return !(a == b); }
  friend bool operator>(const Integer& a, const Integer& b) { return b < a; }
  friend bool operator<=(const Integer& a, const Integer& b) { return !(b < a); }
  friend bool operator>=(const Integer& a, const Integer& b) { return !(a < b); }

  std::size_t hash() const {
    if (is_small()) return std::hash<std::int64_t>{}(small_);
    return std::hash<std::string>{}(big_->get_str(16));
  }

  friend std::ostream& operator<<(std::ostream& os, const Integer& a) { return os << a.str(); }

 private:
  void assign(const mpz_class& v) {
    if (mpz_fits_slong_p(v.get_mpz_t())) {
      small_ = v.get_si();
      big_.reset();
    } else {
      small_ = 0;
      big_ = std::make_shared<const mpz_class>(v);
    }
  }

  std::int64_t small_ = 0;
  std::shared_ptr<const mpz_class> big_;
};

}  // namespace orbitstat
