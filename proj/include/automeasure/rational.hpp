#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace automeasure {

/// Exact probabilities. Every cylinder value in the library is one of these.
using Rational = mpq_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serialized as "num/den" in lowest terms, including integers ("1/1", "0/1").
inline std::string to_string(Rational q) {
  q.canonicalize();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Accepts "a/b" or "a".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error("empty rational");
  Rational q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) {
    throw Error("malformed rational '" + s + "'");
  }
  q.canonicalize();
  return q;
}

/// Natural log of a positive rational; avoids underflow for tiny masses.
inline double log_rational(const Rational& q) {
  long exp_num = 0;
  long exp_den = 0;
  double num = mpz_get_d_2exp(&exp_num, q.get_num_mpz_t());
  double den = mpz_get_d_2exp(&exp_den, q.get_den_mpz_t());
  return std::log(num) - std::log(den) +
         static_cast<double>(exp_num - exp_den) * std::log(2.0);
}

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace automeasure
