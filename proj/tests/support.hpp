#pragma once

#include <random>

#include "gradedkit/expr.hpp"

namespace gk::testing {

inline Coordinate even(const std::string& n, std::vector<int> w) { return {n, Weight(std::move(w)), Parity::Even}; }
inline Coordinate odd(const std::string& n, std::vector<int> w) { return {n, Weight(std::move(w)), Parity::Odd}; }

inline Expr V(const ChartPtr& c, const std::string& n) { return Expr::var(c, n); }
inline Expr K(const ChartPtr& c, long num, long den = 1) { return Expr::constant(c, Rational(num, den)); }

/// Random monomial in the non-parameter coordinates, with small exponents.
inline Expr randomMonomial(std::mt19937& rng, const ChartPtr& c, int maxFactors = 3) {
  std::uniform_int_distribution<int> nf(0, maxFactors);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::vector<int> pool;
  for (std::size_t i = 0; i < c->size(); ++i)
    if (!c->coord(i).parameter) pool.push_back(static_cast<int>(i));
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  int k = coef(rng);
  if (k == 0) k = 1;
  Expr m = Expr::constant(c, Rational(k));
  int n = nf(rng);
  for (int i = 0; i < n; ++i) m = m * Expr::var(c, pool[pick(rng)]);
  return m;
}

inline Expr randomPolynomial(std::mt19937& rng, const ChartPtr& c, int terms = 4, int maxFactors = 3) {
  Expr e(c);
  for (int i = 0; i < terms; ++i) e += randomMonomial(rng, c, maxFactors);
  return e;
}

}  // namespace gk::testing

#include "gradedkit/fields.hpp"

namespace gk::testing {

/// Random homogeneous-parity field with small polynomial components.
inline VecField randomField(std::mt19937& rng, const ChartPtr& c, Parity p, int terms = 2, int maxFactors = 2) {
  VecField x(c);
  std::bernoulli_distribution use(0.6);
  for (std::size_t i = 0; i < c->size(); ++i) {
    if (c->coord(i).parameter || !use(rng)) continue;
    Expr e = randomPolynomial(rng, c, terms, maxFactors).parityPart(p + c->coord(i).parity);
    x.set(static_cast<int>(i), e);
  }
  return x;
}

inline Expr randomOfParity(std::mt19937& rng, const ChartPtr& c, Parity p, int terms = 3, int maxFactors = 3) {
  for (;;) {
    Expr e = randomPolynomial(rng, c, terms, maxFactors).parityPart(p);
    if (!e.isZero()) return e;
  }
}

/// Levi-Civita symbol on {1,2,3}.
inline int levi(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  int inv = (a > b) + (a > c) + (b > c);
  return (inv % 2) ? -1 : 1;
}

}  // namespace gk::testing

namespace gk {
inline void PrintTo(const Expr& e, std::ostream* os) { *os << e.str(); }
inline void PrintTo(const VecField& x, std::ostream* os) { *os << x.str(); }
}  // namespace gk
