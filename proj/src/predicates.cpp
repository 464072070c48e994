#include "pwlmilp/predicates.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace pwlmilp {
namespace {

// An expansion is a sum of doubles stored least-significant first, with
// nonoverlapping components. All helpers below are exact.

inline void two_sum(double a, double b, double& hi, double& lo) {
  hi = a + b;
  double bv = hi - a;
  double av = hi - bv;
  lo = (a - av) + (b - bv);
}

inline void two_prod(double a, double b, double& hi, double& lo) {
  hi = a * b;
  lo = std::fma(a, b, -hi);
}

using Expansion = std::vector<double>;

// Adds a single double to a nonoverlapping increasing expansion
// (grow-expansion); the result keeps both invariants.
Expansion expansion_grow(const Expansion& e, double b) {
  Expansion h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double ei : e) {
    double qnew, lo;
    two_sum(q, ei, qnew, lo);
    if (lo != 0.0) h.push_back(lo);
    q = qnew;
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

Expansion expansion_sum(const Expansion& e, const Expansion& f) {
  Expansion h = e;
  for (double fj : f) h = expansion_grow(h, fj);
  return h;
}

// Expansion times a single double.
Expansion expansion_scale(const Expansion& e, double b) {
  Expansion h;
  if (b == 0.0) return {0.0};
  h.reserve(2 * e.size());
  double q = 0.0;
  for (double ei : e) {
    double phi, plo, snew, slo;
    two_prod(ei, b, phi, plo);
    two_sum(q, plo, snew, slo);
    if (slo != 0.0) h.push_back(slo);
    two_sum(phi, snew, q, slo);
    if (slo != 0.0) h.push_back(slo);
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  // Components were emitted in increasing-magnitude order already.
  return h;
}

Expansion expansion_mul(const Expansion& e, const Expansion& f) {
  Expansion acc{0.0};
  for (double fi : f) acc = expansion_sum(acc, expansion_scale(e, fi));
  return acc;
}

Expansion expansion_neg(Expansion e) {
  for (double& x : e) x = -x;
  return e;
}

Expansion from_diff(double a, double b) {
  double hi, lo;
  two_sum(a, -b, hi, lo);
  if (lo == 0.0) return {hi};
  return {lo, hi};
}

inline int sign_of(const Expansion& e) {
  // Most significant component carries the sign.
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Filter error bounds, from the standard forward analysis of the
// difference-form determinants (epsilon = 2^-53).
constexpr double kOrientErrBound = 3.3306690738754716e-16;    // (3+16eps)eps
constexpr double kIncircleErrBound = 1.1102230246251577e-15;  // (10+96eps)eps

}  // namespace

int orient2d(const double* a, const double* b, const double* c) {
  double detleft = (a[0] - c[0]) * (b[1] - c[1]);
  double detright = (a[1] - c[1]) * (b[0] - c[0]);
  double det = detleft - detright;
  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return sign_of(det);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return sign_of(det);
    detsum = -detleft - detright;
  } else {
    return sign_of(det);
  }
  if (std::abs(det) > kOrientErrBound * detsum) return sign_of(det);

  // Exact fallback.
  Expansion acx = from_diff(a[0], c[0]), acy = from_diff(a[1], c[1]);
  Expansion bcx = from_diff(b[0], c[0]), bcy = from_diff(b[1], c[1]);
  Expansion d =
      expansion_sum(expansion_mul(acx, bcy), expansion_neg(expansion_mul(acy, bcx)));
  return sign_of(d);
}

int incircle(const double* a, const double* b, const double* c,
             const double* d) {
  double adx = a[0] - d[0], ady = a[1] - d[1];
  double bdx = b[0] - d[0], bdy = b[1] - d[1];
  double cdx = c[0] - d[0], cdy = c[1] - d[1];

  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double alift = adx * adx + ady * ady;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double blift = bdx * bdx + bdy * bdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double clift = cdx * cdx + cdy * cdy;

  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
               clift * (adxbdy - bdxady);
  double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                     (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                     (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > kIncircleErrBound * permanent) return sign_of(det);

  // Exact fallback over exact coordinate differences.
  Expansion eadx = from_diff(a[0], d[0]), eady = from_diff(a[1], d[1]);
  Expansion ebdx = from_diff(b[0], d[0]), ebdy = from_diff(b[1], d[1]);
  Expansion ecdx = from_diff(c[0], d[0]), ecdy = from_diff(c[1], d[1]);

  Expansion ealift =
      expansion_sum(expansion_mul(eadx, eadx), expansion_mul(eady, eady));
  Expansion eblift =
      expansion_sum(expansion_mul(ebdx, ebdx), expansion_mul(ebdy, ebdy));
  Expansion eclift =
      expansion_sum(expansion_mul(ecdx, ecdx), expansion_mul(ecdy, ecdy));

  Expansion bc = expansion_sum(expansion_mul(ebdx, ecdy),
                               expansion_neg(expansion_mul(ecdx, ebdy)));
  Expansion ca = expansion_sum(expansion_mul(ecdx, eady),
                               expansion_neg(expansion_mul(eadx, ecdy)));
  Expansion ab = expansion_sum(expansion_mul(eadx, ebdy),
                               expansion_neg(expansion_mul(ebdx, eady)));

  Expansion res = expansion_sum(
      expansion_sum(expansion_mul(ealift, bc), expansion_mul(eblift, ca)),
      expansion_mul(eclift, ab));
  return sign_of(res);
}

}  // namespace pwlmilp
