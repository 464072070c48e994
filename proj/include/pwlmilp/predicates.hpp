#ifndef PWLMILP_PREDICATES_HPP
#define PWLMILP_PREDICATES_HPP

// Robust geometric predicates.
//
// orient2d and incircle are evaluated with a floating-point filter first;
// when the filter cannot certify the sign, the determinant is recomputed
// exactly with multi-term expansion arithmetic (nonoverlapping sums of
// doubles in the style of Shewchuk's adaptive predicates, with FMA-based
// exact products). The exact path returns the true sign for any inputs
// representable in double precision.

namespace pwlmilp {

int orient2d(const double* a, const double* b, const double* c);
int incircle(const double* a, const double* b, const double* c,
             const double* d);

inline int orient2d(double ax, double ay, double bx, double by, double cx,
                    double cy) {
  double a[2] = {ax, ay}, b[2] = {bx, by}, c[2] = {cx, cy};
  return orient2d(a, b, c);
}

}  // namespace pwlmilp

#endif  // PWLMILP_PREDICATES_HPP
