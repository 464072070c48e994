#ifndef PWLMILP_FUNCTIONS_HPP
#define PWLMILP_FUNCTIONS_HPP

#include <functional>
#include <string>
#include <vector>

#include "pwlmilp/geometry.hpp"

namespace pwlmilp::fitfn {

/// A bivariate target function together with a Lipschitz constant that
/// is valid on its rectangular domain. The fitting guarantee is
/// conditional on `lipschitz` really bounding ||grad f||.
struct TargetFunction {
  std::string name;
  std::function<double(double, double)> eval;
  double lipschitz = 0.0;
  geom::Vec2 lo{0.0, 0.0};
  geom::Vec2 hi{1.0, 1.0};
  bool lipschitz_verified = true;  // false when estimated numerically
};

/// Built-in registry (f1..f5 benchmark functions and the ripple alias).
/// The stored Lipschitz constants were obtained by maximizing the
/// gradient norm on a 3001x3001 grid and rounding up with margin.
TargetFunction builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Compiles an arithmetic expression in x and y (operators + - * / ^,
/// functions sin cos exp sqrt abs atan atan2, constants pi and e).
std::function<double(double, double)> compile_expression(
    const std::string& expr);

/// Max gradient norm over a coarse grid, times a 1.5 safety factor.
/// Cheap but unverified; prefer analytic constants.
double estimate_lipschitz(const std::function<double(double, double)>& f,
                          geom::Vec2 lo, geom::Vec2 hi, int grid = 256);

TargetFunction from_expression(const std::string& expr, geom::Vec2 lo,
                               geom::Vec2 hi, double lipschitz = 0.0);

}  // namespace pwlmilp::fitfn

#endif  // PWLMILP_FUNCTIONS_HPP
