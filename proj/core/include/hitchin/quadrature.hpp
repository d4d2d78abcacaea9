#pragma once

#include <functional>

#include "hitchin/fiber.hpp"
#include "hitchin/path.hpp"

namespace hitchin {

struct QuadratureOptions {
  double abs_tol = 1e-12;  // per segment
  double rel_tol = 1e-12;
  int max_depth = 40;
};

/// out[0..n) = integrand densities at w on the given fiber (multiplied by dw/dt
/// internally).
using Integrand = std::function<void(cplx w, const Fiber& f, cplx* out)>;

struct PathIntegral {
  CVector values;
  Fiber end;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of n integrands along the path,
/// with the fiber continued node to node.
PathIntegral integrate_path(const FiberModel& model, const XPath& path, Fiber start, int n, const Integrand& g,
                            const QuadratureOptions& opt = {});

}  // namespace hitchin
