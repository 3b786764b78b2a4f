#pragma once

namespace gamecond {

/// Numerical thresholds standing in for the exact set memberships of the
/// theory. Entries marked "relative" are multiplied by (1 + max |A_ij|).
struct Tolerances {
  double feas = 1e-9;        // simplex membership
  double tie = 1e-9;         // argmax ties, relative
  double zero = 1e-12;       // zero coordinates
  double margin = 1e-9;      // realizability slack acceptance
  double equil = 1e-9;       // F(w) > equil means w is not an equilibrium, relative
};

}  // namespace gamecond
