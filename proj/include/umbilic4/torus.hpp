#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <string>
#include <vector>

#include "umbilic4/field.hpp"
#include "umbilic4/harmonic.hpp"

namespace umbilic4 {

/// Torus element (z1, z2) -> (e^{2πir} z1, e^{2πis} z2) with r, s reduced into [0, 1).
struct TorusElement {
  Rational r, s;

  TorusElement() = default;
  TorusElement(const Rational& r_, const Rational& s_);
  std::string to_string() const;
  friend bool operator==(const TorusElement& a, const TorusElement& b) { return a.r == b.r && a.s == b.s; }
};

/// The eight conditions 3r, r, 2r+s, 2r-s, 2s+r, 2s-r, 3s, s ∈ ℤ (indices 0..7).
const std::array<std::string, 8>& condition_names();
/// Weight (a, b) whose eigenvalue e^{2πi(ar+bs)} is 1 exactly when condition k holds.
const std::array<WeightLabel, 8>& condition_weights();

std::vector<int> satisfied_conditions(const TorusElement& g);
/// Count with 3r dropped when r holds and 3s dropped when s holds.
int independent_condition_count(const std::vector<int>& conds);

/// Matrix A with (xA) = (e^{2πir}z1, e^{2πis}z2) for a row vector x, so act(A, ·) has eigenvalue
/// e^{2πi(ar+bs)} on the (a, b) weight space.
Eigen::Matrix4d torus_matrix(double r, double s);
Eigen::Matrix4d torus_matrix(const TorusElement& g);

struct FixedCubicBasis {
  std::vector<int> conditions;
  std::vector<CubicD> basis;
  int dim = 0;
  double max_fix_residual = 0;  // max ‖act(g,P) - P‖ over the basis
};

FixedCubicBasis fixed_cubic_basis(const TorusElement& g);

/// Lowest common denominator of r and s, i.e. the order of g.
long element_order(const TorusElement& g);

/// Chamber 0 <= s <= r, s <= 1 - r. Among the eight images under (r,s) -> (s,r), (r,-s), (-r,-s)
/// mod 1 that lie in it, pick the largest r, then the smallest s.
TorusElement weyl_reduce(const TorusElement& g);
bool in_chamber(const TorusElement& g);

struct SmallOrderCase {
  long order;
  TorusElement g;
  int fixed_dim;
  std::vector<int> conditions;
};

struct SmallOrderScan {
  int max_den = 0;
  long scanned = 0;        // chamber points examined
  long max_order_hit = 0;  // largest element order among hits
  std::vector<SmallOrderCase> cases;  // sorted by decreasing order
};

/// Scans chamber points with denominators <= max_den for elements satisfying at least two
/// independent conditions (3r is implied by r, 3s by s and is not counted twice).
SmallOrderScan enumerate_small_orders(int max_den = 60);

nlohmann::json to_json(const FixedCubicBasis& b);
nlohmann::json to_json(const SmallOrderScan& scan);

}  // namespace umbilic4
