#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

#include "umbilic4/cubic.hpp"
#include "umbilic4/groups.hpp"

namespace umbilic4 {

inline constexpr int kHarmonicDim = 16;
using Vec16 = Eigen::Matrix<double, kHarmonicDim, 1>;
using Mat16 = Eigen::Matrix<double, kHarmonicDim, kHarmonicDim>;

/// Torus weight (a, b): eigenvalue e^{2πi(ar+bs)} under (z1, z2) -> (e^{2πir}z1, e^{2πis}z2),
/// with z1 = x1 + i x2, z2 = x3 + i x4.
struct WeightLabel {
  int a, b;
  friend bool operator==(WeightLabel l, WeightLabel r) { return l.a == r.a && l.b == r.b; }
};

/// Complex harmonic cubic stored as re + i·im.
struct ComplexCubic {
  WeightLabel weight;
  CubicD re, im;
  std::string name;
};

/// z1³, z1²z2, z1z2², z2³, z1²z̄2, z1²z̄1 - 2z1z2z̄2, z2²z̄2 - 2z1z2z̄1, z2²z̄1.
const std::array<ComplexCubic, 8>& weight_generators();

/// All 16 weight spaces: the 8 generators and their conjugates (weight negated).
std::vector<ComplexCubic> weight_decomposition();

/// Orthonormal basis of harmonic cubics in L²(S³): Re and Im of each weight generator, scaled.
/// Index 2w is Re, 2w+1 is Im of weight_generators()[w].
const std::array<CubicD, kHarmonicDim>& harmonic_basis();

/// Mean of P·Q over the unit sphere S³ ⊂ ℝ⁴.
double sphere_inner(const CubicD& p, const CubicD& q);

/// Coordinates of the harmonic part of P in harmonic_basis().
Vec16 harmonic_coords(const CubicD& p);
CubicD from_harmonic_coords(const Vec16& c);

/// Matrix of act(A, ·) on harmonic_basis().
Mat16 rep_matrix(const Eigen::Matrix4d& a);

struct FixedSubspace {
  int dim = 0;
  std::vector<CubicD> basis;  // L²-orthonormal
  Eigen::VectorXd singular_values;
};

FixedSubspace fixed_subspace(const std::vector<Eigen::Matrix4d>& gens, double rel_tol = 1e-9);

struct ExactFixedSubspace {
  int dim = 0;
  std::vector<CubicX> basis;  // reduced-echelon normalisation
};

/// Exact kernel of the stacked (act(g) - I) on all cubics together with ΔP = 0.
ExactFixedSubspace fixed_subspace_exact(const std::vector<MatX>& gens);

}  // namespace umbilic4
