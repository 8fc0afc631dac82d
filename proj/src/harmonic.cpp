#include "umbilic4/harmonic.hpp"

#include "umbilic4/linalg.hpp"

namespace umbilic4 {

namespace {

using cd = std::complex<double>;
using Lin = std::array<cd, 4>;

const Lin kZ1{cd(1, 0), cd(0, 1), cd(0, 0), cd(0, 0)};
const Lin kZ2{cd(0, 0), cd(0, 0), cd(1, 0), cd(0, 1)};

Lin conj(const Lin& l) {
  Lin out;
  for (int k = 0; k < 4; ++k) out[k] = std::conj(l[k]);
  return out;
}

// Real and imaginary parts of the product of three complex linear forms.
std::pair<CubicD, CubicD> product(const Lin& a, const Lin& b, const Lin& c, double scale = 1.0) {
  Tensor3<double> re{}, im{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        cd v = scale * a[i] * b[j] * c[k];
        re[tidx(i, j, k)] = v.real();
        im[tidx(i, j, k)] = v.imag();
      }
  return {CubicD::from_tensor(re), CubicD::from_tensor(im)};
}

ComplexCubic make(WeightLabel w, std::string name, std::pair<CubicD, CubicD> f) {
  return {w, std::move(f.first), std::move(f.second), std::move(name)};
}

ComplexCubic make(WeightLabel w, std::string name, std::pair<CubicD, CubicD> f,
                  std::pair<CubicD, CubicD> g) {
  return {w, f.first + g.first, f.second + g.second, std::move(name)};
}

long double_factorial(int n) {
  long r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

const std::array<ComplexCubic, 8>& weight_generators() {
  static const std::array<ComplexCubic, 8> gens = [] {
    const Lin z1 = kZ1, z2 = kZ2, w1 = conj(kZ1), w2 = conj(kZ2);
    return std::array<ComplexCubic, 8>{
        make({3, 0}, "z1^3", product(z1, z1, z1)),
        make({2, 1}, "z1^2*z2", product(z1, z1, z2)),
        make({1, 2}, "z1*z2^2", product(z1, z2, z2)),
        make({0, 3}, "z2^3", product(z2, z2, z2)),
        make({2, -1}, "z1^2*conj(z2)", product(z1, z1, w2)),
        make({1, 0}, "z1^2*conj(z1)-2*z1*z2*conj(z2)", product(z1, z1, w1), product(z1, z2, w2, -2.0)),
        make({0, 1}, "z2^2*conj(z2)-2*z1*z2*conj(z1)", product(z2, z2, w2), product(z1, z2, w1, -2.0)),
        make({-1, 2}, "z2^2*conj(z1)", product(z2, z2, w1)),
    };
  }();
  return gens;
}

std::vector<ComplexCubic> weight_decomposition() {
  std::vector<ComplexCubic> out;
  for (const auto& g : weight_generators()) {
    out.push_back(g);
    out.push_back({{-g.weight.a, -g.weight.b}, g.re, -1.0 * g.im, "conj(" + g.name + ")"});
  }
  return out;
}

double sphere_inner(const CubicD& p, const CubicD& q) {
  // E[x^α] on S³ is Π(α_i - 1)!! / (4·6·8) for all α_i even, else 0.
  const auto& ms = monomials();
  double acc = 0;
  for (int a = 0; a < kNumMonomials; ++a) {
    if (p.coeffs[a] == 0) continue;
    for (int b = 0; b < kNumMonomials; ++b) {
      if (q.coeffs[b] == 0) continue;
      int e[4] = {0, 0, 0, 0};
      for (int v : {ms[a].i, ms[a].j, ms[a].k, ms[b].i, ms[b].j, ms[b].k}) ++e[v];
      if ((e[0] | e[1] | e[2] | e[3]) & 1) continue;
      double mom = 1;
      for (int v = 0; v < 4; ++v) mom *= static_cast<double>(double_factorial(e[v] - 1));
      acc += p.coeffs[a] * q.coeffs[b] * mom / 192.0;
    }
  }
  return acc;
}

const std::array<CubicD, kHarmonicDim>& harmonic_basis() {
  static const auto basis = [] {
    std::array<CubicD, kHarmonicDim> b;
    const auto& gens = weight_generators();
    for (int w = 0; w < 8; ++w) {
      b[2 * w] = (1.0 / std::sqrt(sphere_inner(gens[w].re, gens[w].re))) * gens[w].re;
      b[2 * w + 1] = (1.0 / std::sqrt(sphere_inner(gens[w].im, gens[w].im))) * gens[w].im;
    }
    return b;
  }();
  return basis;
}

Vec16 harmonic_coords(const CubicD& p) {
  Vec16 c;
  const auto& b = harmonic_basis();
  for (int k = 0; k < kHarmonicDim; ++k) c(k) = sphere_inner(b[k], p);
  return c;
}

CubicD from_harmonic_coords(const Vec16& c) {
  CubicD out;
  const auto& b = harmonic_basis();
  for (int k = 0; k < kHarmonicDim; ++k) out += c(k) * b[k];
  return out;
}

Mat16 rep_matrix(const Eigen::Matrix4d& a) {
  Mat16 r;
  const auto& b = harmonic_basis();
  const Mat4<double> am = from_eigen(a);
  for (int col = 0; col < kHarmonicDim; ++col) r.col(col) = harmonic_coords(act(am, b[col]));
  return r;
}

FixedSubspace fixed_subspace(const std::vector<Eigen::Matrix4d>& gens, double rel_tol) {
  Eigen::MatrixXd stack(kHarmonicDim * gens.size(), kHarmonicDim);
  for (std::size_t g = 0; g < gens.size(); ++g)
    stack.block(kHarmonicDim * g, 0, kHarmonicDim, kHarmonicDim) = rep_matrix(gens[g]) - Mat16::Identity();
  // rep(g) is orthogonal, so entries of rep(g) - I are O(1) unless g acts trivially.
  auto ker = numeric_kernel(stack, rel_tol, 1.0);
  FixedSubspace out;
  out.dim = ker.dim;
  out.singular_values = ker.singular_values;
  for (int k = 0; k < ker.dim; ++k) out.basis.push_back(from_harmonic_coords(ker.basis.col(k)));
  return out;
}

ExactFixedSubspace fixed_subspace_exact(const std::vector<MatX>& gens) {
  using AS = AlgebraicScalar;
  std::vector<std::vector<AS>> rows;
  std::vector<CubicX> unit(kNumMonomials);
  for (int m = 0; m < kNumMonomials; ++m) unit[m].coeffs[m] = AS(1);
  for (const auto& g : gens) {
    std::vector<std::vector<AS>> block(kNumMonomials, std::vector<AS>(kNumMonomials));
    for (int m = 0; m < kNumMonomials; ++m) {
      CubicX img = act(g, unit[m]);
      img.coeffs[m] -= AS(1);
      for (int r = 0; r < kNumMonomials; ++r) block[r][m] = img.coeffs[r];
    }
    for (auto& row : block) rows.push_back(std::move(row));
  }
  std::vector<std::vector<AS>> lap(4, std::vector<AS>(kNumMonomials));
  for (int m = 0; m < kNumMonomials; ++m) {
    auto l = laplacian(unit[m]);
    for (int k = 0; k < 4; ++k) lap[k][m] = l[k];
  }
  for (auto& row : lap) rows.push_back(std::move(row));

  ExactFixedSubspace out;
  for (auto& v : exact_nullspace(std::move(rows), kNumMonomials)) {
    CubicX p;
    for (int m = 0; m < kNumMonomials; ++m) p.coeffs[m] = v[m];
    out.basis.push_back(std::move(p));
  }
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

}  // namespace umbilic4
