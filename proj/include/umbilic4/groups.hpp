#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "umbilic4/quat.hpp"

namespace umbilic4 {

using MatX = Mat4<AlgebraicScalar>;

enum class BinaryKind { C, D, T, O, I, IPlus };

/// Unit quaternions of a binary subgroup. C_n = {e^{2πkl/n}}, D_n = C_2n ∪ i·C_2n.
std::vector<QuatD> build_binary_subgroup(BinaryKind kind, int n = 0);
/// Exact version; only T, O, I, I+ (entries live in Q(√2,√5)).
std::vector<QuatX> build_binary_subgroup_exact(BinaryKind kind);

/// Binary tetrahedral generator ½(1+i+j+k), octahedral (1+i)/√2, icosahedral g and g⁺.
QuatX quat_t();
QuatX quat_o();
QuatX quat_g();
QuatX quat_g_plus();

struct FamilyParams {
  int m = 1, n = 1, r = 1, s = 1;
};

struct FiniteGroup {
  std::string label;
  bool exact = false;
  std::vector<Eigen::Matrix4d> generators;
  std::vector<MatX> exact_generators;
  std::vector<Eigen::Matrix4d> elements;
  std::vector<MatX> exact_elements;

  std::size_t order() const { return elements.size(); }
};

/// Labels: T, O, O+, I, I+ (exact) and cyclic, dihedral (numeric, uses params).
FiniteGroup build_so4_subgroup(const std::string& label, const FamilyParams& params = {});

/// Generators only, without closing (cheap; used by fixed-subspace code).
std::vector<MatX> so4_generators_exact(const std::string& label);

std::vector<MatX> close_group(const std::vector<MatX>& gens, std::size_t cap = 10000);
std::vector<Eigen::Matrix4d> close_group(const std::vector<Eigen::Matrix4d>& gens,
                                         std::size_t cap = 10000);

std::size_t group_closure_order(const std::vector<MatX>& gens, std::size_t cap = 10000);
std::size_t group_closure_order(const std::vector<Eigen::Matrix4d>& gens, std::size_t cap = 10000);

bool contains_minus_identity(const FiniteGroup& g);

nlohmann::json to_json(const FiniteGroup& g, bool exact_strings = true);

}  // namespace umbilic4
