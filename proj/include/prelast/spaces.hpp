#ifndef PRELAST_SPACES_HPP
#define PRELAST_SPACES_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "prelast/mesh.hpp"
#include "prelast/ref_fe.hpp"

namespace prelast {

enum class Family { NodalVector, DiscPressure, Edge, NodalScalar };

enum class Regime { Clamped, NoPenetration, NoSlip, Neumann };

std::string regime_name(Regime r);

/// Global finite-element space over a HexMesh. DOF numbering is entity-major
/// (vertices, then edges, then faces, then cells, each in mesh-entity order)
/// and deterministic. Immutable after construction.
struct FESpace {
  Family family;
  int order = 0;  // polynomial order p; for DiscPressure the total degree p-1
  const HexMesh* mesh = nullptr;

  Index ndof = 0;
  Index dofs_per_cell = 0;
  std::vector<Index> cell_dofs;    // n_cells * dofs_per_cell
  std::vector<double> cell_sign;   // same layout; +-1, Edge family only

  // Nodal layout (NodalVector / NodalScalar).
  Index n_nodes = 0;
  std::vector<Vec3> node_coords;
  std::vector<Index> node_owner_cell;  // lowest incident cell

  std::shared_ptr<const NodalBasis> nodal;
  std::shared_ptr<const ModalDiscBasis> modal;
  std::shared_ptr<const EdgeBasis> edge;

  int ncomp() const { return family == Family::NodalVector ? 3 : 1; }
  double sign(Index cell, Index local) const {
    return cell_sign.empty() ? 1.0 : cell_sign[cell * dofs_per_cell + local];
  }
  Index dof(Index cell, Index local) const {
    return cell_dofs[cell * dofs_per_cell + local];
  }
};

FESpace build_space(const HexMesh& mesh, Family family, int order);

/// A scalar linear functional on a space, stored sparsely.
struct Functional {
  std::string name;
  std::vector<std::pair<Index, double>> coeffs;
  double rhs = 0.0;
};

/// Fixed DOFs with prescribed values plus appended scalar functionals.
struct ConstraintSet {
  std::vector<std::pair<Index, double>> fixed;  // sorted by dof, unique
  std::vector<Functional> functionals;

  Index n_fixed() const { return static_cast<Index>(fixed.size()); }
  void merge(const ConstraintSet& other);
};

struct BCRegime {
  Regime kind = Regime::Clamped;
  // Prescribed boundary displacement for Clamped (zero if absent).
  std::function<Vec3(const Vec3&)> ubar;
};

/// Boundary DOF classification for the displacement space. Fixing is strong
/// and componentwise; exact because every boundary face is axis-aligned.
/// Clamped fixes all components (to interpolated ubar); NoPenetration fixes
/// the components matching the normals of all boundary faces containing the
/// node; NoSlip fixes the complement; Neumann fixes nothing and appends the
/// six rigid-body mean-value functionals.
ConstraintSet classify_boundary(const FESpace& space, const BCRegime& regime);

/// Zero-mean pressure gauge: one mean-value functional for regimes with
/// Q = L^2_0 (Clamped, NoPenetration); empty otherwise.
ConstraintSet pressure_gauge(const FESpace& space_p, Regime regime);

/// Homogeneous tangential-trace constraints for the Edge family: fixes all
/// DOFs attached to boundary edges and boundary faces.
ConstraintSet edge_space_bc(const FESpace& space_A, bool homogeneous);

/// Fix all boundary nodes of a scalar nodal space to zero (H^1_0).
ConstraintSet scalar_h10_bc(const FESpace& space);

/// One mean-value functional on a scalar space (H^1 \ R multiplier gauge).
Functional mean_value_functional(const FESpace& space, const std::string& name);

/// The six rigid-body functionals int w = 0 and int r x w = 0 with r the
/// position about the domain centroid.
std::vector<Functional> rigid_body_functionals(const FESpace& space_u);

/// For each scalar node the set of boundary-normal axes as a bitmask (0 for
/// interior nodes).
std::vector<int> boundary_normal_axes(const FESpace& space);

}  // namespace prelast

#endif
