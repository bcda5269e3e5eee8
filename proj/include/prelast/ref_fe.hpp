#ifndef PRELAST_REF_FE_HPP
#define PRELAST_REF_FE_HPP

#include <Eigen/Dense>
#include <vector>

#include "prelast/basis1d.hpp"
#include "prelast/common.hpp"
#include "prelast/topology.hpp"

namespace prelast {

enum class EntityKind { Vertex, Edge, Face, Cell };

/// Where a reference-cell DOF lives, used to assign global numbers.
struct DofEntity {
  EntityKind kind;
  int local_entity;  // local vertex/edge/face index, 0 for cell block
  int offset;        // position inside that entity's block
};

/// Tabulated scalar basis at a fixed point set.
struct ScalarTable {
  Index ndof = 0, npts = 0;
  std::vector<double> value;  // ndof * npts
  std::vector<double> grad;   // ndof * npts * 3 (reference gradients)
  double v(Index d, Index q) const { return value[d * npts + q]; }
  double g(Index d, Index q, int a) const { return grad[(d * npts + q) * 3 + a]; }
};

/// Tabulated vector basis at a fixed point set.
struct VectorTable {
  Index ndof = 0, npts = 0;
  std::vector<double> value;  // ndof * npts * 3
  std::vector<double> curl;   // ndof * npts * 3 (reference curls)
  double v(Index d, Index q, int a) const { return value[(d * npts + q) * 3 + a]; }
  double c(Index d, Index q, int a) const { return curl[(d * npts + q) * 3 + a]; }
};

/// Tensor-product nodal basis Q_p on the (p+1)^3 Gauss–Lobatto lattice.
class NodalBasis {
public:
  explicit NodalBasis(int order);

  int order() const { return p_; }
  Index size() const { return static_cast<Index>(p_ + 1) * (p_ + 1) * (p_ + 1); }
  Index node_index(int i, int j, int k) const {
    return i + (p_ + 1) * (static_cast<Index>(j) + (p_ + 1) * k);
  }
  Vec3 node(Index n) const;
  const std::vector<DofEntity>& dof_entity() const { return entity_; }

  void eval(const Vec3& xi, Eigen::VectorXd& values, Eigen::MatrixX3d& grads) const;
  ScalarTable tabulate(const std::vector<Vec3>& pts) const;

private:
  int p_;
  LagrangeBasis1D line_;
  std::vector<DofEntity> entity_;
};

/// Discontinuous modal basis of total degree <= deg, L^2([0,1]^3)-orthonormalized
/// monomials in the centered coordinates; the first function is the constant 1.
class ModalDiscBasis {
public:
  explicit ModalDiscBasis(int degree);

  int degree() const { return deg_; }
  Index size() const { return static_cast<Index>(exps_.size()); }
  const std::vector<std::array<int, 3>>& exponents() const { return exps_; }

  void eval(const Vec3& xi, Eigen::VectorXd& values) const;
  ScalarTable tabulate(const std::vector<Vec3>& pts) const;  // grad left empty

private:
  int deg_;
  std::vector<std::array<int, 3>> exps_;
  Eigen::MatrixXd coeff_;  // lower-triangular Gram–Schmidt coefficients
};

/// First-kind Nédélec basis on the hex, realized as the anisotropic tensor
/// space Q_{p,p+1,p+1} x Q_{p+1,p,p+1} x Q_{p+1,p+1,p} with hierarchical
/// edge/face/cell blocks. Lowest order (p = 0) has exactly the 12 edge
/// functions with unit tangential line integral on their own edge.
class EdgeBasis {
public:
  explicit EdgeBasis(int order);

  int order() const { return p_; }
  Index size() const { return 3 * static_cast<Index>(p_ + 1) * (p_ + 2) * (p_ + 2); }
  Index dofs_per_edge() const { return p_ + 1; }
  Index dofs_per_face() const { return 2 * static_cast<Index>(p_) * (p_ + 1); }
  Index dofs_interior() const { return 3 * static_cast<Index>(p_) * p_ * (p_ + 1); }
  const std::vector<DofEntity>& dof_entity() const { return entity_; }

  void eval(const Vec3& xi, Eigen::MatrixX3d& values, Eigen::MatrixX3d& curls) const;
  VectorTable tabulate(const std::vector<Vec3>& pts) const;

private:
  int p_;
  std::vector<DofEntity> entity_;
};

}  // namespace prelast

#endif
