#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "blocksd/errors.hpp"

namespace blocksd {

enum class ControlKind { Distributed, Dirichlet };

/// Uniform finite-difference discretization of the 2D heat equation on
/// [0,1]^2 with homogeneous Dirichlet boundary unless lifted explicitly.
///
/// Interior nodes: (ix, iy) with ix, iy in 1..nx at coordinates
/// (ix*h, iy*h), h = 1/(nx+1), flattened as idx = (iy-1)*nx + (ix-1).
/// Time stepping is implicit Euler with the constant matrix
/// M = I + tau*sigma*L (L the 5-point Laplacian), factorized once.
///
/// Controls live at time levels 1..Nt (the implicit step consumes the
/// level it advances to); level 0 carries no control.
class HeatDiscretization {
 public:
  HeatDiscretization(int nx, double sigma, double T, double tau);

  int nx() const { return nx_; }
  double sigma() const { return sigma_; }
  double T() const { return T_; }
  double tau() const { return tau_; }
  int Nt() const { return Nt_; }
  double h() const { return h_; }
  int n_state() const { return nx_ * nx_; }
  int n_control(ControlKind kind) const;

  /// Interior node indices of the control region Omega_c = [0,1/3]^2
  /// (closed condition on both coordinates).
  const std::vector<int>& control_nodes() const { return control_nodes_; }
  /// Interior nodes adjacent to the controlled boundary Gamma = {x2 = 0};
  /// entry i faces the Gamma node at x1 = (i+1)*h (corners excluded).
  const std::vector<int>& gamma_adjacent() const { return gamma_adjacent_; }

  Eigen::VectorXd node_x1() const;
  Eigen::VectorXd node_x2() const;

  /// One backsolve with the shared factorization of M.
  Eigen::VectorXd apply_step_inverse(const Eigen::VectorXd& rhs) const;

  /// Trapezoidal quadrature weight of control level j (1-based):
  /// tau for 1 <= j < Nt, tau/2 for j = Nt (level 0 carries no control).
  double time_weight(int level) const;
  /// Per-dof spatial weight: h^2 on Omega_c, h on Gamma edges.
  double space_weight(ControlKind kind) const;

 private:
  int nx_;
  double sigma_, T_, tau_, h_;
  int Nt_;
  std::vector<int> control_nodes_;
  std::vector<int> gamma_adjacent_;
  std::shared_ptr<const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> solver_;
};

/// Time-indexed control values: column j-1 holds level j, j = 1..Nt.
struct ControlField {
  ControlKind kind = ControlKind::Distributed;
  Eigen::MatrixXd values;  // n_control(kind) x Nt

  static ControlField zero(const HeatDiscretization& d, ControlKind kind);
};

/// Implicit Euler march. `control` and `extra_rhs` may be null.
/// `extra_rhs` (n_state x Nt) collects source and boundary-lift terms;
/// column j-1 is added to the level-j right-hand side scaled by tau
/// (lift values must already carry their sigma/h^2 factor).
/// Returns the trajectory as n_state x (Nt+1), column j = y^j.
Eigen::MatrixXd forward_solve(const HeatDiscretization& d,
                              const Eigen::VectorXd& y0,
                              const ControlField* control,
                              const Eigen::MatrixXd* extra_rhs);

/// Terminal state of the control-to-state map S (zero initial data,
/// no source, no lift). Linear in w.
Eigen::VectorXd control_to_terminal(const HeatDiscretization& d,
                                    const ControlField& w);

/// Backward march of the discrete adjoint: p^Nt = terminal,
/// M p^j = p^{j+1}. Returns n_state x (Nt+1), column j = p^j.
Eigen::MatrixXd adjoint_solve(const HeatDiscretization& d,
                              const Eigen::VectorXd& terminal);

/// Gradient of the discrete cost in the trapezoid-weighted control inner
/// product; the misfit part is the exact transpose of the discrete
/// control-to-state map (level j picks up p^{j-1}).
ControlField extract_gradient(const HeatDiscretization& d, ControlKind kind,
                              double alpha, const ControlField& v,
                              const Eigen::MatrixXd& adjoint_traj);

/// <a, b> over control dofs and the time interval (trapezoidal in time,
/// h^2 or h in space).
double control_inner(const HeatDiscretization& d, const ControlField& a,
                     const ControlField& b);

/// h^2-weighted L2(Omega) inner product of interior-node fields.
double state_inner(const HeatDiscretization& d, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b);

}  // namespace blocksd
