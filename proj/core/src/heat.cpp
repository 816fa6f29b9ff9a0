#include "blocksd/heat.hpp"

#include <cmath>

namespace blocksd {

HeatDiscretization::HeatDiscretization(int nx, double sigma, double T,
                                       double tau)
    : nx_(nx), sigma_(sigma), T_(T), tau_(tau), h_(1.0 / (nx + 1)) {
  if (nx < 2) throw std::invalid_argument("HeatDiscretization: nx must be >= 2");
  if (!(sigma > 0.0) || !(T > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument("HeatDiscretization: sigma, T, tau must be positive");
  }
  const double steps = T / tau;
  Nt_ = static_cast<int>(std::llround(steps));
  if (Nt_ < 1 || std::abs(steps - Nt_) > 1e-9 * Nt_) {
    throw std::invalid_argument("HeatDiscretization: tau must divide T exactly");
  }

  const int m = nx_ * nx_;
  const double c = tau_ * sigma_ / (h_ * h_);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(5 * m));
  auto idx = [this](int ix, int iy) { return (iy - 1) * nx_ + (ix - 1); };
  for (int iy = 1; iy <= nx_; ++iy) {
    for (int ix = 1; ix <= nx_; ++ix) {
      const int i = idx(ix, iy);
      trips.emplace_back(i, i, 1.0 + 4.0 * c);
      if (ix > 1) trips.emplace_back(i, idx(ix - 1, iy), -c);
      if (ix < nx_) trips.emplace_back(i, idx(ix + 1, iy), -c);
      if (iy > 1) trips.emplace_back(i, idx(ix, iy - 1), -c);
      if (iy < nx_) trips.emplace_back(i, idx(ix, iy + 1), -c);
    }
  }
  Eigen::SparseMatrix<double> M(m, m);
  M.setFromTriplets(trips.begin(), trips.end());

  auto solver = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  solver->compute(M);
  if (solver->info() != Eigen::Success) {
    throw std::runtime_error("HeatDiscretization: factorization of M failed");
  }
  solver_ = std::move(solver);

  for (int iy = 1; iy <= nx_; ++iy) {
    for (int ix = 1; ix <= nx_; ++ix) {
      if (ix * h_ <= 1.0 / 3.0 + 1e-12 && iy * h_ <= 1.0 / 3.0 + 1e-12) {
        control_nodes_.push_back(idx(ix, iy));
      }
    }
  }
  for (int ix = 1; ix <= nx_; ++ix) gamma_adjacent_.push_back(idx(ix, 1));
}

int HeatDiscretization::n_control(ControlKind kind) const {
  return kind == ControlKind::Distributed
             ? static_cast<int>(control_nodes_.size())
             : nx_;
}

Eigen::VectorXd HeatDiscretization::node_x1() const {
  Eigen::VectorXd x(n_state());
  for (int iy = 1; iy <= nx_; ++iy)
    for (int ix = 1; ix <= nx_; ++ix) x((iy - 1) * nx_ + (ix - 1)) = ix * h_;
  return x;
}

Eigen::VectorXd HeatDiscretization::node_x2() const {
  Eigen::VectorXd x(n_state());
  for (int iy = 1; iy <= nx_; ++iy)
    for (int ix = 1; ix <= nx_; ++ix) x((iy - 1) * nx_ + (ix - 1)) = iy * h_;
  return x;
}

Eigen::VectorXd HeatDiscretization::apply_step_inverse(
    const Eigen::VectorXd& rhs) const {
  return solver_->solve(rhs);
}

double HeatDiscretization::time_weight(int level) const {
  if (level < 1 || level > Nt_) throw std::out_of_range("time_weight: level");
  return level == Nt_ ? 0.5 * tau_ : tau_;
}

double HeatDiscretization::space_weight(ControlKind kind) const {
  return kind == ControlKind::Distributed ? h_ * h_ : h_;
}

ControlField ControlField::zero(const HeatDiscretization& d, ControlKind kind) {
  ControlField f;
  f.kind = kind;
  f.values = Eigen::MatrixXd::Zero(d.n_control(kind), d.Nt());
  return f;
}

namespace {

void check_control(const HeatDiscretization& d, const ControlField& c) {
  if (c.values.rows() != d.n_control(c.kind) || c.values.cols() != d.Nt()) {
    throw GeometryError("control field does not match discretization");
  }
}

// Scatter the level-j control into an interior source/lift contribution
// (before the tau scaling applied by the stepper).
void inject_control(const HeatDiscretization& d, const ControlField& c,
                    int level, Eigen::VectorXd& rhs) {
  const auto& col = c.values.col(level - 1);
  if (c.kind == ControlKind::Distributed) {
    const auto& nodes = d.control_nodes();
    for (size_t i = 0; i < nodes.size(); ++i) rhs(nodes[i]) += col(static_cast<Eigen::Index>(i));
  } else {
    const double w = d.sigma() / (d.h() * d.h());
    const auto& nodes = d.gamma_adjacent();
    for (size_t i = 0; i < nodes.size(); ++i) rhs(nodes[i]) += w * col(static_cast<Eigen::Index>(i));
  }
}

}  // namespace

Eigen::MatrixXd forward_solve(const HeatDiscretization& d,
                              const Eigen::VectorXd& y0,
                              const ControlField* control,
                              const Eigen::MatrixXd* extra_rhs) {
  if (y0.size() != d.n_state()) throw GeometryError("forward_solve: y0 size");
  if (control) check_control(d, *control);
  if (extra_rhs &&
      (extra_rhs->rows() != d.n_state() || extra_rhs->cols() != d.Nt())) {
    throw GeometryError("forward_solve: extra_rhs shape");
  }

  Eigen::MatrixXd traj(d.n_state(), d.Nt() + 1);
  traj.col(0) = y0;
  Eigen::VectorXd rhs(d.n_state());
  for (int j = 1; j <= d.Nt(); ++j) {
    rhs.setZero();
    if (control) inject_control(d, *control, j, rhs);
    if (extra_rhs) rhs += extra_rhs->col(j - 1);
    rhs = traj.col(j - 1) + d.tau() * rhs;
    traj.col(j) = d.apply_step_inverse(rhs);
    if (!traj.col(j).allFinite()) {
      throw std::runtime_error("forward_solve: non-finite state (blow-up)");
    }
  }
  return traj;
}

Eigen::VectorXd control_to_terminal(const HeatDiscretization& d,
                                    const ControlField& w) {
  check_control(d, w);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d.n_state());
  Eigen::VectorXd rhs(d.n_state());
  for (int j = 1; j <= d.Nt(); ++j) {
    rhs.setZero();
    inject_control(d, w, j, rhs);
    rhs = y + d.tau() * rhs;
    y = d.apply_step_inverse(rhs);
  }
  if (!y.allFinite()) throw std::runtime_error("control_to_terminal: non-finite state");
  return y;
}

Eigen::MatrixXd adjoint_solve(const HeatDiscretization& d,
                              const Eigen::VectorXd& terminal) {
  if (terminal.size() != d.n_state()) throw GeometryError("adjoint_solve: terminal size");
  Eigen::MatrixXd traj(d.n_state(), d.Nt() + 1);
  traj.col(d.Nt()) = terminal;
  for (int j = d.Nt() - 1; j >= 0; --j) {
    traj.col(j) = d.apply_step_inverse(traj.col(j + 1));
    if (!traj.col(j).allFinite()) {
      throw std::runtime_error("adjoint_solve: non-finite state");
    }
  }
  return traj;
}

ControlField extract_gradient(const HeatDiscretization& d, ControlKind kind,
                              double alpha, const ControlField& v,
                              const Eigen::MatrixXd& adjoint_traj) {
  check_control(d, v);
  if (v.kind != kind) throw GeometryError("extract_gradient: kind mismatch");
  if (adjoint_traj.rows() != d.n_state() || adjoint_traj.cols() != d.Nt() + 1) {
    throw GeometryError("extract_gradient: adjoint trajectory shape");
  }

  ControlField g = ControlField::zero(d, kind);
  for (int j = 1; j <= d.Nt(); ++j) {
    // Transpose of the injection used by the stepper: level j advances
    // from p^{j-1}; the tau/time_weight factor converts the plain sum
    // into a gradient w.r.t. the trapezoid-weighted inner product.
    const double scale = d.tau() / d.time_weight(j);
    const auto& p = adjoint_traj.col(j - 1);
    if (kind == ControlKind::Distributed) {
      const auto& nodes = d.control_nodes();
      for (size_t i = 0; i < nodes.size(); ++i) {
        g.values(static_cast<Eigen::Index>(i), j - 1) = scale * p(nodes[i]);
      }
    } else {
      const double w = d.sigma() / d.h();
      const auto& nodes = d.gamma_adjacent();
      for (size_t i = 0; i < nodes.size(); ++i) {
        g.values(static_cast<Eigen::Index>(i), j - 1) = scale * w * p(nodes[i]);
      }
    }
  }
  g.values += alpha * v.values;
  return g;
}

double control_inner(const HeatDiscretization& d, const ControlField& a,
                     const ControlField& b) {
  check_control(d, a);
  check_control(d, b);
  if (a.kind != b.kind) throw GeometryError("control_inner: kind mismatch");
  const double sw = d.space_weight(a.kind);
  double acc = 0.0;
  for (int j = 1; j <= d.Nt(); ++j) {
    acc += d.time_weight(j) * sw * a.values.col(j - 1).dot(b.values.col(j - 1));
  }
  return acc;
}

double state_inner(const HeatDiscretization& d, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
  return d.h() * d.h() * a.dot(b);
}

}  // namespace blocksd
