#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "interfall/errors.hpp"
#include "interfall/grid.hpp"
#include "interfall/physics.hpp"
#include "interfall/propagators.hpp"

namespace interfall {

/// 2x2 spin density matrix in the {up, down} energy basis.
class SpinState2 {
 public:
  using Matrix = Eigen::Matrix2cd;

  SpinState2() : rho_(Matrix::Zero()) { rho_(0, 0) = 1.0; }

  explicit SpinState2(const Matrix& rho, double tol = 1e-12) : rho_(rho) {
    if (!rho_.allFinite()) throw NumericError("SpinState2: non-finite entries");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) throw DomainError("SpinState2: matrix is not Hermitian");
    if (std::abs(rho_.trace() - cplx{1.0, 0.0}) > tol) throw DomainError("SpinState2: trace differs from one");
    const auto ev = eigenvalues();
    if (ev[0] < -tol) throw DomainError("SpinState2: matrix is not positive semidefinite");
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  }

  static SpinState2 diagonal(double p_up) {
    Matrix m = Matrix::Zero();
    m(0, 0) = p_up;
    m(1, 1) = 1.0 - p_up;
    return SpinState2(m);
  }

  /// |psi><psi| for psi = alpha|up> + beta|down>.
  static SpinState2 pure(cplx alpha, cplx beta) {
    Eigen::Vector2cd v(alpha, beta);
    return SpinState2(v * v.adjoint());
  }

  static SpinState2 maximally_mixed() { return diagonal(0.5); }

  [[nodiscard]] const Matrix& matrix() const { return rho_; }
  [[nodiscard]] double p_up() const { return rho_(0, 0).real(); }
  [[nodiscard]] double p_down() const { return rho_(1, 1).real(); }
  /// <up|rho|down>
  [[nodiscard]] cplx coherence() const { return rho_(0, 1); }

  /// Ascending eigenvalues.
  [[nodiscard]] std::array<double, 2> eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()[0], es.eigenvalues()[1]};
  }

  [[nodiscard]] double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  Matrix rho_;
};

/// alpha|up> (x) up + beta|down> (x) down with unit-norm spatial branches on one grid.
struct PureJointState {
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  ComplexField1D up;
  ComplexField1D down;
};

/// Ensemble of pure joint states; a single member with weight one is a pure state.
class JointState {
 public:
  struct Member {
    double weight = 1.0;
    PureJointState state;
  };

  /// Normalizes both branches discretely; rejects amplitudes off the unit sphere.
  static JointState pure(cplx alpha, cplx beta, ComplexField1D up, ComplexField1D down) {
    JointState js;
    js.members_.push_back({1.0, make_member(alpha, beta, std::move(up), std::move(down))});
    return js;
  }

  static JointState mixture(std::vector<Member> members) {
    if (members.empty()) throw DomainError("JointState: empty ensemble");
    double total = 0.0;
    JointState js;
    for (auto& m : members) {
      if (!(m.weight >= 0.0)) throw DomainError("JointState: negative ensemble weight");
      total += m.weight;
      if (m.weight == 0.0) continue;
      js.members_.push_back(
          {m.weight, make_member(m.state.alpha, m.state.beta, std::move(m.state.up), std::move(m.state.down))});
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("JointState: ensemble weights must sum to one");
    return js;
  }

  /// The spin state `spin` (any rank) attached to the same spatial state on both branches.
  static JointState from_spin_state(const SpinState2& spin, const ComplexField1D& spatial) {
    Eigen::SelfAdjointEigenSolver<SpinState2::Matrix> es(spin.matrix());
    std::vector<Member> members;
    double kept = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double w = std::max(0.0, es.eigenvalues()[i]);
      if (w <= 1e-15) continue;
      kept += w;
      const auto v = es.eigenvectors().col(i);
      members.push_back({w, PureJointState{v[0], v[1], spatial, spatial}});
    }
    for (auto& m : members) m.weight /= kept;
    return mixture(std::move(members));
  }

  [[nodiscard]] const std::vector<Member>& members() const { return members_; }
  [[nodiscard]] bool is_pure() const { return members_.size() == 1; }
  [[nodiscard]] const UniformGrid& grid() const { return members_.front().state.up.grid; }

 private:
  static PureJointState make_member(cplx alpha, cplx beta, ComplexField1D up, ComplexField1D down) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > 1e-12) throw DomainError("JointState: |alpha|^2 + |beta|^2 must equal one");
    require_same_grid(up.grid, down.grid, "JointState");
    up.normalize();
    down.normalize();
    return {alpha, beta, std::move(up), std::move(down)};
  }

  std::vector<Member> members_;
};

/// Evolves a spatial field for time t with the given mass.
using BranchEvolver = std::function<ComplexField1D(const ComplexField1D&, double mass, double t)>;

/// Controlled unitary |up><up| (x) U_{m-} + |down><down| (x) U_{m+}. With the
/// rest-mass phase enabled the down amplitude picks up exp(-i delta_e t / hbar).
inline JointState controlled_evolve(const JointState& state, const PhysicalConfig& cfg, double t,
                                    const BranchEvolver& evolve) {
  const BranchMasses bm = branch_masses(cfg);
  const cplx rest = cfg.rest_mass_phase ? std::polar(1.0, -cfg.delta_e * t / cfg.hbar()) : cplx{1.0, 0.0};
  std::vector<JointState::Member> out;
  out.reserve(state.members().size());
  for (const auto& m : state.members()) {
    PureJointState s{m.state.alpha, m.state.beta * rest, evolve(m.state.up, bm.m_minus, t),
                      evolve(m.state.down, bm.m_plus, t)};
    out.push_back({m.weight, std::move(s)});
  }
  return JointState::mixture(std::move(out));
}

/// <down-branch | up-branch> of a pure state.
inline cplx branch_overlap(const PureJointState& s) { return inner_product(s.down, s.up); }

inline cplx branch_overlap(const JointState& state) {
  if (!state.is_pure()) throw UnsupportedState("branch_overlap: defined for pure joint states");
  return branch_overlap(state.members().front().state);
}

/// tr_ext |Psi><Psi|, ensemble-weighted.
inline SpinState2 reduced_spin_state(const JointState& state) {
  SpinState2::Matrix rho = SpinState2::Matrix::Zero();
  for (const auto& m : state.members()) {
    const auto& s = m.state;
    const cplx off = s.alpha * std::conj(s.beta) * branch_overlap(s);
    rho(0, 0) += m.weight * std::norm(s.alpha);
    rho(1, 1) += m.weight * std::norm(s.beta);
    rho(0, 1) += m.weight * off;
    rho(1, 0) += m.weight * std::conj(off);
  }
  return SpinState2(rho, 1e-10);
}

/// |alpha|^2 |up|^2 + |beta|^2 |down|^2, ensemble-weighted.
inline ScreenDistribution reduced_position_density(const JointState& state) {
  const UniformGrid& g = state.grid();
  std::vector<double> rho(g.n, 0.0);
  for (const auto& m : state.members()) {
    const auto& s = m.state;
    require_same_grid(s.up.grid, g, "reduced_position_density");
    const double pu = m.weight * std::norm(s.alpha);
    const double pd = m.weight * std::norm(s.beta);
    for (std::size_t k = 0; k < g.n; ++k) rho[k] += pu * std::norm(s.up.values[k]) + pd * std::norm(s.down.values[k]);
  }
  return {g, std::move(rho)};
}

/// Base-2 von Neumann entropy of the reduced spin state of a pure joint state.
inline double entanglement_entropy(const JointState& state) {
  if (!state.is_pure()) throw UnsupportedState("entanglement_entropy: only pure joint states are supported");
  const auto ev = reduced_spin_state(state).eigenvalues();
  double s = 0.0;
  for (double l : ev)
    if (l > 1e-300) s -= l * std::log2(l);
  return std::max(0.0, s);
}

/// Eigenvalues (1 +/- sqrt(1 - 4|alpha|^2|beta|^2 (1 - |ov|^2)))/2 in closed form.
inline std::array<double, 2> spin_eigenvalues_from_overlap(double p_up, double overlap_abs) {
  const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * p_up * (1.0 - p_up) * (1.0 - overlap_abs * overlap_abs)));
  return {0.5 * (1.0 - disc), 0.5 * (1.0 + disc)};
}

inline constexpr double kIncoherentTolerance = 1e-10;

/// Evolves q|up><up| + (1-q)|down><down| (x) external and checks the spin
/// state comes back unchanged.
inline SpinState2 incoherent_invariance_check(double q, const ComplexField1D& external, const PhysicalConfig& cfg,
                                              double t, const BranchEvolver& evolve) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("incoherent_invariance_check: q must lie in [0, 1]");
  std::vector<JointState::Member> members;
  members.push_back({q, PureJointState{1.0, 0.0, external, external}});
  members.push_back({1.0 - q, PureJointState{0.0, 1.0, external, external}});
  const JointState evolved = controlled_evolve(JointState::mixture(std::move(members)), cfg, t, evolve);
  const SpinState2 out = reduced_spin_state(evolved);
  const double err = (out.matrix() - SpinState2::diagonal(q).matrix()).cwiseAbs().maxCoeff();
  if (!(err <= kIncoherentTolerance)) {
    std::ostringstream os;
    os << "incoherent_invariance_check: reduced spin state moved by " << err;
    throw InvariantViolation(os.str());
  }
  return out;
}

}  // namespace interfall
