#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "interfall/errors.hpp"
#include "interfall/grid.hpp"
#include "interfall/nonmarkov.hpp"
#include "interfall/parallel.hpp"
#include "interfall/physics.hpp"
#include "interfall/propagators.hpp"
#include "interfall/slit_interference.hpp"
#include "interfall/spin_dynamics.hpp"
#include "interfall/wavepacket.hpp"

namespace interfall {

// ---------------------------------------------------------------------------
// Diffraction in gravity

struct DiffractSetup {
  PhysicalConfig config;
  SlitGeometry geometry;  ///< L is ignored; screen distances come from `distances`
  std::vector<double> distances{1.0, 3.0, 8.0};
  ValidityLimits limits;
};

struct DiffractResult {
  double L = 0.0;
  UniformGrid grid;
  std::vector<double> density;           ///< normalized |psi|^2 per metre
  std::vector<double> density_g0_shifted;  ///< g = 0 pattern evaluated at x - x_c
  double classical_displacement = 0.0;
  double envelope_width = 0.0;  ///< lambda L / (2a)
  double peak_position = 0.0;
  double control_error = 0.0;  ///< pointwise relative error between the two columns
};

/// Position of the global maximum of the analytic density near the sampled
/// maximum, refined by golden-section search.
inline double refine_peak(const SlitGeometry& geom, const PhysicalConfig& cfg, const UniformGrid& grid,
                          std::span<const double> density) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < density.size(); ++k)
    if (density[k] > density[best]) best = k;
  auto rho = [&](double x) {
    cplx s{0.0, 0.0};
    for (double b : geom.centers) s += single_slit_amplitude(x, b, geom, cfg, false);
    return std::norm(s);
  };
  double lo = grid.x(best == 0 ? 0 : best - 1);
  double hi = grid.x(std::min(best + 1, grid.n - 1));
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
  double fc = rho(c), fd = rho(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = rho(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = rho(d);
    }
  }
  return 0.5 * (lo + hi);
}

inline DiffractResult diffract_at(const DiffractSetup& setup, double L) {
  SlitGeometry geom = setup.geometry;
  geom.L = L;
  const PhysicalConfig& cfg = setup.config;
  geom.validate(cfg.lambda, setup.limits);
  const UniformGrid grid = default_screen_grid(geom, cfg);
  DiffractResult r;
  r.L = L;
  r.grid = grid;
  const ScreenWavefunction w = multi_slit_wavefunction(geom, cfg, grid, {}, setup.limits);
  r.density = w.density();
  r.classical_displacement = classical_displacement(geom, cfg);
  PhysicalConfig still = cfg;
  still.g = 0.0;
  SlitPatternOptions loose;
  loose.check_coverage = false;
  const ScreenWavefunction control =
      multi_slit_wavefunction(geom, still, grid.shifted(-r.classical_displacement), loose, setup.limits);
  r.density_g0_shifted = control.density();
  r.control_error = pattern_relative_error(r.density, r.density_g0_shifted, kFreefallFloor);
  r.envelope_width = cfg.lambda * L / (2.0 * geom.a);
  r.peak_position = refine_peak(geom, cfg, grid, r.density);
  return r;
}

inline std::vector<DiffractResult> run_diffract(const DiffractSetup& setup, unsigned threads = 1) {
  std::vector<DiffractResult> out(setup.distances.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = diffract_at(setup, setup.distances[i]); });
  return out;
}

// ---------------------------------------------------------------------------
// Spin-dependent fall behind a double slit

/// Defaults come from tools/calibrate_fig2.cpp: they put the first visibility
/// minimum near z = 30 m for the neutron at lambda = 1e-8 m, delta_e = 1e-14 J.
struct DecohereSetup {
  PhysicalConfig config = [] {
    PhysicalConfig c;
    c.lambda = 1e-8;
    c.delta_e = 1e-14;
    c.g = 9.8;
    return c;
  }();
  double slit_half_width = 1e-5;
  double slit_center = 1.98e-4;  ///< slits at +/- slit_center
  GaussianPacket packet{1e-3, 0.0, 0.0};
  double sigma_z = 3e-4;        ///< longitudinal packet width at the slits
  double window_factor = 3.0;   ///< delta_t = window_factor * (z spread at screen) / v_z
  std::size_t time_samples = 21;
  std::size_t screen_samples = 4096;
  double screen_envelopes = 3.0;   ///< grid half-width in single-slit envelope widths
  double visibility_fringes = 3.0; ///< visibility window half-width in fringe spacings
  cplx alpha{std::numbers::sqrt2 / 2.0, 0.0};
  cplx beta{std::numbers::sqrt2 / 2.0, 0.0};

  [[nodiscard]] std::vector<Aperture> apertures() const {
    return {Aperture{-slit_center, slit_half_width}, Aperture{slit_center, slit_half_width}};
  }

  void validate() const {
    config.validate();
    packet.validate();
    if (!(slit_half_width > 0.0) || !(slit_center > slit_half_width))
      throw ConfigError("decohere: need 0 < slit half-width < slit center");
    if (!(sigma_z > 0.0) || !(window_factor > 0.0)) throw ConfigError("decohere: sigma_z and window factor must be positive");
    if (screen_samples < 64) throw ConfigError("decohere: too few screen samples");
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
      throw ConfigError("decohere: |alpha|^2 + |beta|^2 must equal one");
  }
};

/// Semi-classical arrival time z m lambda / h of a branch with the given mass.
inline double arrival_time(const PhysicalConfig& cfg, double mass, double z) { return z * mass * cfg.lambda / cfg.h; }

struct BranchAtPlane {
  double mass = 0.0;
  double t_center = 0.0;
  TimeAverageWindow window;
  ComplexField1D amplitude;  ///< x amplitude at t_center on the relative grid
  ScreenDistribution averaged;
};

struct PlaneSnapshot {
  double z = 0.0;
  UniformGrid grid;          ///< coordinates relative to the classical m- particle
  double frame_offset = 0.0; ///< lab x = relative x + frame_offset
  double fringe_spacing = 0.0;
  double branch_separation = 0.0;  ///< extra fall of the m+ branch, g t dt
  BranchAtPlane up;
  BranchAtPlane down;
  JointState joint;
  ScreenDistribution averaged;  ///< spin-averaged time-averaged density
};

namespace detail {

inline BranchAtPlane branch_at_plane(const DecohereSetup& s, double mass, double z, const UniformGrid& rel,
                                     const UniformGrid& lab) {
  const PhysicalConfig& cfg = s.config;
  const double hbar = cfg.hbar();
  const double pz = cfg.h / cfg.lambda;
  const GaussianPacket zpkt{s.sigma_z, pz, 0.0};
  BranchAtPlane b;
  b.mass = mass;
  b.t_center = arrival_time(cfg, mass, z);
  const double spread = gaussian_density_width(zpkt, mass, hbar, b.t_center);
  b.window = TimeAverageWindow{b.t_center, s.window_factor * spread / (pz / mass), s.time_samples};
  const auto aps = s.apertures();
  auto generator = [&](double t) {
    ComplexField1D f = aperture_transmit_evolve(s.packet, aps, mass, cfg, t, lab);
    const cplx zamp = free_gaussian_amplitude(zpkt, mass, hbar, t, z);
    for (auto& v : f.values) v *= zamp;
    return f;
  };
  const ScreenDistribution lab_avg = time_averaged_density(generator, b.window, lab);
  b.averaged = ScreenDistribution(rel, std::vector<double>(lab_avg.values().begin(), lab_avg.values().end()));
  ComplexField1D amp = aperture_transmit_evolve(s.packet, aps, mass, cfg, b.t_center, lab);
  amp.grid = rel;
  b.amplitude = std::move(amp);
  return b;
}

}  // namespace detail

inline PlaneSnapshot snapshot_at(const DecohereSetup& s, double z) {
  s.validate();
  if (!(z > 0.0)) throw ConfigError("decohere: screen distance must be positive");
  const PhysicalConfig& cfg = s.config;
  const BranchMasses bm = branch_masses(cfg);
  PlaneSnapshot snap;
  snap.z = z;
  const double t_minus = arrival_time(cfg, bm.m_minus, z);
  const double t_plus = arrival_time(cfg, bm.m_plus, z);
  snap.frame_offset = -0.5 * cfg.g * t_minus * t_minus;
  snap.branch_separation = 0.5 * cfg.g * (t_plus * t_plus - t_minus * t_minus);
  snap.fringe_spacing = cfg.lambda * z / (2.0 * s.slit_center);
  const double envelope = cfg.lambda * z / (2.0 * s.slit_half_width);
  const double half = s.screen_envelopes * envelope + 0.5 * snap.branch_separation;
  const auto per_fringe = static_cast<std::size_t>(std::ceil(32.0 * 2.0 * half / snap.fringe_spacing));
  const std::size_t n = std::max(s.screen_samples, per_fringe);
  snap.grid = UniformGrid::centered(-0.5 * snap.branch_separation, half, n);
  const UniformGrid lab = snap.grid.shifted(snap.frame_offset);
  snap.up = detail::branch_at_plane(s, bm.m_minus, z, snap.grid, lab);
  snap.down = detail::branch_at_plane(s, bm.m_plus, z, snap.grid, lab);
  snap.joint = JointState::pure(s.alpha, s.beta, snap.up.amplitude, snap.down.amplitude);
  snap.averaged = spin_averaged_density(snap.up.averaged, snap.down.averaged, std::norm(s.alpha), std::norm(s.beta));
  return snap;
}

struct DecoherePoint {
  double z = 0.0;
  double visibility = std::numeric_limits<double>::quiet_NaN();
  double overlap_abs = 0.0;
  double entropy_bits = 0.0;
  std::optional<std::string> warning;
};

inline DecoherePoint decohere_point(const PlaneSnapshot& snap, const DecohereSetup& s) {
  DecoherePoint p;
  p.z = snap.z;
  p.overlap_abs = std::abs(branch_overlap(snap.joint));
  p.entropy_bits = entanglement_entropy(snap.joint);
  try {
    p.visibility = fringe_visibility(snap.averaged, s.visibility_fringes * snap.fringe_spacing);
  } catch (const VisibilityUndefined& e) {
    p.warning = e.what();
  }
  return p;
}

/// Visibility, branch overlap and entanglement entropy along the screen distances.
inline std::vector<DecoherePoint> run_decohere(const DecohereSetup& s, const std::vector<double>& zs,
                                               unsigned threads = 1, std::vector<PlaneSnapshot>* snapshots = nullptr) {
  std::vector<DecoherePoint> out(zs.size());
  std::vector<PlaneSnapshot> snaps(zs.size());
  parallel_for(zs.size(), threads, [&](std::size_t i) {
    snaps[i] = snapshot_at(s, zs[i]);
    out[i] = decohere_point(snaps[i], s);
  });
  if (snapshots != nullptr) *snapshots = std::move(snaps);
  return out;
}

/// Ranks with ties sharing their mean rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

/// Spearman rank correlation; NaN when either sample is constant.
inline double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ShapeError("spearman_correlation: need two equal samples of size >= 2");
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = 0.5 * (n + 1.0);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Causal break

struct GratingSpec {
  double period = 0.0;
  double duty = 0.5;
  double offset = 0.0;
};

struct CausalBreakSetup {
  DecohereSetup upstream;
  double z_filter = 30.0;
  double z_screen = 80.0;
  GaussianPacket reprep{3e-4, 0.0, 0.0};  ///< x0 is relative to the classical m- particle at the filter
  double reprep_sigma_z = 3e-4;
  bool downstream_coupling = true;  ///< false sets delta_e = 0 after the re-preparation
  std::optional<GratingSpec> grating;
  std::size_t screen_samples = 2048;

  void validate() const {
    upstream.validate();
    reprep.validate();
    if (!(z_filter > 0.0) || !(z_screen > z_filter)) throw ConfigError("causal-break: need 0 < z_filter < z_screen");
    if (!(reprep_sigma_z > 0.0)) throw ConfigError("causal-break: re-preparation sigma_z must be positive");
  }
};

/// Branch screen densities after re-preparing the packet at the filter plane.
inline DownstreamBranches downstream_branches(const CausalBreakSetup& s) {
  PhysicalConfig cfg = s.upstream.config;
  const double t_f = arrival_time(cfg, cfg.m, s.z_filter);
  const BranchMasses up_masses = branch_masses(cfg);
  const double x_ref = -0.5 * cfg.g * arrival_time(cfg, up_masses.m_minus, s.z_filter) *
                       arrival_time(cfg, up_masses.m_minus, s.z_filter);
  if (!s.downstream_coupling) cfg.delta_e = 0.0;
  const BranchMasses bm = branch_masses(cfg);
  const double hbar = cfg.hbar();
  const double dz = s.z_screen - s.z_filter;
  const double pz = cfg.h / cfg.lambda;
  const GaussianPacket zpkt{s.reprep_sigma_z, pz, 0.0};
  GaussianPacket xpkt = s.reprep;
  xpkt.x0 += x_ref;

  const double tau_minus = arrival_time(cfg, bm.m_minus, dz);
  const double tau_plus = arrival_time(cfg, bm.m_plus, dz);
  const double frame = xpkt.x0 - 0.5 * cfg.g * tau_minus * tau_minus;
  const double sep = 0.5 * cfg.g * (tau_plus * tau_plus - tau_minus * tau_minus);
  const double width = gaussian_density_width(s.reprep, bm.m_plus, hbar, tau_plus);
  const double half = 8.0 * width + 0.5 * sep + std::abs(s.reprep.x0);
  const UniformGrid rel = UniformGrid::centered(s.reprep.x0 - 0.5 * sep, half, s.screen_samples);
  const UniformGrid lab = rel.shifted(frame);

  auto branch = [&](double mass) {
    const double tau = arrival_time(cfg, mass, dz);
    const double spread = gaussian_density_width(zpkt, mass, hbar, tau);
    const TimeAverageWindow win{t_f + tau, s.upstream.window_factor * spread / (pz / mass), s.upstream.time_samples};
    auto generator = [&](double t) {
      const double el = t - t_f;
      ComplexField1D f = evolve_gaussian_gravity(xpkt, mass, cfg.g, el, lab, hbar);
      const cplx zamp = free_gaussian_amplitude(zpkt, mass, hbar, el, dz);
      for (auto& v : f.values) v *= zamp;
      return f;
    };
    const ScreenDistribution d = time_averaged_density(generator, win, lab);
    return ScreenDistribution(rel, std::vector<double>(d.values().begin(), d.values().end()));
  };
  return {branch(bm.m_minus), branch(bm.m_plus)};
}

inline CausalBreakResult run_causal_break(const CausalBreakSetup& s, unsigned threads = 1,
                                          PlaneSnapshot* filter_plane = nullptr) {
  s.validate();
  PlaneSnapshot snap;
  DownstreamBranches down;
  parallel_for(2, threads, [&](std::size_t i) {
    if (i == 0) snap = snapshot_at(s.upstream, s.z_filter);
    else down = downstream_branches(s);
  });
  FilterPair filters = s.grating ? grating_filters(snap.grid, s.grating->period, s.grating->duty, s.grating->offset)
                                 : build_complementary_filters(snap.up.averaged, snap.down.averaged);
  CausalBreakResult r = causal_break_from_filters(snap.joint, std::move(filters), down);
  if (filter_plane != nullptr) *filter_plane = std::move(snap);
  return r;
}

/// Control run: no coupling after the re-preparation and equal spin populations.
inline double markov_control_distinguishability(const CausalBreakSetup& s) {
  CausalBreakSetup c = s;
  c.downstream_coupling = false;
  const DownstreamBranches down = downstream_branches(c);
  const FilterArm w = screen_for_spin(SpinState2::diagonal(0.5), down);
  const FilterArm b = screen_for_spin(SpinState2::pure(std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0), down);
  return total_variation_distance(w.screen, b.screen);
}

// ---------------------------------------------------------------------------
// Neutron interferometer phase

struct CowSetup {
  double m_inertial = constants::neutron_mass;
  double m_grav = constants::neutron_mass;
  double g = 9.8;
  double area = 1e-3;  ///< enclosed area, m^2
  double lambda = 1.4e-10;
  double h = constants::planck;
  std::vector<double> tilts{0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 1.05, 1.2, 1.35, std::numbers::pi / 2.0};
};

struct CowPoint {
  double tilt = 0.0;
  double phase = 0.0;
};

inline std::vector<CowPoint> run_cow(const CowSetup& s) {
  std::vector<CowPoint> out;
  for (double phi : s.tilts) out.push_back({phi, cow_phase(s.m_inertial, s.m_grav, s.g, s.area, s.lambda, phi, s.h)});
  return out;
}

}  // namespace interfall
