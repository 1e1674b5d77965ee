// Homogeneous velocity equilibria mu(v) on R^2 and their dispersion kernel.
//
// Fourier convention:  h_hat(eta) = int h(v) e^{-i v.eta} dv,  so
// (grad_v mu)^(eta) = i eta mu_hat(eta).  The screened time kernel is
//
//     K(t, xi) = (1+|xi|^2)^{-1} i xi . (grad_v mu)^(t xi)
//              = -(|xi|^2/(1+|xi|^2)) t mu_hat(t xi),
//
// real for the even-in-v profiles supported here, and its half-line Fourier
// transform K_tilde(tau, xi) = int_0^inf e^{-i tau t} K(t, xi) dt feeds the
// Penrose margin  inf |1 - K_tilde|.
//
// Supported kinds: the unit Maxwellian e^{-|v|^2/2}/(2 pi), a symmetric
// two-bump (Maxwellians at +-u0 e1), and a tabulated radial profile m(|v|)
// with an optional exponential tail model.  Tabulated input is renormalized
// so that int mu dv = 1.
#pragma once

#include <array>
#include <memory>
#include <vector>

#include "landau/core.hpp"

namespace landau {

class EquilibriumProfile {
 public:
  enum class Kind { maxwellian, two_bump, tabulated };

  static EquilibriumProfile maxwellian(double vmax = 8.0);
  static EquilibriumProfile two_bump(double u0, double vmax = 12.0);
  // knots (r_i, m_i), r ascending from 0; decay_order >= 7 describes the
  // Fourier-side falloff and sets kernel truncation times.
  static EquilibriumProfile tabulated(std::vector<double> r, std::vector<double> m,
                                      bool tail_model, double decay_order, double vmax = 8.0);

  Kind kind() const { return kind_; }
  bool radial() const { return kind_ != Kind::two_bump; }
  double vmax() const { return vmax_; }
  double decay_order() const { return decay_order_; }
  double u0() const { return u0_; }

  double eval_mu(const Vec2& v) const;
  Vec2 grad_mu(const Vec2& v) const;

  // mu_hat(eta); for radial kinds this is radial_fourier_factor(|eta|)
  double mu_hat(const Vec2& eta) const;
  double radial_fourier_factor(double s) const;

  // (grad_v mu)^(eta) = i eta mu_hat(eta), returned as (complex, complex)
  std::array<cplx, 2> fourier_grad_mu(const Vec2& eta) const;

  double kernel_time(double t, const Vec2& xi) const;

  // truncation time: envelope |K(., xi)| below 1e-12 of its peak past this
  double kernel_cutoff(double xi_mag) const;

  // how much finer than the Gaussian the kernel envelope wiggles (panel
  // budget multiplier for fixed-panel oscillatory rules)
  double envelope_scale() const;

  struct KernelHat {
    cplx value{0.0, 0.0};
    bool zero_wavenumber = false;
  };
  KernelHat kernel_hat(double tau, const Vec2& xi, double tol = 1e-10) const;

 private:
  EquilibriumProfile() = default;
  void compute_envelope_cut();

  Kind kind_ = Kind::maxwellian;
  double vmax_ = 8.0;
  double decay_order_ = 99.0;
  double u0_ = 0.0;

  struct Table;  // tabulated-kind state (splines, cached Hankel transform)
  std::shared_ptr<const Table> table_;

  double envelope_cut_s_ = 0.0;  // s beyond which s|F(s)| < 1e-12 * peak
};

struct PenroseScanParams {
  double tau_max = 30.0;    // tau in [0, tau_max]; tau<0 follows by conjugation
  int n_tau = 120;
  double xi_min = 1.0 / 64.0;
  double xi_max = 16.0;
  int n_xi = 48;            // log-spaced magnitudes
  int n_dir = 0;            // 0: 1 direction for radial profiles, 8 otherwise
  int sweep_panels = 256;   // per-row Filon panels, scaled by envelope_scale()
  double quad_tol = 1e-10;
  double refine_tol = 1e-3; // stop when the margin moves less than this
  int max_rounds = 6;
  double violation_tol = 1e-9;
};

struct PenroseScan {
  double margin = 0.0;
  bool violation = false;
  double arg_tau = 0.0;
  Vec2 arg_xi;
  int rounds = 0;
  double last_change = 0.0;
  struct Sample {
    double tau, xi_mag;
    cplx K;
    double dist;  // |1 - K_tilde|
  };
  std::vector<Sample> samples;  // final round, first scan direction
};

PenroseScan penrose_margin(const EquilibriumProfile& mu, const PenroseScanParams& p = {});

}  // namespace landau
