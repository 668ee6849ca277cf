//! The comparison kernel
//! `rho_alpha^{beta,gamma}(t, x) = t^{gamma/alpha} (|x|^beta ∧ 1) (t^{1/alpha} + |x|)^{-d-alpha}`
//! and numerical verification of the convolution inequalities it satisfies.
//!
//! Every density and perturbation estimate downstream is expressed in these
//! kernels, so their convolution algebra is verified first, on its own.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::quad::{self, QuadOpts};
use crate::report::{BoundReport, GridPointRatio};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parameters of one comparison kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoKernel {
    pub alpha: f64,
    pub beta_exp: f64,
    pub gamma_exp: f64,
    pub d: usize,
}

impl RhoKernel {
    pub fn new(alpha: f64, beta_exp: f64, gamma_exp: f64, d: usize) -> Result<Self> {
        if !(0.0 < alpha && alpha < 2.0) {
            return Err(Error::input(format!("kernel order must lie in (0, 2), got {alpha}")));
        }
        if d == 0 {
            return Err(Error::input("kernel dimension must be positive"));
        }
        Ok(RhoKernel { alpha, beta_exp, gamma_exp, d })
    }

    /// Evaluate at time `t > 0` and radius `r = |x| >= 0`.
    pub fn eval_radial(&self, t: f64, r: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::input(format!("kernel time must be positive, got {t}")));
        }
        Ok(rho_radial(self.alpha, self.beta_exp, self.gamma_exp, self.d, t, r))
    }

    pub fn eval(&self, t: f64, x: &Point) -> Result<f64> {
        self.eval_radial(t, x.norm())
    }
}

/// `(r^beta ∧ 1)` with the convention `r^0 = 1` even at `r = 0`.
#[inline]
fn pow_min_one(r: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        r.powf(beta).min(1.0)
    }
}

/// Free-function kernel evaluation used in hot loops.
#[inline]
pub fn rho_radial(alpha: f64, beta: f64, gamma: f64, d: usize, t: f64, r: f64) -> f64 {
    t.powf(gamma / alpha) * pow_min_one(r, beta) * (t.powf(1.0 / alpha) + r).powf(-(d as f64) - alpha)
}

/// `rho_alpha^{0,alpha}(t, r)`, the shape that appears in every convolution.
#[inline]
pub fn rho_unit(alpha: f64, d: usize, t: f64, r: f64) -> f64 {
    t * (t.powf(1.0 / alpha) + r).powf(-(d as f64) - alpha)
}

/// Identifiers of the convolution checks. The tokens (`L2.1`, ...) are the
/// stable names used in configs, reports and the guide's check catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvCheckId {
    /// Mass and log-weighted mass of `rho^{0,alpha}`:
    /// `∫ rho dx <= C` and `∫ |ln|x|| rho dx <= C (1 + |ln t|)`.
    RhoMass,
    /// Cross-order convolution bound
    /// `∫ rho_at^{0,at}(t-tau, w-eta) rho_a^{0,a}(tau, eta) deta
    ///    <= C exp(|a-at| |ln|w||) (rho_a^{0,a}(t,w) + rho_at^{0,at}(t,w))`.
    CrossConvolution,
    /// Same with the far-field logarithm `1_{|w-eta|>=2} ln|w-eta|` inside
    /// and `(1 + |ln tau| + |ln(t-tau)|)` on the right.
    LogCrossConvolution,
}

impl ConvCheckId {
    pub fn token(&self) -> &'static str {
        match self {
            ConvCheckId::RhoMass => "L2.1",
            ConvCheckId::CrossConvolution => "L2.2",
            ConvCheckId::LogCrossConvolution => "L2.3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "L2.1" => Ok(ConvCheckId::RhoMass),
            "L2.2" => Ok(ConvCheckId::CrossConvolution),
            "L2.3" => Ok(ConvCheckId::LogCrossConvolution),
            _ => Err(Error::input(format!("unknown convolution check `{s}`"))),
        }
    }
}

/// Grid over which a convolution check fits its constant.
///
/// The two regimes distinguished in the convolution estimates are
/// `|w|` below and above `t^{1/alpha}`; the dyadic `t` ladder crossed with
/// log-spaced `|w|` covers both. `|w|` is floored at 1e-3: the right sides
/// carry `exp(|a - at| |ln|w||)`, which blows up as `w -> 0` and makes the
/// comparison vacuous there (noted in every report).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvGrid {
    /// Compact order interval `[alpha1, alpha2] ⊂ (0,2)`.
    pub alpha_interval: (f64, f64),
    /// Points per axis of the (alpha, alpha~) grid.
    pub alpha_points: usize,
    /// Dyadic time ladder exponents: t = 2^{-k} for k in 1..=t_levels.
    pub t_levels: u32,
    /// Ratios tau/t.
    pub tau_fractions: Vec<f64>,
    /// Number of log-spaced |w| values in [w_floor, 1].
    pub w_points: usize,
    pub w_floor: f64,
    pub d: usize,
}

impl Default for ConvGrid {
    fn default() -> Self {
        ConvGrid {
            alpha_interval: (0.5, 1.8),
            alpha_points: 5,
            t_levels: 10,
            tau_fractions: vec![0.1, 0.5, 0.9],
            w_points: 7,
            w_floor: 1e-3,
            d: 1,
        }
    }
}

impl ConvGrid {
    fn validate(&self) -> Result<()> {
        let (a1, a2) = self.alpha_interval;
        if !(0.0 < a1 && a1 <= a2 && a2 < 2.0) {
            return Err(Error::input(format!(
                "alpha interval must be a compact subinterval of (0,2), got [{a1}, {a2}]"
            )));
        }
        if self.d != 1 {
            return Err(Error::input(
                "convolution checks are implemented for d = 1; densities and \
                 perturbation checks support d = 2",
            ));
        }
        if self.alpha_points < 2 || self.w_points < 2 || self.t_levels < 2 {
            return Err(Error::input("convolution grid too small to be meaningful"));
        }
        for &f in &self.tau_fractions {
            if !(0.0 < f && f < 1.0) {
                return Err(Error::input(format!("tau/t ratio must lie in (0,1), got {f}")));
            }
        }
        Ok(())
    }

    fn alphas(&self, refined: bool) -> Vec<f64> {
        let n = if refined { 2 * self.alpha_points - 1 } else { self.alpha_points };
        let (a1, a2) = self.alpha_interval;
        (0..n).map(|i| a1 + (a2 - a1) * i as f64 / (n - 1) as f64).collect()
    }

    fn times(&self, refined: bool) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..=self.t_levels {
            out.push(0.5f64.powi(k as i32));
            if refined && k < self.t_levels {
                out.push(0.5f64.powf(k as f64 + 0.5));
            }
        }
        out
    }

    fn taus(&self, refined: bool) -> Vec<f64> {
        if !refined {
            return self.tau_fractions.clone();
        }
        let mut out = self.tau_fractions.clone();
        for w in self.tau_fractions.windows(2) {
            out.push(0.5 * (w[0] + w[1]));
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn ws(&self, refined: bool) -> Vec<f64> {
        let n = if refined { 2 * self.w_points - 1 } else { self.w_points };
        (0..n)
            .map(|i| self.w_floor * (1.0 / self.w_floor).powf(i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Left side of the mass inequalities: `∫ (|ln|x||)^p rho_a^{0,a}(t,x) dx`
/// over the line, `p` in {0, 1}.
fn rho_mass_integral(alpha: f64, t: f64, log_weight: bool, opts: &QuadOpts) -> Result<f64> {
    let scale = t.powf(1.0 / alpha);
    // Choose the cutoff so the crude tail bound t R^{-alpha}/alpha is
    // negligible against the known mass scale 1/alpha.
    let cut = (t / (alpha * 1e-13)).powf(1.0 / alpha).clamp(1e2, 1e30);
    let weight = move |r: f64| if log_weight { r.ln().abs() } else { 1.0 };
    let body = quad::integrate(
        |r| weight(r) * rho_unit(alpha, 1, t, r),
        &quad::graded_breaks_around(1e-14, cut, &[scale, 1.0], 1e-14, 3),
        opts,
    )?;
    let tail = if log_weight {
        t * (cut.ln() / alpha + 1.0 / (alpha * alpha)) * cut.powf(-alpha)
    } else {
        t * cut.powf(-alpha) / alpha
    };
    Ok(2.0 * (body.value + tail))
}

/// Left side of the cross convolution at one grid point (d = 1).
fn cross_conv_integral(
    alpha: f64,
    alpha_t: f64,
    t: f64,
    tau: f64,
    w: f64,
    far_log: bool,
    opts: &QuadOpts,
) -> Result<f64> {
    let s = t - tau;
    let f = move |eta: f64| {
        let gap = (w - eta).abs();
        let factor = if far_log {
            if gap >= 2.0 {
                gap.ln()
            } else {
                return 0.0;
            }
        } else {
            1.0
        };
        factor * rho_unit(alpha_t, 1, s, gap) * rho_unit(alpha, 1, tau, eta.abs())
    };
    let cut = 10.0f64.max(4.0 * (1.0 + w.abs()));
    let breaks = if far_log {
        // Integrand supported on |w - eta| >= 2 only.
        let mut b = quad::graded_breaks_around(-cut, w - 2.0, &[0.0f64.min(w - 2.0 - 1e-9)], 1e-12, 3);
        b.extend(quad::log_breaks(w + 2.0, cut, 6).iter());
        b.sort_by(f64::total_cmp);
        b.dedup_by(|x, y| (*x - *y).abs() <= 1e-13);
        b
    } else {
        quad::graded_breaks_around(-cut, cut, &[0.0, w], 1e-12, 3)
    };
    let body = quad::integrate(f, &breaks, opts).map_err(|e| {
        Error::Numerical(format!(
            "cross convolution at (alpha={alpha}, alpha~={alpha_t}, t={t}, tau={tau}, w={w}): {e}"
        ))
    })?;
    // |eta| > cut: both kernels are in their power tails.
    let log_cap = if far_log { (2.0 * cut).ln().max(1.0) * 2.0 } else { 1.0 };
    let tail_bound = log_cap
        * 2.0
        * tau
        * s
        * (cut - w.abs()).powf(-1.0 - alpha_t.min(alpha))
        * cut.powf(-alpha.max(alpha_t))
        / alpha.min(alpha_t);
    Ok(body.value + body.error + tail_bound)
}

/// Fit the constant of one convolution inequality over the declared grid at
/// two resolutions.
pub fn check_convolution_bound(check: ConvCheckId, grid: &ConvGrid) -> Result<BoundReport> {
    grid.validate()?;
    let opts = QuadOpts::with_tol(1e-13, 1e-9);

    let scan = |refined: bool| -> Result<Vec<GridPointRatio>> {
        let alphas = grid.alphas(refined);
        let times = grid.times(refined);
        match check {
            ConvCheckId::RhoMass => {
                let mut jobs = Vec::new();
                for &a in &alphas {
                    for &t in &times {
                        for log_weight in [false, true] {
                            jobs.push((a, t, log_weight));
                        }
                    }
                }
                jobs.par_iter()
                    .map(|&(a, t, log_weight)| {
                        let lhs = rho_mass_integral(a, t, log_weight, &opts)?;
                        let rhs = if log_weight { 1.0 + t.ln().abs() } else { 1.0 };
                        Ok(GridPointRatio::new(
                            vec![
                                ("alpha".into(), a),
                                ("t".into(), t),
                                ("log_weight".into(), log_weight as u8 as f64),
                            ],
                            lhs,
                            rhs,
                        ))
                    })
                    .collect()
            }
            ConvCheckId::CrossConvolution | ConvCheckId::LogCrossConvolution => {
                let far_log = check == ConvCheckId::LogCrossConvolution;
                let mut jobs = Vec::new();
                for &a in &alphas {
                    for &at in &alphas {
                        for &t in &times {
                            for &frac in &grid.taus(refined) {
                                for &w in &grid.ws(refined) {
                                    jobs.push((a, at, t, frac * t, w));
                                }
                            }
                        }
                    }
                }
                jobs.par_iter()
                    .map(|&(a, at, t, tau, w)| {
                        let lhs = cross_conv_integral(a, at, t, tau, w, far_log, &opts)?;
                        let envelope = ((a - at).abs() * w.ln().abs()).exp()
                            * (rho_unit(a, 1, t, w) + rho_unit(at, 1, t, w));
                        let rhs = if far_log {
                            (1.0 + tau.ln().abs() + (t - tau).ln().abs()) * envelope
                        } else {
                            envelope
                        };
                        Ok(GridPointRatio::new(
                            vec![
                                ("alpha".into(), a),
                                ("alpha_tilde".into(), at),
                                ("t".into(), t),
                                ("tau".into(), tau),
                                ("w".into(), w),
                            ],
                            lhs,
                            rhs,
                        ))
                    })
                    .collect()
            }
        }
    };

    let coarse = scan(false)?;
    let fine = scan(true)?;
    let sup = |pts: &[GridPointRatio]| pts.iter().map(|p| p.ratio).fold(0.0f64, f64::max);
    let grid_desc = format!(
        "alpha {}^2 in [{}, {}], t dyadic 2^-1..2^-{}, tau/t {:?}, |w| log [{}, 1], d={}",
        grid.alpha_points,
        grid.alpha_interval.0,
        grid.alpha_interval.1,
        grid.t_levels,
        grid.tau_fractions,
        grid.w_floor,
        grid.d
    );
    Ok(
        BoundReport::from_scan(check.token(), grid_desc, sup(&coarse), sup(&fine), fine).note(
            "|w| floored: the exp(|alpha-alpha~| |ln|w||) envelope diverges as w -> 0, \
             making smaller w vacuous",
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rho_formula_values() {
        let k = RhoKernel::new(1.0, 0.0, 1.0, 1).unwrap();
        assert_relative_eq!(k.eval_radial(1.0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(k.eval_radial(1.0, 1.0).unwrap(), 0.25, epsilon = 1e-15);
        assert!(k.eval_radial(0.0, 1.0).is_err());
        assert!(k.eval_radial(-1.0, 1.0).is_err());
        assert!(RhoKernel::new(2.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn rho_positive_and_zero_cases() {
        // beta > 0 kills the kernel at the origin, beta <= 0 does not.
        let k_pos = RhoKernel::new(1.2, 0.5, 1.0, 1).unwrap();
        assert_eq!(k_pos.eval_radial(0.3, 0.0).unwrap(), 0.0);
        let k_neg = RhoKernel::new(1.2, -0.5, 1.0, 1).unwrap();
        assert!(k_neg.eval_radial(0.3, 0.0).unwrap() > 0.0);
        let k_zero = RhoKernel::new(1.2, 0.0, 1.0, 1).unwrap();
        assert!(k_zero.eval_radial(0.3, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn mass_integral_matches_closed_form() {
        // For the unit kernel the mass has the closed form 2/alpha on the line.
        for &(alpha, t) in &[(1.0, 1.0), (0.7, 0.015625), (1.5, 0.25)] {
            let m = rho_mass_integral(alpha, t, false, &QuadOpts::default()).unwrap();
            assert_relative_eq!(m, 2.0 / alpha, max_relative = 1e-7);
        }
    }

    #[test]
    fn mass_check_passes() {
        let grid = ConvGrid {
            alpha_points: 3,
            t_levels: 5,
            ..Default::default()
        };
        let rep = check_convolution_bound(ConvCheckId::RhoMass, &grid).unwrap();
        assert!(rep.passed, "{rep:?}");
        // Largest mass on the alpha grid: 2/alpha1 = 4 at alpha = 0.5.
        assert!(rep.fitted_constant >= 2.0);
        assert!(rep.fitted_constant < 10.0);
    }

    #[test]
    fn cross_convolution_equal_orders_stable() {
        let grid = ConvGrid {
            alpha_interval: (1.0, 1.0 + 1e-12),
            alpha_points: 2,
            t_levels: 4,
            tau_fractions: vec![0.5],
            w_points: 3,
            ..Default::default()
        };
        let rep = check_convolution_bound(ConvCheckId::CrossConvolution, &grid).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.fitted_constant.is_finite() && rep.fitted_constant > 0.0);
    }

    #[test]
    fn far_log_integrand_vanishes_for_small_supports() {
        // With t, tau tiny the kernels concentrate well inside |w - eta| < 2,
        // so the far-field log integral is essentially zero.
        let lhs = cross_conv_integral(1.0, 1.2, 1e-3, 5e-4, 0.5, true, &QuadOpts::default()).unwrap();
        assert!(lhs < 1e-6, "got {lhs}");
    }

    #[test]
    fn invalid_grids_rejected() {
        let mut g = ConvGrid::default();
        g.d = 2;
        assert!(check_convolution_bound(ConvCheckId::RhoMass, &g).is_err());
        let mut g = ConvGrid::default();
        g.alpha_interval = (0.5, 2.0);
        assert!(check_convolution_bound(ConvCheckId::RhoMass, &g).is_err());
        let mut g = ConvGrid::default();
        g.tau_fractions = vec![1.5];
        assert!(check_convolution_bound(ConvCheckId::CrossConvolution, &g).is_err());
    }

    #[test]
    fn token_round_trip() {
        for id in [
            ConvCheckId::RhoMass,
            ConvCheckId::CrossConvolution,
            ConvCheckId::LogCrossConvolution,
        ] {
            assert_eq!(ConvCheckId::parse(id.token()).unwrap(), id);
        }
        assert!(ConvCheckId::parse("L9.9").is_err());
    }

    proptest! {
        /// Exact self-similarity of the unit kernel:
        /// rho(lambda^alpha t, lambda r) = lambda^{-d} rho(t, r).
        #[test]
        fn scaling_identity(
            alpha in 0.3f64..1.9,
            t in 1e-3f64..4.0,
            r in 0.0f64..20.0,
            lambda in 0.1f64..8.0,
        ) {
            let lhs = rho_unit(alpha, 1, lambda.powf(alpha) * t, lambda * r);
            let rhs = rho_unit(alpha, 1, t, r) / lambda;
            prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs().max(1e-300));
        }

        /// rho^{0,alpha} is nonincreasing in |x| at fixed t.
        #[test]
        fn monotone_in_radius(alpha in 0.3f64..1.9, t in 1e-3f64..4.0, r in 0.0f64..10.0, dr in 0.0f64..5.0) {
            prop_assert!(rho_unit(alpha, 1, t, r + dr) <= rho_unit(alpha, 1, t, r) + 1e-15);
        }
    }
}
