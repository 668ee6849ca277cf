//! Coefficient fields of the variable-order operator.
//!
//! A field is the pair `(alpha(x), n(x, h))` together with closed-form
//! upper bounds for its continuity moduli:
//!
//! * `beta(r)` bounds `sup_{|x-y|<=r} |alpha(x) - alpha(y)|`,
//! * `omega(r)` bounds `sup_{h, |x-y|<=r} |n(x,h) - n(y,h)|`.
//!
//! The moduli are family metadata, not estimates: the admissibility
//! conditions are integral conditions on the moduli (`omega(r)/r` and
//! `beta(r) |ln r| / r` must be integrable at 0, and `beta(r) = o(1/|ln r|)`),
//! which no finite sample can certify. Sampling only cross-checks that the
//! declared bounds actually dominate the field.
//!
//! Note on naming: the modulus of `n` is called `omega` here because the
//! letter psi is reserved for the characteristic exponent of the frozen
//! process (see the `symbol` module).

use crate::error::{Error, Result};
use crate::point::Point;
use crate::quad::{self, QuadOpts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Global bounds of a coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Spatial dimension. 1 and 2 are supported by every routine; larger
    /// values are representable but not exercised.
    pub d: usize,
    /// Lower order bound, in (0, 2).
    pub alpha_lower: f64,
    /// Upper order bound, in (0, 2).
    pub alpha_upper: f64,
    /// Lower intensity bound, positive.
    pub kappa1: f64,
    /// Upper intensity bound.
    pub kappa2: f64,
}

impl ModelParams {
    pub fn new(d: usize, alpha_lower: f64, alpha_upper: f64, kappa1: f64, kappa2: f64) -> Result<Self> {
        let p = ModelParams {
            d,
            alpha_lower,
            alpha_upper,
            kappa1,
            kappa2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > crate::point::MAX_DIM {
            return Err(Error::input(format!(
                "dimension must be in 1..={}, got {}",
                crate::point::MAX_DIM,
                self.d
            )));
        }
        if !(0.0 < self.alpha_lower && self.alpha_lower <= self.alpha_upper && self.alpha_upper < 2.0) {
            return Err(Error::input(format!(
                "order bounds must satisfy 0 < alpha_lower <= alpha_upper < 2, got [{}, {}]",
                self.alpha_lower, self.alpha_upper
            )));
        }
        if !(0.0 < self.kappa1 && self.kappa1 <= self.kappa2 && self.kappa2.is_finite()) {
            return Err(Error::input(format!(
                "intensity bounds must satisfy 0 < kappa1 <= kappa2 < inf, got [{}, {}]",
                self.kappa1, self.kappa2
            )));
        }
        Ok(())
    }
}

/// Closed-form modulus-of-continuity upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Modulus {
    Zero,
    /// `m(r) = min(slope * r, cap)`.
    LinearCapped { slope: f64, cap: f64 },
}

impl Modulus {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Modulus::Zero => 0.0,
            Modulus::LinearCapped { slope, cap } => (slope * r).min(cap),
        }
    }

    fn describe(&self) -> String {
        match *self {
            Modulus::Zero => "zero".into(),
            Modulus::LinearCapped { slope, cap } => format!("lin({slope},{cap})"),
        }
    }
}

/// Built-in order families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AlphaFamily {
    Constant { value: f64 },
    /// `alpha(x) = base + amplitude * (1 + tanh(rate * x1)) / 2`.
    TanhRamp { base: f64, amplitude: f64, rate: f64 },
    /// `alpha(x) = base + jump * 1_{x1 > 0}`. Discontinuous; kept as an
    /// adversarial case for the validator, which must reject it.
    Step { base: f64, jump: f64 },
}

impl AlphaFamily {
    pub fn eval(&self, x: &Point) -> f64 {
        match *self {
            AlphaFamily::Constant { value } => value,
            AlphaFamily::TanhRamp { base, amplitude, rate } => {
                base + amplitude * (1.0 + (rate * x.x1()).tanh()) / 2.0
            }
            AlphaFamily::Step { base, jump } => {
                if x.x1() > 0.0 {
                    base + jump
                } else {
                    base
                }
            }
        }
    }

    /// Closed range [inf alpha, sup alpha].
    pub fn range(&self) -> (f64, f64) {
        match *self {
            AlphaFamily::Constant { value } => (value, value),
            AlphaFamily::TanhRamp { base, amplitude, .. } => (base, base + amplitude),
            AlphaFamily::Step { base, jump } => (base.min(base + jump), base.max(base + jump)),
        }
    }

    /// Declared modulus bound. For `TanhRamp` the mean value theorem gives
    /// `|alpha(x)-alpha(y)| <= amplitude * rate / 2 * |x - y|`, capped by the
    /// total oscillation. `Step` declares the same linear shape, which the
    /// sampler then refutes; it exists only to exercise failure reporting.
    pub fn modulus(&self) -> Modulus {
        match *self {
            AlphaFamily::Constant { .. } => Modulus::Zero,
            AlphaFamily::TanhRamp { amplitude, rate, .. } => Modulus::LinearCapped {
                slope: amplitude * rate / 2.0,
                cap: amplitude,
            },
            AlphaFamily::Step { jump, .. } => Modulus::LinearCapped {
                slope: jump.abs(),
                cap: jump.abs(),
            },
        }
    }

    fn describe(&self) -> String {
        match *self {
            AlphaFamily::Constant { value } => format!("const({value})"),
            AlphaFamily::TanhRamp { base, amplitude, rate } => {
                format!("tanh({base},{amplitude},{rate})")
            }
            AlphaFamily::Step { base, jump } => format!("step({base},{jump})"),
        }
    }
}

/// Exact cosine decomposition of an intensity along a ray:
/// `n(x, r * dir) = c0 + c1 * cos(freq * r)` for all `r`.
///
/// The quadrature engine relies on this to complete tail integrals
/// analytically; every built-in family is of this form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialIntensity {
    pub c0: f64,
    pub c1: f64,
    pub freq: f64,
}

impl RadialIntensity {
    pub fn eval(&self, r: f64) -> f64 {
        self.c0 + self.c1 * (self.freq * r).cos()
    }
}

/// Built-in intensity families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IntensityFamily {
    Constant { value: f64 },
    /// `n(x, h) = 1 + epsilon * sin^2(x1) * cos^2(h1)`.
    SinCos { epsilon: f64 },
}

impl IntensityFamily {
    /// Evaluate `n(x, h)`. Even in `h` by construction: only `|h1|` enters.
    pub fn eval(&self, x: &Point, h: &Point) -> f64 {
        match *self {
            IntensityFamily::Constant { value } => value,
            IntensityFamily::SinCos { epsilon } => {
                let c = h.x1().abs().cos();
                let s = x.x1().sin();
                1.0 + epsilon * s * s * c * c
            }
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match *self {
            IntensityFamily::Constant { value } => (value, value),
            IntensityFamily::SinCos { epsilon } => (1.0, 1.0 + epsilon),
        }
    }

    /// `|sin^2 a - sin^2 b| = |sin(a+b) sin(a-b)| <= |a-b|`, so the
    /// oscillation in `x` is at most `epsilon * r`; `2 epsilon r` is kept as
    /// a documented, slightly loose declared bound.
    pub fn modulus(&self) -> Modulus {
        match *self {
            IntensityFamily::Constant { .. } => Modulus::Zero,
            IntensityFamily::SinCos { epsilon } => Modulus::LinearCapped {
                slope: 2.0 * epsilon,
                cap: epsilon,
            },
        }
    }

    /// Decompose `r -> n(x, r * dir)` for a unit direction.
    pub fn radial_decomposition(&self, x: &Point, dir: &Point) -> RadialIntensity {
        match *self {
            IntensityFamily::Constant { value } => RadialIntensity {
                c0: value,
                c1: 0.0,
                freq: 0.0,
            },
            IntensityFamily::SinCos { epsilon } => {
                // cos^2(r d1) = 1/2 + cos(2 d1 r)/2
                let s = x.x1().sin();
                let a = epsilon * s * s;
                let freq = 2.0 * dir.x1().abs();
                if freq == 0.0 {
                    // Ray orthogonal to the modulated coordinate: constant 1 + a.
                    RadialIntensity {
                        c0: 1.0 + a,
                        c1: 0.0,
                        freq: 0.0,
                    }
                } else {
                    RadialIntensity {
                        c0: 1.0 + 0.5 * a,
                        c1: 0.5 * a,
                        freq,
                    }
                }
            }
        }
    }

    fn describe(&self) -> String {
        match *self {
            IntensityFamily::Constant { value } => format!("const({value})"),
            IntensityFamily::SinCos { epsilon } => format!("sincos({epsilon})"),
        }
    }
}

/// The coefficient pair with its declared moduli. Immutable after
/// construction; every evaluation is pure.
#[derive(Clone, Debug)]
pub struct CoefficientField {
    params: ModelParams,
    alpha_family: AlphaFamily,
    n_family: IntensityFamily,
    beta_modulus: Modulus,
    omega_modulus: Modulus,
}

impl CoefficientField {
    /// Build a field, deriving the global bounds and moduli from the
    /// families.
    pub fn from_families(d: usize, alpha_family: AlphaFamily, n_family: IntensityFamily) -> Result<Self> {
        let (a_lo, a_hi) = alpha_family.range();
        let (n_lo, n_hi) = n_family.range();
        let params = ModelParams::new(d, a_lo, a_hi, n_lo, n_hi)?;
        Ok(CoefficientField {
            params,
            alpha_family,
            n_family,
            beta_modulus: alpha_family.modulus(),
            omega_modulus: n_family.modulus(),
        })
    }

    /// Build with explicit global bounds; they must contain the family
    /// ranges.
    pub fn with_params(
        params: ModelParams,
        alpha_family: AlphaFamily,
        n_family: IntensityFamily,
    ) -> Result<Self> {
        params.validate()?;
        let (a_lo, a_hi) = alpha_family.range();
        if a_lo < params.alpha_lower - 1e-12 || a_hi > params.alpha_upper + 1e-12 {
            return Err(Error::input(format!(
                "alpha family range [{a_lo}, {a_hi}] escapes declared bounds [{}, {}]",
                params.alpha_lower, params.alpha_upper
            )));
        }
        let (n_lo, n_hi) = n_family.range();
        if n_lo < params.kappa1 - 1e-12 || n_hi > params.kappa2 + 1e-12 {
            return Err(Error::input(format!(
                "intensity family range [{n_lo}, {n_hi}] escapes declared bounds [{}, {}]",
                params.kappa1, params.kappa2
            )));
        }
        Ok(CoefficientField {
            params,
            alpha_family,
            n_family,
            beta_modulus: alpha_family.modulus(),
            omega_modulus: n_family.modulus(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn alpha_family(&self) -> &AlphaFamily {
        &self.alpha_family
    }

    pub fn n_family(&self) -> &IntensityFamily {
        &self.n_family
    }

    /// Evaluate the order `alpha(x)`.
    pub fn eval_alpha(&self, x: &Point) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::input(format!("eval_alpha: non-finite point {x}")));
        }
        let a = self.alpha_family.eval(x);
        debug_assert!(a >= self.params.alpha_lower && a <= self.params.alpha_upper);
        Ok(a)
    }

    /// Evaluate the intensity `n(x, h)`; `h = 0` is outside the kernel's
    /// domain.
    pub fn eval_n(&self, x: &Point, h: &Point) -> Result<f64> {
        if !x.is_finite() || !h.is_finite() {
            return Err(Error::input("eval_n: non-finite argument".to_string()));
        }
        if h.norm() == 0.0 {
            return Err(Error::input(
                "eval_n: the jump kernel is undefined at h = 0".to_string(),
            ));
        }
        let v = self.n_family.eval(x, h);
        debug_assert!(v >= self.params.kappa1 && v <= self.params.kappa2);
        Ok(v)
    }

    pub fn beta(&self, r: f64) -> f64 {
        self.beta_modulus.eval(r)
    }

    pub fn omega(&self, r: f64) -> f64 {
        self.omega_modulus.eval(r)
    }

    /// Stable identifier of the model; reports and density caches embed it
    /// so artifacts from different fields can never be confused.
    pub fn family_hash(&self) -> String {
        let desc = format!(
            "d={};alpha={};n={};bounds=[{},{}]x[{},{}];beta={};omega={}",
            self.params.d,
            self.alpha_family.describe(),
            self.n_family.describe(),
            self.params.alpha_lower,
            self.params.alpha_upper,
            self.params.kappa1,
            self.params.kappa2,
            self.beta_modulus.describe(),
            self.omega_modulus.describe(),
        );
        let digest = Sha256::digest(desc.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Constant-coefficient Cauchy model: `alpha = 1`, `n = 1`, d = 1.
    pub fn cauchy_1d() -> Self {
        CoefficientField::from_families(
            1,
            AlphaFamily::Constant { value: 1.0 },
            IntensityFamily::Constant { value: 1.0 },
        )
        .expect("valid built-in")
    }

    /// The smooth variable-order family used across the verification suite:
    /// `alpha(x) = 1 + 0.3 (1 + tanh x1)/2`, `n(x,h) = 1 + 0.25 sin^2(x1) cos^2(h1)`.
    pub fn smooth_test_family(d: usize) -> Self {
        CoefficientField::from_families(
            d,
            AlphaFamily::TanhRamp {
                base: 1.0,
                amplitude: 0.3,
                rate: 1.0,
            },
            IntensityFamily::SinCos { epsilon: 0.25 },
        )
        .expect("valid built-in")
    }

    /// Same shape with small amplitudes; used for the resolvent smallness
    /// study.
    pub fn small_amplitude_family(d: usize) -> Self {
        CoefficientField::from_families(
            d,
            AlphaFamily::TanhRamp {
                base: 1.1,
                amplitude: 0.1,
                rate: 1.0,
            },
            IntensityFamily::SinCos { epsilon: 0.1 },
        )
        .expect("valid built-in")
    }

    /// Sample the field and cross-check the declared moduli and bounds.
    pub fn validate_assumptions(&self, plan: &SamplePlan) -> Result<ValidationReport> {
        plan.validate()?;
        let d = self.params.d;
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);

        let mut alpha_min = f64::INFINITY;
        let mut alpha_max = f64::NEG_INFINITY;
        let mut n_min = f64::INFINITY;
        let mut n_max = f64::NEG_INFINITY;
        let mut beta_violation: Option<ModulusWitness> = None;
        let mut omega_violation: Option<ModulusWitness> = None;

        let random_point = |rng: &mut ChaCha8Rng, extent: f64| {
            let mut c = [0.0; crate::point::MAX_DIM];
            for v in c.iter_mut().take(d) {
                *v = rng.gen_range(-extent..extent);
            }
            Point::new(&c[..d]).expect("valid dim")
        };

        // Random pairs plus a deterministic ladder of pairs straddling the
        // origin at shrinking separations; discontinuities at 0 hide from
        // uniform sampling but not from the ladder.
        let mut pairs: Vec<(Point, Point)> = Vec::with_capacity(plan.pairs + 12);
        for _ in 0..plan.pairs {
            pairs.push((random_point(&mut rng, plan.extent), random_point(&mut rng, plan.extent)));
        }
        for k in 0..12 {
            let sep = 0.5f64.powi(k);
            let mut a = Point::zero(d);
            let mut b = Point::zero(d);
            a.set(0, -sep / 2.0);
            b.set(0, sep / 2.0);
            pairs.push((a, b));
        }

        for (x, y) in &pairs {
            let ax = self.eval_alpha(x)?;
            let ay = self.eval_alpha(y)?;
            alpha_min = alpha_min.min(ax.min(ay));
            alpha_max = alpha_max.max(ax.max(ay));
            let r = x.sub(y).norm();
            let gap = (ax - ay).abs();
            if gap > self.beta(r) + 1e-12 && beta_violation.is_none() {
                beta_violation = Some(ModulusWitness {
                    x: *x,
                    y: *y,
                    separation: r,
                    observed: gap,
                    declared: self.beta(r),
                });
            }
            for _ in 0..plan.h_per_pair {
                let mut h = random_point(&mut rng, plan.extent.max(1.0));
                if h.norm() == 0.0 {
                    h.set(0, 1e-3);
                }
                let nx = self.eval_n(x, &h)?;
                let ny = self.eval_n(y, &h)?;
                n_min = n_min.min(nx.min(ny));
                n_max = n_max.max(nx.max(ny));
                let osc = (nx - ny).abs();
                if osc > self.omega(r) + 1e-12 && omega_violation.is_none() {
                    omega_violation = Some(ModulusWitness {
                        x: *x,
                        y: *y,
                        separation: r,
                        observed: osc,
                        declared: self.omega(r),
                    });
                }
            }
        }

        // Admissibility integrals of the declared moduli over (0, 1].
        let opts = QuadOpts::default();
        let head = 1e-12;
        let breaks = quad::log_breaks(head, 1.0, 6);
        let dini_omega = quad::integrate(|r| self.omega(r) / r, &breaks, &opts)?.value
            + match self.omega_modulus {
                // Head below 1e-12: integrand bounded by the slope.
                Modulus::Zero => 0.0,
                Modulus::LinearCapped { slope, .. } => slope * head,
            };
        let dini_beta_log =
            quad::integrate(|r| self.beta(r) * r.ln().abs() / r, &breaks, &opts)?.value
                + match self.beta_modulus {
                    Modulus::Zero => 0.0,
                    // integrand <= slope * |ln r|; integral over [0, head]
                    Modulus::LinearCapped { slope, .. } => slope * head * (1.0 + head.ln().abs()),
                };

        // The vanishing-log-product condition: sup_{r <= r0} beta(r) |ln r|
        // along a shrinking ladder of r0. Must decrease toward zero.
        let mut beta_log_sup = Vec::new();
        for k in 1..=6 {
            let r0 = 10f64.powi(-k);
            let mut sup = 0.0f64;
            for j in 0..200 {
                let r = r0 * (1e-6f64).powf(j as f64 / 199.0);
                sup = sup.max(self.beta(r) * r.ln().abs());
            }
            beta_log_sup.push((r0, sup));
        }

        let passed = beta_violation.is_none() && omega_violation.is_none();
        Ok(ValidationReport {
            family_hash: self.family_hash(),
            alpha_min,
            alpha_max,
            n_min,
            n_max,
            dini_omega,
            dini_beta_log,
            beta_log_sup,
            beta_violation,
            omega_violation,
            passed,
        })
    }
}

/// Deterministic sampling plan for [`CoefficientField::validate_assumptions`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Number of random point pairs.
    pub pairs: usize,
    /// Random displacements tested per pair for the intensity oscillation.
    pub h_per_pair: usize,
    /// Half-width of the sampling box.
    pub extent: f64,
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            pairs: 512,
            h_per_pair: 8,
            extent: 10.0,
            seed: 7,
        }
    }
}

impl SamplePlan {
    fn validate(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::input("sample plan must contain at least one pair"));
        }
        if !(self.extent > 0.0) {
            return Err(Error::input("sample plan extent must be positive"));
        }
        Ok(())
    }
}

/// A sampled point pair that broke a declared modulus bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModulusWitness {
    pub x: Point,
    pub y: Point,
    pub separation: f64,
    pub observed: f64,
    pub declared: f64,
}

/// Outcome of a coefficient-field validation run.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub family_hash: String,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_min: f64,
    pub n_max: f64,
    /// `int_0^1 omega(r)/r dr`.
    pub dini_omega: f64,
    /// `int_0^1 beta(r) |ln r| / r dr`.
    pub dini_beta_log: f64,
    /// `(r0, sup_{r <= r0} beta(r) |ln r|)` along a shrinking ladder.
    pub beta_log_sup: Vec<(f64, f64)>,
    pub beta_violation: Option<ModulusWitness>,
    pub omega_violation: Option<ModulusWitness>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_alpha_eval() {
        let f = CoefficientField::from_families(
            1,
            AlphaFamily::Constant { value: 1.2 },
            IntensityFamily::Constant { value: 1.0 },
        )
        .unwrap();
        assert_eq!(f.eval_alpha(&Point::scalar(-3.7)).unwrap(), 1.2);
        assert_eq!(f.eval_alpha(&Point::scalar(42.0)).unwrap(), 1.2);
    }

    #[test]
    fn tanh_family_eval() {
        let f = CoefficientField::smooth_test_family(1);
        assert_relative_eq!(f.eval_alpha(&Point::scalar(0.0)).unwrap(), 1.15, epsilon = 1e-14);
        let far = f.eval_alpha(&Point::scalar(500.0)).unwrap();
        assert!(far <= 1.3 && far > 1.2999);
        assert!(f.eval_alpha(&Point::scalar(f64::NAN)).is_err());
    }

    #[test]
    fn intensity_eval_and_symmetry() {
        let f = CoefficientField::from_families(
            2,
            AlphaFamily::Constant { value: 1.0 },
            IntensityFamily::SinCos { epsilon: 0.25 },
        )
        .unwrap();
        let x = Point::new(&[std::f64::consts::FRAC_PI_2, 0.0]).unwrap();
        let h = Point::new(&[0.0, 1.0]).unwrap();
        assert_relative_eq!(f.eval_n(&x, &h).unwrap(), 1.25, epsilon = 1e-14);
        assert!(f.eval_n(&x, &Point::zero(2)).is_err());
    }

    #[test]
    fn intensity_exactly_even() {
        let f = CoefficientField::smooth_test_family(1);
        let x = Point::scalar(0.37);
        for &hv in &[0.2, 1.7, -0.9, 13.4] {
            let h = Point::scalar(hv);
            let a = f.eval_n(&x, &h).unwrap();
            let b = f.eval_n(&x, &h.neg()).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn radial_decomposition_matches_eval() {
        let fam = IntensityFamily::SinCos { epsilon: 0.25 };
        let x = Point::new(&[0.7, -0.2]).unwrap();
        let dir = Point::unit_2d(0.9);
        let dec = fam.radial_decomposition(&x, &dir);
        for &r in &[0.01, 0.5, 2.0, 17.0] {
            let h = dir.scale(r);
            assert_relative_eq!(fam.eval(&x, &h), dec.eval(r), epsilon = 1e-13);
        }
    }

    #[test]
    fn validate_constants_all_zero() {
        let f = CoefficientField::cauchy_1d();
        let rep = f.validate_assumptions(&SamplePlan::default()).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.dini_omega, 0.0);
        assert_eq!(rep.dini_beta_log, 0.0);
        assert_eq!(rep.alpha_min, 1.0);
        assert_eq!(rep.alpha_max, 1.0);
    }

    #[test]
    fn validate_test_family_passes_with_finite_integrals() {
        let f = CoefficientField::smooth_test_family(1);
        let rep = f.validate_assumptions(&SamplePlan::default()).unwrap();
        assert!(rep.passed, "{:?}", rep.beta_violation);
        assert!(rep.dini_omega.is_finite() && rep.dini_omega > 0.0);
        assert!(rep.dini_beta_log.is_finite() && rep.dini_beta_log > 0.0);
        // slope 0.15, cap 0.3: int_0^1 min(.15 r, .3)/r |ln r| dr = .15 * int |ln r| = 0.15
        assert_relative_eq!(rep.dini_beta_log, 0.15, max_relative = 1e-6);
        for w in rep.beta_log_sup.windows(2) {
            assert!(w[1].1 < w[0].1, "log-product sup must decrease: {:?}", rep.beta_log_sup);
        }
    }

    #[test]
    fn validate_step_family_fails_straddling_zero() {
        let f = CoefficientField::from_families(
            1,
            AlphaFamily::Step { base: 1.0, jump: 0.4 },
            IntensityFamily::Constant { value: 1.0 },
        )
        .unwrap();
        let rep = f.validate_assumptions(&SamplePlan::default()).unwrap();
        assert!(!rep.passed);
        let w = rep.beta_violation.expect("witness");
        assert!(w.x.x1() <= 0.0 && w.y.x1() > 0.0, "witness must straddle 0: {w:?}");
        assert!(w.observed > w.declared);
    }

    #[test]
    fn validation_deterministic() {
        let f = CoefficientField::smooth_test_family(2);
        let a = f.validate_assumptions(&SamplePlan::default()).unwrap();
        let b = f.validate_assumptions(&SamplePlan::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(1, 1.4, 1.2, 1.0, 2.0).is_err());
        assert!(ModelParams::new(1, 0.5, 1.2, 0.0, 2.0).is_err());
        assert!(ModelParams::new(1, 0.5, 2.0, 1.0, 2.0).is_err());
        assert!(ModelParams::new(0, 0.5, 1.0, 1.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn moduli_dominate_sampled_oscillation(
            x in -20.0f64..20.0,
            y in -20.0f64..20.0,
            hv in prop::collection::vec(-5.0f64..5.0, 1..6),
        ) {
            let f = CoefficientField::smooth_test_family(1);
            let px = Point::scalar(x);
            let py = Point::scalar(y);
            let r = (x - y).abs();
            let da = (f.eval_alpha(&px).unwrap() - f.eval_alpha(&py).unwrap()).abs();
            prop_assert!(da <= f.beta(r) + 1e-12);
            for h in hv {
                if h != 0.0 {
                    let ph = Point::scalar(h);
                    let dn = (f.eval_n(&px, &ph).unwrap() - f.eval_n(&py, &ph).unwrap()).abs();
                    prop_assert!(dn <= f.omega(r) + 1e-12);
                }
            }
        }

        #[test]
        fn moduli_nondecreasing(r1 in 0.0f64..10.0, r2 in 0.0f64..10.0) {
            let f = CoefficientField::smooth_test_family(1);
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(f.beta(lo) <= f.beta(hi));
            prop_assert!(f.omega(lo) <= f.omega(hi));
            prop_assert_eq!(f.beta(0.0), 0.0);
            prop_assert_eq!(f.omega(0.0), 0.0);
        }
    }
}
