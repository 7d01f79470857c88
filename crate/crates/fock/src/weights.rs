//! Radial weight profiles and the rapidly-increasing class diagnostics.
//!
//! A weight is a radial map `phi: [0, inf) -> R+` with exact first and second
//! derivatives. The classifier certifies, on a declared finite grid, the
//! defining conditions of the rapidly increasing class: positive radial
//! Laplacian, vanishing `tau ~ (laplacian)^(-1/2)`, and one of two regularity
//! routes. Limit conditions are certified on the grid window and the window is
//! reported; there is no symbolic reasoning here.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
// Inherent f64 methods shadow this under std; the no_std build needs it.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative decay the tau tail must show over the last grid quartile.
const TAIL_DECAY_FACTOR: f64 = 0.9;
/// Magnitude bound for the `tau' * log(1/tau)` regularity route.
const TAU_SLOPE_LOG_TOL: f64 = 1e-3;
/// Exponents scanned for the `tau * r^C` regularity route.
const TAU_POWER_EXPONENTS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
/// Monotonicity slack for grid comparisons.
const GRID_SLACK: f64 = 1e-10;

/// Built-in radial weight families.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `phi(r) = r^alpha`, `alpha > 0`.
    Power { alpha: f64 },
    /// `phi(r) = exp(beta r)`, `beta > 0`.
    Exponential { beta: f64 },
    /// `phi(r) = exp(exp(r))`.
    DoubleExponential,
    /// `phi(r) = r^2 / 2`.
    ClassicalGaussian,
    /// `phi(r) = c exp(r)`, `c > 0`.
    ScaledExponential { c: f64 },
}

/// A radial weight with exact derivative evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    kind: WeightKind,
    label: String,
}

impl WeightProfile {
    /// `phi(r) = r^alpha`. Panics unless `alpha > 0`.
    pub fn power(alpha: f64) -> Self {
        assert!(alpha > 0.0, "power weight needs alpha > 0");
        WeightProfile { kind: WeightKind::Power { alpha }, label: format!("r^{alpha}") }
    }

    /// `phi(r) = exp(beta r)`. Panics unless `beta > 0`.
    pub fn exponential(beta: f64) -> Self {
        assert!(beta > 0.0, "exponential weight needs beta > 0");
        WeightProfile { kind: WeightKind::Exponential { beta }, label: format!("exp({beta} r)") }
    }

    /// `phi(r) = exp(exp(r))`.
    pub fn double_exponential() -> Self {
        WeightProfile { kind: WeightKind::DoubleExponential, label: String::from("exp(exp(r))") }
    }

    /// `phi(r) = r^2 / 2`, the classical Gaussian weight.
    pub fn classical_gaussian() -> Self {
        WeightProfile { kind: WeightKind::ClassicalGaussian, label: String::from("r^2/2") }
    }

    /// `phi(r) = c exp(r)`. Panics unless `c > 0`.
    pub fn scaled_exponential(c: f64) -> Self {
        assert!(c > 0.0, "scaled exponential weight needs c > 0");
        WeightProfile {
            kind: WeightKind::ScaledExponential { c },
            label: format!("{c} exp(r)"),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `phi(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        match self.kind {
            WeightKind::Power { alpha } => r.powf(alpha),
            WeightKind::Exponential { beta } => (beta * r).exp(),
            WeightKind::DoubleExponential => r.exp().exp(),
            WeightKind::ClassicalGaussian => 0.5 * r * r,
            WeightKind::ScaledExponential { c } => c * r.exp(),
        }
    }

    /// `phi'(r)`.
    pub fn phi_prime(&self, r: f64) -> f64 {
        match self.kind {
            WeightKind::Power { alpha } => alpha * r.powf(alpha - 1.0),
            WeightKind::Exponential { beta } => beta * (beta * r).exp(),
            WeightKind::DoubleExponential => r.exp() * r.exp().exp(),
            WeightKind::ClassicalGaussian => r,
            WeightKind::ScaledExponential { c } => c * r.exp(),
        }
    }

    /// `phi''(r)`.
    pub fn phi_second(&self, r: f64) -> f64 {
        match self.kind {
            WeightKind::Power { alpha } => alpha * (alpha - 1.0) * r.powf(alpha - 2.0),
            WeightKind::Exponential { beta } => beta * beta * (beta * r).exp(),
            WeightKind::DoubleExponential => {
                let e = r.exp();
                (e + e * e) * e.exp()
            }
            WeightKind::ClassicalGaussian => 1.0,
            WeightKind::ScaledExponential { c } => c * r.exp(),
        }
    }

    /// Radial Laplacian `phi''(r) + phi'(r)/r`, with the `r = 0` value taken
    /// as the right limit of the built-in kind.
    pub fn laplacian_radial(&self, r: f64) -> Result<f64> {
        let value = if r == 0.0 {
            match self.kind {
                // alpha^2 r^(alpha-2) at 0+.
                WeightKind::Power { alpha } => {
                    if alpha > 2.0 {
                        0.0
                    } else if alpha == 2.0 {
                        4.0
                    } else {
                        f64::INFINITY
                    }
                }
                WeightKind::ClassicalGaussian => 2.0,
                // phi'(0) > 0, so phi'/r has no finite right limit.
                _ => f64::INFINITY,
            }
        } else {
            self.phi_second(r) + self.phi_prime(r) / r
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::DerivativeOverflow { radius: r })
        }
    }

    /// The canonical `tau`: the given plateau below `r = 1`, and
    /// `(laplacian)^(-1/2)` beyond.
    pub fn tau(&self, r: f64, plateau: f64) -> Result<f64> {
        assert!(plateau > 0.0, "tau plateau must be positive");
        if r < 1.0 {
            return Ok(plateau);
        }
        let lap = self.laplacian_radial(r)?;
        if lap <= 0.0 {
            return Err(Error::NotRapidlyIncreasing { radius: r });
        }
        Ok(1.0 / lap.sqrt())
    }

    /// `tau` with the plateau chosen as `tau(1+)`, which makes it continuous
    /// at the junction.
    pub fn tau_continuous(&self, r: f64) -> Result<f64> {
        let lap1 = self.laplacian_radial(1.0)?;
        if lap1 <= 0.0 {
            return Err(Error::NotRapidlyIncreasing { radius: 1.0 });
        }
        self.tau(r, 1.0 / lap1.sqrt())
    }

    /// Central-difference consistency check of `phi_prime` and `phi_second`
    /// against `phi`. Returns the first radius where either derivative
    /// disagrees beyond `tol * (1 + |derivative|)`.
    pub fn derivative_consistency(&self, radii: &[f64], tol: f64) -> Option<f64> {
        for &r in radii {
            let h = 1e-5 * (1.0 + r);
            let fd1 = (self.phi(r + h) - self.phi(r - h)) / (2.0 * h);
            if (fd1 - self.phi_prime(r)).abs() > tol * (1.0 + self.phi_prime(r).abs()) {
                return Some(r);
            }
            let fd2 = (self.phi_prime(r + h) - self.phi_prime(r - h)) / (2.0 * h);
            if (fd2 - self.phi_second(r)).abs() > tol * (1.0 + self.phi_second(r).abs()) {
                return Some(r);
            }
        }
        None
    }
}

/// One diagnostics grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSample {
    pub r: f64,
    pub laplacian: f64,
    pub tau: f64,
}

/// Which regularity route the tail satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularityRoute {
    /// `tau(r) r^exponent` is non-decreasing on the tail.
    TauPowerIncreasing { exponent: f64 },
    /// `tau'(r) log(1/tau(r))` vanishes on the tail.
    TauSlopeLogVanishes,
    Neither,
}

/// Outcome of the derivative-norm equivalence admissibility test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeNormAdmissibility {
    pub p: f64,
    /// `phi'` does not vanish on the sampled tail.
    pub phi_prime_nonzero: bool,
    /// `r exp(-p phi(r)) / phi'(r)` is below 1e-12 at the grid end.
    pub tail_vanishes: bool,
    /// The sampled bracket of `(1/r) (r/phi')'` stays below `p`.
    pub slope_bracket_below_p: bool,
}

impl DerivativeNormAdmissibility {
    pub fn all(&self) -> bool {
        self.phi_prime_nonzero && self.tail_vanishes && self.slope_bracket_below_p
    }
}

/// Grid-certified class-membership diagnostics for a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDiagnostics {
    pub laplacian_positive: bool,
    pub tau_vanishes: bool,
    /// The satisfied regularity branch; both branches are always tested and
    /// the individual outcomes sit in `route_power_ok`/`route_slope_ok`.
    pub regularity_route: RegularityRoute,
    pub route_power_ok: bool,
    pub route_slope_ok: bool,
    /// `phi(r)/r^2` increasing on the tail and exceeding ten times its value
    /// at `r_max / 10`.
    pub superquadratic: bool,
    /// Admissibility triple evaluated at `p = 2`.
    pub admissibility: DerivativeNormAdmissibility,
    /// Tau decayed but not monotonically; reported, never failing.
    pub non_monotone_tau_tail: bool,
    /// First sample failing the Laplacian or tau test, if any.
    pub failing_sample: Option<WeightSample>,
    pub sample_grid: Vec<WeightSample>,
    pub r_max: f64,
}

impl WeightDiagnostics {
    /// The class verdict: positive Laplacian, vanishing tau, and a
    /// regularity route.
    pub fn class_i(&self) -> bool {
        self.laplacian_positive
            && self.tau_vanishes
            && self.regularity_route != RegularityRoute::Neither
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let ratio = (hi / lo).ln();
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        out.push(lo * (ratio * t).exp());
    }
    out
}

/// Classify a weight against the rapidly-increasing class on a log-spaced
/// grid reaching `r_max`. Inconclusive checks come back as flags with the
/// failing sample; this function does not error.
pub fn classify_weight(profile: &WeightProfile, r_max: f64, n_samples: usize) -> WeightDiagnostics {
    assert!(r_max >= 10.0, "classification grid must reach r_max >= 10");
    assert!(n_samples >= 16, "classification needs at least 16 samples");

    let radii = log_grid(0.25, r_max, n_samples);
    let mut samples = Vec::with_capacity(n_samples);
    let mut laplacian_positive = true;
    let mut failing_sample = None;

    for &r in &radii {
        // Overflowed laplacians are treated as positive infinity: the sign
        // condition holds, and tau underflows to exact zero.
        let lap = profile.laplacian_radial(r).unwrap_or(f64::INFINITY);
        let tau = if lap > 0.0 { 1.0 / lap.sqrt() } else { f64::NAN };
        let sample = WeightSample { r, laplacian: lap, tau };
        if !(lap > 0.0) {
            laplacian_positive = false;
            if failing_sample.is_none() {
                failing_sample = Some(sample);
            }
        }
        samples.push(sample);
    }

    // Tau decay over the last quartile (plateau below r = 1 is irrelevant:
    // the grid starts at 0.25 but the quartile sits far beyond 1).
    let q_start = 3 * n_samples / 4;
    let tail = &samples[q_start..];
    let mut monotone = true;
    let mut tau_finite = true;
    for w in tail.windows(2) {
        if !(w[0].tau.is_finite() && w[1].tau.is_finite()) {
            tau_finite = false;
            break;
        }
        if w[1].tau > w[0].tau * (1.0 + GRID_SLACK) {
            monotone = false;
        }
    }
    let tau_vanishes = tau_finite
        && tail.last().map_or(false, |last| {
            last.tau <= TAIL_DECAY_FACTOR * tail[0].tau || last.tau == 0.0
        });
    if !tau_vanishes && failing_sample.is_none() {
        failing_sample = tail.last().copied();
    }

    // Both regularity branches are tested; the report names the satisfied
    // one, power route first.
    let mut power_exponent = None;
    if tau_finite {
        'outer: for &c in TAU_POWER_EXPONENTS.iter() {
            for w in tail.windows(2) {
                let a = w[0].tau * w[0].r.powf(c);
                let b = w[1].tau * w[1].r.powf(c);
                if b < a * (1.0 - GRID_SLACK) {
                    continue 'outer;
                }
            }
            power_exponent = Some(c);
            break;
        }
    }
    // Route 2: |tau' log(1/tau)| small on the tail. Tau that underflowed to
    // zero counts as fully vanished.
    let route_slope_ok = tau_finite && {
        let mut worst: f64 = 0.0;
        for w in tail.windows(2) {
            if w[0].tau == 0.0 || w[1].tau == 0.0 {
                continue;
            }
            let slope = (w[1].tau - w[0].tau) / (w[1].r - w[0].r);
            let mid = 0.5 * (w[0].tau + w[1].tau);
            worst = worst.max((slope * (1.0 / mid).ln()).abs());
        }
        worst < 10.0 * TAU_SLOPE_LOG_TOL
    };
    let route = match power_exponent {
        Some(exponent) => RegularityRoute::TauPowerIncreasing { exponent },
        None if route_slope_ok => RegularityRoute::TauSlopeLogVanishes,
        None => RegularityRoute::Neither,
    };

    // phi(r)/r^2 increasing over the last half, plus the factor-ten bar
    // against r_max/10.
    let half = n_samples / 2;
    let mut quad_increasing = true;
    for w in samples[half..].windows(2) {
        let a = profile.phi(w[0].r) / (w[0].r * w[0].r);
        let b = profile.phi(w[1].r) / (w[1].r * w[1].r);
        if b < a * (1.0 - GRID_SLACK) {
            quad_increasing = false;
            break;
        }
    }
    let bar = {
        let at_max = profile.phi(r_max) / (r_max * r_max);
        let tenth = r_max / 10.0;
        let at_tenth = profile.phi(tenth) / (tenth * tenth);
        at_max >= 10.0 * at_tenth * (1.0 - 1e-9)
    };
    let superquadratic = quad_increasing && bar;

    WeightDiagnostics {
        laplacian_positive,
        tau_vanishes,
        regularity_route: route,
        route_power_ok: power_exponent.is_some(),
        route_slope_ok,
        superquadratic,
        admissibility: derivative_norm_admissible(profile, 2.0, r_max),
        non_monotone_tau_tail: tau_vanishes && !monotone,
        failing_sample,
        sample_grid: samples,
        r_max,
    }
}

/// Admissibility of the weight for the derivative-norm equivalence at
/// exponent `p`: nonvanishing `phi'` on the tail, decay of
/// `r exp(-p phi)/phi'` below 1e-12 by `r_max`, and the sampled
/// `(1/r)(r/phi')'` bracket staying below `p`.
pub fn derivative_norm_admissible(
    profile: &WeightProfile,
    p: f64,
    r_max: f64,
) -> DerivativeNormAdmissibility {
    assert!(p >= 1.0, "admissibility is defined for p >= 1");
    let radii = log_grid(1.0, r_max, 33);
    let tail = &radii[radii.len() / 2..];

    let mut phi_prime_nonzero = true;
    let mut bracket_hi = f64::NEG_INFINITY;
    let mut bracket_finite = true;
    for &r in tail {
        let d1 = profile.phi_prime(r);
        let d2 = profile.phi_second(r);
        if !(d1 > 0.0) || !d1.is_finite() {
            phi_prime_nonzero = d1.is_infinite() && d1 > 0.0;
            if !phi_prime_nonzero {
                break;
            }
            continue;
        }
        // (1/r)(r/phi')' = (phi' - r phi'') / (r phi'^2)
        let s = (d1 - r * d2) / (r * d1 * d1);
        if !s.is_finite() {
            bracket_finite = false;
        }
        bracket_hi = bracket_hi.max(s);
    }

    // log-domain tail value: ln r - p phi - ln phi'.
    let tail_vanishes = {
        let d1 = profile.phi_prime(r_max);
        if d1 > 0.0 && d1.is_finite() {
            r_max.ln() - p * profile.phi(r_max) - d1.ln() < (1e-12f64).ln()
        } else {
            // phi' overflowed: the quotient is zero all the more.
            d1.is_infinite()
        }
    };

    DerivativeNormAdmissibility {
        p,
        phi_prime_nonzero,
        tail_vanishes,
        slope_bracket_below_p: bracket_finite && bracket_hi < p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laplacian_power_cubed() {
        // phi = r^3: phi' = 3r^2, phi'' = 6r, laplacian = 9r.
        let w = WeightProfile::power(3.0);
        assert_relative_eq!(w.laplacian_radial(2.0).unwrap(), 18.0, max_relative = 1e-14);
    }

    #[test]
    fn laplacian_gaussian_is_two() {
        let w = WeightProfile::classical_gaussian();
        assert_relative_eq!(w.laplacian_radial(1.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(w.laplacian_radial(0.0).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn laplacian_exponential_at_one() {
        let w = WeightProfile::exponential(1.0);
        assert_relative_eq!(
            w.laplacian_radial(1.0).unwrap(),
            5.4365636569180905, // 2e
            max_relative = 1e-14
        );
    }

    #[test]
    fn laplacian_overflow_reports() {
        let w = WeightProfile::double_exponential();
        assert!(matches!(
            w.laplacian_radial(10.0),
            Err(Error::DerivativeOverflow { .. })
        ));
    }

    #[test]
    fn tau_values() {
        let w = WeightProfile::power(3.0);
        assert_relative_eq!(w.tau(4.0, 1.0).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(w.tau(0.5, 2.0).unwrap(), 2.0, max_relative = 1e-15);
        let g = WeightProfile::classical_gaussian();
        assert_relative_eq!(
            g.tau(10.0, 1.0).unwrap(),
            core::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn tau_identity_on_built_ins() {
        // tau(r,1)^2 * laplacian = 1 for r >= 1, by construction.
        let profiles = [
            WeightProfile::power(3.0),
            WeightProfile::power(2.5),
            WeightProfile::exponential(1.0),
            WeightProfile::scaled_exponential(0.5),
        ];
        for w in &profiles {
            let mut r = 1.0;
            while r <= 30.0 {
                let t = w.tau(r, 1.0).unwrap();
                let lap = w.laplacian_radial(r).unwrap();
                assert_relative_eq!(t * t * lap, 1.0, max_relative = 1e-12);
                r += 1.37;
            }
        }
    }

    #[test]
    fn classify_power_cubed_is_class_i() {
        let d = classify_weight(&WeightProfile::power(3.0), 100.0, 64);
        assert!(d.class_i());
        assert!(d.superquadratic);
        assert!(d.laplacian_positive);
    }

    #[test]
    fn classify_gaussian_is_not_class_i() {
        let d = classify_weight(&WeightProfile::classical_gaussian(), 100.0, 64);
        assert!(!d.class_i());
        // tau is constant 2^{-1/2}: it never vanishes.
        assert!(!d.tau_vanishes);
        assert!(d.laplacian_positive);
    }

    #[test]
    fn classify_exponential_is_class_i() {
        let d = classify_weight(&WeightProfile::exponential(1.0), 50.0, 64);
        assert!(d.class_i());
        // Power route fails for exponential tails; the slope-log route holds.
        assert_eq!(d.regularity_route, RegularityRoute::TauSlopeLogVanishes);
    }

    #[test]
    fn classify_double_exponential_is_class_i() {
        let d = classify_weight(&WeightProfile::double_exponential(), 10.0, 64);
        assert!(d.class_i());
    }

    #[test]
    fn power_class_gate_at_two() {
        for &(alpha, expect) in
            &[(1.0, false), (2.0, false), (2.5, true), (3.0, true), (5.0, true)]
        {
            let d = classify_weight(&WeightProfile::power(alpha), 100.0, 64);
            assert_eq!(d.class_i(), expect, "alpha = {alpha}");
        }
    }

    #[test]
    fn admissibility_triples() {
        assert!(derivative_norm_admissible(&WeightProfile::power(3.0), 2.0, 50.0).all());
        assert!(derivative_norm_admissible(&WeightProfile::exponential(1.0), 1.0, 50.0).all());
        assert!(
            derivative_norm_admissible(&WeightProfile::classical_gaussian(), 2.0, 50.0).all()
        );
    }

    #[test]
    fn derivative_consistency_on_random_radii() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let profiles = [
            WeightProfile::power(3.0),
            WeightProfile::power(2.5),
            WeightProfile::exponential(1.0),
            WeightProfile::classical_gaussian(),
            WeightProfile::scaled_exponential(0.5),
        ];
        let radii: Vec<f64> = (0..20).map(|_| rng.gen_range(0.2..20.0)).collect();
        for w in &profiles {
            assert_eq!(w.derivative_consistency(&radii, 1e-6), None, "{}", w.label());
        }
    }

    #[test]
    fn tau_continuous_at_junction() {
        let w = WeightProfile::power(3.0);
        let below = w.tau_continuous(0.999).unwrap();
        let above = w.tau_continuous(1.0).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-12);
    }
}
