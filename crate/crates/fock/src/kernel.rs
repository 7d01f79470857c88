//! The monomial reproducing kernel of the weighted square-integrable space.
//!
//! With a radial weight, the monomials are orthogonal and the kernel is
//! `K(z, zeta) = sum_n (z conj(zeta))^n / delta_n^2`, where `delta_n^2` is the
//! squared norm of `z^n`. The Hermitian form is used throughout: it makes the
//! reproducing identity hold verbatim and conjugation commute with truncation.
//!
//! The moments `delta_n^2 = 2 pi int r^(2n+1) exp(-2 phi) dr` span hundreds of
//! orders of magnitude by n = 30, so they are computed in the log domain with
//! panels centered on the integrand peak.

use alloc::vec::Vec;
use num_complex::Complex64;
// Inherent f64 methods shadow this under std; the no_std build needs it.
#[allow(unused_imports)]
use num_traits::Float;

use crate::entire::EntireFunction;
use crate::error::{Error, Result};
use crate::quadrature::{
    gauss_legendre, plane_accumulate_complex, plane_integral_try, weighted_norm,
    QuadratureConfig, SpaceSpec,
};
use crate::weights::{derivative_norm_admissible, WeightProfile};

/// Default certificate bound for kernel evaluation: the last term must stay
/// below this fraction of the accumulated term-magnitude sum.
const KERNEL_CERT_TOL: f64 = 1e-14;
/// Panel decay target for the moment integrals.
const MOMENT_PANEL_TOL: f64 = 1e-18;

/// Monomial orthonormal-basis data for one weight.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    profile: WeightProfile,
    log_delta_sq: Vec<f64>,
    tail_ratio: f64,
}

impl KernelBasis {
    /// Compute `log delta_n^2` for `n = 0..=n_max` by peak-centered radial
    /// quadrature in the log domain.
    pub fn compute(
        profile: &WeightProfile,
        n_max: usize,
        cfg: &QuadratureConfig,
    ) -> Result<KernelBasis> {
        let mut log_delta_sq = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            log_delta_sq.push(log_moment(profile, n, cfg)?);
        }
        Ok(KernelBasis {
            profile: profile.clone(),
            log_delta_sq,
            tail_ratio: KERNEL_CERT_TOL,
        })
    }

    pub fn profile(&self) -> &WeightProfile {
        &self.profile
    }

    /// Truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.log_delta_sq.len() - 1
    }

    pub fn log_delta_sq(&self, n: usize) -> f64 {
        self.log_delta_sq[n]
    }

    pub fn delta_sq(&self, n: usize) -> f64 {
        self.log_delta_sq[n].exp()
    }

    /// Kernel value `sum_{n <= N} (z conj(zeta))^n / delta_n^2`, certified:
    /// the last term must be negligible against the accumulated term
    /// magnitudes.
    pub fn eval(&self, z: Complex64, zeta: Complex64) -> Result<Complex64> {
        let (value, last_term, majorant) = self.eval_parts(z, zeta);
        if last_term > self.tail_ratio * majorant {
            return Err(Error::KernelTruncation { product_modulus: (z * zeta.conj()).norm() });
        }
        Ok(value)
    }

    /// Kernel value without the truncation certificate; callers own the
    /// truncation error (used inside quadratures whose outer weight controls
    /// the far field).
    pub fn eval_unchecked(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        self.eval_parts(z, zeta).0
    }

    fn eval_parts(&self, z: Complex64, zeta: Complex64) -> (Complex64, f64, f64) {
        let w = z * zeta.conj();
        let r = w.norm();
        if r == 0.0 {
            let head = (-self.log_delta_sq[0]).exp();
            return (Complex64::new(head, 0.0), 0.0, head);
        }
        let ln_r = r.ln();
        let unit = w / r;
        let mut u = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut majorant = 0.0f64;
        let mut magnitude = 0.0f64;
        for (n, &ld) in self.log_delta_sq.iter().enumerate() {
            if n > 0 {
                u *= unit;
            }
            magnitude = (n as f64 * ln_r - ld).exp();
            sum += u * magnitude;
            majorant += magnitude;
        }
        (sum, magnitude, majorant)
    }

    /// The map `zeta -> conj(d/d eta K(eta, zeta))`, a power series in `zeta`
    /// with coefficients `n conj(eta)^(n-1) / delta_n^2`. It is holomorphic in
    /// `zeta`, as the contour integrals require. The series carries no
    /// evaluation certificate: functional values are declared grid-relative.
    pub fn slot_derivative(&self, eta: Complex64) -> EntireFunction {
        let n_max = self.degree();
        let mut coeffs = Vec::with_capacity(n_max + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        let e = eta.conj();
        let mut pow = Complex64::new(1.0, 0.0); // conj(eta)^(n-1)
        for n in 1..=n_max {
            coeffs.push(pow * (n as f64) * (-self.log_delta_sq[n]).exp());
            pow *= e;
        }
        EntireFunction::power_series_unchecked(coeffs)
    }

    /// The map `zeta -> conj(K_zeta(eta)) = sum_n (zeta conj(eta))^n / delta_n^2`,
    /// holomorphic in `zeta`; the kernel itself, not its derivative.
    pub fn conj_kernel_series(&self, eta: Complex64) -> EntireFunction {
        let n_max = self.degree();
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let e = eta.conj();
        let mut pow = Complex64::new(1.0, 0.0);
        for n in 0..=n_max {
            coeffs.push(pow * (-self.log_delta_sq[n]).exp());
            pow *= e;
        }
        EntireFunction::power_series_unchecked(coeffs)
    }
}

/// Log of `2 pi int_0^inf r^(2n+1) exp(-2 phi(r)) dr`.
///
/// The integrand peak solves `(2n+1)/r = 2 phi'(r)`; integration proceeds in
/// panels of one peak-width, outward from the peak in both directions, on the
/// integrand rescaled by its maximum.
fn log_moment(profile: &WeightProfile, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let target = (2 * n + 1) as f64;
    // Bracket the peak: g(r) = 2 r phi'(r) is increasing for the built-in
    // kinds, from 0 at the origin.
    let g = |r: f64| 2.0 * r * profile.phi_prime(r);
    let mut hi = 1.0f64;
    let mut tries = 0;
    while g(hi) < target {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::MomentDiverges { degree: n });
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = 0.5 * (lo + hi);

    let log_integrand = |r: f64| -> f64 {
        if r <= 0.0 {
            f64::NEG_INFINITY
        } else {
            target * r.ln() - 2.0 * profile.phi(r)
        }
    };
    let m = log_integrand(peak);
    // Peak width from the log-integrand curvature.
    let curvature = target / (peak * peak) + 2.0 * profile.phi_second(peak);
    let sigma = if curvature > 0.0 { 1.0 / curvature.sqrt() } else { peak / 8.0 };

    let rule = gauss_legendre(cfg.n_radial.min(64));
    let panel = |a: f64, b: f64| -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for &(x, w) in &rule {
            let r = mid + half * x;
            let l = log_integrand(r) - m;
            if l > -746.0 {
                acc += w * l.exp();
            }
        }
        acc * half
    };

    let mut total = 0.0f64;
    // Rightward from the peak.
    let mut k = 0usize;
    loop {
        let a = peak + k as f64 * sigma;
        let b = a + sigma;
        let c = panel(a, b);
        total += c;
        if !c.is_finite() {
            return Err(Error::MomentDiverges { degree: n });
        }
        if c <= MOMENT_PANEL_TOL * total && k > 2 {
            break;
        }
        k += 1;
        if k > 4000 {
            return Err(Error::MomentDiverges { degree: n });
        }
    }
    // Leftward until the origin or decay.
    let mut k = 0usize;
    loop {
        let b = peak - k as f64 * sigma;
        if b <= 0.0 {
            break;
        }
        let a = (b - sigma).max(0.0);
        let c = panel(a, b);
        total += c;
        if c <= MOMENT_PANEL_TOL * total && k > 2 {
            break;
        }
        k += 1;
        if k > 4000 {
            break;
        }
    }

    Ok((2.0 * core::f64::consts::PI).ln() + m + total.ln())
}

/// Outcome of one reproducing-identity probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceCheck {
    /// `int f(z) K(zeta, z) exp(-2 phi) dm(z)`.
    pub reproduced: Complex64,
    /// `f(zeta)`.
    pub reference: Complex64,
    pub rel_err: f64,
    pub converged: bool,
}

/// Reproduce `f(zeta)` through the kernel-weighted integral. Intended for
/// polynomials of degree at most `N - 2`, where truncation is exact up to
/// quadrature error.
pub fn reproduce_check(
    basis: &KernelBasis,
    f: &EntireFunction,
    zeta: Complex64,
    cfg: &QuadratureConfig,
) -> Result<ReproduceCheck> {
    let profile = basis.profile().clone();
    let (reproduced, outcome) = plane_accumulate_complex(
        |z| {
            let fv = f.evaluate(z)?;
            let k = basis.eval_unchecked(zeta, z);
            Ok(fv * k * (-2.0 * profile.phi(z.norm())).exp())
        },
        cfg,
    )?;
    let reference = f.evaluate(zeta)?;
    let scale = reference.norm();
    let rel_err = if scale > 0.0 {
        (reproduced - reference).norm() / scale
    } else {
        reproduced.norm()
    };
    Ok(ReproduceCheck { reproduced, reference, rel_err, converged: outcome.converged })
}

/// Raw values of the derivative inner-product identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingCheck {
    /// `int f conj(g) exp(-2 phi) dm`.
    pub lhs: Complex64,
    /// `f(0) conj(g(0)) + int f' conj(g') (1 + phi')^-2 exp(-2 phi) dm`.
    pub rhs: Complex64,
    pub rel_err: f64,
    pub converged: bool,
}

/// Evaluates both sides of the derivative inner-product identity by
/// quadrature and reports the raw values, so any constant offset between the
/// pairing conventions is visible rather than hidden.
pub fn inner_product_identity_check(
    profile: &WeightProfile,
    f: &EntireFunction,
    g: &EntireFunction,
    cfg: &QuadratureConfig,
) -> Result<PairingCheck> {
    let (lhs, lhs_out) = plane_accumulate_complex(
        |z| {
            let fv = f.evaluate(z)?;
            let gv = g.evaluate(z)?;
            Ok(fv * gv.conj() * (-2.0 * profile.phi(z.norm())).exp())
        },
        cfg,
    )?;
    let fd = f.differentiate(1);
    let gd = g.differentiate(1);
    let (integral, rhs_out) = plane_accumulate_complex(
        |z| {
            let fv = fd.evaluate(z)?;
            let gv = gd.evaluate(z)?;
            let r = z.norm();
            let damp = 1.0 + profile.phi_prime(r);
            Ok(fv * gv.conj() * (-2.0 * profile.phi(r)).exp() / (damp * damp))
        },
        cfg,
    )?;
    let zero = Complex64::new(0.0, 0.0);
    let rhs = f.evaluate(zero)? * g.evaluate(zero)?.conj() + integral;
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    Ok(PairingCheck {
        lhs,
        rhs,
        rel_err: (lhs - rhs).norm() / scale,
        converged: lhs_out.converged && rhs_out.converged,
    })
}

/// Observed ratio of the weighted derivative-norm equivalence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedDerivativeEquivalence {
    /// `|f(0)|^p + int |f'| exp(-p phi) (1 + phi')^-p dm`.
    pub middle: f64,
    /// `||f||^p` in the weighted space.
    pub norm_power: f64,
    pub ratio: f64,
    pub converged: bool,
}

/// Ratio between the jet-plus-damped-derivative expression and the p-th power
/// of the weighted norm. Errors when the weight fails the admissibility
/// hypotheses.
pub fn weighted_derivative_equivalence_check(
    profile: &WeightProfile,
    f: &EntireFunction,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<WeightedDerivativeEquivalence> {
    if !derivative_norm_admissible(profile, p, 50.0).all() {
        return Err(Error::InadmissibleWeight { p });
    }
    let fd = f.differentiate(1);
    let detail = plane_integral_try(
        |z| {
            let a = fd.evaluate(z)?.norm();
            if a == 0.0 {
                return Ok(0.0);
            }
            let r = z.norm();
            Ok((a.ln() - p * profile.phi(r) - p * (1.0 + profile.phi_prime(r)).ln()).exp())
        },
        cfg,
    )?;
    let norm = weighted_norm(f, &SpaceSpec::weighted(profile.clone(), p), cfg)?;
    let norm_power = norm.value.powf(p);
    let middle = f.evaluate(Complex64::new(0.0, 0.0))?.norm().powf(p) + detail.outcome.value;
    Ok(WeightedDerivativeEquivalence {
        middle,
        norm_power,
        ratio: middle / norm_power,
        converged: detail.outcome.converged && norm.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const PI: f64 = core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn classical_basis(n: usize) -> KernelBasis {
        KernelBasis::compute(
            &WeightProfile::classical_gaussian(),
            n,
            &QuadratureConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn classical_moments_match_factorials() {
        let basis = classical_basis(12);
        assert_relative_eq!(basis.delta_sq(0), PI, max_relative = 1e-12);
        assert_relative_eq!(basis.delta_sq(2), 2.0 * PI, max_relative = 1e-12);
        let mut fact = 1.0;
        for k in 1..=10 {
            fact *= k as f64;
        }
        assert_relative_eq!(basis.delta_sq(10), PI * fact, max_relative = 1e-9);
    }

    #[test]
    fn power_weight_moment_matches_gamma_form() {
        // phi = r^3: delta_0^2 = (2 pi / 3) 2^(-2/3) Gamma(2/3), frozen from
        // an independent quadrature.
        let basis = KernelBasis::compute(
            &WeightProfile::power(3.0),
            4,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(basis.delta_sq(0), 1.78660457411, max_relative = 1e-10);
        assert_relative_eq!(basis.delta_sq(1), 0.742209964555, max_relative = 1e-10);
    }

    #[test]
    fn kernel_at_zero_slot() {
        let basis = classical_basis(8);
        let v = basis.eval(c(1.3, -0.4), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 1.0 / PI, max_relative = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-16);
        let v = basis.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 1.0 / basis.delta_sq(0), max_relative = 1e-12);
    }

    #[test]
    fn kernel_closed_form_on_diagonal_point() {
        let basis = classical_basis(40);
        let v = basis.eval(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, core::f64::consts::E / PI, max_relative = 1e-12);
    }

    #[test]
    fn kernel_certificate_fails_far_out() {
        let basis = classical_basis(12);
        assert!(matches!(
            basis.eval(c(6.0, 0.0), c(6.0, 0.0)),
            Err(Error::KernelTruncation { .. })
        ));
    }

    #[test]
    fn kernel_hermitian_symmetry_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let basis = classical_basis(24);
        for _ in 0..50 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let zeta = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let a = basis.eval_unchecked(z, zeta);
            let b = basis.eval_unchecked(zeta, z).conj();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn kernel_positive_on_diagonal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let basis = classical_basis(30);
        for _ in 0..50 {
            let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let v = basis.eval(z, z).unwrap();
            assert_eq!(v.im, 0.0);
            assert!(v.re > 0.0);
        }
    }

    #[test]
    fn classical_kernel_matches_exponential() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let basis = classical_basis(40);
        for _ in 0..50 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let zeta = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let truth = (z * zeta.conj()).exp() / PI;
            let v = basis.eval(z, zeta).unwrap();
            assert!((v - truth).norm() <= 1e-10, "err {}", (v - truth).norm());
        }
    }

    #[test]
    fn moment_log_convexity_for_class_i() {
        let basis = KernelBasis::compute(
            &WeightProfile::power(3.0),
            26,
            &QuadratureConfig::default(),
        )
        .unwrap();
        let mut prev_gap = f64::NEG_INFINITY;
        for n in 0..26 {
            let gap = basis.log_delta_sq(n + 1) - basis.log_delta_sq(n);
            assert!(gap >= prev_gap, "log-convexity fails at n = {n}");
            prev_gap = gap;
        }
    }

    #[test]
    fn slot_derivative_structure() {
        let basis = classical_basis(6);
        // eta = 0 keeps only the linear term, 1/delta_1^2.
        let s = basis.slot_derivative(c(0.0, 0.0));
        let coeffs = s.taylor_coefficients(6);
        assert_relative_eq!(coeffs[1].re, 1.0 / basis.delta_sq(1), max_relative = 1e-12);
        for (n, co) in coeffs.iter().enumerate() {
            if n != 1 {
                assert_abs_diff_eq!(co.norm(), 0.0, epsilon = 0.0);
            }
        }
        // A degree-1 basis has a single term.
        let tiny = classical_basis(1);
        let coeffs = tiny.slot_derivative(c(0.7, 0.2)).taylor_coefficients(1);
        assert_relative_eq!(coeffs[1].re, 1.0 / tiny.delta_sq(1), max_relative = 1e-12);
    }

    #[test]
    fn slot_derivative_matches_series_identity() {
        // Classical, eta = 1: sum n zeta^n / (pi n!) = zeta e^zeta / pi,
        // which at zeta = 1 is e / pi.
        let basis = classical_basis(40);
        let s = basis.slot_derivative(c(1.0, 0.0));
        let v = s.evaluate(c(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, core::f64::consts::E / PI, max_relative = 1e-12);
    }

    #[test]
    fn reproduces_constants_at_origin() {
        let basis = classical_basis(12);
        let f = EntireFunction::constant_real(1.0);
        let r = reproduce_check(&basis, &f, c(0.0, 0.0), &QuadratureConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.rel_err <= 1e-10, "rel err {}", r.rel_err);
    }

    #[test]
    fn reproduces_square_off_axis() {
        let basis = classical_basis(40);
        let f = EntireFunction::monomial(2);
        let r = reproduce_check(&basis, &f, c(1.0, 1.0), &QuadratureConfig::default()).unwrap();
        assert!((r.reference - c(0.0, 2.0)).norm() < 1e-14);
        assert!(r.rel_err <= 1e-6, "rel err {}", r.rel_err);
    }

    #[test]
    fn reproduces_under_power_weight() {
        let basis = KernelBasis::compute(
            &WeightProfile::power(3.0),
            16,
            &QuadratureConfig::default(),
        )
        .unwrap();
        let f = EntireFunction::monomial(1);
        let r = reproduce_check(&basis, &f, c(1.0, 0.0), &QuadratureConfig::default()).unwrap();
        assert!(r.rel_err <= 1e-4, "rel err {}", r.rel_err);
    }

    #[test]
    fn pairing_identity_raw_values() {
        let cfg = QuadratureConfig::default();
        let profile = WeightProfile::power(3.0);
        let one = EntireFunction::constant_real(1.0);
        let z = EntireFunction::monomial(1);

        // f = g = 1: lhs is the zeroth moment, rhs is exactly 1.
        let p = inner_product_identity_check(&profile, &one, &one, &cfg).unwrap();
        assert_relative_eq!(p.lhs.re, 1.78660457411, max_relative = 1e-8);
        assert_relative_eq!(p.rhs.re, 1.0, max_relative = 1e-12);

        // Distinct monomials: both sides vanish by angular orthogonality.
        let p = inner_product_identity_check(&profile, &z, &one, &cfg).unwrap();
        assert!(p.lhs.norm() <= 1e-8 && p.rhs.norm() <= 1e-8);

        // f = g = z: frozen quadrature values for both sides.
        let p = inner_product_identity_check(&profile, &z, &z, &cfg).unwrap();
        assert_relative_eq!(p.lhs.re, 0.742209964555, max_relative = 1e-8);
        assert_relative_eq!(p.rhs.re, 0.588545464085, max_relative = 1e-6);
    }

    #[test]
    fn weighted_equivalence_ratios() {
        let cfg = QuadratureConfig::default();
        let profile = WeightProfile::power(3.0);
        let one = EntireFunction::constant_real(1.0);
        let e = weighted_derivative_equivalence_check(&profile, &one, 2.0, &cfg).unwrap();
        assert_relative_eq!(e.middle, 1.0, max_relative = 1e-12);
        assert_relative_eq!(e.norm_power, 1.78660457411, max_relative = 1e-8);

        let z3 = EntireFunction::monomial(3);
        let e = weighted_derivative_equivalence_check(&profile, &z3, 2.0, &cfg).unwrap();
        assert!(e.ratio > 1e-3 && e.ratio < 1e3, "ratio {}", e.ratio);
        assert!(e.converged);
    }

    #[test]
    fn equivalence_scale_invariance() {
        // Constants: middle/norm^p is invariant under scaling f -> c f.
        let cfg = QuadratureConfig::default();
        let profile = WeightProfile::power(3.0);
        let a = weighted_derivative_equivalence_check(
            &profile,
            &EntireFunction::constant_real(1.0),
            2.0,
            &cfg,
        )
        .unwrap();
        let b = weighted_derivative_equivalence_check(
            &profile,
            &EntireFunction::constant_real(3.5),
            2.0,
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(a.ratio, b.ratio, max_relative = 1e-12);
    }

    #[test]
    fn inadmissible_weight_is_an_error() {
        // phi = r^0.1: r exp(-2 phi)/phi' still grows at r_max and the slope
        // bracket sits far above p = 2.
        let profile = WeightProfile::power(0.1);
        assert!(!derivative_norm_admissible(&profile, 2.0, 50.0).all());
        let err = weighted_derivative_equivalence_check(
            &profile,
            &EntireFunction::constant_real(1.0),
            2.0,
            &QuadratureConfig::default(),
        );
        assert!(matches!(err, Err(Error::InadmissibleWeight { .. })));
    }
}
