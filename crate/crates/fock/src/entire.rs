//! Entire functions with exact representation-level algebra.
//!
//! Functions are tagged trees: truncated power series, polynomials, a few
//! named closed forms, and sums, products and scalings of those. Derivatives
//! and antiderivatives act on the representation (termwise rules, closed-form
//! tables, product rule), never on sampled values. Truncated series certify
//! their tail at evaluation time and fail loudly instead of silently losing
//! accuracy.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Inherent f64 methods shadow this under std; the no_std build needs it.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Default tail tolerance for series produced internally.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Truncation degree used when a product must be flattened to a series.
const PRODUCT_SERIES_DEGREE: usize = 96;
/// Coefficients probed when deciding whether a transcendental tree is zero.
const ZERO_PROBE_DEGREE: usize = 64;

/// Tail handling of a truncated power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Evaluation must certify `|a_N| R^N <= tol * (1 + max partial sum)`.
    Certified { tol: f64 },
    /// No certificate; the caller owns the truncation error.
    Unchecked,
}

/// Closed forms with exact derivative and antiderivative tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedForm {
    /// `exp(c z)`.
    ExpScaled(Complex64),
    Cos,
    Sin,
    /// `z^m`.
    Monomial(u32),
    Constant(Complex64),
}

/// Tagged representation of an entire function.
#[derive(Debug, Clone, PartialEq)]
pub enum EntireFunction {
    PowerSeries { coeffs: Vec<Complex64>, tail: TailPolicy },
    Polynomial(Vec<Complex64>),
    Named(NamedForm),
    Sum(Vec<EntireFunction>),
    Product(Box<EntireFunction>, Box<EntireFunction>),
    Scaled(Complex64, Box<EntireFunction>),
}

impl EntireFunction {
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        EntireFunction::Polynomial(coeffs)
    }

    pub fn polynomial_real(coeffs: &[f64]) -> Self {
        EntireFunction::Polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn power_series(coeffs: Vec<Complex64>, tail_tol: f64) -> Self {
        EntireFunction::PowerSeries { coeffs, tail: TailPolicy::Certified { tol: tail_tol } }
    }

    pub fn power_series_unchecked(coeffs: Vec<Complex64>) -> Self {
        EntireFunction::PowerSeries { coeffs, tail: TailPolicy::Unchecked }
    }

    pub fn cos() -> Self {
        EntireFunction::Named(NamedForm::Cos)
    }

    pub fn sin() -> Self {
        EntireFunction::Named(NamedForm::Sin)
    }

    /// `exp(c z)`.
    pub fn exp_scaled(c: Complex64) -> Self {
        EntireFunction::Named(NamedForm::ExpScaled(c))
    }

    /// `z^m`.
    pub fn monomial(m: u32) -> Self {
        EntireFunction::Named(NamedForm::Monomial(m))
    }

    pub fn constant(c: Complex64) -> Self {
        EntireFunction::Named(NamedForm::Constant(c))
    }

    pub fn constant_real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn sum(terms: Vec<EntireFunction>) -> Self {
        EntireFunction::Sum(terms)
    }

    pub fn product(a: EntireFunction, b: EntireFunction) -> Self {
        EntireFunction::Product(Box::new(a), Box::new(b))
    }

    pub fn scaled(c: Complex64, inner: EntireFunction) -> Self {
        EntireFunction::Scaled(c, Box::new(inner))
    }

    /// Value at `z`.
    ///
    /// Series are summed in ascending index order with the running partial
    /// maximum tracked for the tail certificate; the summation order is part
    /// of the determinism contract.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            EntireFunction::PowerSeries { coeffs, tail } => {
                let cert = match tail {
                    TailPolicy::Certified { tol } => Some(*tol),
                    TailPolicy::Unchecked => None,
                };
                eval_coeffs(coeffs, z, cert)
            }
            EntireFunction::Polynomial(coeffs) => eval_coeffs(coeffs, z, None),
            EntireFunction::Named(n) => Ok(match *n {
                NamedForm::ExpScaled(c) => (c * z).exp(),
                NamedForm::Cos => z.cos(),
                NamedForm::Sin => z.sin(),
                NamedForm::Monomial(m) => z.powu(m),
                NamedForm::Constant(c) => c,
            }),
            EntireFunction::Sum(terms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += t.evaluate(z)?;
                }
                Ok(acc)
            }
            EntireFunction::Product(a, b) => Ok(a.evaluate(z)? * b.evaluate(z)?),
            EntireFunction::Scaled(c, inner) => Ok(c * inner.evaluate(z)?),
        }
    }

    /// Exact representation-level derivative of the given order.
    pub fn differentiate(&self, order: u32) -> EntireFunction {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.differentiate_once();
        }
        f
    }

    fn differentiate_once(&self) -> EntireFunction {
        match self {
            EntireFunction::PowerSeries { coeffs, tail } => EntireFunction::PowerSeries {
                coeffs: differentiate_coeffs(coeffs),
                tail: *tail,
            },
            EntireFunction::Polynomial(coeffs) => {
                EntireFunction::Polynomial(differentiate_coeffs(coeffs))
            }
            EntireFunction::Named(n) => match *n {
                NamedForm::ExpScaled(c) => {
                    EntireFunction::scaled(c, EntireFunction::exp_scaled(c))
                }
                NamedForm::Cos => {
                    EntireFunction::scaled(Complex64::new(-1.0, 0.0), EntireFunction::sin())
                }
                NamedForm::Sin => EntireFunction::cos(),
                NamedForm::Monomial(0) => EntireFunction::zero(),
                NamedForm::Monomial(m) => EntireFunction::scaled(
                    Complex64::new(m as f64, 0.0),
                    EntireFunction::monomial(m - 1),
                ),
                NamedForm::Constant(_) => EntireFunction::zero(),
            },
            EntireFunction::Sum(terms) => {
                EntireFunction::Sum(terms.iter().map(|t| t.differentiate_once()).collect())
            }
            EntireFunction::Product(a, b) => EntireFunction::Sum(vec![
                EntireFunction::product(a.differentiate_once(), (**b).clone()),
                EntireFunction::product((**a).clone(), b.differentiate_once()),
            ]),
            EntireFunction::Scaled(c, inner) => {
                EntireFunction::scaled(*c, inner.differentiate_once())
            }
        }
    }

    /// The `order`-fold primitive with all integration constants zero: every
    /// derivative of order below `order` of the result vanishes at 0.
    pub fn antiderivative(&self, order: u32) -> EntireFunction {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.antiderivative_once();
        }
        f
    }

    fn antiderivative_once(&self) -> EntireFunction {
        match self {
            EntireFunction::PowerSeries { coeffs, tail } => EntireFunction::PowerSeries {
                coeffs: antiderivative_coeffs(coeffs),
                tail: *tail,
            },
            EntireFunction::Polynomial(coeffs) => {
                EntireFunction::Polynomial(antiderivative_coeffs(coeffs))
            }
            EntireFunction::Named(n) => match *n {
                NamedForm::ExpScaled(c) if c != Complex64::new(0.0, 0.0) => {
                    // (exp(cz) - 1) / c
                    EntireFunction::Sum(vec![
                        EntireFunction::scaled(1.0 / c, EntireFunction::exp_scaled(c)),
                        EntireFunction::constant(-1.0 / c),
                    ])
                }
                NamedForm::ExpScaled(_) => EntireFunction::monomial(1),
                NamedForm::Cos => EntireFunction::sin(),
                // 1 - cos
                NamedForm::Sin => EntireFunction::Sum(vec![
                    EntireFunction::constant_real(1.0),
                    EntireFunction::scaled(Complex64::new(-1.0, 0.0), EntireFunction::cos()),
                ]),
                NamedForm::Monomial(m) => EntireFunction::scaled(
                    Complex64::new(1.0 / (m as f64 + 1.0), 0.0),
                    EntireFunction::monomial(m + 1),
                ),
                NamedForm::Constant(c) => {
                    EntireFunction::Polynomial(vec![Complex64::new(0.0, 0.0), c])
                }
            },
            EntireFunction::Sum(terms) => {
                EntireFunction::Sum(terms.iter().map(|t| t.antiderivative_once()).collect())
            }
            EntireFunction::Product(a, b) => {
                // Products have no closed-form primitive; polynomial pairs
                // multiply exactly, everything else flattens to a certified
                // series of fixed degree.
                match (a.degree_bound(), b.degree_bound()) {
                    (Some(da), Some(db)) => {
                        let n = da + db;
                        let coeffs = series_multiply(
                            &a.taylor_coefficients(n),
                            &b.taylor_coefficients(n),
                            n,
                        );
                        EntireFunction::Polynomial(antiderivative_coeffs(&coeffs))
                    }
                    _ => {
                        let coeffs = self.taylor_coefficients(PRODUCT_SERIES_DEGREE);
                        EntireFunction::PowerSeries {
                            coeffs: antiderivative_coeffs(&coeffs),
                            tail: TailPolicy::Certified { tol: DEFAULT_TAIL_TOL },
                        }
                    }
                }
            }
            EntireFunction::Scaled(c, inner) => {
                EntireFunction::scaled(*c, inner.antiderivative_once())
            }
        }
    }

    /// Exact Taylor coefficients `a_0..a_n`. Every representation yields its
    /// coefficients exactly up to the requested degree; truncation error only
    /// exists at evaluation time.
    pub fn taylor_coefficients(&self, n: usize) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            EntireFunction::PowerSeries { coeffs, .. } | EntireFunction::Polynomial(coeffs) => {
                let mut out = vec![zero; n + 1];
                for (i, &c) in coeffs.iter().take(n + 1).enumerate() {
                    out[i] = c;
                }
                out
            }
            EntireFunction::Named(form) => {
                let mut out = vec![zero; n + 1];
                match *form {
                    NamedForm::ExpScaled(c) => {
                        let mut t = Complex64::new(1.0, 0.0);
                        out[0] = t;
                        for (k, slot) in out.iter_mut().enumerate().skip(1) {
                            t = t * c / (k as f64);
                            *slot = t;
                        }
                    }
                    NamedForm::Cos => {
                        let mut t = 1.0;
                        let mut k = 0usize;
                        while k <= n {
                            out[k] = Complex64::new(t, 0.0);
                            t = -t / (((k + 1) * (k + 2)) as f64);
                            k += 2;
                        }
                    }
                    NamedForm::Sin => {
                        let mut t = 1.0;
                        let mut k = 1usize;
                        while k <= n {
                            out[k] = Complex64::new(t, 0.0);
                            t = -t / (((k + 1) * (k + 2)) as f64);
                            k += 2;
                        }
                    }
                    NamedForm::Monomial(m) => {
                        if (m as usize) <= n {
                            out[m as usize] = Complex64::new(1.0, 0.0);
                        }
                    }
                    NamedForm::Constant(c) => out[0] = c,
                }
                out
            }
            EntireFunction::Sum(terms) => {
                let mut out = vec![zero; n + 1];
                for t in terms {
                    for (o, c) in out.iter_mut().zip(t.taylor_coefficients(n)) {
                        *o += c;
                    }
                }
                out
            }
            EntireFunction::Product(a, b) => {
                series_multiply(&a.taylor_coefficients(n), &b.taylor_coefficients(n), n)
            }
            EntireFunction::Scaled(c, inner) => {
                let mut out = inner.taylor_coefficients(n);
                for o in out.iter_mut() {
                    *o *= c;
                }
                out
            }
        }
    }

    /// Upper bound on the polynomial degree of the tree, `None` when a
    /// transcendental closed form appears.
    fn degree_bound(&self) -> Option<usize> {
        match self {
            EntireFunction::PowerSeries { coeffs, .. } | EntireFunction::Polynomial(coeffs) => {
                Some(coeffs.len().saturating_sub(1))
            }
            EntireFunction::Named(form) => match *form {
                NamedForm::ExpScaled(c) if c == Complex64::new(0.0, 0.0) => Some(0),
                NamedForm::ExpScaled(_) | NamedForm::Cos | NamedForm::Sin => None,
                NamedForm::Monomial(m) => Some(m as usize),
                NamedForm::Constant(_) => Some(0),
            },
            EntireFunction::Sum(terms) => {
                let mut best = 0usize;
                for t in terms {
                    best = best.max(t.degree_bound()?);
                }
                Some(best)
            }
            EntireFunction::Product(a, b) => Some(a.degree_bound()? + b.degree_bound()?),
            EntireFunction::Scaled(_, inner) => inner.degree_bound(),
        }
    }

    /// Exact degree if the function is a polynomial (index of the last
    /// nonzero Taylor coefficient), `None` for transcendental trees. The zero
    /// function reports degree 0; check [`EntireFunction::is_zero`] first
    /// where the distinction matters.
    pub fn polynomial_degree(&self) -> Option<usize> {
        let bound = self.degree_bound()?;
        let coeffs = self.taylor_coefficients(bound);
        let zero = Complex64::new(0.0, 0.0);
        Some(coeffs.iter().rposition(|&c| c != zero).unwrap_or(0))
    }

    /// Structural zero test. Transcendental trees are probed through their
    /// first coefficients, which resolves exact cancellations such as
    /// `cos - cos`.
    pub fn is_zero(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            EntireFunction::PowerSeries { coeffs, .. } | EntireFunction::Polynomial(coeffs) => {
                coeffs.iter().all(|&c| c == zero)
            }
            EntireFunction::Named(NamedForm::Constant(c)) => *c == zero,
            EntireFunction::Named(_) => false,
            EntireFunction::Scaled(c, inner) => *c == zero || inner.is_zero(),
            EntireFunction::Product(a, b) => a.is_zero() || b.is_zero(),
            EntireFunction::Sum(terms) => {
                if terms.iter().all(|t| t.is_zero()) {
                    return true;
                }
                let n = self.degree_bound().unwrap_or(ZERO_PROBE_DEGREE);
                self.taylor_coefficients(n).iter().all(|&c| c == zero)
            }
        }
    }

    /// Maximum of `|f|` on the circle of radius `r`, seeded by `n_theta`
    /// equispaced angles and sharpened by a golden-section pass around the
    /// best sample so the value is grid-resolution independent.
    pub fn max_modulus(&self, r: f64, n_theta: usize) -> Result<f64> {
        assert!(n_theta >= 64, "max_modulus needs at least 64 angles");
        assert!(r >= 0.0);
        let step = 2.0 * core::f64::consts::PI / n_theta as f64;
        let mut best = 0.0f64;
        let mut best_theta = 0.0f64;
        for j in 0..n_theta {
            let theta = step * j as f64;
            let v = self.evaluate(Complex64::from_polar(r, theta))?.norm();
            if v > best {
                best = v;
                best_theta = theta;
            }
        }
        // Local refinement on [theta* - step, theta* + step].
        let golden = 0.5 * (5.0f64.sqrt() - 1.0);
        let (mut a, mut b) = (best_theta - step, best_theta + step);
        let mut x1 = b - golden * (b - a);
        let mut x2 = a + golden * (b - a);
        let mut f1 = self.evaluate(Complex64::from_polar(r, x1))?.norm();
        let mut f2 = self.evaluate(Complex64::from_polar(r, x2))?.norm();
        for _ in 0..80 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = self.evaluate(Complex64::from_polar(r, x2))?.norm();
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = self.evaluate(Complex64::from_polar(r, x1))?.norm();
            }
        }
        Ok(best.max(f1).max(f2))
    }

    /// `log+` of the maximum modulus, the characteristic proxy.
    pub fn nevanlinna_proxy(&self, r: f64, n_theta: usize) -> Result<f64> {
        let m = self.max_modulus(r, n_theta)?;
        Ok(if m <= 1.0 { 0.0 } else { m.ln() })
    }
}

fn differentiate_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * (k as f64))
        .collect()
}

fn antiderivative_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(Complex64::new(0.0, 0.0));
    for (k, &c) in coeffs.iter().enumerate() {
        out.push(c / (k as f64 + 1.0));
    }
    out
}

/// Cauchy product truncated at degree `n`; coefficient `c_k` sums `a_i b_{k-i}`
/// in ascending `i` (determinism contract). Missing coefficients are zero.
pub fn series_multiply(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; n + 1];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = zero;
        for i in 0..=k {
            let ai = a.get(i).copied().unwrap_or(zero);
            let bj = b.get(k - i).copied().unwrap_or(zero);
            acc += ai * bj;
        }
        *slot = acc;
    }
    out
}

/// Ascending-index series evaluation. Powers of `z` are carried as a unit
/// phase and a log-magnitude once bare powers could leave f64 range, so small
/// terms with huge bare powers (such as `z^k/k!` far out) never overflow on
/// the way.
fn eval_coeffs(coeffs: &[Complex64], z: Complex64, certify: Option<f64>) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if coeffs.is_empty() {
        return Ok(zero);
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok(coeffs[0]);
    }
    let ln_r = r.ln();
    let n = coeffs.len() - 1;

    let mut sum = zero;
    let mut max_partial = 0.0f64;
    if (n as f64) * ln_r.abs() < 600.0 {
        let mut pow = Complex64::new(1.0, 0.0);
        for (k, &a) in coeffs.iter().enumerate() {
            if k > 0 {
                pow *= z;
            }
            sum += a * pow;
            max_partial = max_partial.max(sum.norm());
        }
    } else {
        let unit = z / r;
        let mut u = Complex64::new(1.0, 0.0);
        let mut log_pow = 0.0f64;
        for (k, &a) in coeffs.iter().enumerate() {
            if k > 0 {
                u *= unit;
                log_pow += ln_r;
            }
            if a != zero {
                let log_term = a.norm().ln() + log_pow;
                if log_term > -745.0 {
                    sum += a * u * log_pow.exp();
                }
            }
            max_partial = max_partial.max(sum.norm());
        }
    }

    if let Some(tol) = certify {
        let last = coeffs[n].norm();
        let log_last =
            if last == 0.0 { f64::NEG_INFINITY } else { last.ln() + n as f64 * ln_r };
        if log_last > (tol * (1.0 + max_partial)).ln() {
            return Err(Error::SeriesTruncation { radius: r });
        }
    }
    Ok(sum)
}
