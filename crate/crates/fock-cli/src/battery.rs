//! Seeded invariant battery: the cross-module property suite behind
//! `fock battery`.
//!
//! Each case prints one line and lands in the JSON report. The battery is
//! deterministic in the seed; any failure is a numerical failure at the exit
//! code level.

use fock::conditions::{
    check_t11, check_t12, check_t13, sup_ratio, xk_functional, ConstantsConfig, ProbeGrid,
    SupRatioGrid,
};
use fock::entire::{series_multiply, EntireFunction};
use fock::kernel::{reproduce_check, KernelBasis};
use fock::ode::{growth_envelope, ray_integrate, residual_coefficients, taylor_solve, LDEProblem};
use fock::quadrature::{plane_integral, weighted_norm, QuadratureConfig, SpaceSpec};
use fock::weights::{classify_weight, WeightProfile};
use fock::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::report::{envelope, grid_hash};
use crate::{Artifact, CliError};

struct Case {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn battery_cfg() -> QuadratureConfig {
    QuadratureConfig {
        n_radial: 64,
        n_angular: 64,
        tail_tol: 1e-8,
        segment_nodes: 32,
        ..QuadratureConfig::default()
    }
}

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> EntireFunction {
    let d = rng.gen_range(0..=max_degree);
    let coeffs: Vec<Complex64> = (0..=d)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    EntireFunction::polynomial(coeffs)
}

pub fn run(manifest: &RunManifest) -> Result<Vec<Artifact>, CliError> {
    let seed = manifest.seed;
    let cfg = battery_cfg();
    let mut cases: Vec<Case> = Vec::new();
    let mut record = |name: &'static str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        cases.push(Case { name, pass, detail });
    };

    // Weights: tau * laplacian identity on the built-in class.
    {
        let mut worst = 0.0f64;
        for w in [
            WeightProfile::power(3.0),
            WeightProfile::power(2.5),
            WeightProfile::exponential(1.0),
            WeightProfile::scaled_exponential(0.5),
        ] {
            let mut r = 1.0;
            while r <= 30.0 {
                let t = w.tau(r, 1.0).map_err(|e| CliError::Numerical(e.to_string()))?;
                let lap = w.laplacian_radial(r).map_err(|e| CliError::Numerical(e.to_string()))?;
                worst = worst.max((t * t * lap - 1.0).abs());
                r += 1.37;
            }
        }
        record("weights_tau_identity", worst <= 1e-12, format!("max deviation {worst:.3e}"));
    }

    // Weights: the power-class gate at alpha = 2.
    {
        let mut ok = true;
        for (alpha, expect) in [(1.0, false), (2.0, false), (2.5, true), (3.0, true), (5.0, true)]
        {
            let d = classify_weight(&WeightProfile::power(alpha), 100.0, 64);
            ok &= d.class_i() == expect;
        }
        record("weights_power_class_gate", ok, "alpha in {1, 2, 2.5, 3, 5}".to_string());
    }

    // Weights: finite-difference derivative consistency at random radii.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
        let radii: Vec<f64> = (0..20).map(|_| rng.gen_range(0.2..20.0)).collect();
        let mut ok = true;
        for w in [
            WeightProfile::power(3.0),
            WeightProfile::exponential(1.0),
            WeightProfile::classical_gaussian(),
        ] {
            ok &= w.derivative_consistency(&radii, 1e-6).is_none();
        }
        record("weights_derivative_consistency", ok, "20 random radii, rtol 1e-6".to_string());
    }

    // Entire: differentiate after antiderivative is the identity.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x22);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let p = random_poly(&mut rng, 6);
            let round = p.antiderivative(1).differentiate(1);
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let a = p.evaluate(z).map_err(|e| CliError::Numerical(e.to_string()))?;
            let b = round.evaluate(z).map_err(|e| CliError::Numerical(e.to_string()))?;
            worst = worst.max((a - b).norm() / (1.0 + a.norm()));
        }
        record("entire_diff_antideriv_roundtrip", worst <= 1e-13, format!("max deviation {worst:.3e}"));
    }

    // Entire: Cauchy product associativity.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x33);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let to = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                (0..=rng.gen_range(0..5))
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect()
            };
            let (a, b, d) = (to(&mut rng), to(&mut rng), to(&mut rng));
            let left = series_multiply(&series_multiply(&a, &b, 12), &d, 12);
            let right = series_multiply(&a, &series_multiply(&b, &d, 12), 12);
            for (l, r) in left.iter().zip(right.iter()) {
                worst = worst.max((l - r).norm());
            }
        }
        record("entire_cauchy_associativity", worst <= 1e-12, format!("max deviation {worst:.3e}"));
    }

    // Quadrature: the Gaussian integral.
    {
        let out = plane_integral(|z| (-z.norm_sqr()).exp(), &cfg);
        let err = (out.value - std::f64::consts::PI).abs() / std::f64::consts::PI;
        record("quadrature_gaussian_pi", out.converged && err <= 1e-10, format!("rel err {err:.3e}"));
    }

    // Quadrature: norm homogeneity under random scalings.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x44);
        let mut worst = 0.0f64;
        for _ in 0..4 {
            let f = random_poly(&mut rng, 3);
            let scale = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let scaled = EntireFunction::scaled(scale, f.clone());
            for space in [
                SpaceSpec::classical(2.0),
                SpaceSpec::weighted(WeightProfile::power(3.0), 2.0),
            ] {
                let a = weighted_norm(&f, &space, &cfg)
                    .map_err(|e| CliError::Numerical(e.to_string()))?
                    .value;
                let b = weighted_norm(&scaled, &space, &cfg)
                    .map_err(|e| CliError::Numerical(e.to_string()))?
                    .value;
                if a > 0.0 {
                    worst = worst.max((b - scale.norm() * a).abs() / (scale.norm() * a).max(1e-300));
                }
            }
        }
        record("quadrature_norm_homogeneity", worst <= 1e-12, format!("max deviation {worst:.3e}"));
    }

    // Kernel: classical moments against factorials.
    {
        let basis = KernelBasis::compute(&WeightProfile::classical_gaussian(), 20, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut fact = 1.0f64;
        let mut worst = 0.0f64;
        for n in 0..=20usize {
            if n > 0 {
                fact *= n as f64;
            }
            let expect = std::f64::consts::PI * fact;
            worst = worst.max((basis.delta_sq(n) - expect).abs() / expect);
        }
        record("kernel_classical_moments", worst <= 1e-9, format!("max rel err {worst:.3e}"));
    }

    // Kernel: Hermitian symmetry is exact.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let basis = KernelBasis::compute(&WeightProfile::classical_gaussian(), 24, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut ok = true;
        for _ in 0..50 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let zeta = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            ok &= basis.eval_unchecked(z, zeta) == basis.eval_unchecked(zeta, z).conj();
        }
        record("kernel_hermitian_symmetry", ok, "50 random pairs, exact".to_string());
    }

    // Kernel: reproducing identity for low monomials.
    {
        let basis = KernelBasis::compute(&WeightProfile::classical_gaussian(), 24, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut worst = 0.0f64;
        for j in 0..=4u32 {
            for &zeta in &[c(0.5, 0.0), c(0.0, 1.0), c(-1.0, 0.5)] {
                let r = reproduce_check(&basis, &EntireFunction::monomial(j), zeta, &cfg)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                worst = worst.max(r.rel_err);
            }
        }
        record("kernel_reproducing_monomials", worst <= 1e-5, format!("max rel err {worst:.3e}"));
    }

    // ODE: Taylor series against the adaptive ray integration.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x66);
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let k = rng.gen_range(1..=3);
            let coefficients: Vec<EntireFunction> =
                (0..k).map(|_| random_poly(&mut rng, 2)).collect();
            let forcing = random_poly(&mut rng, 2);
            let initial: Vec<Complex64> = (0..k)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let problem = LDEProblem::new(coefficients, forcing, initial)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            let series = taylor_solve(&problem, 200)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            for &theta in &[0.0, std::f64::consts::FRAC_PI_3] {
                let trace = ray_integrate(&problem, theta, 2.5, 1e-10, 16)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let i = trace.radii.len() - 1;
                let z = Complex64::from_polar(trace.radii[i], theta);
                let a = series.evaluate(z).map_err(|e| CliError::Numerical(e.to_string()))?;
                let b = trace.values[i][0];
                worst = worst.max((a - b).norm() / (1.0 + a.norm()));
            }
        }
        record("ode_oracle_agreement", worst <= 1e-8, format!("max rel err {worst:.3e}"));
    }

    // ODE: envelope domination for the oscillatory model problems.
    {
        let cosine = LDEProblem::second_order(
            EntireFunction::constant_real(1.0),
            [c(1.0, 0.0), c(0.0, 0.0)],
        );
        let airy =
            LDEProblem::second_order(EntireFunction::monomial(1), [c(1.0, 0.0), c(0.0, 0.0)]);
        let radii: Vec<f64> = (1..=30).map(|i| 1.0 + 9.0 * i as f64 / 30.0).collect();
        let mut ok = true;
        for problem in [&cosine, &airy] {
            let env = growth_envelope(problem, 0.0, &radii, 1.0, 1e-10)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            let trace = ray_integrate(problem, 0.0, 10.0, 1e-10, 128)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            for &(r, bound) in &env.points {
                // Nearest trace sample.
                let mut f_abs = 0.0;
                let mut best = f64::INFINITY;
                for (i, &tr) in trace.radii.iter().enumerate() {
                    if (tr - r).abs() < best {
                        best = (tr - r).abs();
                        f_abs = trace.values[i][0].norm();
                    }
                }
                ok &= bound >= f_abs * (1.0 - 1e-6);
            }
        }
        record("ode_envelope_domination", ok, "cosine and linear-coefficient rays".to_string());
    }

    // ODE: homogeneous solutions are additive in the initial data.
    {
        let base =
            LDEProblem::second_order(EntireFunction::monomial(1), [c(1.0, 0.0), c(0.0, 0.0)]);
        let s = |init: [Complex64; 2]| -> Result<Vec<Complex64>, CliError> {
            Ok(taylor_solve(&base.with_initial(init.to_vec()).unwrap(), 60)
                .map_err(|e| CliError::Numerical(e.to_string()))?
                .taylor_coefficients(60))
        };
        let u = s([c(1.0, 0.0), c(0.0, 0.0)])?;
        let v = s([c(0.0, 0.0), c(1.0, 0.0)])?;
        let both = s([c(1.0, 0.0), c(1.0, 0.0)])?;
        let mut worst = 0.0f64;
        for i in 0..=60 {
            let sum = u[i] + v[i];
            worst = worst.max((both[i] - sum).norm() / (1.0 + sum.norm()));
        }
        record("ode_solution_linearity", worst <= 1e-13, format!("max deviation {worst:.3e}"));
    }

    // ODE: the recurrence leaves no residual.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
        let problem = LDEProblem::new(
            vec![random_poly(&mut rng, 2), random_poly(&mut rng, 2)],
            random_poly(&mut rng, 2),
            vec![
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ],
        )
        .map_err(|e| CliError::Numerical(e.to_string()))?;
        let f = taylor_solve(&problem, 80).map_err(|e| CliError::Numerical(e.to_string()))?;
        let res = residual_coefficients(&problem, &f, 78 - problem.order());
        let worst = res
            .iter()
            .enumerate()
            .map(|(m, r)| r.norm() / (1.0 + m as f64))
            .fold(0.0f64, f64::max);
        record("ode_residual", worst <= 1e-12, format!("max scaled residual {worst:.3e}"));
    }

    // Conditions: the polynomial degree gate of the sup-ratio.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x88);
        let grid = SupRatioGrid::default();
        let mut ok = true;
        for _ in 0..20 {
            let d = rng.gen_range(0usize..=4);
            let s = rng.gen_range(0i32..=4);
            let mut coeffs: Vec<Complex64> = (0..=d)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            coeffs[d] = c(rng.gen_range(0.5..2.0), 0.0);
            let sr = sup_ratio(&EntireFunction::polynomial(coeffs), s, &grid)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            ok &= sr.value.is_infinite() == (d as i64 > s as i64);
        }
        record("conditions_degree_gate", ok, "20 seeded polynomial/exponent pairs".to_string());
    }

    // Conditions: T1.2 satisfaction only inside the degenerate class.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x99);
        let mut ok = true;
        for _ in 0..12 {
            let k = rng.gen_range(1..=2usize);
            let coefficients: Vec<EntireFunction> = (0..k)
                .map(|j| match rng.gen_range(0..3) {
                    0 => EntireFunction::zero(),
                    1 => EntireFunction::constant_real(rng.gen_range(-0.2..0.2)),
                    _ => {
                        if j == 0 {
                            random_poly(&mut rng, 1)
                        } else {
                            EntireFunction::zero()
                        }
                    }
                })
                .collect();
            let initial: Vec<Complex64> = (0..k).map(|_| c(1.0, 0.0)).collect();
            let problem =
                LDEProblem::new(coefficients, EntireFunction::zero(), initial).unwrap();
            let report = check_t12(&problem, 2.0, &ConstantsConfig::default(), &cfg)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            if report.hypothesis.satisfied() {
                let degenerate = problem.coefficients()[1..].iter().all(|a| a.is_zero())
                    && (problem.coefficients()[0].is_zero()
                        || problem.coefficients()[0].polynomial_degree() == Some(0));
                ok &= degenerate;
                ok &= report.consistent;
            }
        }
        record("conditions_t12_degeneracy", ok, "12 seeded coefficient patterns".to_string());
    }

    // Conditions: functional linearity in the coefficient.
    {
        let profile = WeightProfile::power(3.0);
        let basis = KernelBasis::compute(&profile, 12, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let grid = ProbeGrid::default();
        let x1 = xk_functional(&profile, &EntireFunction::constant_real(0.01), &basis, &grid, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?
            .value;
        let x3 = xk_functional(&profile, &EntireFunction::constant_real(0.03), &basis, &grid, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?
            .value;
        let dev = (x3 - 3.0 * x1).abs() / (3.0 * x1).max(1e-300);
        record("conditions_functional_linearity", dev <= 1e-12, format!("deviation {dev:.3e}"));
    }

    // Conditions: implication consistency across the built-in checks.
    {
        let mut ok = true;
        let p1 = LDEProblem::second_order(
            EntireFunction::constant_real(0.1),
            [c(1.0, 0.0), c(0.0, 0.0)],
        );
        ok &= check_t11(&p1, 2.0, &ConstantsConfig::default(), &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?
            .consistent;
        let p3 = LDEProblem::new(
            vec![
                EntireFunction::scaled(c(0.25, 0.0), EntireFunction::monomial(1)),
                EntireFunction::scaled(c(0.125, 0.0), EntireFunction::monomial(1)),
            ],
            EntireFunction::monomial(1),
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        ok &= check_t13(&p3, &WeightProfile::power(4.0), 2.0, 1.0, &cfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?
            .consistent;
        record("conditions_implication_consistency", ok, "built-in checker battery".to_string());
    }

    let all_pass = cases.iter().all(|c| c.pass);
    let result = json!({
        "seed": seed,
        "all_pass": all_pass,
        "cases": cases.iter().map(|case| json!({
            "name": case.name,
            "pass": case.pass,
            "detail": case.detail,
        })).collect::<Vec<_>>(),
    });
    let hash = grid_hash(&cfg, &[seed]);
    let artifact = Artifact {
        name: manifest
            .out
            .clone()
            .unwrap_or_else(|| manifest.command.default_out().to_string()),
        bytes: envelope(manifest, &hash, result),
    };
    if all_pass {
        Ok(vec![artifact])
    } else {
        // The artifact still carries the details; the exit code signals the
        // failure.
        crate::write_artifacts(std::slice::from_ref(&artifact))?;
        Err(CliError::Numerical("battery invariants failed".to_string()))
    }
}
