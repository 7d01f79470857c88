//! Command implementations: load inputs, dispatch into the library, emit
//! artifacts.

use fock::conditions::{
    check_kernel_theorem, check_t11, check_t12, check_t13, check_t14, check_t15, ConstantsConfig,
    ProbeGrid, TheoremId,
};
use fock::entire::EntireFunction;
use fock::kernel::{reproduce_check, KernelBasis};
use fock::ode::{growth_envelope, ray_integrate, taylor_solve, LDEProblem};
use fock::quadrature::{weighted_norm_detailed, Exponent, QuadratureConfig, SpaceSpec};
use fock::weights::{classify_weight, RegularityRoute, WeightProfile};
use fock::Complex64;
use serde_json::json;

use crate::codec::{ConfigDto, ConstantsDto, EntireDto, ProblemDto, WeightDto};
use crate::manifest::{CommandKind, RunManifest};
use crate::report::{
    complex, condition_report, csv_f64, envelope, grid_hash, num, CsvBuilder, NormDto,
};
use crate::{Artifact, CliError};

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.to_string(),
        message: format!("cannot read file: {e}"),
    })
}

fn load_weight(path: &str) -> Result<WeightProfile, CliError> {
    let dto: WeightDto = crate::codec::parse_json(&read(path)?, path)?;
    dto.build(path)
}

fn load_entire(path: &str) -> Result<EntireFunction, CliError> {
    let dto: EntireDto = crate::codec::parse_json(&read(path)?, path)?;
    dto.build(path)
}

fn load_problem(path: &str) -> Result<LDEProblem, CliError> {
    let dto: ProblemDto = crate::codec::parse_json(&read(path)?, path)?;
    dto.build(path)
}

fn effective_config(manifest: &RunManifest) -> Result<QuadratureConfig, CliError> {
    let base = match &manifest.config {
        Some(path) => {
            let dto: ConfigDto = crate::codec::parse_json(&read(path)?, path)?;
            dto.build(path)?
        }
        None => QuadratureConfig::default(),
    };
    if !(manifest.grid_scale > 0.0) {
        return Err(CliError::Input {
            path: "--grid-scale".to_string(),
            message: "grid scale must be positive".to_string(),
        });
    }
    Ok(if manifest.grid_scale == 1.0 { base } else { base.scaled(manifest.grid_scale) })
}

fn numerical(e: fock::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

pub fn run(manifest: &RunManifest) -> Result<Vec<Artifact>, CliError> {
    match &manifest.command {
        CommandKind::WeightsCheck { weight, r_max, samples } => {
            weights_check(manifest, weight, *r_max, *samples)
        }
        CommandKind::Norm { function, p, q, m, weight } => {
            norm(manifest, function, p, *q, *m, weight.as_deref())
        }
        CommandKind::KernelTable { weight, degree } => kernel_table(manifest, weight, *degree),
        CommandKind::KernelReproduce { weight, degree, function, zeta_re, zeta_im } => {
            kernel_reproduce(manifest, weight, *degree, function, Complex64::new(*zeta_re, *zeta_im))
        }
        CommandKind::Solve { problem, theta, r_max, tol, samples, weight, envelope_r0 } => solve(
            manifest,
            problem,
            *theta,
            *r_max,
            *tol,
            *samples,
            weight.as_deref(),
            *envelope_r0,
        ),
        CommandKind::Envelope { problem, theta, r0, r_max, samples } => {
            envelope_cmd(manifest, problem, *theta, *r0, *r_max, *samples)
        }
        CommandKind::Check { theorem, problem, weight, p, q, candidate, degree, constants } => {
            check(
                manifest,
                theorem,
                problem,
                weight.as_deref(),
                *p,
                *q,
                candidate.as_deref(),
                *degree,
                constants.as_deref(),
            )
        }
        CommandKind::Battery {} => crate::battery::run(manifest),
    }
}

fn out_name(manifest: &RunManifest) -> String {
    manifest
        .out
        .clone()
        .unwrap_or_else(|| manifest.command.default_out().to_string())
}

fn weights_check(
    manifest: &RunManifest,
    weight: &str,
    r_max: f64,
    samples: usize,
) -> Result<Vec<Artifact>, CliError> {
    if r_max < 10.0 {
        return Err(CliError::Input {
            path: "--r-max".to_string(),
            message: "classification needs r_max >= 10".to_string(),
        });
    }
    if samples < 16 {
        return Err(CliError::Input {
            path: "--samples".to_string(),
            message: "classification needs at least 16 samples".to_string(),
        });
    }
    let profile = load_weight(weight)?;
    let diag = classify_weight(&profile, r_max, samples);
    let route = match diag.regularity_route {
        RegularityRoute::TauPowerIncreasing { exponent } => {
            json!({"route": "tau_rC_increasing", "exponent": exponent})
        }
        RegularityRoute::TauSlopeLogVanishes => json!({"route": "tau_prime_log_vanishes"}),
        RegularityRoute::Neither => json!({"route": "neither"}),
    };
    let route_branches = json!({
        "tau_rC_increasing": diag.route_power_ok,
        "tau_prime_log_vanishes": diag.route_slope_ok,
    });
    let result = json!({
        "label": profile.label(),
        "class_i": diag.class_i(),
        "laplacian_positive": diag.laplacian_positive,
        "tau_vanishes": diag.tau_vanishes,
        "regularity_route": route,
        "regularity_branches": route_branches,
        "superquadratic": diag.superquadratic,
        "admissibility_p2": {
            "phi_prime_nonzero": diag.admissibility.phi_prime_nonzero,
            "tail_vanishes": diag.admissibility.tail_vanishes,
            "slope_bracket_below_p": diag.admissibility.slope_bracket_below_p,
        },
        "non_monotone_tau_tail": diag.non_monotone_tau_tail,
        "failing_sample": diag.failing_sample.map(|s| json!({
            "r": s.r, "laplacian": num(s.laplacian), "tau": num(s.tau),
        })),
        "r_max": r_max,
        "sample_grid": diag.sample_grid.iter().map(|s| json!({
            "r": s.r, "laplacian": num(s.laplacian), "tau": num(s.tau),
        })).collect::<Vec<_>>(),
    });
    let hash = grid_hash(&QuadratureConfig::default(), &[r_max.to_bits(), samples as u64]);
    Ok(vec![Artifact { name: out_name(manifest), bytes: envelope(manifest, &hash, result) }])
}

fn parse_exponent(p: &str) -> Result<Exponent, CliError> {
    if p == "inf" {
        return Ok(Exponent::Infinity);
    }
    match p.parse::<f64>() {
        Ok(v) if v > 0.0 => Ok(Exponent::Finite(v)),
        _ => Err(CliError::Input {
            path: "--p".to_string(),
            message: format!("exponent must be a positive number or \"inf\", got {p:?}"),
        }),
    }
}

fn norm(
    manifest: &RunManifest,
    function: &str,
    p: &str,
    q: f64,
    m: u32,
    weight: Option<&str>,
) -> Result<Vec<Artifact>, CliError> {
    let f = load_entire(function)?;
    let cfg = effective_config(manifest)?;
    if q != 0.0 && weight.is_none() {
        return Err(CliError::Input {
            path: "--q".to_string(),
            message: "phi^q densities require a non-classical weight".to_string(),
        });
    }
    if m >= 1 && weight.is_some() {
        return Err(CliError::Input {
            path: "--m".to_string(),
            message: "derivative-sum norms are classical; drop --weight".to_string(),
        });
    }
    let profile = match weight {
        Some(w) => load_weight(w)?,
        None => WeightProfile::classical_gaussian(),
    };
    let exponent = parse_exponent(p)?;
    let space = SpaceSpec { profile, p: exponent, q, m: 0 };
    let hash = grid_hash(&cfg, &[]);

    let result = if m >= 1 {
        let p_val = match exponent {
            Exponent::Finite(v) => v,
            Exponent::Infinity => {
                return Err(CliError::Input {
                    path: "--p".to_string(),
                    message: "Sobolev norms take a finite exponent".to_string(),
                })
            }
        };
        let norms = fock::quadrature::fock_sobolev_norm(&f, Exponent::Finite(p_val), m, &cfg)
            .map_err(numerical)?;
        json!({
            "kind": "fock_sobolev",
            "p": p_val,
            "m": m,
            "direct": num(norms.direct),
            "equivalent": num(norms.equivalent),
            "converged": norms.converged,
            "components": norms.components.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        })
    } else {
        let (norm, detail) = weighted_norm_detailed(&f, &space, &cfg).map_err(numerical)?;
        json!({
            "kind": "weighted",
            "weight": space.profile.label(),
            "q": q,
            "quasi_norm": space.is_quasi_norm(),
            "norm": NormDto::from(&norm),
            "stopped_at": num(detail.stopped_at),
            "last_ratio": num(detail.last_ratio),
            "tail_mass_beyond_peak": num(detail.tail_mass_beyond_peak),
        })
    };
    Ok(vec![Artifact { name: out_name(manifest), bytes: envelope(manifest, &hash, result) }])
}

fn kernel_table(
    manifest: &RunManifest,
    weight: &str,
    degree: usize,
) -> Result<Vec<Artifact>, CliError> {
    let profile = load_weight(weight)?;
    let cfg = effective_config(manifest)?;
    let basis = KernelBasis::compute(&profile, degree, &cfg).map_err(numerical)?;
    let hash = grid_hash(&cfg, &[degree as u64]);
    let mut csv = CsvBuilder::new(manifest, &hash, "n,log_delta_sq,delta_sq");
    for n in 0..=degree {
        csv.row(&[
            n.to_string(),
            csv_f64(basis.log_delta_sq(n)),
            csv_f64(basis.delta_sq(n)),
        ]);
    }
    Ok(vec![Artifact { name: out_name(manifest), bytes: csv.finish() }])
}

fn kernel_reproduce(
    manifest: &RunManifest,
    weight: &str,
    degree: usize,
    function: &str,
    zeta: Complex64,
) -> Result<Vec<Artifact>, CliError> {
    let profile = load_weight(weight)?;
    let f = load_entire(function)?;
    let cfg = effective_config(manifest)?;
    let basis = KernelBasis::compute(&profile, degree, &cfg).map_err(numerical)?;
    let check = reproduce_check(&basis, &f, zeta, &cfg).map_err(numerical)?;
    let hash = grid_hash(&cfg, &[degree as u64, zeta.re.to_bits(), zeta.im.to_bits()]);
    let result = json!({
        "zeta": complex(zeta),
        "reproduced": complex(check.reproduced),
        "reference": complex(check.reference),
        "rel_err": num(check.rel_err),
        "converged": check.converged,
        "degree": degree,
    });
    Ok(vec![Artifact { name: out_name(manifest), bytes: envelope(manifest, &hash, result) }])
}

#[allow(clippy::too_many_arguments)]
fn solve(
    manifest: &RunManifest,
    problem_path: &str,
    theta: f64,
    r_max: f64,
    tol: f64,
    samples: usize,
    weight: Option<&str>,
    envelope_r0: Option<f64>,
) -> Result<Vec<Artifact>, CliError> {
    if !(r_max > 0.0) || !(tol > 0.0) || samples < 2 {
        return Err(CliError::Input {
            path: "--r-max/--tol/--samples".to_string(),
            message: "need r_max > 0, tol > 0 and at least 2 samples".to_string(),
        });
    }
    let problem = load_problem(problem_path)?;
    let mut trace = ray_integrate(&problem, theta, r_max, tol, samples).map_err(numerical)?;
    if let Some(w) = weight {
        let profile = load_weight(w)?;
        trace = trace.with_weighted(&profile);
    }
    let env = match envelope_r0 {
        Some(r0) => {
            if !(r0 > 0.0 && r0 < r_max) {
                return Err(CliError::Input {
                    path: "--envelope-r0".to_string(),
                    message: "calibration radius must sit inside (0, r_max)".to_string(),
                });
            }
            Some(growth_envelope(&problem, theta, &trace.radii[1..], r0, tol).map_err(numerical)?)
        }
        None => None,
    };

    let cfg = effective_config(manifest)?;
    let hash = grid_hash(
        &cfg,
        &[theta.to_bits(), r_max.to_bits(), tol.to_bits(), samples as u64],
    );
    let mut csv =
        CsvBuilder::new(manifest, &hash, "theta,r,re_f,im_f,abs_f,envelope,weighted_abs_f");
    for (i, &r) in trace.radii.iter().enumerate() {
        let f = trace.values[i][0];
        let env_cell = env
            .as_ref()
            .and_then(|e| {
                e.points
                    .iter()
                    .find(|(pr, _)| (*pr - r).abs() <= 1e-12 * (1.0 + r))
                    .map(|&(_, b)| csv_f64(b))
            })
            .unwrap_or_default();
        let weighted_cell = trace
            .weighted
            .as_ref()
            .map(|w| csv_f64(w[i]))
            .unwrap_or_default();
        csv.row(&[
            csv_f64(theta),
            csv_f64(r),
            csv_f64(f.re),
            csv_f64(f.im),
            csv_f64(f.norm()),
            env_cell,
            weighted_cell,
        ]);
    }
    let trace_name = out_name(manifest);

    // Series coefficients as a sibling artifact.
    let series = taylor_solve(&problem, 200).map_err(numerical)?;
    let coeffs = series.taylor_coefficients(200);
    let coeff_result = json!({
        "truncation": 200,
        "coefficients": coeffs.iter().map(|&c| complex(c)).collect::<Vec<_>>(),
        "blowup": trace.blowup.map(num),
    });
    let coeff_name = match trace_name.strip_suffix(".csv") {
        Some(stem) => format!("{stem}_coefficients.json"),
        None => format!("{trace_name}_coefficients.json"),
    };
    Ok(vec![
        Artifact { name: trace_name, bytes: csv.finish() },
        Artifact { name: coeff_name, bytes: envelope(manifest, &hash, coeff_result) },
    ])
}

fn envelope_cmd(
    manifest: &RunManifest,
    problem_path: &str,
    theta: f64,
    r0: f64,
    r_max: f64,
    samples: usize,
) -> Result<Vec<Artifact>, CliError> {
    if !(r0 > 0.0 && r0 < r_max) || samples < 2 {
        return Err(CliError::Input {
            path: "--r0/--r-max/--samples".to_string(),
            message: "need 0 < r0 < r_max and at least 2 samples".to_string(),
        });
    }
    let problem = load_problem(problem_path)?;
    let trace = ray_integrate(&problem, theta, r_max, 1e-10, samples).map_err(numerical)?;
    let env =
        growth_envelope(&problem, theta, &trace.radii[1..], r0, 1e-10).map_err(numerical)?;

    let cfg = effective_config(manifest)?;
    let hash = grid_hash(&cfg, &[theta.to_bits(), r0.to_bits(), r_max.to_bits(), samples as u64]);
    let mut csv =
        CsvBuilder::new(manifest, &hash, "theta,r,re_f,im_f,abs_f,envelope,weighted_abs_f");
    for (i, &r) in trace.radii.iter().enumerate() {
        let f = trace.values[i][0];
        let env_cell = env
            .points
            .iter()
            .find(|(pr, _)| (*pr - r).abs() <= 1e-12 * (1.0 + r))
            .map(|&(_, b)| csv_f64(b))
            .unwrap_or_default();
        csv.row(&[
            csv_f64(theta),
            csv_f64(r),
            csv_f64(f.re),
            csv_f64(f.im),
            csv_f64(f.norm()),
            env_cell,
            String::new(),
        ]);
    }
    Ok(vec![Artifact { name: out_name(manifest), bytes: csv.finish() }])
}

#[allow(clippy::too_many_arguments)]
fn check(
    manifest: &RunManifest,
    theorem: &str,
    problem_path: &str,
    weight: Option<&str>,
    p: f64,
    q: f64,
    candidate: Option<&str>,
    degree: usize,
    constants: Option<&str>,
) -> Result<Vec<Artifact>, CliError> {
    if !(p > 0.0) {
        return Err(CliError::Input {
            path: "--p".to_string(),
            message: "exponent must be positive".to_string(),
        });
    }
    let id = match theorem {
        "T1.1" => TheoremId::T1_1,
        "T1.2" => TheoremId::T1_2,
        "T1.3" => TheoremId::T1_3,
        "T1.4" => TheoremId::T1_4,
        "T1.5" => TheoremId::T1_5,
        "T1.6" => TheoremId::T1_6,
        "T1.7" => TheoremId::T1_7,
        "T1.8" => TheoremId::T1_8,
        other => {
            return Err(CliError::Input {
                path: "--theorem".to_string(),
                message: format!("unknown theorem {other:?}; expected T1.1..T1.8"),
            })
        }
    };
    let problem = load_problem(problem_path)?;
    let cfg = effective_config(manifest)?;
    let consts = match constants {
        Some(path) => {
            let dto: ConstantsDto = crate::codec::parse_json(&read(path)?, path)?;
            dto.build(path)?
        }
        None => ConstantsConfig::default(),
    };
    let candidate_fn = match candidate {
        Some(path) => Some(load_entire(path)?),
        None => None,
    };
    let need_weight = || -> Result<WeightProfile, CliError> {
        match weight {
            Some(w) => load_weight(w),
            None => Err(CliError::Input {
                path: "--weight".to_string(),
                message: format!("{theorem} needs a weight profile"),
            }),
        }
    };

    let mut extra = vec![degree as u64, p.to_bits(), q.to_bits()];
    let report = match id {
        TheoremId::T1_1 => check_t11(&problem, p, &consts, &cfg).map_err(numerical)?,
        TheoremId::T1_2 => check_t12(&problem, p, &consts, &cfg).map_err(numerical)?,
        TheoremId::T1_3 => {
            let profile = need_weight()?;
            check_t13(&problem, &profile, p, q, &cfg).map_err(numerical)?
        }
        TheoremId::T1_4 => {
            check_t14(&problem, p, candidate_fn.as_ref(), &cfg).map_err(numerical)?
        }
        TheoremId::T1_5 => {
            let f = candidate_fn.as_ref().ok_or_else(|| CliError::Input {
                path: "--candidate".to_string(),
                message: "T1.5 needs a candidate solution".to_string(),
            })?;
            check_t15(&problem, p, q, f, &cfg).map_err(numerical)?
        }
        TheoremId::T1_6 | TheoremId::T1_7 | TheoremId::T1_8 => {
            let profile = need_weight()?;
            if problem.order() != 2 || !problem.coefficients()[1].is_zero() {
                return Err(CliError::Input {
                    path: format!("{problem_path}: $"),
                    message: "kernel checkers expect f'' + A f = 0 (order 2, A_1 = 0)"
                        .to_string(),
                });
            }
            let basis = KernelBasis::compute(&profile, degree, &cfg).map_err(numerical)?;
            let grid = ProbeGrid::default();
            extra.push(grid.hash());
            check_kernel_theorem(id, &profile, &problem.coefficients()[0], &basis, &grid, &cfg)
                .map_err(numerical)?
        }
    };
    let hash = grid_hash(&cfg, &extra);
    Ok(vec![Artifact {
        name: out_name(manifest),
        bytes: envelope(manifest, &hash, condition_report(&report)),
    }])
}
