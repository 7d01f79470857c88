//! JSON schemas for weights, entire functions, problems and quadrature
//! configurations, with JSON-path reporting on every schema violation.

use fock::entire::EntireFunction;
use fock::ode::LDEProblem;
use fock::quadrature::{QuadratureConfig, RadialRule};
use fock::weights::WeightProfile;
use fock::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Parse JSON with the offending field path attached to any error.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Input {
        path: format!("{origin}: $.{}", e.path()),
        message: e.inner().to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDto {
    Power { alpha: f64 },
    Exponential { beta: f64 },
    DoubleExponential,
    ClassicalGaussian,
    ScaledExponential { c: f64 },
}

impl WeightDto {
    pub fn build(&self, origin: &str) -> Result<WeightProfile, CliError> {
        let bad = |field: &str, message: &str| CliError::Input {
            path: format!("{origin}: $.{field}"),
            message: message.to_string(),
        };
        Ok(match *self {
            WeightDto::Power { alpha } => {
                if !(alpha > 0.0) {
                    return Err(bad("alpha", "power weight needs alpha > 0"));
                }
                WeightProfile::power(alpha)
            }
            WeightDto::Exponential { beta } => {
                if !(beta > 0.0) {
                    return Err(bad("beta", "exponential weight needs beta > 0"));
                }
                WeightProfile::exponential(beta)
            }
            WeightDto::DoubleExponential => WeightProfile::double_exponential(),
            WeightDto::ClassicalGaussian => WeightProfile::classical_gaussian(),
            WeightDto::ScaledExponential { c } => {
                if !(c > 0.0) {
                    return Err(bad("c", "scaled exponential weight needs c > 0"));
                }
                WeightProfile::scaled_exponential(c)
            }
        })
    }
}

fn default_tail_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntireDto {
    Poly {
        coeffs: Vec<[f64; 2]>,
    },
    Series {
        coeffs: Vec<[f64; 2]>,
        #[serde(default = "default_tail_tol")]
        tail_tol: f64,
    },
    Named {
        name: String,
    },
    Monomial {
        m: u32,
    },
    Constant {
        c: [f64; 2],
    },
    ExpScaled {
        c: [f64; 2],
    },
    Sum {
        terms: Vec<EntireDto>,
    },
    Product {
        factors: Vec<EntireDto>,
    },
    Scaled {
        c: [f64; 2],
        inner: Box<EntireDto>,
    },
}

fn cx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl EntireDto {
    pub fn build(&self, origin: &str) -> Result<EntireFunction, CliError> {
        match self {
            EntireDto::Poly { coeffs } => {
                Ok(EntireFunction::polynomial(coeffs.iter().map(|&c| cx(c)).collect()))
            }
            EntireDto::Series { coeffs, tail_tol } => {
                if !(*tail_tol > 0.0) {
                    return Err(CliError::Input {
                        path: format!("{origin}: $.tail_tol"),
                        message: "tail tolerance must be positive".to_string(),
                    });
                }
                Ok(EntireFunction::power_series(
                    coeffs.iter().map(|&c| cx(c)).collect(),
                    *tail_tol,
                ))
            }
            EntireDto::Named { name } => match name.as_str() {
                "cos" => Ok(EntireFunction::cos()),
                "sin" => Ok(EntireFunction::sin()),
                other => Err(CliError::Input {
                    path: format!("{origin}: $.name"),
                    message: format!("unknown named form {other:?}; expected \"cos\" or \"sin\""),
                }),
            },
            EntireDto::Monomial { m } => Ok(EntireFunction::monomial(*m)),
            EntireDto::Constant { c } => Ok(EntireFunction::constant(cx(*c))),
            EntireDto::ExpScaled { c } => Ok(EntireFunction::exp_scaled(cx(*c))),
            EntireDto::Sum { terms } => {
                let built: Result<Vec<_>, _> =
                    terms.iter().map(|t| t.build(origin)).collect();
                Ok(EntireFunction::sum(built?))
            }
            EntireDto::Product { factors } => {
                if factors.is_empty() {
                    return Err(CliError::Input {
                        path: format!("{origin}: $.factors"),
                        message: "product needs at least one factor".to_string(),
                    });
                }
                let mut it = factors.iter();
                let mut acc = it.next().unwrap().build(origin)?;
                for f in it {
                    acc = EntireFunction::product(acc, f.build(origin)?);
                }
                Ok(acc)
            }
            EntireDto::Scaled { c, inner } => {
                Ok(EntireFunction::scaled(cx(*c), inner.build(origin)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDto {
    pub order: usize,
    pub coefficients: Vec<EntireDto>,
    #[serde(default)]
    pub forcing: Option<EntireDto>,
    pub initial: Vec<[f64; 2]>,
}

impl ProblemDto {
    pub fn build(&self, origin: &str) -> Result<LDEProblem, CliError> {
        if self.order == 0 {
            return Err(CliError::Input {
                path: format!("{origin}: $.order"),
                message: "order must be at least 1".to_string(),
            });
        }
        if self.coefficients.len() != self.order {
            return Err(CliError::Input {
                path: format!("{origin}: $.coefficients"),
                message: format!(
                    "expected {} coefficients A_0..A_{}, found {}",
                    self.order,
                    self.order - 1,
                    self.coefficients.len()
                ),
            });
        }
        if self.initial.len() != self.order {
            return Err(CliError::Input {
                path: format!("{origin}: $.initial"),
                message: format!(
                    "expected {} initial values, found {}",
                    self.order,
                    self.initial.len()
                ),
            });
        }
        let coefficients: Result<Vec<_>, _> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c.build(&format!("{origin}: $.coefficients[{i}]")))
            .collect();
        let forcing = match &self.forcing {
            Some(f) => f.build(&format!("{origin}: $.forcing"))?,
            None => EntireFunction::zero(),
        };
        LDEProblem::new(
            coefficients?,
            forcing,
            self.initial.iter().map(|&c| cx(c)).collect(),
        )
        .map_err(|e| CliError::Input { path: format!("{origin}: $"), message: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct ConfigDto {
    #[serde(default)]
    pub n_radial: Option<usize>,
    #[serde(default)]
    pub n_angular: Option<usize>,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub radial_rule: Option<String>,
    #[serde(default)]
    pub tail_tol: Option<f64>,
    #[serde(default)]
    pub segment_nodes: Option<usize>,
}

impl ConfigDto {
    pub fn build(&self, origin: &str) -> Result<QuadratureConfig, CliError> {
        let mut cfg = QuadratureConfig::default();
        if let Some(n) = self.n_radial {
            if n < 32 {
                return Err(CliError::Input {
                    path: format!("{origin}: $.n_radial"),
                    message: "n_radial must be at least 32".to_string(),
                });
            }
            cfg.n_radial = n;
        }
        if let Some(n) = self.n_angular {
            if n < 64 {
                return Err(CliError::Input {
                    path: format!("{origin}: $.n_angular"),
                    message: "n_angular must be at least 64".to_string(),
                });
            }
            cfg.n_angular = n;
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0) {
                return Err(CliError::Input {
                    path: format!("{origin}: $.r_max"),
                    message: "r_max must be positive (omit it for auto)".to_string(),
                });
            }
        }
        cfg.r_max = self.r_max;
        if let Some(rule) = &self.radial_rule {
            cfg.radial_rule = match rule.as_str() {
                "gauss_legendre_panels" => RadialRule::GaussLegendrePanels,
                "trapezoid_geometric" => RadialRule::TrapezoidGeometric,
                other => {
                    return Err(CliError::Input {
                        path: format!("{origin}: $.radial_rule"),
                        message: format!(
                            "unknown rule {other:?}; expected \"gauss_legendre_panels\" or \
                             \"trapezoid_geometric\""
                        ),
                    })
                }
            };
        }
        if let Some(t) = self.tail_tol {
            if !(t > 0.0) {
                return Err(CliError::Input {
                    path: format!("{origin}: $.tail_tol"),
                    message: "tail_tol must be positive".to_string(),
                });
            }
            cfg.tail_tol = t;
        }
        if let Some(n) = self.segment_nodes {
            if n < 16 {
                return Err(CliError::Input {
                    path: format!("{origin}: $.segment_nodes"),
                    message: "segment_nodes must be at least 16".to_string(),
                });
            }
            cfg.segment_nodes = n;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsDto {
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub d: Vec<f64>,
    #[serde(default)]
    pub big_c: Vec<f64>,
    #[serde(default)]
    pub e: Vec<f64>,
    #[serde(default)]
    pub f: Vec<f64>,
    #[serde(default)]
    pub g: Option<f64>,
}

impl ConstantsDto {
    pub fn build(&self, origin: &str) -> Result<fock::conditions::ConstantsConfig, CliError> {
        let mut out = fock::conditions::ConstantsConfig::default();
        if let Some(c) = self.c {
            out.c = c;
        }
        if let Some(g) = self.g {
            out.g = g;
        }
        out.d = self.d.clone();
        out.big_c = self.big_c.clone();
        out.e = self.e.clone();
        out.f = self.f.clone();
        let all_positive = out.c > 0.0
            && out.g > 0.0
            && out.d.iter().chain(&out.big_c).chain(&out.e).chain(&out.f).all(|v| *v > 0.0);
        if !all_positive {
            return Err(CliError::Input {
                path: format!("{origin}: $"),
                message: "all constants must be strictly positive".to_string(),
            });
        }
        Ok(out)
    }
}
