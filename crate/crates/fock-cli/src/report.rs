//! Report envelopes and serializers.
//!
//! Every artifact embeds the manifest that produced it and a hash of the
//! effective grids, so a value can always be traced to its window. Field
//! order is fixed by the structs; floats print in shortest round-trip form;
//! reports are byte-reproducible.

use fock::conditions::{ConditionReport, HypothesisVerdict};
use fock::ode::MembershipVerdict;
use fock::quadrature::{NormResult, QuadratureConfig, RadialRule};
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::RunManifest;

/// FNV-1a over raw bytes.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Hash of the effective quadrature configuration plus command-specific grid
/// data.
pub fn grid_hash(cfg: &QuadratureConfig, extra: &[u64]) -> String {
    let rule = match cfg.radial_rule {
        RadialRule::GaussLegendrePanels => "gauss_legendre_panels",
        RadialRule::TrapezoidGeometric => "trapezoid_geometric",
    };
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&(cfg.n_radial as u64).to_le_bytes());
    bytes.extend_from_slice(&(cfg.n_angular as u64).to_le_bytes());
    bytes.extend_from_slice(&cfg.r_max.unwrap_or(f64::NAN).to_bits().to_le_bytes());
    bytes.extend_from_slice(rule.as_bytes());
    bytes.extend_from_slice(&cfg.tail_tol.to_bits().to_le_bytes());
    bytes.extend_from_slice(&(cfg.segment_nodes as u64).to_le_bytes());
    for e in extra {
        bytes.extend_from_slice(&e.to_le_bytes());
    }
    format!("{:016x}", fnv64(&bytes))
}

/// Assemble the standard envelope and serialize it with a trailing newline.
pub fn envelope(manifest: &RunManifest, grid_hash: &str, result: Value) -> Vec<u8> {
    let report = json!({
        "manifest": manifest,
        "grid_hash": grid_hash,
        "result": result,
    });
    let mut out = serde_json::to_vec_pretty(&report).expect("report serialization");
    out.push(b'\n');
    out
}

/// JSON value for a float; infinities and NaN become tagged strings since
/// JSON has no encoding for them.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn complex(v: fock::Complex64) -> Value {
    json!([num(v.re), num(v.im)])
}

#[derive(Serialize)]
pub struct NormDto {
    pub value: Value,
    pub tail: Value,
    pub converged: bool,
    pub peak_radius: f64,
}

impl NormDto {
    pub fn from(n: &NormResult) -> Self {
        NormDto {
            value: num(n.value),
            tail: num(n.tail_estimate),
            converged: n.converged,
            peak_radius: n.peak_radius,
        }
    }
}

pub fn membership(v: &MembershipVerdict) -> Value {
    match v {
        MembershipVerdict::InSpace { norm, tail_mass_beyond_peak } => json!({
            "status": "in_space",
            "norm": NormDto::from(norm),
            "tail_mass_beyond_peak": num(*tail_mass_beyond_peak),
        }),
        MembershipVerdict::Diverging { stopped_decaying_at, last_ratio, partial_value } => json!({
            "status": "diverging",
            "stopped_decaying_at": num(*stopped_decaying_at),
            "last_ratio": num(*last_ratio),
            "partial_value": num(*partial_value),
        }),
    }
}

pub fn hypothesis(v: HypothesisVerdict) -> &'static str {
    match v {
        HypothesisVerdict::Satisfied => "satisfied",
        HypothesisVerdict::SatisfiedDegenerate => "satisfied_degenerate",
        HypothesisVerdict::NotSatisfied => "not_satisfied",
        HypothesisVerdict::NotApplicable => "not_applicable",
    }
}

pub fn condition_report(r: &ConditionReport) -> Value {
    json!({
        "theorem": r.theorem.label(),
        "hypothesis_values": r.hypothesis_values.iter()
            .map(|(k, v)| json!({"name": k, "value": num(*v)}))
            .collect::<Vec<_>>(),
        "hypothesis_probes": r.hypothesis_probes.iter()
            .map(|p| json!({"label": p.label, "verdict": membership(&p.verdict)}))
            .collect::<Vec<_>>(),
        "hypothesis": hypothesis(r.hypothesis),
        "conclusion_probes": r.conclusion_probes.iter()
            .map(|p| json!({"label": p.label, "verdict": membership(&p.verdict)}))
            .collect::<Vec<_>>(),
        "consistent": r.consistent,
        "notes": r.notes,
    })
}

/// CSV artifact with the manifest and grid hash embedded as comment lines.
pub struct CsvBuilder {
    lines: Vec<String>,
}

impl CsvBuilder {
    pub fn new(manifest: &RunManifest, grid_hash: &str, header: &str) -> Self {
        let manifest_json = serde_json::to_string(manifest).expect("manifest serialization");
        CsvBuilder {
            lines: vec![
                format!("# manifest {manifest_json}"),
                format!("# grid_hash {grid_hash}"),
                header.to_string(),
            ],
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn finish(self) -> Vec<u8> {
        let mut out = self.lines.join("\n").into_bytes();
        out.push(b'\n');
        out
    }
}

/// Shortest round-trip decimal for CSV cells.
pub fn csv_f64(v: f64) -> String {
    format!("{v}")
}
