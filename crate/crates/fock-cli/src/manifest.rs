//! Run manifests: the full description of one batch invocation.
//!
//! Every artifact embeds its manifest; re-running an identical manifest over
//! unchanged input files reproduces the artifact byte for byte.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: CommandKind,
    /// Seed for randomized batteries.
    pub seed: u64,
    /// Multiplier on the quadrature node counts.
    pub grid_scale: f64,
    /// Output path; commands fall back to a default name.
    pub out: Option<String>,
    /// Path to a quadrature configuration JSON.
    pub config: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CommandKind {
    WeightsCheck {
        weight: String,
        r_max: f64,
        samples: usize,
    },
    Norm {
        function: String,
        /// Exponent: a number or "inf".
        p: String,
        q: f64,
        m: u32,
        /// Weight JSON path; classical Gaussian when absent.
        weight: Option<String>,
    },
    KernelTable {
        weight: String,
        degree: usize,
    },
    KernelReproduce {
        weight: String,
        degree: usize,
        function: String,
        zeta_re: f64,
        zeta_im: f64,
    },
    Solve {
        problem: String,
        theta: f64,
        r_max: f64,
        tol: f64,
        samples: usize,
        /// Adds the weighted column when present.
        weight: Option<String>,
        /// Adds the envelope column, calibrated at this radius.
        envelope_r0: Option<f64>,
    },
    Envelope {
        problem: String,
        theta: f64,
        r0: f64,
        r_max: f64,
        samples: usize,
    },
    Check {
        theorem: String,
        problem: String,
        weight: Option<String>,
        p: f64,
        q: f64,
        candidate: Option<String>,
        /// Kernel basis truncation for T1.6-T1.8.
        degree: usize,
        constants: Option<String>,
    },
    Battery {},
}

impl CommandKind {
    /// Default artifact file name.
    pub fn default_out(&self) -> &'static str {
        match self {
            CommandKind::WeightsCheck { .. } => "weights.json",
            CommandKind::Norm { .. } => "norm.json",
            CommandKind::KernelTable { .. } => "kernel_table.csv",
            CommandKind::KernelReproduce { .. } => "reproduce.json",
            CommandKind::Solve { .. } => "trace.csv",
            CommandKind::Envelope { .. } => "envelope.csv",
            CommandKind::Check { .. } => "report.json",
            CommandKind::Battery {} => "battery.json",
        }
    }
}
