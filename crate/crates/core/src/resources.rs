//! Shot budgets, time and energy models, and power-law fits of error growth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rep::{Circuit, Op};

const J_PER_KWH: f64 = 3.6e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub layer_time_s: f64,
    pub classical_flops_per_s: f64,
    pub classical_mem_bytes: f64,
    pub qpu_power_w: f64,
    pub cluster_efficiency_flops_per_kwh: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            layer_time_s: 0.030,
            classical_flops_per_s: 1e12,
            classical_mem_bytes: 64e9,
            qpu_power_w: 75_000.0,
            cluster_efficiency_flops_per_kwh: 2.6e17,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("layer_time_s", self.layer_time_s),
            ("classical_flops_per_s", self.classical_flops_per_s),
            ("classical_mem_bytes", self.classical_mem_bytes),
            ("qpu_power_w", self.qpu_power_w),
            ("cluster_efficiency_flops_per_kwh", self.cluster_efficiency_flops_per_kwh),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `N = ceil(eps^-2)`. Values within `1e-9` of an integer are rounded first,
/// so `0.1` gives exactly 100.
pub fn shots_for_error(eps_shot: f64) -> Result<u64> {
    if !(eps_shot.is_finite() && eps_shot > 0.0) {
        return Err(Error::Config(format!("eps_shot must be positive, got {eps_shot}")));
    }
    let x = eps_shot.powi(-2);
    let r = x.round();
    Ok(if (x - r).abs() <= 1e-9 * r.max(1.0) { r as u64 } else { x.ceil() as u64 })
}

/// What counts as one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMode {
    /// Ops exactly as listed (a `Gen` is one 3-qubit layer slot).
    #[default]
    AsListed,
    /// After lowering to native gates.
    Native,
}

/// Greedy layering: each gate goes one layer after the latest gate on any
/// of its qubits. Preparation and measurement are not counted.
pub fn circuit_depth(c: &Circuit, mode: DepthMode) -> usize {
    let lowered;
    let ops = match mode {
        DepthMode::AsListed => &c.ops,
        DepthMode::Native => {
            lowered = c.lowered();
            &lowered.ops
        }
    };
    let mut level = vec![0usize; c.n_qubits];
    let mut depth = 0;
    for op in ops {
        if matches!(op, Op::PrepZero | Op::MeasureAll) {
            continue;
        }
        let qs = op.qubits();
        let l = 1 + qs.iter().map(|&q| level[q]).max().unwrap_or(0);
        for q in qs {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    depth
}

/// `depth * layer_time * 2N` (real and imaginary parts).
pub fn quantum_time(depth: usize, shots: u64, model: &CostModel) -> f64 {
    depth as f64 * model.layer_time_s * 2.0 * shots as f64
}

pub fn quantum_energy_kwh(seconds: f64, model: &CostModel) -> f64 {
    seconds * model.qpu_power_w / J_PER_KWH
}

pub fn classical_time(flops: f64, model: &CostModel) -> f64 {
    flops / model.classical_flops_per_s
}

pub fn classical_energy_kwh(flops: f64, model: &CostModel) -> f64 {
    flops / model.cluster_efficiency_flops_per_kwh
}

/// `relative_error = a * c^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorFit {
    pub a: f64,
    pub b: f64,
    pub c_min: f64,
    pub c_max: f64,
    /// Coefficient of determination on log-log axes.
    pub r_squared: f64,
    /// RMS residual of `ln(err)`.
    pub rms_log_residual: f64,
    pub points: usize,
    pub poor_fit: bool,
}

impl ErrorFit {
    pub fn predict(&self, c: f64) -> f64 {
        self.a * c.powf(self.b)
    }
}

/// Below this `R^2` a fit is flagged as poor.
pub const POOR_FIT_R2: f64 = 0.5;

/// Least squares on `ln err = ln a + b ln c`. Needs at least 10 points with
/// positive values spanning a factor of 2 in `c`.
pub fn fit_error_scaling(points: &[(f64, f64)]) -> Result<ErrorFit> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(c, e)| c > 0.0 && e > 0.0).collect();
    if pts.len() < 10 {
        return Err(Error::Config(format!("power-law fit needs 10 positive points, got {}", pts.len())));
    }
    let c_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let c_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if c_max < 2.0 * c_min {
        return Err(Error::Config(format!("crossings span {c_min}..{c_max} is under 2x")));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - ln_a - b * x).powi(2)).sum();
    // constant data has no variance to explain
    let r_squared = if syy > 1e-300 { 1.0 - sse / syy } else { 0.0 };
    Ok(ErrorFit {
        a: ln_a.exp(),
        b,
        c_min,
        c_max,
        r_squared,
        rms_log_residual: (sse / n).sqrt(),
        points: pts.len(),
        poor_fit: r_squared < POOR_FIT_R2,
    })
}

/// Per-braid inputs to [`advantage_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidCost {
    pub braid: String,
    pub crossings: usize,
    pub qubits: usize,
    pub depth: usize,
    /// Relative error of the noisy simulation; the shot budget targets it.
    pub relative_error: f64,
    pub classical_flops: f64,
    pub classical_peak_bytes: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Quantum,
    Classical,
    Tie,
}

/// One row of the report (also the CSV columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageRow {
    pub braid: String,
    pub crossings: usize,
    pub qubits: usize,
    pub depth: usize,
    pub relative_error: f64,
    pub shots: u64,
    pub quantum_time_s: f64,
    pub quantum_energy_kwh: f64,
    pub classical_time_s: f64,
    pub classical_energy_kwh: f64,
    pub classical_feasible: bool,
    pub faster: Side,
    pub cheaper: Side,
}

fn smaller(q: f64, c: f64) -> Side {
    if q < c {
        Side::Quantum
    } else if c < q {
        Side::Classical
    } else {
        Side::Tie
    }
}

pub fn advantage_report(rows: &[BraidCost], model: &CostModel) -> Result<Vec<AdvantageRow>> {
    model.validate()?;
    if rows.is_empty() {
        return Err(Error::Config("no braids to report on".into()));
    }
    rows.iter()
        .map(|r| {
            let shots = shots_for_error(r.relative_error)?;
            let qt = quantum_time(r.depth, shots, model);
            let qe = quantum_energy_kwh(qt, model);
            let ct = classical_time(r.classical_flops, model);
            let ce = classical_energy_kwh(r.classical_flops, model);
            Ok(AdvantageRow {
                braid: r.braid.clone(),
                crossings: r.crossings,
                qubits: r.qubits,
                depth: r.depth,
                relative_error: r.relative_error,
                shots,
                quantum_time_s: qt,
                quantum_energy_kwh: qe,
                classical_time_s: ct,
                classical_energy_kwh: ce,
                classical_feasible: r.classical_peak_bytes <= model.classical_mem_bytes,
                faster: smaller(qt, ct),
                cheaper: smaller(qe, ce),
            })
        })
        .collect()
}
