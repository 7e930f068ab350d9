//! Classical evaluators: the packed-subspace oracle, dense projector
//! contraction and MPO evolution.

pub mod dense;
pub mod exact;
pub mod mpo;
pub mod subspace;

use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::braid::{serialize_braid, BraidWord};
use crate::error::Result;

pub use dense::{tn_proj_dense, tn_proj_dense_with, ProjectorSet, DENSE_CAP};
pub use exact::{
    apply_cap_chain, cap_matrix, dense_weighted_trace, exact_weighted_trace, exact_weighted_trace_capped,
    jones_markov_exact, jones_plat_exact, jones_spliced_cap, markov_prefactor, plat_amplitude, plat_prefactor,
    writhe_factor, DEFAULT_CAP,
};
pub use mpo::{mpo_proj, MpoState, MpoStats, DEFAULT_SVD_THRESHOLD};
pub use subspace::SubspaceView;

/// Which classical evaluator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    TnProjDense,
    MpoProj,
}

/// One JSONL line for a classical evaluation of the weighted trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub braid: String,
    pub method: Method,
    pub value_re: f64,
    pub value_im: f64,
    pub chi_limit: Option<usize>,
    pub chi_max_seen: Option<usize>,
    pub peak_bytes: Option<usize>,
    pub flops: Option<u64>,
    pub wall_ms: f64,
}

impl BaselineRecord {
    pub fn value(&self) -> C64 {
        C64::new(self.value_re, self.value_im)
    }
}

/// Runs one evaluator and wraps the result in a record.
pub fn run_baseline(b: &BraidWord, method: Method, chi_limit: Option<usize>) -> Result<BaselineRecord> {
    let start = Instant::now();
    let (value, chi_max_seen, peak_bytes, flops) = match method {
        Method::Exact => (exact_weighted_trace(b)?, None, None, None),
        Method::TnProjDense => {
            let n = b.qubits();
            let bytes = (1usize << (2 * n)) * mpo::BYTES_PER_ENTRY;
            (tn_proj_dense(b)?, None, Some(bytes), None)
        }
        Method::MpoProj => {
            let (v, st) = mpo_proj(b, chi_limit, DEFAULT_SVD_THRESHOLD)?;
            (v, Some(st.chi_max_seen), Some(st.peak_bytes), Some(st.flops))
        }
    };
    Ok(BaselineRecord {
        braid: serialize_braid(b),
        method,
        value_re: value.re,
        value_im: value.im,
        chi_limit: if method == Method::MpoProj { chi_limit } else { None },
        chi_max_seen,
        peak_bytes,
        flops,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
