use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decomposition::{sparsity_sequence, DecompositionConfig};
use crate::error::{Error, Result};

/// Parameter table used for the layer-1 large blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Low,
    High,
    Auto,
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Branch::Low),
            "high" => Ok(Branch::High),
            "auto" => Ok(Branch::Auto),
            other => Err(Error::Config(format!("unknown branch `{other}` (low, high, auto)"))),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Low => "low",
            Branch::High => "high",
            Branch::Auto => "auto",
        })
    }
}

/// Tunables for a full run. Defaults for `c_exc`, `eta` and `gamma_sp` come from
/// pilot simulations (see the ignored `pilot_calibration` test).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// ε₁ override; `None` uses Δ^(−1/10).
    pub epsilon1: Option<f64>,
    pub k_const: f64,
    /// OneShotColoring participation probability.
    pub p: f64,
    pub beta: f64,
    pub c: u32,
    pub branch: Branch,
    /// A vertex that is εᵢ-sparse needs c_exc·εᵢ²Δ excess colors to stay in V*.
    pub c_exc: f64,
    pub eta: f64,
    pub gamma_sp: f64,
    pub gamma_pal: f64,
    /// Sparsity level asserted by sparse mode.
    pub sparse_epsilon: f64,
    pub max_bidding_iterations: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilon1: None,
            k_const: 16.0,
            p: 0.2,
            beta: 64.0,
            c: 4,
            branch: Branch::Auto,
            c_exc: 1.0 / 32.0,
            eta: 1.0,
            gamma_sp: 1.0 / 32.0,
            gamma_pal: 2.0,
            sparse_epsilon: 0.5,
            max_bidding_iterations: 64,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.p > 0.0 && self.p < 0.25) {
            return bad(format!("p must lie in (0, 1/4), got {}", self.p));
        }
        if let Some(e) = self.epsilon1 {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("epsilon1 must lie in (0,1), got {e}"));
            }
        }
        if !(self.k_const > 1.0 && self.k_const.is_finite()) {
            return bad(format!("K must exceed 1, got {}", self.k_const));
        }
        if !(self.beta >= 1.0 && self.beta.is_finite()) {
            return bad(format!("beta must be at least 1, got {}", self.beta));
        }
        if self.c < 1 {
            return bad("c must be positive".into());
        }
        for (name, v) in [("c_exc", self.c_exc), ("eta", self.eta), ("gamma_sp", self.gamma_sp)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.gamma_pal > 0.0) {
            return bad(format!("gamma_pal must be positive, got {}", self.gamma_pal));
        }
        if !(self.sparse_epsilon > 0.0 && self.sparse_epsilon < 1.0) {
            return bad(format!("sparse_epsilon must lie in (0,1), got {}", self.sparse_epsilon));
        }
        if self.max_bidding_iterations == 0 {
            return bad("max_bidding_iterations must be positive".into());
        }
        Ok(())
    }

    /// Ladder for a graph of maximum degree `delta`. Rejects ladders whose top usable
    /// rung is 1/5 or more, where almost cliques lose weak diameter 2.
    pub fn decomposition(&self, delta: usize) -> Result<DecompositionConfig> {
        self.validate()?;
        let cfg = match self.epsilon1 {
            Some(e) => DecompositionConfig::new(e, self.k_const)?,
            None if delta == 0 => return Ok(sparsity_sequence(1, self.k_const)),
            None => sparsity_sequence(delta as u128, self.k_const),
        };
        if cfg.ell >= 1 && cfg.eps(cfg.ell) >= 0.2 {
            return Err(Error::Config(format!(
                "top sparsity level ε_{} = {:.4} must stay below 1/5; raise K or lower epsilon1",
                cfg.ell,
                cfg.eps(cfg.ell)
            )));
        }
        Ok(cfg)
    }
}
