//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string.
//! Infinite costs serialize as `null`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use wdmsim::cost::{
    exact_failure_probability_exponential, tchebycheff_failure_probability, FailureStats,
    HoldingStats,
};
use wdmsim::experiment::{run_sweep_on, ExperimentConfig};
use wdmsim::{erlang_b, repacking_probability, Algorithm, CostModel, SimConfig, Topology};

const EXAMPLE: &str = include_str!("../../../data/example6.topo");

/// Largest request count the page may ask for; keeps the tab responsive.
pub const MAX_REQUESTS: u64 = 200_000;

#[derive(Debug, Serialize)]
pub struct CostPoint {
    pub r: f64,
    pub exponential: f64,
    pub tchebycheff: f64,
}

#[derive(Debug, Serialize)]
pub struct FailureCosts {
    pub exponential: f64,
    pub tchebycheff: f64,
    pub points: Vec<CostPoint>,
}

pub fn failure_costs_inner(
    mu_f: f64,
    mu_h: f64,
    var_f: f64,
    var_h: f64,
    threshold: f64,
) -> Result<FailureCosts, String> {
    if !(var_f >= 0.0 && var_h >= 0.0) {
        return Err("variances must be nonnegative".into());
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err("threshold must lie in (0, 1]".into());
    }
    let exp = exact_failure_probability_exponential(mu_f, mu_h).map_err(|e| e.to_string())?;
    let tch = tchebycheff_failure_probability(
        FailureStats { mu_f, var_f },
        HoldingStats { mu_h, var_h },
        false,
    );
    let model = CostModel {
        repack_threshold: threshold,
        ..CostModel::default()
    };
    let points = (0..100)
        .map(|i| {
            let r = i as f64 / 100.0;
            CostPoint {
                r,
                exponential: model.channel_edge_cost(exp, r, true),
                tchebycheff: model.channel_edge_cost(tch, r, true),
            }
        })
        .collect();
    Ok(FailureCosts {
        exponential: exp,
        tchebycheff: tch,
        points,
    })
}

#[derive(Debug, Serialize)]
pub struct LoadCurves {
    pub loads: Vec<f64>,
    pub blocking: Vec<f64>,
    /// `repacking[x - 1][i]`: probability with `x` channels busy after the
    /// new lightpath, at `loads[i]`.
    pub repacking: Vec<Vec<f64>>,
}

pub fn load_curves_inner(capacity: u32, max_load: f64, steps: u32) -> Result<LoadCurves, String> {
    if !(1..=64).contains(&capacity) {
        return Err("capacity must be between 1 and 64".into());
    }
    if !(max_load > 0.0 && max_load.is_finite()) || !(2..=1000).contains(&steps) {
        return Err("need a positive load and 2 to 1000 steps".into());
    }
    let loads: Vec<f64> = (1..=steps)
        .map(|i| max_load * i as f64 / steps as f64)
        .collect();
    let err = |e: wdmsim::cost::CostError| e.to_string();
    let blocking = loads
        .iter()
        .map(|&rho| erlang_b(capacity, rho).map_err(err))
        .collect::<Result<_, _>>()?;
    let repacking = (1..=capacity)
        .map(|x| {
            loads
                .iter()
                .map(|&rho| repacking_probability(x, capacity, rho).map_err(err))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(LoadCurves {
        loads,
        blocking,
        repacking,
    })
}

#[derive(Debug, Serialize)]
pub struct AlgorithmResult {
    pub algorithm: Algorithm,
    pub blocking: f64,
    pub reconfiguration: f64,
    pub accepted: u64,
    pub reconfig_events: u64,
    pub load_per_wavelength: f64,
}

/// One replication of every algorithm on the bundled six-router network,
/// sharing the seed so the comparison is paired.
pub fn compare_inner(
    lambda_t: f64,
    ratio: f64,
    requests: u64,
    seed: u64,
) -> Result<Vec<AlgorithmResult>, String> {
    if !(100..=MAX_REQUESTS).contains(&requests) {
        return Err(format!("requests must be between 100 and {MAX_REQUESTS}"));
    }
    let topology = Topology::parse(EXAMPLE).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig {
        algorithms: Algorithm::ALL.to_vec(),
        lambda_t: vec![lambda_t],
        reliability_ratios: vec![ratio],
        replications: 1,
        base_seed: seed,
        sim: SimConfig {
            requests,
            check_invariants: false,
            ..SimConfig::default()
        },
        ..ExperimentConfig::default()
    };
    let rows = run_sweep_on(&cfg, &topology)
        .map_err(|e| format!("{e}"))?
        .rows;
    Ok(rows
        .into_iter()
        .map(|r| AlgorithmResult {
            algorithm: r.algorithm,
            blocking: r.blocking_prob,
            reconfiguration: r.reconfig_prob,
            accepted: r.accepted,
            reconfig_events: r.reconfig_events,
            load_per_wavelength: r.load_per_wavelength,
        })
        .collect())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Failure probability under both bounds and the channel cost it implies
/// across repacking probabilities 0 to 0.99.
#[wasm_bindgen]
pub fn failure_costs(
    mu_f: f64,
    mu_h: f64,
    var_f: f64,
    var_h: f64,
    threshold: f64,
) -> Result<String, JsError> {
    to_js(failure_costs_inner(mu_f, mu_h, var_f, var_h, threshold))
}

/// Erlang-B blocking and repacking probability against offered load.
#[wasm_bindgen]
pub fn load_curves(capacity: u32, max_load: f64, steps: u32) -> Result<String, JsError> {
    to_js(load_curves_inner(capacity, max_load, steps))
}

/// Runs MRPR, AUR and LLR once each. `seed` is a JS number, so it is
/// truncated to an integer.
#[wasm_bindgen]
pub fn compare(lambda_t: f64, ratio: f64, requests: u32, seed: f64) -> Result<String, JsError> {
    if !(seed >= 0.0 && seed <= u32::MAX as f64) {
        return Err(JsError::new("seed must be a nonnegative 32-bit integer"));
    }
    to_js(compare_inner(lambda_t, ratio, requests as u64, seed as u64))
}

#[wasm_bindgen]
pub fn topology_text() -> String {
    EXAMPLE.to_string()
}
