//! Discrete-event engine: Poisson requests, exponential holding times,
//! Poisson failures per element, forced rerouting and occupancy scans.
//!
//! A failure is an instantaneous hit. Every lightpath crossing the element is
//! torn down and rerouted at once, in lightpath-id order, with the failed
//! element excluded from that attempt. The element is back in service right
//! after the event.
//!
//! Randomness comes from four independent ChaCha streams of the run seed
//! (arrivals, holding times, failures, routing), so algorithms run with the
//! same seed see identical traffic and identical failure times.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auxgraph::CostSettings;
use crate::cost::CostModel;
use crate::routing::{Algorithm, RoutingEngine, RoutingError, RoutingParams, WavelengthPolicy};
use crate::state::{Lightpath, LightpathId, NetworkState, StateError};
use crate::stats::{ElementStats, EstimatorKind, Prior, StatsConfig, StatsError};
use crate::topology::{Element, ReliabilityClass, RouterId, Topology};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("invariant violated at t={time}")]
    Invariant { time: f64, source: StateError },
    #[error("metrics inconsistent: {0}")]
    Metrics(String),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl SimError {
    /// Whether the error comes from bad input rather than a broken run.
    pub fn is_config(&self) -> bool {
        matches!(self, SimError::Config(_))
    }
}

/// Parameters of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Total request rate λ_T over the whole network.
    pub arrival_rate: f64,
    pub mean_holding: f64,
    /// Number of requests to generate.
    pub requests: u64,
    /// Leading fraction of requests left out of the metrics.
    pub warmup_fraction: f64,
    /// Failure rate of reliable elements (0 disables).
    pub failure_rate_reliable: f64,
    pub failure_rate_unreliable: f64,
    pub swap_failure_rates: bool,
    pub policy: WavelengthPolicy,
    pub cost_model: CostModel,
    pub estimator: EstimatorKind,
    /// Time between occupancy scans; `None` means a tenth of the mean holding time.
    pub scan_interval: Option<f64>,
    /// Scans kept per resource.
    pub scan_window: usize,
    pub wi_link_repacking: bool,
    /// Update failure estimators from observed failures. When off, routing
    /// relies on the per-class failure rates alone.
    pub learn_failures: bool,
    /// Keep processing departures and failures after the last request until
    /// the network is empty.
    pub drain: bool,
    pub check_invariants: bool,
    pub trace: bool,
    pub dump_stats: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            arrival_rate: 1.0,
            mean_holding: 1.0,
            requests: 10_000,
            warmup_fraction: 0.1,
            failure_rate_reliable: 1.0 / 1000.0,
            failure_rate_unreliable: 1.0 / 1500.0,
            swap_failure_rates: false,
            policy: WavelengthPolicy::FirstFit,
            cost_model: CostModel::default(),
            estimator: EstimatorKind::MeanVar,
            scan_interval: None,
            scan_window: 100,
            wi_link_repacking: false,
            learn_failures: true,
            drain: true,
            check_invariants: cfg!(debug_assertions),
            trace: false,
            dump_stats: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("arrival_rate", self.arrival_rate)?;
        positive("mean_holding", self.mean_holding)?;
        if let Some(d) = self.scan_interval {
            positive("scan_interval", d)?;
        }
        for (name, v) in [
            ("failure_rate_reliable", self.failure_rate_reliable),
            ("failure_rate_unreliable", self.failure_rate_unreliable),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.requests == 0 {
            return Err(SimError::Config("requests must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(SimError::Config(format!(
                "warmup_fraction must be in [0, 1), got {}",
                self.warmup_fraction
            )));
        }
        if self.scan_window == 0 {
            return Err(SimError::Config("scan_window must be at least 1".into()));
        }
        Ok(())
    }

    pub fn failure_rate(&self, class: ReliabilityClass) -> f64 {
        let unreliable = (class == ReliabilityClass::Unreliable) != self.swap_failure_rates;
        if unreliable {
            self.failure_rate_unreliable
        } else {
            self.failure_rate_reliable
        }
    }

    fn scan_delta(&self) -> f64 {
        self.scan_interval.unwrap_or(0.1 * self.mean_holding)
    }

    fn warmup_requests(&self) -> u64 {
        (self.warmup_fraction * self.requests as f64).floor() as u64
    }
}

/// Counters of one replication, excluding warm-up requests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub offered: u64,
    pub blocked: u64,
    pub accepted: u64,
    /// Counted lightpaths displaced by at least one failure.
    pub reconfig_events: u64,
    pub reconfig_success: u64,
    pub reconfig_dropped: u64,
}

impl Metrics {
    pub fn blocking_probability(&self) -> f64 {
        ratio(self.blocked, self.offered)
    }

    pub fn reconfiguration_probability(&self) -> f64 {
        ratio(self.reconfig_events, self.accepted)
    }

    pub fn check(&self) -> Result<(), SimError> {
        if self.offered != self.blocked + self.accepted {
            return Err(SimError::Metrics(format!(
                "offered {} != blocked {} + accepted {}",
                self.offered, self.blocked, self.accepted
            )));
        }
        if self.reconfig_events != self.reconfig_success + self.reconfig_dropped {
            return Err(SimError::Metrics("reconfig events != success + dropped".into()));
        }
        if self.reconfig_events > self.accepted {
            return Err(SimError::Metrics("more reconfigured than accepted".into()));
        }
        Ok(())
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Draws from Exp(mean) by inverse transform.
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> Result<f64, SimError> {
    if !(mean > 0.0) {
        return Err(SimError::Config(format!("exponential mean must be positive, got {mean}")));
    }
    let u: f64 = rng.random();
    Ok(-mean * (1.0 - u).ln())
}

/// Load per wavelength λ_T·H/(W·L).
pub fn load_per_wavelength(lambda_t: f64, h: f64, w: f64, l: f64) -> Result<f64, SimError> {
    if !(w > 0.0 && l > 0.0) {
        return Err(SimError::Config(format!(
            "wavelengths ({w}) and fiber count ({l}) must be positive"
        )));
    }
    Ok(lambda_t * h / (w * l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Failure(Element),
    Departure(LightpathId),
    Arrival,
    Scan,
}

impl EventKind {
    fn priority(self) -> u8 {
        match self {
            EventKind::Failure(_) => 0,
            EventKind::Departure(_) => 1,
            EventKind::Arrival => 2,
            EventKind::Scan => 3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// reversed: BinaryHeap pops the greatest
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.kind.priority().cmp(&self.kind.priority()))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Streams {
    arrivals: ChaCha8Rng,
    holding: ChaCha8Rng,
    failures: ChaCha8Rng,
    routing: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let stream = |k| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k);
            r
        };
        Streams {
            arrivals: stream(1),
            holding: stream(2),
            failures: stream(3),
            routing: stream(4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HitStatus {
    Rerouted,
    Dropped,
}

/// What a single failure did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailureOutcome {
    pub displaced: Vec<LightpathId>,
    pub rerouted: Vec<LightpathId>,
    pub dropped: Vec<LightpathId>,
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub metrics: Metrics,
    /// Mean hop count of counted accepted lightpaths.
    pub mean_hops: f64,
    pub end_time: f64,
    pub failures: u64,
    pub trace: Option<Vec<String>>,
    pub stats_dump: Option<serde_json::Value>,
}

/// One replication in progress.
pub struct Simulation<'t> {
    topology: &'t Topology,
    config: SimConfig,
    state: NetworkState,
    stats: ElementStats,
    engine: RoutingEngine,
    queue: BinaryHeap<Event>,
    now: f64,
    seq: u64,
    rng: Streams,
    metrics: Metrics,
    next_id: u64,
    arrivals_seen: u64,
    counted_hops: u64,
    failures: u64,
    /// Counted lightpaths and whether a failure has hit them.
    counted: BTreeMap<LightpathId, Option<HitStatus>>,
    started: BTreeMap<LightpathId, f64>,
    trace: Option<Vec<String>>,
}

impl<'t> Simulation<'t> {
    pub fn new(
        topology: &'t Topology,
        config: SimConfig,
        algorithm: Algorithm,
        seed: u64,
    ) -> Result<Self, SimError> {
        config.validate()?;
        if topology.router_count() < 2 {
            return Err(SimError::Config("topology needs at least two routers".into()));
        }
        let failure_priors = topology
            .elements()
            .map(|e| Prior::exponential(1.0 / config.failure_rate(topology.class_of(e))))
            .collect();
        let n = topology.router_count() as f64;
        let stats_config = StatsConfig {
            kind: config.estimator,
            failure_priors,
            holding_prior: Prior::exponential(config.mean_holding),
            arrival_prior: Prior::exponential(n * (n - 1.0) / config.arrival_rate),
            window: config.scan_window,
        };
        let stats = ElementStats::new(topology, &stats_config)?;
        let params = RoutingParams {
            policy: config.policy,
            costs: CostSettings {
                model: config.cost_model,
                mean_holding: config.mean_holding,
                wi_link_repacking: config.wi_link_repacking,
            },
        };
        let mut sim = Simulation {
            topology,
            state: NetworkState::new(topology),
            stats,
            engine: RoutingEngine::new(topology, algorithm, params),
            queue: BinaryHeap::new(),
            now: 0.0,
            seq: 0,
            rng: Streams::new(seed),
            metrics: Metrics::default(),
            next_id: 0,
            arrivals_seen: 0,
            counted_hops: 0,
            failures: 0,
            counted: BTreeMap::new(),
            started: BTreeMap::new(),
            trace: config.trace.then(Vec::new),
            config,
        };
        sim.schedule_arrival()?;
        for e in topology.elements().collect::<Vec<_>>() {
            sim.schedule_failure(e)?;
        }
        let delta = sim.config.scan_delta();
        sim.push(delta, EventKind::Scan);
        Ok(sim)
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn stats(&self) -> &ElementStats {
        &self.stats
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    fn push(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Event {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn schedule_arrival(&mut self) -> Result<(), SimError> {
        let gap = sample_exponential(&mut self.rng.arrivals, 1.0 / self.config.arrival_rate)?;
        self.push(self.now + gap, EventKind::Arrival);
        Ok(())
    }

    fn schedule_failure(&mut self, e: Element) -> Result<(), SimError> {
        let rate = self.config.failure_rate(self.topology.class_of(e));
        if rate > 0.0 {
            let gap = sample_exponential(&mut self.rng.failures, 1.0 / rate)?;
            self.push(self.now + gap, EventKind::Failure(e));
        }
        Ok(())
    }

    fn log(&mut self, line: impl FnOnce() -> String) {
        if let Some(t) = &mut self.trace {
            t.push(format!("{:.9} {}", self.now, line()));
        }
    }

    fn check_state(&self) -> Result<(), SimError> {
        if self.config.check_invariants {
            self.state
                .check_conservation()
                .map_err(|source| SimError::Invariant {
                    time: self.now,
                    source,
                })?;
        }
        Ok(())
    }

    fn draw_pair(&mut self) -> (RouterId, RouterId) {
        let n = self.topology.router_count() as u32;
        let s = self.rng.arrivals.random_range(0..n);
        let mut d = self.rng.arrivals.random_range(0..n - 1);
        if d >= s {
            d += 1;
        }
        (RouterId(s), RouterId(d))
    }

    /// Serves one request for `s → d` at the current time. The holding time
    /// is drawn whether or not the request is accepted.
    pub fn handle_arrival(
        &mut self,
        s: RouterId,
        d: RouterId,
    ) -> Result<crate::routing::RouteDecision, SimError> {
        let holding = sample_exponential(&mut self.rng.holding, self.config.mean_holding)?;
        let counted = self.arrivals_seen >= self.config.warmup_requests();
        self.arrivals_seen += 1;
        self.stats.record_arrival(s, d, self.now)?;
        let decision =
            self.engine
                .route(self.topology, &self.state, &self.stats, s, d, &mut self.rng.routing)?;
        if counted {
            self.metrics.offered += 1;
        }
        if !decision.is_accepted() {
            if counted {
                self.metrics.blocked += 1;
            }
            self.log(|| format!("arrival s={s} d={d} blocked"));
            return Ok(decision);
        }
        let id = LightpathId(self.next_id);
        self.next_id += 1;
        let departure = self.now + holding;
        let lp = Lightpath {
            id,
            source: s,
            dest: d,
            hops: decision.hops.clone(),
            conversions: decision.conversions.clone(),
            departure,
        };
        self.state
            .establish(self.topology, lp)
            .map_err(|source| SimError::Invariant {
                time: self.now,
                source,
            })?;
        if counted {
            self.metrics.accepted += 1;
            self.counted_hops += decision.hops.len() as u64;
            self.counted.insert(id, None);
        }
        self.started.insert(id, self.now);
        self.push(departure, EventKind::Departure(id));
        let hops = decision.hops.len();
        self.log(|| format!("arrival s={s} d={d} accepted lp={} hops={hops}", id.0));
        Ok(decision)
    }

    fn handle_departure(&mut self, id: LightpathId) -> Result<(), SimError> {
        // dropped lightpaths leave a stale departure behind
        if let Some(lp) = self.state.release(id) {
            let start = self.started.remove(&id).expect("recorded on setup");
            self.stats
                .record_holding(lp.source, lp.dest, lp.departure - start)?;
            self.log(|| format!("departure lp={}", id.0));
        }
        Ok(())
    }

    /// Hits `e` with a failure now: displaced lightpaths are rerouted in id
    /// order with `e` out of service, or dropped.
    pub fn inject_failure(&mut self, e: Element) -> Result<FailureOutcome, SimError> {
        self.failures += 1;
        if self.config.learn_failures {
            self.stats.record_failure(e, self.now)?;
        }
        let displaced = self.state.lightpaths_using(self.topology, e);
        let mut torn = Vec::with_capacity(displaced.len());
        for &id in &displaced {
            torn.push(self.state.release(id).expect("listed as active"));
        }
        let was_failed = self.state.is_failed(e);
        self.state.set_failed(e, true);
        let mut outcome = FailureOutcome {
            displaced,
            ..FailureOutcome::default()
        };
        for lp in torn {
            let decision = self.engine.route(
                self.topology,
                &self.state,
                &self.stats,
                lp.source,
                lp.dest,
                &mut self.rng.routing,
            )?;
            let rerouted = decision.is_accepted()
                && self
                    .state
                    .establish(
                        self.topology,
                        Lightpath {
                            hops: decision.hops,
                            conversions: decision.conversions,
                            ..lp.clone()
                        },
                    )
                    .is_ok();
            let status = if rerouted {
                outcome.rerouted.push(lp.id);
                HitStatus::Rerouted
            } else {
                self.started.remove(&lp.id);
                outcome.dropped.push(lp.id);
                HitStatus::Dropped
            };
            self.count_hit(lp.id, status);
        }
        self.state.set_failed(e, was_failed);
        let (n_re, n_drop) = (outcome.rerouted.len(), outcome.dropped.len());
        self.log(|| format!("failure {e} rerouted={n_re} dropped={n_drop}"));
        Ok(outcome)
    }

    fn count_hit(&mut self, id: LightpathId, status: HitStatus) {
        let Some(entry) = self.counted.get_mut(&id) else {
            return;
        };
        match (*entry, status) {
            (None, HitStatus::Rerouted) => {
                self.metrics.reconfig_events += 1;
                self.metrics.reconfig_success += 1;
            }
            (None, HitStatus::Dropped) => {
                self.metrics.reconfig_events += 1;
                self.metrics.reconfig_dropped += 1;
            }
            (Some(HitStatus::Rerouted), HitStatus::Dropped) => {
                self.metrics.reconfig_success -= 1;
                self.metrics.reconfig_dropped += 1;
            }
            _ => return,
        }
        *entry = Some(status);
    }

    /// Appends the current occupancy of every link and converter bank to its
    /// scan window.
    pub fn scan_occupancy(&mut self) -> Result<(), SimError> {
        for l in self.topology.links() {
            self.stats
                .push_link_scan(l.id, self.state.occupied_channels(l.id))?;
        }
        for r in self.topology.routers() {
            self.stats
                .push_converter_scan(r.id, self.state.converters_in_use(r.id))?;
        }
        Ok(())
    }

    fn arrivals_done(&self) -> bool {
        self.arrivals_seen >= self.config.requests
    }

    /// Processes the next event; `false` once the run is over.
    pub fn step(&mut self) -> Result<bool, SimError> {
        if self.arrivals_done() && (!self.config.drain || self.state.active_count() == 0) {
            return Ok(false);
        }
        let Some(ev) = self.queue.pop() else {
            return Ok(false);
        };
        self.now = ev.time;
        match ev.kind {
            EventKind::Arrival => {
                if !self.arrivals_done() {
                    let (s, d) = self.draw_pair();
                    self.handle_arrival(s, d)?;
                    if !self.arrivals_done() {
                        self.schedule_arrival()?;
                    }
                }
            }
            EventKind::Departure(id) => self.handle_departure(id)?,
            EventKind::Failure(e) => {
                self.inject_failure(e)?;
                self.schedule_failure(e)?;
            }
            EventKind::Scan => {
                if !self.arrivals_done() {
                    self.scan_occupancy()?;
                    let delta = self.config.scan_delta();
                    self.push(self.now + delta, EventKind::Scan);
                }
            }
        }
        self.check_state()?;
        Ok(true)
    }

    pub fn finish(self) -> Result<SimOutput, SimError> {
        self.metrics.check()?;
        let mean_hops = if self.metrics.accepted == 0 {
            0.0
        } else {
            self.counted_hops as f64 / self.metrics.accepted as f64
        };
        let stats_dump = if self.config.dump_stats {
            Some(serde_json::to_value(&self.stats).map_err(|e| SimError::Metrics(e.to_string()))?)
        } else {
            None
        };
        Ok(SimOutput {
            metrics: self.metrics,
            mean_hops,
            end_time: self.now,
            failures: self.failures,
            trace: self.trace,
            stats_dump,
        })
    }
}

/// Runs one replication to completion.
pub fn run(
    config: &SimConfig,
    topology: &Topology,
    algorithm: Algorithm,
    seed: u64,
) -> Result<SimOutput, SimError> {
    let mut sim = Simulation::new(topology, config.clone(), algorithm, seed)?;
    while sim.step()? {}
    sim.finish()
}

/// Formats a trace as one line per event.
pub fn format_trace(lines: &[String]) -> String {
    let mut out = String::new();
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::LinkId;

    fn line(n: usize, wavelengths: u16) -> Topology {
        let mut text = String::new();
        for i in 0..n {
            text.push_str(&format!("router R{i} converters=1\n"));
        }
        for i in 0..n - 1 {
            text.push_str(&format!("link R{i} R{} wavelengths={wavelengths}\n", i + 1));
        }
        for i in 0..n - 1 {
            text.push_str(&format!("link R{} R{i} wavelengths={wavelengths}\n", i + 1));
        }
        Topology::parse(&text).unwrap()
    }

    /// A→B→D plus a spare A→C→D.
    fn square() -> Topology {
        Topology::parse(
            "router A\nrouter B\nrouter C\nrouter D\nlink A B wavelengths=4\n\
             link B D wavelengths=4\nlink A C wavelengths=4\nlink C D wavelengths=4",
        )
        .unwrap()
    }

    fn quiet() -> SimConfig {
        SimConfig {
            failure_rate_reliable: 0.0,
            failure_rate_unreliable: 0.0,
            check_invariants: true,
            ..SimConfig::default()
        }
    }

    #[test]
    fn exponential_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| sample_exponential(&mut rng, 1.0).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
        assert!(sample_exponential(&mut rng, 0.0).is_err());
        assert!(sample_exponential(&mut rng, -1.0).is_err());
        let a = sample_exponential(&mut ChaCha8Rng::seed_from_u64(9), 2.0).unwrap();
        let b = sample_exponential(&mut ChaCha8Rng::seed_from_u64(9), 2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn load_per_wavelength_examples() {
        assert_eq!(load_per_wavelength(0.0, 2.0, 3.0, 8.0).unwrap(), 0.0);
        assert_eq!(load_per_wavelength(12.0, 2.0, 3.0, 8.0).unwrap(), 1.0);
        let a = load_per_wavelength(7.0, 1.7, 3.0, 13.0).unwrap();
        let b = load_per_wavelength(7.0, 1.7, 6.0, 13.0).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(load_per_wavelength(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(load_per_wavelength(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn event_order() {
        let ev = |time, seq, kind| Event { time, seq, kind };
        let mut q = BinaryHeap::new();
        q.push(ev(1.0, 1, EventKind::Scan));
        q.push(ev(1.0, 2, EventKind::Arrival));
        q.push(ev(1.0, 3, EventKind::Departure(LightpathId(0))));
        q.push(ev(1.0, 4, EventKind::Failure(Element::Link(LinkId(0)))));
        q.push(ev(0.5, 5, EventKind::Scan));
        q.push(ev(1.0, 0, EventKind::Arrival));
        let order: Vec<(f64, u64)> = std::iter::from_fn(|| q.pop()).map(|e| (e.time, e.seq)).collect();
        assert_eq!(order, vec![(0.5, 5), (1.0, 4), (1.0, 3), (1.0, 0), (1.0, 2), (1.0, 1)]);
    }

    #[test]
    fn bad_configs() {
        let t = line(2, 1);
        for cfg in [
            SimConfig { arrival_rate: 0.0, ..quiet() },
            SimConfig { mean_holding: -1.0, ..quiet() },
            SimConfig { requests: 0, ..quiet() },
            SimConfig { scan_interval: Some(0.0), ..quiet() },
            SimConfig { failure_rate_reliable: -0.1, ..quiet() },
            SimConfig { warmup_fraction: 1.0, ..quiet() },
        ] {
            assert!(run(&cfg, &t, Algorithm::Aur, 1).unwrap_err().is_config());
        }
    }

    #[test]
    fn no_failures_no_reconfiguration() {
        let t = square();
        for alg in Algorithm::ALL {
            let out = run(&SimConfig { arrival_rate: 8.0, ..quiet() }, &t, alg, 5).unwrap();
            assert_eq!(out.metrics.reconfig_events, 0);
            assert_eq!(out.failures, 0);
            assert_eq!(out.metrics.reconfiguration_probability(), 0.0);
            assert!(out.metrics.blocked > 0, "load high enough to block");
        }
    }

    #[test]
    fn ample_capacity_never_blocks() {
        let t = line(3, 500);
        let cfg = SimConfig {
            arrival_rate: 5.0,
            requests: 20_000,
            ..SimConfig::default()
        };
        for alg in Algorithm::ALL {
            let out = run(&cfg, &t, alg, 11).unwrap();
            assert!(out.metrics.offered >= 10_000);
            assert!(out.metrics.blocking_probability() <= 1e-3);
            assert_eq!(out.metrics.offered, 18_000);
        }
    }

    #[test]
    fn trace_is_deterministic() {
        let t = square();
        let cfg = SimConfig {
            arrival_rate: 4.0,
            requests: 2_000,
            failure_rate_reliable: 0.05,
            failure_rate_unreliable: 0.05,
            trace: true,
            ..SimConfig::default()
        };
        let a = run(&cfg, &t, Algorithm::Mrpr, 77).unwrap();
        let b = run(&cfg, &t, Algorithm::Mrpr, 77).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.trace, b.trace);
        assert!(a.metrics.reconfig_events > 0);
        let c = run(&cfg, &t, Algorithm::Mrpr, 78).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn acceptance_occupies_hop_count_channels() {
        let t = line(4, 2);
        let mut sim = Simulation::new(&t, quiet(), Algorithm::Aur, 1).unwrap();
        let d = sim.handle_arrival(RouterId(0), RouterId(3)).unwrap();
        assert!(d.is_accepted());
        assert_eq!(d.hops.len(), 3);
        let total: u32 = t.links().iter().map(|l| sim.state().occupied_channels(l.id)).sum();
        assert_eq!(total, 3);
        sim.state().check_conservation().unwrap();
    }

    #[test]
    fn saturated_network_blocks() {
        let t = line(2, 1);
        let mut sim = Simulation::new(&t, SimConfig { warmup_fraction: 0.0, ..quiet() }, Algorithm::Llr, 1)
            .unwrap();
        assert!(sim.handle_arrival(RouterId(0), RouterId(1)).unwrap().is_accepted());
        assert!(!sim.handle_arrival(RouterId(0), RouterId(1)).unwrap().is_accepted());
        assert_eq!(sim.metrics().blocked, 1);
        assert_eq!(sim.metrics().accepted, 1);
    }

    #[test]
    fn failure_outcomes() {
        let t = square();
        let cfg = SimConfig { warmup_fraction: 0.0, ..quiet() };
        let mut sim = Simulation::new(&t, cfg.clone(), Algorithm::Aur, 1).unwrap();
        let out = sim.inject_failure(Element::Link(LinkId(3))).unwrap();
        assert!(out.displaced.is_empty());

        let a = sim.handle_arrival(RouterId(0), RouterId(3)).unwrap();
        let b = sim.handle_arrival(RouterId(0), RouterId(3)).unwrap();
        assert_eq!(a.hops[0].link, LinkId(0));
        assert_eq!(b.hops[0].link, LinkId(0));
        let out = sim.inject_failure(Element::Link(LinkId(0))).unwrap();
        assert_eq!(out.rerouted.len(), 2);
        assert!(out.dropped.is_empty());
        for lp in sim.state().lightpaths() {
            assert_eq!(lp.hops[0].link, LinkId(2));
        }
        assert_eq!(sim.metrics().reconfig_success, 2);
        assert!(!sim.state().is_failed(Element::Link(LinkId(0))));

        // a router failure at the endpoint cannot be routed around
        let out = sim.inject_failure(Element::Router(RouterId(3))).unwrap();
        assert_eq!(out.dropped.len(), 2);
        let m = sim.metrics();
        assert_eq!((m.reconfig_events, m.reconfig_success, m.reconfig_dropped), (2, 0, 2));
        assert_eq!(sim.state().active_count(), 0);

        let t = line(2, 3);
        let mut sim = Simulation::new(&t, cfg, Algorithm::Mrpr, 1).unwrap();
        sim.handle_arrival(RouterId(0), RouterId(1)).unwrap();
        let out = sim.inject_failure(Element::Link(LinkId(0))).unwrap();
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(sim.metrics().reconfig_dropped, 1);
        m.check().unwrap();
    }

    #[test]
    fn scans() {
        let t = line(3, 2);
        let cfg = SimConfig { scan_window: 4, ..quiet() };
        let mut sim = Simulation::new(&t, cfg, Algorithm::Aur, 1).unwrap();
        sim.scan_occupancy().unwrap();
        assert!(t.links().iter().all(|l| sim.stats().link_window(l.id).samples().all(|x| x == 0)));
        sim.handle_arrival(RouterId(0), RouterId(2)).unwrap();
        for _ in 0..4 {
            sim.scan_occupancy().unwrap();
        }
        for l in [LinkId(0), LinkId(1)] {
            let w = sim.stats().link_window(l);
            assert_eq!(w.len(), 4);
            assert!(w.samples().all(|x| x >= 1));
        }
        assert!(sim.stats().link_window(LinkId(2)).samples().all(|x| x == 0));
    }

    #[test]
    fn metrics_hold_invariants_under_failures() {
        let t = square();
        let cfg = SimConfig {
            arrival_rate: 6.0,
            requests: 5_000,
            failure_rate_reliable: 0.2,
            failure_rate_unreliable: 0.2,
            ..SimConfig::default()
        };
        for alg in Algorithm::ALL {
            let out = run(&cfg, &t, alg, 3).unwrap();
            let m = out.metrics;
            m.check().unwrap();
            assert!(m.reconfig_events > 0);
            assert!((0.0..=1.0).contains(&m.blocking_probability()));
            assert!((0.0..=1.0).contains(&m.reconfiguration_probability()));
            assert!(out.mean_hops >= 1.0);
        }
    }
}
