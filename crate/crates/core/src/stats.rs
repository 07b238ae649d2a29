//! Online estimators for failure inter-arrival, request inter-arrival and
//! holding times, plus the scan-based offered-load estimator.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{Element, RouterId, Topology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample {0} is not finite")]
    NonFinite(f64),
    #[error("measurement noise must be positive, got {0}")]
    MeasurementNoise(f64),
    #[error("process noise must be nonnegative, got {0}")]
    ProcessNoise(f64),
    #[error("occupancy sample {sample} exceeds capacity {capacity}")]
    OverCapacity { sample: u32, capacity: u32 },
    #[error("scan window is empty")]
    EmptyWindow,
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error("mean holding time must be positive, got {0}")]
    Holding(f64),
}

/// Something that tracks the mean and variance of a sample stream.
pub trait Estimator {
    fn observe(&mut self, sample: f64) -> Result<(), StatsError>;
    fn count(&self) -> u64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
}

/// Welford single-pass mean and sample variance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanVar {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, sample: f64) -> Result<(), StatsError> {
        if !sample.is_finite() {
            return Err(StatsError::NonFinite(sample));
        }
        self.count += 1;
        let delta = sample - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (sample - self.mean);
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `m2 / (n - 1)` for two or more samples, otherwise 0.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }
}

impl Estimator for MeanVar {
    fn observe(&mut self, sample: f64) -> Result<(), StatsError> {
        self.update(sample)
    }
    fn count(&self) -> u64 {
        self.count
    }
    fn mean(&self) -> f64 {
        self.mean
    }
    fn variance(&self) -> f64 {
        MeanVar::variance(self)
    }
}

/// Scalar random-walk Kalman filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarKalman {
    estimate: f64,
    error_cov: f64,
    process_noise: f64,
    measurement_noise: f64,
}

impl ScalarKalman {
    pub fn new(
        estimate: f64,
        error_cov: f64,
        process_noise: f64,
        measurement_noise: f64,
    ) -> Result<Self, StatsError> {
        if !(measurement_noise > 0.0) {
            return Err(StatsError::MeasurementNoise(measurement_noise));
        }
        if !(process_noise >= 0.0) {
            return Err(StatsError::ProcessNoise(process_noise));
        }
        Ok(ScalarKalman {
            estimate,
            error_cov: error_cov.max(0.0),
            process_noise,
            measurement_noise,
        })
    }

    /// Predict with the process noise, then correct with `measurement`.
    pub fn update(&mut self, measurement: f64) -> Result<f64, StatsError> {
        if !measurement.is_finite() {
            return Err(StatsError::NonFinite(measurement));
        }
        let prior = self.error_cov + self.process_noise;
        let denom = prior + self.measurement_noise;
        let gain = prior / denom;
        self.estimate += gain * (measurement - self.estimate);
        // (1 - gain) * prior loses precision when the prior is diffuse
        self.error_cov = prior * self.measurement_noise / denom;
        Ok(self.estimate)
    }

    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn error_cov(&self) -> f64 {
        self.error_cov
    }
}

/// Kalman-filtered mean paired with a Welford variance of the raw samples.
///
/// The first sample seeds the filter directly (the flat-prior limit), so with
/// zero process noise the estimate tracks the running mean exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanEstimator {
    filter: Option<ScalarKalman>,
    raw: MeanVar,
    process_noise: f64,
    measurement_noise: f64,
}

impl KalmanEstimator {
    pub fn new(process_noise: f64, measurement_noise: f64) -> Result<Self, StatsError> {
        // validates the noise parameters
        ScalarKalman::new(0.0, 0.0, process_noise, measurement_noise)?;
        Ok(KalmanEstimator {
            filter: None,
            raw: MeanVar::new(),
            process_noise,
            measurement_noise,
        })
    }
}

impl Estimator for KalmanEstimator {
    fn observe(&mut self, sample: f64) -> Result<(), StatsError> {
        self.raw.update(sample)?;
        match &mut self.filter {
            Some(f) => {
                f.update(sample)?;
            }
            None => {
                self.filter = Some(ScalarKalman::new(
                    sample,
                    self.measurement_noise,
                    self.process_noise,
                    self.measurement_noise,
                )?);
            }
        }
        Ok(())
    }
    fn count(&self) -> u64 {
        self.raw.count()
    }
    fn mean(&self) -> f64 {
        self.filter.map_or(0.0, |f| f.estimate())
    }
    fn variance(&self) -> f64 {
        self.raw.variance()
    }
}

/// Which estimator backs the per-element statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum EstimatorKind {
    #[default]
    MeanVar,
    Kalman {
        process_noise: f64,
        measurement_noise: f64,
    },
}

/// Value reported until an estimator has seen two samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub mean: f64,
    pub variance: f64,
}

impl Prior {
    /// Exponential distribution with the given mean (variance = mean²).
    /// An infinite mean gets zero variance so downstream bounds stay finite.
    pub fn exponential(mean: f64) -> Self {
        let variance = if mean.is_finite() { mean * mean } else { 0.0 };
        Prior { mean, variance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum Backend {
    MeanVar(MeanVar),
    Kalman(KalmanEstimator),
}

/// An estimator that falls back to a prior during cold start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackedEstimator {
    backend: Backend,
    prior: Prior,
}

impl TrackedEstimator {
    pub fn new(kind: EstimatorKind, prior: Prior) -> Result<Self, StatsError> {
        let backend = match kind {
            EstimatorKind::MeanVar => Backend::MeanVar(MeanVar::new()),
            EstimatorKind::Kalman {
                process_noise,
                measurement_noise,
            } => Backend::Kalman(KalmanEstimator::new(process_noise, measurement_noise)?),
        };
        Ok(TrackedEstimator { backend, prior })
    }

    fn inner(&self) -> &dyn Estimator {
        match &self.backend {
            Backend::MeanVar(e) => e,
            Backend::Kalman(e) => e,
        }
    }

    fn warm(&self) -> bool {
        self.inner().count() >= 2
    }
}

impl Estimator for TrackedEstimator {
    fn observe(&mut self, sample: f64) -> Result<(), StatsError> {
        match &mut self.backend {
            Backend::MeanVar(e) => e.observe(sample),
            Backend::Kalman(e) => e.observe(sample),
        }
    }
    fn count(&self) -> u64 {
        self.inner().count()
    }
    fn mean(&self) -> f64 {
        if self.warm() {
            self.inner().mean()
        } else {
            self.prior.mean
        }
    }
    fn variance(&self) -> f64 {
        if self.warm() {
            self.inner().variance()
        } else {
            self.prior.variance
        }
    }
}

/// The last `φ` occupancy scans of one resource with capacity `c_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyScanWindow {
    samples: VecDeque<u32>,
    length: usize,
    capacity: u32,
}

/// Arrival rate on a resource, or a marker that every scan was saturated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArrivalRate {
    Rate(f64),
    Saturated,
}

/// Scan-based offered-load estimate for one resource.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfferedLoad {
    /// Mean number of lightpaths on the resource, `N_r`.
    pub mean_occupancy: f64,
    /// Fraction of scans that found the resource full, `B_r`.
    pub saturation: f64,
    /// `λ_r = N_r / (h (1 - B_r))`.
    pub arrival_rate: ArrivalRate,
    pub mean_holding: f64,
}

impl OfferedLoad {
    /// Offered load in Erlangs (`λ_r · h`), `None` when saturated.
    pub fn erlangs(&self) -> Option<f64> {
        match self.arrival_rate {
            ArrivalRate::Rate(r) => Some(r * self.mean_holding),
            ArrivalRate::Saturated => None,
        }
    }
}

impl OccupancyScanWindow {
    pub fn new(length: usize, capacity: u32) -> Result<Self, StatsError> {
        if length == 0 {
            return Err(StatsError::ZeroWindow);
        }
        Ok(OccupancyScanWindow {
            samples: VecDeque::with_capacity(length.min(1 << 16)),
            length,
            capacity,
        })
    }

    /// Appends a scan, evicting the oldest once the window is full.
    pub fn push(&mut self, occupied: u32) -> Result<(), StatsError> {
        if occupied > self.capacity {
            return Err(StatsError::OverCapacity {
                sample: occupied,
                capacity: self.capacity,
            });
        }
        if self.samples.len() == self.length {
            self.samples.pop_front();
        }
        self.samples.push_back(occupied);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn samples(&self) -> impl Iterator<Item = u32> + '_ {
        self.samples.iter().copied()
    }

    /// Mean occupancy, saturation fraction and implied arrival rate.
    pub fn estimate_offered_load(&self, mean_holding: f64) -> Result<OfferedLoad, StatsError> {
        if self.samples.is_empty() {
            return Err(StatsError::EmptyWindow);
        }
        if !(mean_holding > 0.0) || !mean_holding.is_finite() {
            return Err(StatsError::Holding(mean_holding));
        }
        let n = self.samples.len() as f64;
        let total: u64 = self.samples.iter().map(|&s| s as u64).sum();
        let full = self.samples.iter().filter(|&&s| s == self.capacity).count();
        let mean_occupancy = total as f64 / n;
        let saturation = full as f64 / n;
        let arrival_rate = if full == self.samples.len() {
            ArrivalRate::Saturated
        } else {
            ArrivalRate::Rate(mean_occupancy / (mean_holding * (1.0 - saturation)))
        };
        Ok(OfferedLoad {
            mean_occupancy,
            saturation,
            arrival_rate,
            mean_holding,
        })
    }
}

/// Priors and window settings for [`ElementStats`].
#[derive(Debug, Clone, PartialEq)]
pub struct StatsConfig {
    pub kind: EstimatorKind,
    /// Failure inter-arrival prior per element, indexed like
    /// [`Topology::elements`].
    pub failure_priors: Vec<Prior>,
    pub holding_prior: Prior,
    pub arrival_prior: Prior,
    pub window: usize,
}

/// Everything the routers learn while the network runs.
#[derive(Debug, Clone, Serialize)]
pub struct ElementStats {
    router_failures: Vec<TrackedEstimator>,
    link_failures: Vec<TrackedEstimator>,
    #[serde(skip)]
    last_failure: BTreeMap<Element, f64>,
    #[serde(serialize_with = "pairs_as_list")]
    holding_by_pair: BTreeMap<(RouterId, RouterId), TrackedEstimator>,
    #[serde(serialize_with = "pairs_as_list")]
    arrival_by_pair: BTreeMap<(RouterId, RouterId), TrackedEstimator>,
    #[serde(skip)]
    last_arrival: BTreeMap<(RouterId, RouterId), f64>,
    link_occupancy: Vec<OccupancyScanWindow>,
    converter_occupancy: Vec<OccupancyScanWindow>,
    #[serde(skip)]
    kind: EstimatorKind,
    #[serde(skip)]
    holding_prior: Option<Prior>,
    #[serde(skip)]
    arrival_prior: Option<Prior>,
}

fn pairs_as_list<S: serde::Serializer>(
    map: &BTreeMap<(RouterId, RouterId), TrackedEstimator>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    ser.collect_seq(map.iter().map(|((s, d), e)| (s.0, d.0, e)))
}

impl ElementStats {
    pub fn new(topology: &Topology, config: &StatsConfig) -> Result<Self, StatsError> {
        let n_routers = topology.router_count();
        assert_eq!(
            config.failure_priors.len(),
            topology.element_count(),
            "one failure prior per element"
        );
        let tracked = |p: &Prior| TrackedEstimator::new(config.kind, *p);
        let router_failures = config.failure_priors[..n_routers]
            .iter()
            .map(tracked)
            .collect::<Result<_, _>>()?;
        let link_failures = config.failure_priors[n_routers..]
            .iter()
            .map(tracked)
            .collect::<Result<_, _>>()?;
        let link_occupancy = topology
            .links()
            .iter()
            .map(|l| OccupancyScanWindow::new(config.window, l.capacity()))
            .collect::<Result<_, _>>()?;
        let converter_occupancy = topology
            .routers()
            .iter()
            .map(|r| OccupancyScanWindow::new(config.window, r.converter_count))
            .collect::<Result<_, _>>()?;
        Ok(ElementStats {
            router_failures,
            link_failures,
            last_failure: BTreeMap::new(),
            holding_by_pair: BTreeMap::new(),
            arrival_by_pair: BTreeMap::new(),
            last_arrival: BTreeMap::new(),
            link_occupancy,
            converter_occupancy,
            kind: config.kind,
            holding_prior: Some(config.holding_prior),
            arrival_prior: Some(config.arrival_prior),
        })
    }

    fn failure_estimator(&self, e: Element) -> &TrackedEstimator {
        match e {
            Element::Router(r) => &self.router_failures[r.index()],
            Element::Link(l) => &self.link_failures[l.index()],
        }
    }

    /// (mean, variance) of the failure inter-arrival time of `e`.
    pub fn failure_moments(&self, e: Element) -> (f64, f64) {
        let est = self.failure_estimator(e);
        (est.mean(), est.variance())
    }

    pub fn failure_samples(&self, e: Element) -> u64 {
        self.failure_estimator(e).count()
    }

    /// Records a failure of `e` at time `now`; the first failure is measured
    /// from time zero.
    pub fn record_failure(&mut self, e: Element, now: f64) -> Result<(), StatsError> {
        let since = now - self.last_failure.get(&e).copied().unwrap_or(0.0);
        self.last_failure.insert(e, now);
        match e {
            Element::Router(r) => self.router_failures[r.index()].observe(since),
            Element::Link(l) => self.link_failures[l.index()].observe(since),
        }
    }

    fn pair_entry(
        map: &mut BTreeMap<(RouterId, RouterId), TrackedEstimator>,
        key: (RouterId, RouterId),
        kind: EstimatorKind,
        prior: Prior,
    ) -> Result<&mut TrackedEstimator, StatsError> {
        Ok(match map.entry(key) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(TrackedEstimator::new(kind, prior)?)
            }
        })
    }

    pub fn record_holding(
        &mut self,
        s: RouterId,
        d: RouterId,
        holding: f64,
    ) -> Result<(), StatsError> {
        let prior = self.holding_prior.expect("configured");
        Self::pair_entry(&mut self.holding_by_pair, (s, d), self.kind, prior)?.observe(holding)
    }

    /// Records a request for `(s, d)`; the first request only starts the clock.
    pub fn record_arrival(&mut self, s: RouterId, d: RouterId, now: f64) -> Result<(), StatsError> {
        if let Some(prev) = self.last_arrival.insert((s, d), now) {
            let prior = self.arrival_prior.expect("configured");
            Self::pair_entry(&mut self.arrival_by_pair, (s, d), self.kind, prior)?
                .observe(now - prev)?;
        }
        Ok(())
    }

    /// (mean, variance) of the holding time for requests from `s` to `d`.
    pub fn holding_moments(&self, s: RouterId, d: RouterId) -> (f64, f64) {
        match self.holding_by_pair.get(&(s, d)) {
            Some(e) => (e.mean(), e.variance()),
            None => {
                let p = self.holding_prior.expect("configured");
                (p.mean, p.variance)
            }
        }
    }

    /// (mean, variance) of request inter-arrival time for `(s, d)`.
    pub fn arrival_moments(&self, s: RouterId, d: RouterId) -> (f64, f64) {
        match self.arrival_by_pair.get(&(s, d)) {
            Some(e) => (e.mean(), e.variance()),
            None => {
                let p = self.arrival_prior.expect("configured");
                (p.mean, p.variance)
            }
        }
    }

    pub fn link_window(&self, l: crate::topology::LinkId) -> &OccupancyScanWindow {
        &self.link_occupancy[l.index()]
    }

    pub fn converter_window(&self, r: RouterId) -> &OccupancyScanWindow {
        &self.converter_occupancy[r.index()]
    }

    pub fn push_link_scan(
        &mut self,
        l: crate::topology::LinkId,
        occupied: u32,
    ) -> Result<(), StatsError> {
        self.link_occupancy[l.index()].push(occupied)
    }

    pub fn push_converter_scan(&mut self, r: RouterId, busy: u32) -> Result<(), StatsError> {
        let w = &mut self.converter_occupancy[r.index()];
        w.push(busy.min(w.capacity()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_pass(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() < 2 {
            0.0
        } else {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        };
        (mean, var)
    }

    #[test]
    fn meanvar_examples() {
        let mut e = MeanVar::new();
        e.update(5.0).unwrap();
        assert_eq!((e.mean(), e.variance()), (5.0, 0.0));

        let mut e = MeanVar::new();
        for x in [2.0, 4.0, 6.0] {
            e.update(x).unwrap();
        }
        assert_relative_eq!(e.mean(), 4.0);
        assert_relative_eq!(e.variance(), 4.0);

        let mut e = MeanVar::new();
        for _ in 0..1000 {
            e.update(3.0).unwrap();
        }
        assert_eq!(e.mean(), 3.0);
        assert_eq!(e.variance(), 0.0);
    }

    #[test]
    fn meanvar_rejects_non_finite() {
        let mut e = MeanVar::new();
        assert_eq!(e.update(f64::NAN).unwrap_err().to_string(), "sample NaN is not finite");
        assert!(e.update(f64::INFINITY).is_err());
        assert_eq!(e.count(), 0);
    }

    #[test]
    fn meanvar_matches_two_pass_on_long_stream() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..100_000).map(|_| 1e3 + rng.random::<f64>() * 50.0).collect();
        let mut e = MeanVar::new();
        for &x in &xs {
            e.update(x).unwrap();
        }
        let (m, v) = two_pass(&xs);
        assert_relative_eq!(e.mean(), m, max_relative = 1e-9);
        assert_relative_eq!(e.variance(), v, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn meanvar_equals_two_pass(xs in prop::collection::vec(-1e6f64..1e6, 1..500)) {
            let mut e = MeanVar::new();
            for &x in &xs { e.update(x).unwrap(); }
            let (m, v) = two_pass(&xs);
            prop_assert!((e.mean() - m).abs() <= 1e-9 * m.abs().max(1.0));
            prop_assert!((e.variance() - v).abs() <= 1e-9 * v.max(1.0));
            prop_assert!(e.variance() >= 0.0);
        }

        #[test]
        fn kalman_cov_contracts(cov in 0.0f64..1e3, r in 1e-3f64..1e3, z in -1e3f64..1e3) {
            let mut kf = ScalarKalman::new(0.0, cov, 0.0, r).unwrap();
            kf.update(z).unwrap();
            prop_assert!(kf.error_cov() <= cov + 1e-12);
        }

        #[test]
        fn kalman_flat_prior_is_batch_mean(
            zs in prop::collection::vec(-1e3f64..1e3, 10..200),
            r in 0.01f64..100.0,
        ) {
            let mut kf = ScalarKalman::new(0.0, 1e12 * r, 0.0, r).unwrap();
            for &z in &zs { kf.update(z).unwrap(); }
            let (m, _) = two_pass(&zs);
            prop_assert!((kf.estimate() - m).abs() <= 1e-9 * m.abs().max(1.0),
                "{} vs {}", kf.estimate(), m);
        }
    }

    #[test]
    fn kalman_examples() {
        let mut kf = ScalarKalman::new(-4.0, 10.0, 0.0, 1e-12).unwrap();
        kf.update(7.5).unwrap();
        assert_relative_eq!(kf.estimate(), 7.5, max_relative = 1e-9);

        let mut kf = ScalarKalman::new(0.0, 1e12, 0.0, 1.0).unwrap();
        for z in [1.0, 2.0, 3.0] {
            kf.update(z).unwrap();
        }
        assert_relative_eq!(kf.estimate(), 2.0, max_relative = 1e-9);

        assert_eq!(
            ScalarKalman::new(0.0, 1.0, 0.0, 0.0),
            Err(StatsError::MeasurementNoise(0.0))
        );
    }

    #[test]
    fn kalman_estimator_tracks_running_mean() {
        let mut e = KalmanEstimator::new(0.0, 2.0).unwrap();
        let xs = [3.0, 9.0, 4.0, 8.0, 1.0, 6.0, 2.0, 7.0, 5.0, 10.0, 11.0];
        for &x in &xs {
            e.observe(x).unwrap();
        }
        let (m, v) = two_pass(&xs);
        assert_relative_eq!(e.mean(), m, max_relative = 1e-9);
        assert_relative_eq!(e.variance(), v, max_relative = 1e-12);
    }

    #[test]
    fn tracked_estimator_reports_prior_until_warm() {
        let prior = Prior {
            mean: 100.0,
            variance: 25.0,
        };
        let mut e = TrackedEstimator::new(EstimatorKind::MeanVar, prior).unwrap();
        assert_eq!((e.mean(), e.variance()), (100.0, 25.0));
        e.observe(1.0).unwrap();
        assert_eq!(e.mean(), 100.0);
        e.observe(3.0).unwrap();
        assert_eq!((e.mean(), e.variance()), (2.0, 2.0));
    }

    fn window(samples: &[u32], capacity: u32) -> OccupancyScanWindow {
        let mut w = OccupancyScanWindow::new(samples.len().max(1), capacity).unwrap();
        for &s in samples {
            w.push(s).unwrap();
        }
        w
    }

    #[test]
    fn offered_load_examples() {
        let est = window(&[0, 0, 0, 0], 3).estimate_offered_load(2.0).unwrap();
        assert_eq!(est.mean_occupancy, 0.0);
        assert_eq!(est.saturation, 0.0);
        assert_eq!(est.arrival_rate, ArrivalRate::Rate(0.0));

        let est = window(&[1, 1, 2, 2], 3).estimate_offered_load(2.0).unwrap();
        assert_relative_eq!(est.mean_occupancy, 1.5);
        assert_eq!(est.saturation, 0.0);
        assert_eq!(est.arrival_rate, ArrivalRate::Rate(0.75));

        let est = window(&[3, 3, 3, 1], 3).estimate_offered_load(1.0).unwrap();
        assert_relative_eq!(est.mean_occupancy, 2.5);
        assert_relative_eq!(est.saturation, 0.75);
        match est.arrival_rate {
            ArrivalRate::Rate(r) => assert_relative_eq!(r, 10.0, max_relative = 1e-12),
            other => panic!("{other:?}"),
        }
        assert_relative_eq!(est.erlangs().unwrap(), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn saturated_window_has_no_rate() {
        let est = window(&[3, 3, 3], 3).estimate_offered_load(1.0).unwrap();
        assert_eq!(est.arrival_rate, ArrivalRate::Saturated);
        assert_eq!(est.erlangs(), None);
    }

    #[test]
    fn window_errors_and_ring_semantics() {
        let mut w = OccupancyScanWindow::new(3, 2).unwrap();
        assert_eq!(w.estimate_offered_load(1.0), Err(StatsError::EmptyWindow));
        assert_eq!(
            w.push(3),
            Err(StatsError::OverCapacity {
                sample: 3,
                capacity: 2
            })
        );
        for s in [0, 1, 2, 1] {
            w.push(s).unwrap();
        }
        assert_eq!(w.samples().collect::<Vec<_>>(), vec![1, 2, 1]);
        assert!(matches!(w.estimate_offered_load(0.0), Err(StatsError::Holding(_))));
        assert_eq!(OccupancyScanWindow::new(0, 1), Err(StatsError::ZeroWindow));
    }
}
