//! Route selection for lightpath requests.
//!
//! * MRPR: least total log-survival cost, i.e. the route most likely to
//!   survive until the lightpath departs.
//! * AUR: minimum-hop route over the links that currently have capacity.
//! * LLR: among candidate routes, the one whose most loaded link has the
//!   most free channels.
//!
//! Ties are resolved deterministically: lower cost, then fewer hops, then the
//! lexicographically smaller router sequence (AUR, LLR) or first relaxation in
//! edge order (MRPR). Randomness enters only through the random wavelength
//! policy.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auxgraph::{
    build_spn_graph, build_wi_graph, extract_lightpath, AuxGraphError, CostInputs, CostSettings,
    WiGraph,
};
pub use crate::graph::{bellman_ford, Digraph, GraphError, ShortestPaths};
use crate::state::{Conversion, Hop, NetworkState};
use crate::stats::ElementStats;
use crate::topology::{ConversionMode, LinkId, RouterId, Topology, Wavelength};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mrpr,
    Aur,
    Llr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Mrpr, Algorithm::Aur, Algorithm::Llr];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mrpr => "mrpr",
            Algorithm::Aur => "aur",
            Algorithm::Llr => "llr",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mrpr" => Ok(Algorithm::Mrpr),
            "aur" => Ok(Algorithm::Aur),
            "llr" => Ok(Algorithm::Llr),
            other => Err(format!("unknown algorithm `{other}` (expected mrpr, aur or llr)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WavelengthPolicy {
    #[default]
    FirstFit,
    Random,
}

impl FromStr for WavelengthPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first_fit" | "first-fit" => Ok(WavelengthPolicy::FirstFit),
            "random" => Ok(WavelengthPolicy::Random),
            other => Err(format!("unknown wavelength policy `{other}`")),
        }
    }
}

impl WavelengthPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            WavelengthPolicy::FirstFit => "first_fit",
            WavelengthPolicy::Random => "random",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    AuxGraph(#[from] AuxGraphError),
    #[error("source and destination are both {0}")]
    SameEndpoints(RouterId),
    #[error("unknown router {0}")]
    UnknownRouter(RouterId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Accepted,
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDecision {
    pub outcome: Outcome,
    pub hops: Vec<Hop>,
    pub conversions: Vec<Conversion>,
    pub total_cost: f64,
    pub algorithm: Algorithm,
}

impl RouteDecision {
    pub fn blocked(algorithm: Algorithm) -> Self {
        RouteDecision {
            outcome: Outcome::Blocked,
            hops: Vec::new(),
            conversions: Vec::new(),
            total_cost: f64::INFINITY,
            algorithm,
        }
    }

    fn accepted(algorithm: Algorithm, hops: Vec<Hop>, conversions: Vec<Conversion>, cost: f64) -> Self {
        RouteDecision {
            outcome: Outcome::Accepted,
            hops,
            conversions,
            total_cost: cost,
            algorithm,
        }
    }

    pub fn is_accepted(&self) -> bool {
        self.outcome == Outcome::Accepted
    }

    /// Router sequence of an accepted route.
    pub fn routers(&self, topology: &Topology, source: RouterId) -> Vec<RouterId> {
        std::iter::once(source)
            .chain(self.hops.iter().map(|h| topology.links()[h.link.index()].to))
            .collect()
    }
}

/// Picks one wavelength from an increasing free set.
pub fn assign_wavelength<R: Rng + ?Sized>(
    free: &[Wavelength],
    policy: WavelengthPolicy,
    rng: &mut R,
) -> Option<Wavelength> {
    match policy {
        WavelengthPolicy::FirstFit => free.iter().min().copied(),
        WavelengthPolicy::Random if free.is_empty() => None,
        WavelengthPolicy::Random => Some(free[rng.random_range(0..free.len())]),
    }
}

/// Full-conversion assignment: each hop picks independently; a conversion is
/// recorded wherever consecutive hops differ.
pub fn assign_per_hop<R: Rng + ?Sized>(
    topology: &Topology,
    links: &[LinkId],
    state: &NetworkState,
    policy: WavelengthPolicy,
    rng: &mut R,
) -> Option<(Vec<Hop>, Vec<Conversion>)> {
    let mut hops = Vec::with_capacity(links.len());
    for &link in links {
        let free: Vec<Wavelength> = state.free_wavelengths(link).collect();
        hops.push(Hop {
            link,
            wavelength: assign_wavelength(&free, policy, rng)?,
        });
    }
    Some((hops.clone(), conversions_between(topology, &hops)))
}

fn conversions_between(topology: &Topology, hops: &[Hop]) -> Vec<Conversion> {
    hops.windows(2)
        .filter(|p| p[0].wavelength != p[1].wavelength)
        .map(|p| Conversion {
            router: topology.links()[p[0].link.index()].to,
            from: p[0].wavelength,
            to: p[1].wavelength,
        })
        .collect()
}

/// Share-per-node assignment along a fixed route: wavelength continuity is
/// required except at routers with a free converter. Minimizes the number of
/// conversions; among optimal assignments first-fit takes the smallest
/// wavelength at each step and random draws uniformly.
pub fn assign_with_continuity<R: Rng + ?Sized>(
    topology: &Topology,
    links: &[LinkId],
    state: &NetworkState,
    policy: WavelengthPolicy,
    rng: &mut R,
) -> Option<(Vec<Hop>, Vec<Conversion>)> {
    const INF: u32 = u32::MAX / 2;
    if links.is_empty() {
        return None;
    }
    let wl = links
        .iter()
        .map(|&l| state.wavelengths(l) as usize)
        .max()
        .unwrap_or(0);
    let free = |i: usize, w: usize| state.is_channel_free(links[i], Wavelength::from_slot(w));
    // conversion allowed entering hop i (i ≥ 1)
    let can_convert = |i: usize| {
        let r = topology.links()[links[i - 1].index()].to;
        state.has_free_converter(r)
    };
    let k = links.len();
    let mut best = vec![vec![INF; wl]; k];
    for w in 0..wl {
        if free(k - 1, w) {
            best[k - 1][w] = 0;
        }
    }
    for i in (0..k - 1).rev() {
        let next_min = best[i + 1].iter().copied().min().unwrap_or(INF);
        let conv = can_convert(i + 1);
        for w in 0..wl {
            if !free(i, w) {
                continue;
            }
            let stay = best[i + 1][w];
            let switch = if conv { next_min.saturating_add(1) } else { INF };
            best[i][w] = stay.min(switch);
        }
    }
    let pick = |cands: &[usize], rng: &mut R| -> usize {
        match policy {
            WavelengthPolicy::FirstFit => cands[0],
            WavelengthPolicy::Random => cands[rng.random_range(0..cands.len())],
        }
    };
    let start_min = best[0].iter().copied().min()?;
    if start_min >= INF {
        return None;
    }
    let cands: Vec<usize> = (0..wl).filter(|&w| best[0][w] == start_min).collect();
    let mut w = pick(&cands, rng);
    let mut hops = vec![Hop {
        link: links[0],
        wavelength: Wavelength::from_slot(w),
    }];
    for i in 1..k {
        let remaining = best[i - 1][w];
        let conv = can_convert(i);
        let cands: Vec<usize> = (0..wl)
            .filter(|&v| {
                let step = if v == w {
                    0
                } else if conv {
                    1
                } else {
                    return false;
                };
                best[i][v] < INF && best[i][v] + step == remaining
            })
            .collect();
        w = pick(&cands, rng);
        hops.push(Hop {
            link: links[i],
            wavelength: Wavelength::from_slot(w),
        });
    }
    let conversions = conversions_between(topology, &hops);
    Some((hops, conversions))
}

/// Settings shared by all algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoutingParams {
    pub policy: WavelengthPolicy,
    pub costs: CostSettings,
}

fn check_endpoints(topology: &Topology, s: RouterId, d: RouterId) -> Result<(), RoutingError> {
    for r in [s, d] {
        if !topology.contains_router(r) {
            return Err(RoutingError::UnknownRouter(r));
        }
    }
    if s == d {
        return Err(RoutingError::SameEndpoints(s));
    }
    Ok(())
}

fn assign<R: Rng + ?Sized>(
    topology: &Topology,
    links: &[LinkId],
    state: &NetworkState,
    policy: WavelengthPolicy,
    rng: &mut R,
) -> Option<(Vec<Hop>, Vec<Conversion>)> {
    match topology.mode() {
        ConversionMode::FullConversion => assign_per_hop(topology, links, state, policy, rng),
        ConversionMode::SharePerNode => assign_with_continuity(topology, links, state, policy, rng),
    }
}

/// Minimum-reconfiguration-probability route for `s → d`.
pub fn route_mrpr<R: Rng + ?Sized>(
    topology: &Topology,
    state: &NetworkState,
    stats: &ElementStats,
    params: &RoutingParams,
    s: RouterId,
    d: RouterId,
    rng: &mut R,
) -> Result<RouteDecision, RoutingError> {
    check_endpoints(topology, s, d)?;
    let inputs = CostInputs::from_stats(topology, state, stats, &params.costs, s, d);
    route_mrpr_with_inputs(topology, state, &inputs, params, s, d, rng)
}

/// [`route_mrpr`] with precomputed element probabilities.
pub fn route_mrpr_with_inputs<R: Rng + ?Sized>(
    topology: &Topology,
    state: &NetworkState,
    inputs: &CostInputs,
    params: &RoutingParams,
    s: RouterId,
    d: RouterId,
    rng: &mut R,
) -> Result<RouteDecision, RoutingError> {
    check_endpoints(topology, s, d)?;
    let model = &params.costs.model;
    match topology.mode() {
        ConversionMode::FullConversion => {
            let wi = build_wi_graph(topology, state, inputs, model, s, d)?;
            let Some((links, cost)) = cheapest_route(&wi, s, d)? else {
                return Ok(RouteDecision::blocked(Algorithm::Mrpr));
            };
            match assign_per_hop(topology, &links, state, params.policy, rng) {
                Some((hops, conv)) => Ok(RouteDecision::accepted(Algorithm::Mrpr, hops, conv, cost)),
                None => Ok(RouteDecision::blocked(Algorithm::Mrpr)),
            }
        }
        ConversionMode::SharePerNode => {
            let aux = build_spn_graph(topology, state, inputs, model, s, d)?;
            let sp = bellman_ford(&aux.graph, aux.source_terminal())?;
            let path = match extract_lightpath(&aux, &sp) {
                Ok(p) => p,
                Err(AuxGraphError::NoPath) => return Ok(RouteDecision::blocked(Algorithm::Mrpr)),
                Err(e) => return Err(e.into()),
            };
            // a route that revisits a router is not a valid lightpath
            let mut seen = vec![s];
            for h in &path.hops {
                let to = topology.links()[h.link.index()].to;
                if seen.contains(&to) {
                    return Ok(RouteDecision::blocked(Algorithm::Mrpr));
                }
                seen.push(to);
            }
            Ok(RouteDecision::accepted(
                Algorithm::Mrpr,
                path.hops,
                path.conversions,
                path.cost,
            ))
        }
    }
}

/// Cheapest `s → d` route in a WI graph, fewest hops among equal costs.
/// Remaining ties go to the smallest next router and then link, the same rule
/// [`shortest_hop_route`] uses, so with uniform costs MRPR and AUR coincide.
fn cheapest_route(
    wi: &WiGraph,
    s: RouterId,
    d: RouterId,
) -> Result<Option<(Vec<LinkId>, f64)>, RoutingError> {
    let g = &wi.graph;
    let mut rev = Digraph::new(g.node_count());
    for e in g.edges() {
        rev.add_edge(e.head, e.tail, e.cost, e.tiebreak);
    }
    let to_d = bellman_ford(&rev, d.index())?;
    if !to_d.reachable(s.index()) {
        return Ok(None);
    }
    let mut links = Vec::new();
    let mut at = s.index();
    while at != d.index() {
        // the edge that set dist[at] satisfies this exactly, so one always exists
        let next = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tail == at && e.cost.is_finite())
            .filter(|(_, e)| {
                to_d.dist[e.head] + e.cost == to_d.dist[at]
                    && to_d.tiebreak[e.head].saturating_add(e.tiebreak) == to_d.tiebreak[at]
            })
            .map(|(i, e)| (e.head, wi.edge_links[i]))
            .min();
        let Some((v, l)) = next else {
            return Ok(None);
        };
        links.push(l);
        at = v;
    }
    Ok(Some((links, to_d.dist[s.index()])))
}

/// Lexicographically smallest minimum-hop route using only links accepted by
/// `usable`, or `None`.
pub(crate) fn shortest_hop_route(
    topology: &Topology,
    s: RouterId,
    d: RouterId,
    usable: impl Fn(LinkId) -> bool,
) -> Option<Vec<LinkId>> {
    let n = topology.router_count();
    let mut dist = vec![u32::MAX; n];
    dist[d.index()] = 0;
    let mut queue = VecDeque::from([d]);
    while let Some(v) = queue.pop_front() {
        for &l in topology.in_links(v) {
            if !usable(l) {
                continue;
            }
            let u = topology.links()[l.index()].from;
            if dist[u.index()] == u32::MAX {
                dist[u.index()] = dist[v.index()] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[s.index()] == u32::MAX {
        return None;
    }
    let mut route = Vec::new();
    let mut at = s;
    while at != d {
        let next = topology
            .out_links(at)
            .iter()
            .copied()
            .filter(|&l| usable(l))
            .map(|l| (topology.links()[l.index()].to, l))
            .filter(|(v, _)| dist[v.index()].checked_add(1) == Some(dist[at.index()]))
            .min()?;
        route.push(next.1);
        at = next.0;
    }
    Some(route)
}

/// Adaptive unconstrained routing: fewest hops over links with capacity.
pub fn route_aur<R: Rng + ?Sized>(
    topology: &Topology,
    state: &NetworkState,
    params: &RoutingParams,
    s: RouterId,
    d: RouterId,
    rng: &mut R,
) -> Result<RouteDecision, RoutingError> {
    check_endpoints(topology, s, d)?;
    let Some(links) = shortest_hop_route(topology, s, d, |l| state.link_usable(topology, l)) else {
        return Ok(RouteDecision::blocked(Algorithm::Aur));
    };
    Ok(match assign(topology, &links, state, params.policy, rng) {
        Some((hops, conv)) => {
            let cost = hops.len() as f64;
            RouteDecision::accepted(Algorithm::Aur, hops, conv, cost)
        }
        None => RouteDecision::blocked(Algorithm::Aur),
    })
}

/// Router count up to which LLR considers every simple path.
pub const LLR_EXHAUSTIVE_ROUTERS: usize = 8;
/// Candidate count for larger networks.
pub const LLR_K: usize = 5;

/// A loop-free route as router and link sequences.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidatePath {
    pub routers: Vec<RouterId>,
    pub links: Vec<LinkId>,
}

impl CandidatePath {
    fn key(&self) -> (usize, &[RouterId]) {
        (self.links.len(), &self.routers)
    }
}

/// Static candidate routes per ordered router pair, sorted by hop count and
/// then router sequence.
#[derive(Debug, Clone, Default)]
pub struct LlrCandidates {
    by_pair: BTreeMap<(RouterId, RouterId), Vec<CandidatePath>>,
}

impl LlrCandidates {
    pub fn new(topology: &Topology) -> Self {
        let mut by_pair = BTreeMap::new();
        for s in topology.routers() {
            for d in topology.routers() {
                if s.id == d.id {
                    continue;
                }
                let mut paths = if topology.router_count() <= LLR_EXHAUSTIVE_ROUTERS {
                    all_simple_paths(topology, s.id, d.id)
                } else {
                    k_shortest_hop_paths(topology, s.id, d.id, LLR_K)
                };
                paths.sort_by(|a, b| a.key().cmp(&b.key()));
                by_pair.insert((s.id, d.id), paths);
            }
        }
        LlrCandidates { by_pair }
    }

    pub fn paths(&self, s: RouterId, d: RouterId) -> &[CandidatePath] {
        self.by_pair.get(&(s, d)).map_or(&[], |v| v.as_slice())
    }
}

/// Every simple path from `s` to `d`, depth-first.
pub fn all_simple_paths(topology: &Topology, s: RouterId, d: RouterId) -> Vec<CandidatePath> {
    fn dfs(
        t: &Topology,
        d: RouterId,
        routers: &mut Vec<RouterId>,
        links: &mut Vec<LinkId>,
        out: &mut Vec<CandidatePath>,
    ) {
        let at = *routers.last().expect("nonempty");
        if at == d {
            out.push(CandidatePath {
                routers: routers.clone(),
                links: links.clone(),
            });
            return;
        }
        for &l in t.out_links(at) {
            let next = t.links()[l.index()].to;
            if routers.contains(&next) {
                continue;
            }
            routers.push(next);
            links.push(l);
            dfs(t, d, routers, links, out);
            routers.pop();
            links.pop();
        }
    }
    let mut out = Vec::new();
    dfs(topology, d, &mut vec![s], &mut Vec::new(), &mut out);
    out
}

/// Yen's algorithm with hop count as the path length.
pub fn k_shortest_hop_paths(
    topology: &Topology,
    s: RouterId,
    d: RouterId,
    k: usize,
) -> Vec<CandidatePath> {
    let to_path = |links: Vec<LinkId>, start: RouterId| {
        let mut routers = vec![start];
        routers.extend(links.iter().map(|l| topology.links()[l.index()].to));
        CandidatePath { routers, links }
    };
    let Some(first) = shortest_hop_route(topology, s, d, |_| true) else {
        return Vec::new();
    };
    let mut accepted = vec![to_path(first, s)];
    let mut pending: Vec<CandidatePath> = Vec::new();
    while accepted.len() < k {
        let prev = accepted.last().expect("nonempty").clone();
        for i in 0..prev.links.len() {
            let spur = prev.routers[i];
            let root_routers = &prev.routers[..=i];
            let root_links = &prev.links[..i];
            let banned_links: Vec<LinkId> = accepted
                .iter()
                .chain(pending.iter())
                .filter(|p| p.routers.len() > i + 1 && p.routers[..=i] == *root_routers)
                .map(|p| p.links[i])
                .collect();
            let banned_routers = &root_routers[..i];
            let spur_route = shortest_hop_route(topology, spur, d, |l| {
                let link = &topology.links()[l.index()];
                !banned_links.contains(&l)
                    && !banned_routers.contains(&link.from)
                    && !banned_routers.contains(&link.to)
            });
            if let Some(spur_links) = spur_route {
                let mut links = root_links.to_vec();
                links.extend(spur_links);
                let cand = to_path(links, s);
                if !accepted.contains(&cand) && !pending.contains(&cand) {
                    pending.push(cand);
                }
            }
        }
        if pending.is_empty() {
            break;
        }
        let best = (0..pending.len())
            .min_by(|&a, &b| pending[a].key().cmp(&pending[b].key()))
            .expect("nonempty");
        accepted.push(pending.swap_remove(best));
    }
    accepted
}

/// Least-loaded routing: the candidate whose bottleneck link has the most
/// free channels; ties go to fewer hops, then router order.
pub fn route_llr<R: Rng + ?Sized>(
    topology: &Topology,
    state: &NetworkState,
    candidates: &LlrCandidates,
    params: &RoutingParams,
    s: RouterId,
    d: RouterId,
    rng: &mut R,
) -> Result<RouteDecision, RoutingError> {
    check_endpoints(topology, s, d)?;
    let mut best: Option<(u32, &CandidatePath)> = None;
    for path in candidates.paths(s, d) {
        let mut bottleneck = u32::MAX;
        for &l in &path.links {
            if !state.link_usable(topology, l) {
                bottleneck = 0;
                break;
            }
            bottleneck = bottleneck.min(state.free_channels(l));
        }
        if bottleneck == 0 {
            continue;
        }
        if best.is_none_or(|(b, _)| bottleneck > b) {
            best = Some((bottleneck, path));
        }
    }
    // in share-per-node networks the best bottleneck may still fail
    // continuity; fall back through the remaining candidates in order
    let mut ordered: Vec<(u32, &CandidatePath)> = candidates
        .paths(s, d)
        .iter()
        .filter_map(|p| {
            let b = p
                .links
                .iter()
                .map(|&l| {
                    if state.link_usable(topology, l) {
                        state.free_channels(l)
                    } else {
                        0
                    }
                })
                .min()?;
            (b > 0).then_some((b, p))
        })
        .collect();
    if best.is_none() {
        return Ok(RouteDecision::blocked(Algorithm::Llr));
    }
    ordered.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.key().cmp(&b.1.key())));
    for (_, path) in ordered {
        if let Some((hops, conv)) = assign(topology, &path.links, state, params.policy, rng) {
            let cost = hops.len() as f64;
            return Ok(RouteDecision::accepted(Algorithm::Llr, hops, conv, cost));
        }
    }
    Ok(RouteDecision::blocked(Algorithm::Llr))
}

/// Dispatches requests to one algorithm, caching what it needs.
#[derive(Debug, Clone)]
pub struct RoutingEngine {
    pub algorithm: Algorithm,
    pub params: RoutingParams,
    llr: Option<LlrCandidates>,
}

impl RoutingEngine {
    pub fn new(topology: &Topology, algorithm: Algorithm, params: RoutingParams) -> Self {
        let llr = (algorithm == Algorithm::Llr).then(|| LlrCandidates::new(topology));
        RoutingEngine {
            algorithm,
            params,
            llr,
        }
    }

    pub fn route<R: Rng + ?Sized>(
        &self,
        topology: &Topology,
        state: &NetworkState,
        stats: &ElementStats,
        s: RouterId,
        d: RouterId,
        rng: &mut R,
    ) -> Result<RouteDecision, RoutingError> {
        match self.algorithm {
            Algorithm::Mrpr => route_mrpr(topology, state, stats, &self.params, s, d, rng),
            Algorithm::Aur => route_aur(topology, state, &self.params, s, d, rng),
            Algorithm::Llr => {
                let cands = self.llr.as_ref().expect("built for llr");
                route_llr(topology, state, cands, &self.params, s, d, rng)
            }
        }
    }
}
