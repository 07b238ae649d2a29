//! Routing graphs built per request.
//!
//! In full-conversion networks the graph is the topology itself with one
//! log-survival cost per link. In share-per-node networks every router is
//! expanded into per-wavelength input and output ports, linked by
//! pass-through and conversion edges, and the physical links become one
//! channel edge per wavelength. Source and destination terminals attach to
//! every wavelength at zero cost.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cost::{repacking_probability, CostModel, FailureStats, HoldingStats};
use crate::graph::{Digraph, ShortestPaths};
use crate::state::{Conversion, Hop, NetworkState};
use crate::stats::{ElementStats, OfferedLoad};
use crate::topology::{ConversionMode, Element, LinkId, RouterId, Topology, Wavelength};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuxGraphError {
    #[error("unknown router {0}")]
    UnknownRouter(RouterId),
    #[error("no finite-cost path from source to destination")]
    NoPath,
    #[error("predecessor chain is broken at node {0}")]
    BrokenChain(usize),
}

/// Per-element probabilities feeding every edge cost for one request.
#[derive(Debug, Clone, PartialEq)]
pub struct CostInputs {
    pub link_failure: Vec<f64>,
    pub router_failure: Vec<f64>,
    pub link_repack: Vec<f64>,
    pub router_repack: Vec<f64>,
}

/// Knobs for turning statistics into [`CostInputs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSettings {
    pub model: CostModel,
    /// Mean holding time used to turn occupancy scans into offered load.
    pub mean_holding: f64,
    /// Estimate link repacking in full-conversion networks too (normally 0).
    pub wi_link_repacking: bool,
}

impl Default for CostSettings {
    fn default() -> Self {
        CostSettings {
            model: CostModel::default(),
            mean_holding: 1.0,
            wi_link_repacking: false,
        }
    }
}

impl CostInputs {
    /// Every probability zero.
    pub fn zero(topology: &Topology) -> Self {
        CostInputs {
            link_failure: vec![0.0; topology.link_count()],
            router_failure: vec![0.0; topology.router_count()],
            link_repack: vec![0.0; topology.link_count()],
            router_repack: vec![0.0; topology.router_count()],
        }
    }

    /// Evaluates failure and repacking probabilities for a request `s → d`
    /// from the learned statistics and current occupancy.
    pub fn from_stats(
        topology: &Topology,
        state: &NetworkState,
        stats: &ElementStats,
        settings: &CostSettings,
        s: RouterId,
        d: RouterId,
    ) -> Self {
        let (mu_h, var_h) = stats.holding_moments(s, d);
        let hs = HoldingStats { mu_h, var_h };
        let failure = |e: Element| {
            let (mu_f, var_f) = stats.failure_moments(e);
            settings
                .model
                .failure_probability(FailureStats { mu_f, var_f }, hs, state.is_failed(e))
        };
        let load = |est: Result<OfferedLoad, _>, busy: u32| -> Option<f64> {
            match est {
                Ok(l) => l.erlangs(),
                // before the first scan the current occupancy is the only evidence
                Err(_) => Some(busy as f64),
            }
        };
        let repack = |busy_after: u32, capacity: u32, rho: Option<f64>| match rho {
            Some(rho) => repacking_probability(busy_after, capacity, rho).unwrap_or(1.0),
            None => 1.0,
        };
        let spn = topology.mode() == ConversionMode::SharePerNode;

        let link_failure = topology
            .links()
            .iter()
            .map(|l| failure(Element::Link(l.id)))
            .collect();
        let router_failure = topology
            .routers()
            .iter()
            .map(|r| failure(Element::Router(r.id)))
            .collect();
        let link_repack = topology
            .links()
            .iter()
            .map(|l| {
                if !spn && !settings.wi_link_repacking {
                    return 0.0;
                }
                let cap = l.capacity();
                let busy = state.occupied_channels(l.id);
                if busy >= cap {
                    return 1.0;
                }
                let window = stats.link_window(l.id);
                let rho = load(window.estimate_offered_load(settings.mean_holding), busy);
                repack(busy + 1, cap, rho)
            })
            .collect();
        let router_repack = topology
            .routers()
            .iter()
            .map(|r| {
                if !spn {
                    return 0.0;
                }
                let cap = r.converter_count;
                let busy = state.converters_in_use(r.id);
                if busy >= cap {
                    return 1.0;
                }
                let window = stats.converter_window(r.id);
                let rho = load(window.estimate_offered_load(settings.mean_holding), busy);
                repack(busy + 1, cap, rho)
            })
            .collect();
        CostInputs {
            link_failure,
            router_failure,
            link_repack,
            router_repack,
        }
    }
}

/// Router-level graph for full-conversion networks.
#[derive(Debug, Clone, PartialEq)]
pub struct WiGraph {
    pub graph: Digraph,
    /// Physical link behind each edge, by edge index.
    pub edge_links: Vec<LinkId>,
}

impl WiGraph {
    pub fn edge_cost(&self, link: LinkId) -> f64 {
        let idx = self
            .edge_links
            .iter()
            .position(|&l| l == link)
            .expect("every link has an edge");
        self.graph.edge(idx).cost
    }
}

/// One edge per link, costed `-ln(1-F_ij) - ln(1-F_j) - ln(1-R_ij)`, or
/// `+∞` when the link has no free channel or an endpoint is down.
pub fn build_wi_graph(
    topology: &Topology,
    state: &NetworkState,
    inputs: &CostInputs,
    model: &CostModel,
    s: RouterId,
    d: RouterId,
) -> Result<WiGraph, AuxGraphError> {
    for r in [s, d] {
        if !topology.contains_router(r) {
            return Err(AuxGraphError::UnknownRouter(r));
        }
    }
    let mut graph = Digraph::new(topology.router_count());
    let mut edge_links = Vec::with_capacity(topology.link_count());
    for l in topology.links() {
        let cost = if state.link_usable(topology, l.id) {
            let f_link = inputs.link_failure[l.id.index()];
            let f_router = inputs.router_failure[l.to.index()];
            let r_link = model.thresholded(inputs.link_repack[l.id.index()]);
            let c = -(-f_link).ln_1p() - (-f_router).ln_1p() - (-r_link).ln_1p();
            c.max(0.0)
        } else {
            f64::INFINITY
        };
        graph.add_edge(l.from.index(), l.to.index(), cost, 1);
        edge_links.push(l.id);
    }
    Ok(WiGraph { graph, edge_links })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxNodeKind {
    Input,
    Output,
    SourceTerminal,
    DestTerminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxNode {
    pub kind: AuxNodeKind,
    pub router: RouterId,
    pub wavelength: Option<Wavelength>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxEdgeKind {
    Channel(LinkId),
    Conversion,
    Passthrough,
    SourceAttach,
    DestAttach,
}

/// Layered share-per-node graph for one request.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxGraph {
    pub nodes: Vec<AuxNode>,
    pub kinds: Vec<AuxEdgeKind>,
    pub graph: Digraph,
    pub source: RouterId,
    pub dest: RouterId,
    wavelengths: usize,
}

impl AuxGraph {
    fn port(&self, router: RouterId, w: Wavelength, output: bool) -> usize {
        2 * (router.index() * self.wavelengths + w.slot()) + output as usize
    }

    pub fn input(&self, router: RouterId, w: Wavelength) -> usize {
        self.port(router, w, false)
    }

    pub fn output(&self, router: RouterId, w: Wavelength) -> usize {
        self.port(router, w, true)
    }

    pub fn source_terminal(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn dest_terminal(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn count_edges(&self, pred: impl Fn(AuxEdgeKind) -> bool) -> usize {
        self.kinds.iter().filter(|&&k| pred(k)).count()
    }

    fn node_name(&self, topology: &Topology, idx: usize) -> String {
        let n = &self.nodes[idx];
        let label = topology.label(n.router);
        match (n.kind, n.wavelength) {
            (AuxNodeKind::Input, Some(w)) => format!("i_{label}_{w}"),
            (AuxNodeKind::Output, Some(w)) => format!("o_{label}_{w}"),
            (AuxNodeKind::SourceTerminal, _) => format!("r_s_{label}"),
            (AuxNodeKind::DestTerminal, _) => format!("r_d_{label}"),
            _ => format!("n{idx}"),
        }
    }

    /// Graphviz DOT rendering. Infinite edges are dashed.
    pub fn to_dot(&self, topology: &Topology) -> String {
        let mut out = String::from("digraph aux {\n  rankdir=LR;\n");
        for (i, e) in self.graph.edges().iter().enumerate() {
            let kind = match self.kinds[i] {
                AuxEdgeKind::Channel(_) => "channel",
                AuxEdgeKind::Conversion => "conversion",
                AuxEdgeKind::Passthrough => "passthrough",
                AuxEdgeKind::SourceAttach => "source_attach",
                AuxEdgeKind::DestAttach => "dest_attach",
            };
            let style = if e.cost.is_finite() { "solid" } else { "dashed" };
            let cost = if e.cost.is_finite() {
                format!("{:.6}", e.cost)
            } else {
                "inf".to_string()
            };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{cost}\", kind={kind}, style={style}];",
                self.node_name(topology, e.tail),
                self.node_name(topology, e.head),
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the layered graph with costs from the channel, conversion and
/// pass-through rules.
pub fn build_spn_graph(
    topology: &Topology,
    state: &NetworkState,
    inputs: &CostInputs,
    model: &CostModel,
    s: RouterId,
    d: RouterId,
) -> Result<AuxGraph, AuxGraphError> {
    for r in [s, d] {
        if !topology.contains_router(r) {
            return Err(AuxGraphError::UnknownRouter(r));
        }
    }
    let wl = topology.max_wavelengths() as usize;
    let n = topology.router_count();
    let mut nodes = Vec::with_capacity(2 * n * wl + 2);
    for r in topology.routers() {
        for slot in 0..wl {
            let w = Some(Wavelength::from_slot(slot));
            nodes.push(AuxNode {
                kind: AuxNodeKind::Input,
                router: r.id,
                wavelength: w,
            });
            nodes.push(AuxNode {
                kind: AuxNodeKind::Output,
                router: r.id,
                wavelength: w,
            });
        }
    }
    nodes.push(AuxNode {
        kind: AuxNodeKind::SourceTerminal,
        router: s,
        wavelength: None,
    });
    nodes.push(AuxNode {
        kind: AuxNodeKind::DestTerminal,
        router: d,
        wavelength: None,
    });
    let mut aux = AuxGraph {
        graph: Digraph::new(nodes.len()),
        nodes,
        kinds: Vec::new(),
        source: s,
        dest: d,
        wavelengths: wl,
    };
    let add = |aux: &mut AuxGraph, tail, head, cost: f64, tb, kind| {
        aux.graph.add_edge(tail, head, cost, tb);
        aux.kinds.push(kind);
    };

    for r in topology.routers() {
        let failed = state.is_failed(Element::Router(r.id));
        let f = inputs.router_failure[r.id.index()];
        let rp = inputs.router_repack[r.id.index()];
        let free_conv = state.has_free_converter(r.id);
        for v in 0..wl {
            for w in 0..wl {
                let (wv, ww) = (Wavelength::from_slot(v), Wavelength::from_slot(w));
                let tail = aux.input(r.id, wv);
                let head = aux.output(r.id, ww);
                if v == w {
                    let cost = crate::cost::spn_passthrough_edge_cost(f, failed);
                    add(&mut aux, tail, head, cost, 0, AuxEdgeKind::Passthrough);
                } else {
                    let cost = model.converter_edge_cost(f, rp, free_conv, failed);
                    add(&mut aux, tail, head, cost, 1, AuxEdgeKind::Conversion);
                }
            }
        }
    }
    for l in topology.links() {
        let f = inputs.link_failure[l.id.index()];
        let rp = inputs.link_repack[l.id.index()];
        let link_failed = state.is_failed(Element::Link(l.id));
        for slot in 0..l.wavelengths as usize {
            let w = Wavelength::from_slot(slot);
            let free = !link_failed && state.is_channel_free(l.id, w);
            let cost = model.channel_edge_cost(f, rp, free);
            let (tail, head) = (aux.output(l.from, w), aux.input(l.to, w));
            add(&mut aux, tail, head, cost, 1, AuxEdgeKind::Channel(l.id));
        }
    }
    for slot in 0..wl {
        let w = Wavelength::from_slot(slot);
        let (rs, head) = (aux.source_terminal(), aux.input(s, w));
        add(&mut aux, rs, head, 0.0, 0, AuxEdgeKind::SourceAttach);
    }
    for slot in 0..wl {
        let w = Wavelength::from_slot(slot);
        let (tail, rd) = (aux.output(d, w), aux.dest_terminal());
        add(&mut aux, tail, rd, 0.0, 0, AuxEdgeKind::DestAttach);
    }
    Ok(aux)
}

/// Physical hops and wavelength conversions of a finite-cost path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtractedPath {
    pub hops: Vec<Hop>,
    pub conversions: Vec<Conversion>,
    pub cost: f64,
}

/// Reads the `r_s → r_d` path out of a shortest-path tree rooted at `r_s`.
pub fn extract_lightpath(
    aux: &AuxGraph,
    paths: &ShortestPaths,
) -> Result<ExtractedPath, AuxGraphError> {
    let target = aux.dest_terminal();
    if paths.source != aux.source_terminal() || !paths.reachable(target) {
        return Err(AuxGraphError::NoPath);
    }
    let mut edges = Vec::new();
    let mut at = target;
    while at != paths.source {
        let e = paths.pred_edge[at].ok_or(AuxGraphError::BrokenChain(at))?;
        edges.push(e);
        at = aux.graph.edge(e).tail;
        if edges.len() > aux.graph.edges().len() {
            return Err(AuxGraphError::BrokenChain(at));
        }
    }
    edges.reverse();
    let mut out = ExtractedPath {
        cost: paths.dist[target],
        ..Default::default()
    };
    for e in edges {
        let edge = aux.graph.edge(e);
        match aux.kinds[e] {
            AuxEdgeKind::Channel(link) => out.hops.push(Hop {
                link,
                wavelength: aux.nodes[edge.tail].wavelength.expect("port node"),
            }),
            AuxEdgeKind::Conversion => out.conversions.push(Conversion {
                router: aux.nodes[edge.tail].router,
                from: aux.nodes[edge.tail].wavelength.expect("port node"),
                to: aux.nodes[edge.head].wavelength.expect("port node"),
            }),
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bellman_ford;
    use crate::state::{Lightpath, LightpathId};

    fn w(i: u16) -> Wavelength {
        Wavelength::new(i).unwrap()
    }

    fn spn(text: &str) -> Topology {
        Topology::parse(&format!("mode spn\n{text}")).unwrap()
    }

    fn fresh_stats(t: &Topology) -> ElementStats {
        use crate::stats::{Prior, StatsConfig};
        let cfg = StatsConfig {
            kind: Default::default(),
            failure_priors: vec![Prior::exponential(1000.0); t.element_count()],
            holding_prior: Prior::exponential(1.0),
            arrival_prior: Prior::exponential(1.0),
            window: 10,
        };
        ElementStats::new(t, &cfg).unwrap()
    }

    #[test]
    fn cold_start_repacking_uses_current_occupancy() {
        let t = spn("router A converters=2\nrouter B converters=2\nlink A B wavelengths=2");
        let mut st = NetworkState::new(&t);
        let stats = fresh_stats(&t);
        let settings = CostSettings::default();
        let idle = CostInputs::from_stats(&t, &st, &stats, &settings, RouterId(0), RouterId(1));
        assert_eq!(idle.router_repack, vec![0.0, 0.0]);
        assert_eq!(idle.link_repack, vec![0.0]);
        st.establish(
            &t,
            Lightpath {
                id: LightpathId(0),
                source: RouterId(0),
                dest: RouterId(1),
                hops: vec![Hop { link: LinkId(0), wavelength: w(1) }],
                conversions: vec![],
                departure: 1.0,
            },
        )
        .unwrap();
        let busy = CostInputs::from_stats(&t, &st, &stats, &settings, RouterId(0), RouterId(1));
        // last free channel with one in use and no scans: 1/x with x = 2
        assert!((busy.link_repack[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_router_counts() {
        let t = spn("router A converters=1\nrouter B converters=1\nlink A B wavelengths=2");
        let st = NetworkState::new(&t);
        let aux = build_spn_graph(
            &t,
            &st,
            &CostInputs::zero(&t),
            &CostModel::default(),
            RouterId(0),
            RouterId(1),
        )
        .unwrap();
        assert_eq!(aux.nodes.len(), 10);
        assert_eq!(aux.count_edges(|k| matches!(k, AuxEdgeKind::Channel(_))), 2);
        assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::Passthrough), 4);
        assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::Conversion), 4);
        assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::SourceAttach), 2);
        assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::DestAttach), 2);
    }

    #[test]
    fn closed_form_counts_exhaustive() {
        for n in 2..=6usize {
            for wl in 1..=4u16 {
                let mut text = String::new();
                for i in 0..n {
                    text += &format!("router R{i} converters=1\n");
                }
                let mut links = 0;
                for i in 0..n {
                    for j in 0..n {
                        if i != j && (i + j) % 2 == 1 {
                            text += &format!("link R{i} R{j} wavelengths={wl}\n");
                            links += 1;
                        }
                    }
                }
                let t = spn(&text);
                let st = NetworkState::new(&t);
                let aux = build_spn_graph(
                    &t,
                    &st,
                    &CostInputs::zero(&t),
                    &CostModel::default(),
                    RouterId(0),
                    RouterId(1),
                )
                .unwrap();
                let wl = wl as usize;
                assert_eq!(aux.nodes.len(), 2 * n * wl + 2);
                assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::Passthrough), n * wl);
                assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::Conversion), n * wl * (wl - 1));
                assert_eq!(aux.count_edges(|k| matches!(k, AuxEdgeKind::Channel(_))), links * wl);
                assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::SourceAttach), wl);
                assert_eq!(aux.count_edges(|k| k == AuxEdgeKind::DestAttach), wl);
                let again = build_spn_graph(
                    &t,
                    &st,
                    &CostInputs::zero(&t),
                    &CostModel::default(),
                    RouterId(0),
                    RouterId(1),
                )
                .unwrap();
                assert_eq!(aux, again);
            }
        }
    }

    #[test]
    fn no_converters_or_failed_router_block_edges() {
        let t = spn("router A converters=0\nrouter B converters=1\nlink A B wavelengths=2");
        let mut st = NetworkState::new(&t);
        let inputs = CostInputs::zero(&t);
        let model = CostModel::default();
        let aux = build_spn_graph(&t, &st, &inputs, &model, RouterId(0), RouterId(1)).unwrap();
        for (i, e) in aux.graph.edges().iter().enumerate() {
            let router = aux.nodes[e.tail].router;
            if aux.kinds[i] == AuxEdgeKind::Conversion {
                assert_eq!(e.cost.is_infinite(), router == RouterId(0));
            }
        }
        st.set_failed(Element::Router(RouterId(1)), true);
        let aux = build_spn_graph(&t, &st, &inputs, &model, RouterId(0), RouterId(1)).unwrap();
        for (i, e) in aux.graph.edges().iter().enumerate() {
            let on_b = aux.nodes[e.tail].router == RouterId(1)
                && matches!(aux.kinds[i], AuxEdgeKind::Conversion | AuxEdgeKind::Passthrough);
            if on_b {
                assert!(e.cost.is_infinite());
            }
        }
    }

    #[test]
    fn attach_edges_cost_zero() {
        let t = spn("router A converters=1\nrouter B converters=1\nlink A B wavelengths=3");
        let st = NetworkState::new(&t);
        let mut inputs = CostInputs::zero(&t);
        inputs.router_failure = vec![0.3, 0.3];
        let aux =
            build_spn_graph(&t, &st, &inputs, &CostModel::default(), RouterId(0), RouterId(1))
                .unwrap();
        for (i, e) in aux.graph.edges().iter().enumerate() {
            if matches!(aux.kinds[i], AuxEdgeKind::SourceAttach | AuxEdgeKind::DestAttach) {
                assert_eq!(e.cost, 0.0);
            }
        }
    }

    #[test]
    fn wi_graph_costs() {
        let t = Topology::parse(
            "router A\nrouter B\nrouter C\nlink A B wavelengths=1\nlink B C wavelengths=1\n\
             link A C wavelengths=1",
        )
        .unwrap();
        let mut st = NetworkState::new(&t);
        let model = CostModel::default();
        let zero = CostInputs::zero(&t);
        let g = build_wi_graph(&t, &st, &zero, &model, RouterId(0), RouterId(2)).unwrap();
        assert!(g.graph.edges().iter().all(|e| e.cost == 0.0));

        let mut half = CostInputs::zero(&t);
        half.link_failure[0] = 0.5;
        half.router_failure[1] = 0.5;
        let g = build_wi_graph(&t, &st, &half, &model, RouterId(0), RouterId(2)).unwrap();
        approx::assert_relative_eq!(g.edge_cost(LinkId(0)), 2.0 * 2f64.ln(), max_relative = 1e-12);

        st.establish(
            &t,
            Lightpath {
                id: LightpathId(0),
                source: RouterId(0),
                dest: RouterId(2),
                hops: vec![Hop {
                    link: LinkId(2),
                    wavelength: w(1),
                }],
                conversions: vec![],
                departure: 1.0,
            },
        )
        .unwrap();
        let g = build_wi_graph(&t, &st, &zero, &model, RouterId(0), RouterId(2)).unwrap();
        assert_eq!(g.edge_cost(LinkId(2)), f64::INFINITY);
        assert_eq!(g.edge_cost(LinkId(0)), 0.0);
        assert_eq!(g.edge_cost(LinkId(1)), 0.0);
        assert_eq!(
            build_wi_graph(&t, &st, &zero, &model, RouterId(0), RouterId(5)),
            Err(AuxGraphError::UnknownRouter(RouterId(5)))
        );
    }

    fn route(t: &Topology, st: &NetworkState, s: u32, d: u32) -> Result<ExtractedPath, AuxGraphError> {
        let aux = build_spn_graph(
            t,
            st,
            &CostInputs::zero(t),
            &CostModel::default(),
            RouterId(s),
            RouterId(d),
        )
        .unwrap();
        let sp = bellman_ford(&aux.graph, aux.source_terminal()).unwrap();
        extract_lightpath(&aux, &sp)
    }

    #[test]
    fn single_link_extracts_one_hop() {
        let t = spn("router A converters=1\nrouter B converters=1\nlink A B wavelengths=2");
        let st = NetworkState::new(&t);
        let p = route(&t, &st, 0, 1).unwrap();
        assert_eq!(
            p.hops,
            vec![Hop {
                link: LinkId(0),
                wavelength: w(1)
            }]
        );
        assert!(p.conversions.is_empty());
    }

    #[test]
    fn forced_conversion_in_the_middle() {
        let t = spn(
            "router A converters=1\nrouter B converters=1\nrouter C converters=1\n\
             link A B wavelengths=2\nlink B C wavelengths=2",
        );
        let mut st = NetworkState::new(&t);
        // A-B only has w=1 free, B-C only has w=2 free
        for (id, link, wl, s, d) in [(0, 0, 2, 0, 1), (1, 1, 1, 1, 2)] {
            st.establish(
                &t,
                Lightpath {
                    id: LightpathId(id),
                    source: RouterId(s),
                    dest: RouterId(d),
                    hops: vec![Hop {
                        link: LinkId(link),
                        wavelength: w(wl),
                    }],
                    conversions: vec![],
                    departure: 1.0,
                },
            )
            .unwrap();
        }
        let p = route(&t, &st, 0, 2).unwrap();
        assert_eq!(
            p.hops,
            vec![
                Hop {
                    link: LinkId(0),
                    wavelength: w(1)
                },
                Hop {
                    link: LinkId(1),
                    wavelength: w(2)
                }
            ]
        );
        assert_eq!(
            p.conversions,
            vec![Conversion {
                router: RouterId(1),
                from: w(1),
                to: w(2)
            }]
        );
    }

    #[test]
    fn disconnected_is_an_error() {
        let t = spn("router A converters=1\nrouter B converters=1\nlink B A wavelengths=2");
        let st = NetworkState::new(&t);
        assert_eq!(route(&t, &st, 0, 1), Err(AuxGraphError::NoPath));
    }

    #[test]
    fn dot_dump_mentions_every_edge() {
        let t = spn("router A converters=1\nrouter B converters=0\nlink A B wavelengths=2");
        let st = NetworkState::new(&t);
        let aux = build_spn_graph(
            &t,
            &st,
            &CostInputs::zero(&t),
            &CostModel::default(),
            RouterId(0),
            RouterId(1),
        )
        .unwrap();
        let dot = aux.to_dot(&t);
        assert_eq!(dot.matches(" -> ").count(), aux.graph.edges().len());
        assert!(dot.contains("\"o_A_1\" -> \"i_B_1\""));
        assert!(dot.contains("style=dashed"));
    }
}
