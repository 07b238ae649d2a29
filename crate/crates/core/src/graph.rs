//! A minimal weighted digraph and Bellman-Ford over it.
//!
//! Distances compare lexicographically on `(cost, tiebreak)`: among paths of
//! equal cost the one with the smaller summed tiebreak weight wins. Callers
//! use the tiebreak weight to count hops. Edges with infinite cost are never
//! relaxed.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub tail: usize,
    pub head: usize,
    pub cost: f64,
    pub tiebreak: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Digraph {
    node_count: usize,
    edges: Vec<WeightedEdge>,
}

impl Digraph {
    pub fn new(node_count: usize) -> Self {
        Digraph {
            node_count,
            edges: Vec::new(),
        }
    }

    /// Adds an edge and returns its index.
    pub fn add_edge(&mut self, tail: usize, head: usize, cost: f64, tiebreak: u32) -> usize {
        assert!(tail < self.node_count && head < self.node_count, "edge endpoint out of range");
        self.edges.push(WeightedEdge {
            tail,
            head,
            cost,
            tiebreak,
        });
        self.edges.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &WeightedEdge {
        &self.edges[idx]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} has negative or NaN cost {cost}")]
    NegativeEdge { edge: usize, cost: f64 },
    #[error("source node {0} out of range")]
    BadSource(usize),
}

/// Single-source shortest-path tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPaths {
    pub source: usize,
    pub dist: Vec<f64>,
    pub tiebreak: Vec<u32>,
    /// Index of the last edge on the chosen path to each node.
    pub pred_edge: Vec<Option<usize>>,
}

impl ShortestPaths {
    pub fn reachable(&self, node: usize) -> bool {
        self.dist[node].is_finite()
    }

    /// Edge indices from the source to `node`, or `None` if unreachable.
    pub fn path_edges(&self, graph: &Digraph, node: usize) -> Option<Vec<usize>> {
        if !self.reachable(node) {
            return None;
        }
        let mut edges = Vec::new();
        let mut at = node;
        while at != self.source {
            let e = self.pred_edge[at]?;
            edges.push(e);
            at = graph.edge(e).tail;
            if edges.len() > graph.node_count() {
                return None;
            }
        }
        edges.reverse();
        Some(edges)
    }

    /// Node sequence from the source to `node`.
    pub fn path_nodes(&self, graph: &Digraph, node: usize) -> Option<Vec<usize>> {
        let edges = self.path_edges(graph, node)?;
        let mut nodes = vec![self.source];
        nodes.extend(edges.iter().map(|&e| graph.edge(e).head));
        Some(nodes)
    }
}

/// Bellman-Ford from `source`. Rejects negative (or NaN) edge costs instead
/// of continuing with a corrupted tree.
pub fn bellman_ford(graph: &Digraph, source: usize) -> Result<ShortestPaths, GraphError> {
    if source >= graph.node_count {
        return Err(GraphError::BadSource(source));
    }
    for (i, e) in graph.edges.iter().enumerate() {
        if !(e.cost >= 0.0) {
            return Err(GraphError::NegativeEdge {
                edge: i,
                cost: e.cost,
            });
        }
    }
    let n = graph.node_count;
    let mut dist = vec![f64::INFINITY; n];
    let mut tiebreak = vec![u32::MAX; n];
    let mut pred_edge = vec![None; n];
    dist[source] = 0.0;
    tiebreak[source] = 0;
    for _ in 1..n.max(2) {
        let mut changed = false;
        for (i, e) in graph.edges.iter().enumerate() {
            let du = dist[e.tail];
            if !du.is_finite() || !e.cost.is_finite() {
                continue;
            }
            let cand = du + e.cost;
            let cand_tb = tiebreak[e.tail].saturating_add(e.tiebreak);
            let better = cand < dist[e.head] || (cand == dist[e.head] && cand_tb < tiebreak[e.head]);
            if better && e.head != source {
                dist[e.head] = cand;
                tiebreak[e.head] = cand_tb;
                pred_edge[e.head] = Some(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(ShortestPaths {
        source,
        dist,
        tiebreak,
        pred_edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Digraph {
        let mut g = Digraph::new(3);
        g.add_edge(0, 1, 1.0, 1);
        g.add_edge(1, 2, 1.0, 1);
        g.add_edge(0, 2, 3.0, 1);
        g
    }

    #[test]
    fn source_distance_is_zero() {
        let sp = bellman_ford(&triangle(), 0).unwrap();
        assert_eq!(sp.dist[0], 0.0);
        assert_eq!(sp.path_edges(&triangle(), 0), Some(vec![]));
    }

    #[test]
    fn triangle_goes_through_middle() {
        let g = triangle();
        let sp = bellman_ford(&g, 0).unwrap();
        assert_eq!(sp.dist[2], 2.0);
        assert_eq!(sp.path_nodes(&g, 2), Some(vec![0, 1, 2]));
    }

    #[test]
    fn unreachable_is_infinite() {
        let mut g = triangle();
        g.add_edge(0, 1, f64::INFINITY, 1);
        let sp = bellman_ford(&g, 2).unwrap();
        assert_eq!(sp.dist[0], f64::INFINITY);
        assert_eq!(sp.path_edges(&g, 0), None);
    }

    #[test]
    fn infinite_edges_are_not_used() {
        let mut g = Digraph::new(2);
        g.add_edge(0, 1, f64::INFINITY, 1);
        let sp = bellman_ford(&g, 0).unwrap();
        assert!(!sp.reachable(1));
        assert_eq!(sp.pred_edge[1], None);
    }

    #[test]
    fn equal_cost_prefers_smaller_tiebreak() {
        let mut g = Digraph::new(3);
        g.add_edge(0, 1, 0.0, 1);
        g.add_edge(1, 2, 0.0, 1);
        g.add_edge(0, 2, 0.0, 1);
        let sp = bellman_ford(&g, 0).unwrap();
        assert_eq!(sp.path_nodes(&g, 2), Some(vec![0, 2]));
    }

    #[test]
    fn negative_edge_is_an_error() {
        let mut g = triangle();
        g.add_edge(2, 0, -0.5, 1);
        assert_eq!(
            bellman_ford(&g, 0),
            Err(GraphError::NegativeEdge {
                edge: 3,
                cost: -0.5
            })
        );
        let mut g = triangle();
        g.add_edge(2, 0, f64::NAN, 1);
        assert!(bellman_ford(&g, 0).is_err());
        assert_eq!(bellman_ford(&triangle(), 7), Err(GraphError::BadSource(7)));
    }
}
