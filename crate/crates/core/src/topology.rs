//! Physical substrate: core nodes, bidirectional links with distances, and
//! the PON attachment plan per node. Per-link amplifier and regenerator
//! counts derive from link distance alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, NodeId, Result};

/// Undirected link key with endpoints stored low-to-high.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkKey(pub NodeId, pub NodeId);

impl LinkKey {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            LinkKey(a, b)
        } else {
            LinkKey(b, a)
        }
    }
}

impl std::fmt::Display for LinkKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Core IP-over-WDM topology. Immutable after construction; evaluation
/// workers share it read-only.
#[derive(Debug, Clone)]
pub struct CoreTopology {
    nodes: Vec<NodeId>,
    links: BTreeMap<LinkKey, f64>,
    neighbors: BTreeMap<NodeId, Vec<NodeId>>,
    /// EDFA reach S, in km.
    pub span_km: f64,
    /// Regenerator reach R, in km.
    pub regen_reach_km: f64,
    /// Wavelengths per fiber.
    pub wavelengths_per_fiber: u32,
    /// Wavelength line rate, in Mbps.
    pub wavelength_rate_mbps: f64,
}

impl CoreTopology {
    pub fn new(
        nodes: Vec<NodeId>,
        links: Vec<(NodeId, NodeId, f64)>,
        span_km: f64,
        regen_reach_km: f64,
        wavelengths_per_fiber: u32,
        wavelength_rate_mbps: f64,
    ) -> Result<Self> {
        if span_km <= 0.0 || regen_reach_km <= 0.0 {
            return Err(Error::InvalidParameter(
                "span_km and regen_reach_km must be strictly positive".into(),
            ));
        }
        if wavelengths_per_fiber == 0 || wavelength_rate_mbps <= 0.0 {
            return Err(Error::InvalidParameter(
                "wavelength capacity parameters must be strictly positive".into(),
            ));
        }
        let mut sorted_nodes = nodes;
        sorted_nodes.sort_unstable();
        sorted_nodes.dedup();
        if sorted_nodes.is_empty() {
            return Err(Error::InvalidScenario("topology has no nodes".into()));
        }

        let mut link_map = BTreeMap::new();
        let mut neighbors: BTreeMap<NodeId, Vec<NodeId>> =
            sorted_nodes.iter().map(|&n| (n, Vec::new())).collect();
        for (a, b, dist) in links {
            if a == b {
                return Err(Error::InvalidScenario(format!("self-link at node {a}")));
            }
            if !neighbors.contains_key(&a) || !neighbors.contains_key(&b) {
                return Err(Error::InvalidScenario(format!(
                    "link {a}-{b} references a node missing from the node list"
                )));
            }
            if dist <= 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "link {a}-{b} has nonpositive distance {dist}"
                )));
            }
            if link_map.insert(LinkKey::new(a, b), dist).is_some() {
                return Err(Error::InvalidScenario(format!("duplicate link {a}-{b}")));
            }
        }
        for (&LinkKey(a, b), _) in &link_map {
            neighbors.get_mut(&a).unwrap().push(b);
            neighbors.get_mut(&b).unwrap().push(a);
        }
        for list in neighbors.values_mut() {
            list.sort_unstable();
        }

        Ok(CoreTopology {
            nodes: sorted_nodes,
            links: link_map,
            neighbors,
            span_km,
            regen_reach_km,
            wavelengths_per_fiber,
            wavelength_rate_mbps,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.binary_search(&n).is_ok()
    }

    pub fn links(&self) -> &BTreeMap<LinkKey, f64> {
        &self.links
    }

    pub fn link_distance_km(&self, key: LinkKey) -> Option<f64> {
        self.links.get(&key).copied()
    }

    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        self.neighbors.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    /// In-line EDFAs on each link, per the clamped span formula.
    pub fn link_edfas(&self, key: LinkKey) -> Option<u32> {
        self.link_distance_km(key)
            .map(|d| edfa_count(d, self.span_km).expect("valid link distance"))
    }

    /// Regenerators on each link, per the clamped reach formula.
    pub fn link_regens(&self, key: LinkKey) -> Option<u32> {
        self.link_distance_km(key)
            .map(|d| regen_count(d, self.regen_reach_km).expect("valid link distance"))
    }

    /// Min-hop path from `src` to `dst` as an ordered list of directed hops.
    /// Among equal-hop paths the lexicographically smallest node-id sequence
    /// is returned. `src == dst` yields the empty path.
    pub fn min_hop_path(&self, src: NodeId, dst: NodeId) -> Result<Vec<(NodeId, NodeId)>> {
        if !self.contains_node(src) || !self.contains_node(dst) {
            return Err(Error::InvalidParameter(format!(
                "path endpoints {src}, {dst} must be topology nodes"
            )));
        }
        if src == dst {
            return Ok(Vec::new());
        }
        let dist = self.bfs_distances(dst);
        let mut cur = src;
        let mut cur_d = *dist.get(&src).ok_or(Error::NoPath { src, dst })?;
        let mut hops = Vec::with_capacity(cur_d as usize);
        // Walk toward dst, always taking the smallest neighbor id that still
        // lies on a shortest path.
        while cur != dst {
            let next = self
                .neighbors(cur)
                .iter()
                .copied()
                .find(|n| dist.get(n) == Some(&(cur_d - 1)))
                .expect("BFS distance map admits a descending neighbor");
            hops.push((cur, next));
            cur = next;
            cur_d -= 1;
        }
        Ok(hops)
    }

    /// BFS hop distances from `origin` to every reachable node.
    pub fn bfs_distances(&self, origin: NodeId) -> BTreeMap<NodeId, u32> {
        let mut dist = BTreeMap::new();
        dist.insert(origin, 0u32);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(origin);
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            for &m in self.neighbors(n) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(m) {
                    e.insert(d + 1);
                    queue.push_back(m);
                }
            }
        }
        dist
    }

    /// All-pairs hop counts. Errors if the topology is disconnected.
    pub fn hop_matrix(&self) -> Result<HopMatrix> {
        let mut hops = BTreeMap::new();
        for &s in &self.nodes {
            let dist = self.bfs_distances(s);
            if dist.len() != self.nodes.len() {
                let missing = self
                    .nodes
                    .iter()
                    .copied()
                    .find(|n| !dist.contains_key(n))
                    .unwrap();
                return Err(Error::NoPath { src: s, dst: missing });
            }
            for (&d, &h) in &dist {
                hops.insert((s, d), h);
            }
        }
        Ok(HopMatrix { hops })
    }
}

/// Precomputed all-pairs hop counts.
#[derive(Debug, Clone)]
pub struct HopMatrix {
    hops: BTreeMap<(NodeId, NodeId), u32>,
}

impl HopMatrix {
    pub fn hops(&self, s: NodeId, d: NodeId) -> u32 {
        self.hops[&(s, d)]
    }

    /// Nearest member of `sites` to `d` by hop count, lowest node id on ties.
    pub fn nearest_site(&self, sites: &[NodeId], d: NodeId) -> Option<NodeId> {
        sites
            .iter()
            .copied()
            .min_by_key(|&s| (self.hops(s, d), s))
    }
}

/// PON attachment per core node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttachmentPlan {
    /// PON networks attached to each core node.
    pub pons_per_node: u32,
    /// ONUs in each PON.
    pub onus_per_pon: u32,
    /// OLTs in each PON.
    pub olts_per_pon: u32,
    /// Aggregate OLT capacity per PON, in Mbps.
    pub olt_capacity_mbps: f64,
}

impl AttachmentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.pons_per_node < 1 {
            return Err(Error::InvalidScenario(
                "pons_per_node must be at least 1".into(),
            ));
        }
        if self.onus_per_pon == 0 || self.olts_per_pon == 0 || self.olt_capacity_mbps <= 0.0 {
            return Err(Error::InvalidScenario(
                "PON counts and capacities must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Number of in-line EDFAs on a link: max(0, floor(D/S - 1)).
pub fn edfa_count(distance_km: f64, span_km: f64) -> Result<u32> {
    Ok(edfa_count_literal(distance_km, span_km)?.max(0) as u32)
}

/// The span formula without the clamp; negative for links shorter than 2S.
pub fn edfa_count_literal(distance_km: f64, span_km: f64) -> Result<i64> {
    if distance_km <= 0.0 || span_km <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "distance ({distance_km}) and span ({span_km}) must be strictly positive"
        )));
    }
    Ok((distance_km / span_km - 1.0).floor() as i64)
}

/// Number of regenerators on a link: max(0, floor(D/R - 1)).
pub fn regen_count(distance_km: f64, regen_reach_km: f64) -> Result<u32> {
    Ok(regen_count_literal(distance_km, regen_reach_km)?.max(0) as u32)
}

/// The reach formula without the clamp.
pub fn regen_count_literal(distance_km: f64, regen_reach_km: f64) -> Result<i64> {
    if distance_km <= 0.0 || regen_reach_km <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "distance ({distance_km}) and reach ({regen_reach_km}) must be strictly positive"
        )));
    }
    Ok((distance_km / regen_reach_km - 1.0).floor() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> CoreTopology {
        CoreTopology::new(
            vec![1, 2, 3],
            vec![(1, 2, 100.0), (2, 3, 100.0), (1, 3, 100.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap()
    }

    #[test]
    fn edfa_formula_matches_span_table() {
        assert_eq!(edfa_count(160.0, 80.0).unwrap(), 1);
        assert_eq!(edfa_count(80.0, 80.0).unwrap(), 0);
        // short link: the literal formula goes to -1, clamped to zero
        assert_eq!(edfa_count(50.0, 80.0).unwrap(), 0);
        assert_eq!(edfa_count_literal(50.0, 80.0).unwrap(), -1);
    }

    #[test]
    fn regen_formula_matches_reach_table() {
        assert_eq!(regen_count(4500.0, 2000.0).unwrap(), 1);
        assert_eq!(regen_count(2000.0, 2000.0).unwrap(), 0);
        assert_eq!(regen_count(500.0, 2000.0).unwrap(), 0);
        assert_eq!(regen_count_literal(500.0, 2000.0).unwrap(), -1);
    }

    #[test]
    fn nonpositive_inputs_are_rejected() {
        assert!(edfa_count(0.0, 80.0).is_err());
        assert!(edfa_count(100.0, 0.0).is_err());
        assert!(regen_count(-5.0, 2000.0).is_err());
    }

    #[test]
    fn min_hop_direct_link_wins_on_triangle() {
        let t = triangle();
        assert_eq!(t.min_hop_path(1, 3).unwrap(), vec![(1, 3)]);
    }

    #[test]
    fn min_hop_on_path_graph() {
        let t = CoreTopology::new(
            vec![1, 2, 3],
            vec![(1, 2, 100.0), (2, 3, 100.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap();
        assert_eq!(t.min_hop_path(1, 3).unwrap(), vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn min_hop_zero_length_path() {
        let t = CoreTopology::new(
            vec![4, 5],
            vec![(4, 5, 100.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap();
        assert_eq!(t.min_hop_path(5, 5).unwrap(), Vec::new());
    }

    #[test]
    fn min_hop_prefers_lexicographically_smallest_sequence() {
        // 1 -> 4 via 2 or via 3, both two hops: the walk through node 2 wins.
        let t = CoreTopology::new(
            vec![1, 2, 3, 4],
            vec![(1, 2, 1.0), (1, 3, 1.0), (2, 4, 1.0), (3, 4, 1.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap();
        assert_eq!(t.min_hop_path(1, 4).unwrap(), vec![(1, 2), (2, 4)]);
    }

    #[test]
    fn disconnected_pair_reports_no_path() {
        let t = CoreTopology::new(
            vec![1, 2, 3, 4],
            vec![(1, 2, 1.0), (3, 4, 1.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap();
        assert!(matches!(
            t.min_hop_path(1, 4),
            Err(Error::NoPath { src: 1, dst: 4 })
        ));
        assert!(t.hop_matrix().is_err());
    }

    #[test]
    fn neighbors_are_symmetric_with_links() {
        let t = triangle();
        for (&LinkKey(a, b), _) in t.links() {
            assert!(t.neighbors(a).contains(&b));
            assert!(t.neighbors(b).contains(&a));
        }
    }
}
