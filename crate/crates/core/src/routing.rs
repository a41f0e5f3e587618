//! Non-bypass core routing: map the cloud demand matrix onto the physical
//! links by minimum-hop paths and dimension wavelengths, fibers and
//! aggregation ports.

use std::collections::BTreeMap;

use crate::topology::{CoreTopology, LinkKey};
use crate::{Error, NodeId, Result};

/// How aggregation-port counts (and only those) are sized.
///
/// `Ceil` rounds traffic/port-rate up per node, consistent with integral
/// hardware. `Fractional` keeps the quotient as typeset in the model
/// equations, for solver-parity experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggPortMode {
    #[default]
    Ceil,
    Fractional,
}

impl AggPortMode {
    pub fn size(self, traffic: f64, rate: f64) -> f64 {
        match self {
            AggPortMode::Ceil => (traffic / rate).ceil(),
            AggPortMode::Fractional => traffic / rate,
        }
    }
}

/// Wavelength grooming granularity on physical links.
///
/// Demands sharing a link share wavelength capacity by default (aggregate
/// then round up). The strict variant gives every (s, d) demand its own
/// wavelength allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroomingMode {
    #[default]
    Aggregate,
    PerDemand,
}

/// One routed commodity.
#[derive(Debug, Clone)]
pub struct Flow {
    pub src: NodeId,
    pub dst: NodeId,
    pub traffic_mbps: f64,
    pub hops: Vec<(NodeId, NodeId)>,
}

/// Routed core network state: per-link loads and equipment counts plus the
/// per-node aggregation ports.
#[derive(Debug, Clone, Default)]
pub struct CoreState {
    pub flows: Vec<Flow>,
    pub link_traffic_mbps: BTreeMap<LinkKey, f64>,
    pub wavelengths: BTreeMap<LinkKey, u32>,
    pub fibers: BTreeMap<LinkKey, u32>,
    /// R^(AC): ports aggregating cloud traffic at each cloud node.
    pub agg_ports_cloud: BTreeMap<NodeId, f64>,
    /// R^(AE): ports aggregating traffic toward the metro, already scaled by
    /// the metro router redundancy.
    pub agg_ports_edge: BTreeMap<NodeId, f64>,
}

impl CoreState {
    pub fn total_wavelengths(&self) -> u64 {
        self.wavelengths.values().map(|&w| w as u64).sum()
    }

    /// Independent re-check of flow conservation and fiber capacity.
    ///
    /// Every stored flow must be a contiguous src-to-dst walk whose
    /// intermediate nodes balance in and out, and no link may carry more
    /// wavelengths than its fibers provide.
    pub fn verify(&self, topo: &CoreTopology) -> Result<()> {
        for flow in &self.flows {
            let mut balance: BTreeMap<NodeId, f64> = BTreeMap::new();
            for &(a, b) in &flow.hops {
                if topo.link_distance_km(LinkKey::new(a, b)).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "flow {}->{} uses nonexistent link {a}-{b}",
                        flow.src, flow.dst
                    )));
                }
                *balance.entry(a).or_insert(0.0) += flow.traffic_mbps;
                *balance.entry(b).or_insert(0.0) -= flow.traffic_mbps;
            }
            for (&node, &net_out) in &balance {
                let expected = if node == flow.src {
                    flow.traffic_mbps
                } else if node == flow.dst {
                    -flow.traffic_mbps
                } else {
                    0.0
                };
                if (net_out - expected).abs() > 1e-6 {
                    return Err(Error::InvalidParameter(format!(
                        "flow conservation broken at node {node} for {}->{}",
                        flow.src, flow.dst
                    )));
                }
            }
        }
        for (link, &w) in &self.wavelengths {
            let fibers = self.fibers.get(link).copied().unwrap_or(0);
            if w as u64 > fibers as u64 * topo.wavelengths_per_fiber as u64 {
                return Err(Error::InvalidParameter(format!(
                    "link {link} carries {w} wavelengths over {fibers} fiber(s)"
                )));
            }
        }
        Ok(())
    }
}

/// Route every entry of the cloud demand matrix on its min-hop path and size
/// the optical layer and aggregation ports.
///
/// `metro_redundancy` is the metro router redundancy factor applied to the
/// edge aggregation ports.
pub fn route_all(
    cloud_demand: &BTreeMap<(NodeId, NodeId), f64>,
    topo: &CoreTopology,
    metro_redundancy: f64,
    agg_mode: AggPortMode,
    grooming: GroomingMode,
) -> Result<CoreState> {
    let mut state = CoreState::default();
    let mut per_demand_wavelengths: BTreeMap<LinkKey, u64> = BTreeMap::new();
    let mut from_cloud: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut to_node: BTreeMap<NodeId, f64> = BTreeMap::new();

    for (&(s, d), &traffic) in cloud_demand {
        if traffic < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "negative demand on ({s},{d})"
            )));
        }
        if traffic == 0.0 {
            continue;
        }
        *from_cloud.entry(s).or_insert(0.0) += traffic;
        *to_node.entry(d).or_insert(0.0) += traffic;
        // Same-node service consumes aggregation ports only.
        let hops = topo.min_hop_path(s, d)?;
        for &(a, b) in &hops {
            let key = LinkKey::new(a, b);
            *state.link_traffic_mbps.entry(key).or_insert(0.0) += traffic;
            *per_demand_wavelengths.entry(key).or_insert(0) +=
                (traffic / topo.wavelength_rate_mbps).ceil() as u64;
        }
        state.flows.push(Flow {
            src: s,
            dst: d,
            traffic_mbps: traffic,
            hops,
        });
    }

    for (&key, &traffic) in &state.link_traffic_mbps {
        let w = match grooming {
            GroomingMode::Aggregate => (traffic / topo.wavelength_rate_mbps).ceil() as u32,
            GroomingMode::PerDemand => per_demand_wavelengths[&key] as u32,
        };
        let fibers = (w as f64 / topo.wavelengths_per_fiber as f64).ceil() as u32;
        state.wavelengths.insert(key, w);
        state.fibers.insert(key, fibers);
    }

    for (&s, &traffic) in &from_cloud {
        state
            .agg_ports_cloud
            .insert(s, agg_mode.size(traffic, topo.wavelength_rate_mbps));
    }
    for (&d, &traffic) in &to_node {
        state.agg_ports_edge.insert(
            d,
            metro_redundancy * agg_mode.size(traffic, topo.wavelength_rate_mbps),
        );
    }

    state.verify(topo)?;
    Ok(state)
}

/// BFS hop count between two nodes.
pub fn core_hop_count(topo: &CoreTopology, s: NodeId, d: NodeId) -> Result<u32> {
    topo.bfs_distances(s)
        .get(&d)
        .copied()
        .ok_or(Error::NoPath { src: s, dst: d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: u32) -> CoreTopology {
        let nodes: Vec<NodeId> = (1..=n).collect();
        let links = (1..n).map(|i| (i, i + 1, 160.0)).collect();
        CoreTopology::new(nodes, links, 80.0, 2000.0, 32, 40_000.0).unwrap()
    }

    #[test]
    fn two_hop_demand_lights_both_links() {
        let topo = line(3);
        let mut l = BTreeMap::new();
        l.insert((1, 3), 52_000.0);
        let st = route_all(&l, &topo, 2.0, AggPortMode::Ceil, GroomingMode::Aggregate).unwrap();
        for key in [LinkKey(1, 2), LinkKey(2, 3)] {
            assert_eq!(st.wavelengths[&key], 2); // ceil(52/40)
            assert_eq!(st.fibers[&key], 1);
        }
        assert_eq!(st.agg_ports_cloud[&1], 2.0);
        assert_eq!(st.agg_ports_edge[&3], 4.0); // redundancy 2 * ceil(52/40)
    }

    #[test]
    fn zero_demand_routes_to_nothing() {
        let topo = line(3);
        let st = route_all(
            &BTreeMap::new(),
            &topo,
            2.0,
            AggPortMode::Ceil,
            GroomingMode::Aggregate,
        )
        .unwrap();
        assert!(st.wavelengths.is_empty());
        assert!(st.agg_ports_cloud.is_empty());
        assert_eq!(st.total_wavelengths(), 0);
    }

    #[test]
    fn shared_link_grooms_before_rounding() {
        let topo = line(2);
        let mut l = BTreeMap::new();
        l.insert((1, 2), 30_000.0);
        let mut l2 = l.clone();
        l2.insert((1, 2), 30_000.0 + 20_000.0); // aggregated demand 50 Gbps
        let st = route_all(&l2, &topo, 2.0, AggPortMode::Ceil, GroomingMode::Aggregate).unwrap();
        assert_eq!(st.wavelengths[&LinkKey(1, 2)], 2); // ceil(50/40), not 1+1

        // strict per-demand isolation: model the same split as two demands by
        // routing 30 and 20 Gbps from the two endpoints of a 3-node line
        let topo3 = line(3);
        let mut l3 = BTreeMap::new();
        l3.insert((1, 2), 30_000.0);
        l3.insert((3, 2), 20_000.0);
        let strict = route_all(
            &l3,
            &topo3,
            2.0,
            AggPortMode::Ceil,
            GroomingMode::PerDemand,
        )
        .unwrap();
        let groomed = route_all(
            &l3,
            &topo3,
            2.0,
            AggPortMode::Ceil,
            GroomingMode::Aggregate,
        )
        .unwrap();
        assert!(strict.total_wavelengths() >= groomed.total_wavelengths());
    }

    #[test]
    fn same_node_demand_consumes_ports_only() {
        let topo = line(2);
        let mut l = BTreeMap::new();
        l.insert((1, 1), 10_000.0);
        let st = route_all(&l, &topo, 2.0, AggPortMode::Ceil, GroomingMode::Aggregate).unwrap();
        assert!(st.link_traffic_mbps.is_empty());
        assert_eq!(st.agg_ports_cloud[&1], 1.0);
        assert_eq!(st.agg_ports_edge[&1], 2.0);
    }

    #[test]
    fn fractional_mode_keeps_quotients() {
        let topo = line(2);
        let mut l = BTreeMap::new();
        l.insert((1, 2), 10_000.0);
        let st = route_all(
            &l,
            &topo,
            2.0,
            AggPortMode::Fractional,
            GroomingMode::Aggregate,
        )
        .unwrap();
        assert_eq!(st.agg_ports_cloud[&1], 0.25);
        assert_eq!(st.agg_ports_edge[&2], 0.5);
        // wavelengths stay integral regardless
        assert_eq!(st.wavelengths[&LinkKey(1, 2)], 1);
    }

    #[test]
    fn unreachable_demand_is_an_error() {
        let topo = CoreTopology::new(
            vec![1, 2, 3, 4],
            vec![(1, 2, 100.0), (3, 4, 100.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap();
        let mut l = BTreeMap::new();
        l.insert((1, 4), 100.0);
        assert!(matches!(
            route_all(&l, &topo, 2.0, AggPortMode::Ceil, GroomingMode::Aggregate),
            Err(Error::NoPath { .. })
        ));
    }

    #[test]
    fn removing_a_demand_never_increases_counts() {
        let topo = line(4);
        let mut l = BTreeMap::new();
        l.insert((1, 4), 30_000.0);
        l.insert((2, 4), 25_000.0);
        let full = route_all(&l, &topo, 2.0, AggPortMode::Ceil, GroomingMode::Aggregate).unwrap();
        l.remove(&(2, 4));
        let less = route_all(&l, &topo, 2.0, AggPortMode::Ceil, GroomingMode::Aggregate).unwrap();
        for (k, w) in &less.wavelengths {
            assert!(w <= &full.wavelengths[k]);
        }
        assert!(less.total_wavelengths() <= full.total_wavelengths());
    }

    #[test]
    fn hop_count_matches_path_length() {
        let topo = line(5);
        assert_eq!(core_hop_count(&topo, 1, 5).unwrap(), 4);
        assert_eq!(core_hop_count(&topo, 3, 3).unwrap(), 0);
        assert_eq!(
            topo.min_hop_path(1, 5).unwrap().len(),
            core_hop_count(&topo, 1, 5).unwrap() as usize
        );
    }
}
