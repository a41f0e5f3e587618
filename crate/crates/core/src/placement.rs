//! Candidate solutions: which replicas exist where, how each demand unit is
//! served, and validation of the serving/replica constraints.

use std::collections::{BTreeMap, BTreeSet};

use crate::catalog::{DemandMatrix, LinearMode, VmSpec};
use crate::{NodeId, PonIndex, Result, VmId};

/// A serving location for VM traffic.
///
/// The ordering (clouds first, then metro fogs, then access fogs) is the
/// canonical tie-break order used when optimizers compare otherwise equal
/// placements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Cloud(NodeId),
    MetroFog(NodeId),
    AccessFog { node: NodeId, pon: PonIndex },
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Cloud(s) => write!(f, "cloud@{s}"),
            Location::MetroFog(s) => write!(f, "metro_fog@{s}"),
            Location::AccessFog { node, pon } => write!(f, "access_fog@{node}/{pon}"),
        }
    }
}

/// One serving entry: part of the demand of (vm, pon, node) assigned to a
/// location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Serving {
    pub vm: VmId,
    pub node: NodeId,
    pub pon: PonIndex,
    pub location: Location,
    pub traffic_mbps: f64,
}

/// A candidate placement: replica indicator sets plus the serving map.
/// Replica sets are derived from servings by the constructor; a placement
/// loaded from files may carry explicit sets, which the validator checks
/// against the servings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Placement {
    pub cloud_replicas: BTreeSet<(VmId, NodeId)>,
    pub metro_fog_replicas: BTreeSet<(VmId, NodeId)>,
    pub access_fog_replicas: BTreeSet<(VmId, NodeId, PonIndex)>,
    pub servings: Vec<Serving>,
}

impl Placement {
    /// Build a placement whose replica sets are exactly the locations that
    /// serve strictly positive traffic.
    pub fn from_servings(mut servings: Vec<Serving>) -> Self {
        servings.sort_by(|a, b| {
            (a.vm, a.node, a.pon, a.location)
                .partial_cmp(&(b.vm, b.node, b.pon, b.location))
                .unwrap()
        });
        let mut p = Placement {
            servings,
            ..Default::default()
        };
        for s in &p.servings {
            if s.traffic_mbps <= 0.0 {
                continue;
            }
            match s.location {
                Location::Cloud(n) => {
                    p.cloud_replicas.insert((s.vm, n));
                }
                Location::MetroFog(n) => {
                    p.metro_fog_replicas.insert((s.vm, n));
                }
                Location::AccessFog { node, pon } => {
                    p.access_fog_replicas.insert((s.vm, node, pon));
                }
            }
        }
        p
    }

    /// Core nodes hosting a cloud (C_s = 1).
    pub fn cloud_sites(&self) -> BTreeSet<NodeId> {
        self.cloud_replicas.iter().map(|&(_, s)| s).collect()
    }

    /// Nodes hosting a metro fog.
    pub fn metro_fog_sites(&self) -> BTreeSet<NodeId> {
        self.metro_fog_replicas.iter().map(|&(_, s)| s).collect()
    }

    /// (node, pon) pairs hosting an access fog.
    pub fn access_fog_sites(&self) -> BTreeSet<(NodeId, PonIndex)> {
        self.access_fog_replicas
            .iter()
            .map(|&(_, n, p)| (n, p))
            .collect()
    }

    /// Served traffic summed per (vm, location).
    pub fn served_per_replica(&self) -> BTreeMap<(VmId, Location), f64> {
        let mut m = BTreeMap::new();
        for s in &self.servings {
            *m.entry((s.vm, s.location)).or_insert(0.0) += s.traffic_mbps;
        }
        m
    }

    /// Inter-node demand L[s][d]: traffic from the cloud at s to users at d.
    /// Fog servings never enter the core.
    pub fn cloud_demand_matrix(&self) -> BTreeMap<(NodeId, NodeId), f64> {
        let mut l = BTreeMap::new();
        for s in &self.servings {
            if let Location::Cloud(site) = s.location {
                if s.traffic_mbps > 0.0 {
                    *l.entry((site, s.node)).or_insert(0.0) += s.traffic_mbps;
                }
            }
        }
        l
    }
}

/// A violated placement constraint, with the offending tuple.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Serving totals differ from the demand of (vm, pon, node).
    Conservation {
        vm: VmId,
        node: NodeId,
        pon: PonIndex,
        served_mbps: f64,
        demand_mbps: f64,
    },
    /// A fog location serving a demand outside its own subtree.
    Locality {
        vm: VmId,
        node: NodeId,
        pon: PonIndex,
        location: Location,
    },
    /// Replica indicator not equal to (served traffic > 0).
    ReplicaLinking {
        vm: VmId,
        location: Location,
        present: bool,
        served_mbps: f64,
    },
    /// A serving references a VM or node unknown to the scenario.
    UnknownReference { vm: VmId, node: NodeId },
    /// Traffic at one replica above its full-replica capacity T_v
    /// (reported only under strict capacity checking).
    Capacity {
        vm: VmId,
        location: Location,
        served_mbps: f64,
        capacity_mbps: f64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Conservation {
                vm,
                node,
                pon,
                served_mbps,
                demand_mbps,
            } => write!(
                f,
                "conservation: vm {vm} at ({node},{pon}) serves {served_mbps} of {demand_mbps} Mbps"
            ),
            Violation::Locality {
                vm,
                node,
                pon,
                location,
            } => write!(
                f,
                "locality: vm {vm} demand at ({node},{pon}) served by {location}"
            ),
            Violation::ReplicaLinking {
                vm,
                location,
                present,
                served_mbps,
            } => write!(
                f,
                "replica-linking: vm {vm} at {location}: present={present} but serves {served_mbps} Mbps"
            ),
            Violation::UnknownReference { vm, node } => {
                write!(f, "unknown reference: vm {vm} / node {node}")
            }
            Violation::Capacity {
                vm,
                location,
                served_mbps,
                capacity_mbps,
            } => write!(
                f,
                "capacity: vm {vm} at {location} serves {served_mbps} Mbps above T_v = {capacity_mbps}"
            ),
        }
    }
}

/// Options for [`validate`].
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Enforce per-replica served traffic <= T_v. The MILP formulation this
    /// model mirrors leaves the cap implicit, and its full-scale placements
    /// exceed it at popular VMs, so scenario files choose.
    pub strict_capacity: bool,
    /// Absolute tolerance on conservation sums, in Mbps.
    pub tolerance_mbps: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            strict_capacity: false,
            tolerance_mbps: 1e-6,
        }
    }
}

/// Check a placement against the demand it is meant to serve. Violations are
/// returned as data; an empty list means the placement is feasible.
pub fn validate(
    placement: &Placement,
    demand: &DemandMatrix,
    specs: &[VmSpec],
    nodes: &[NodeId],
    pons_per_node: PonIndex,
    opts: ValidateOptions,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let spec_ids: BTreeSet<VmId> = specs.iter().map(|s| s.id).collect();
    let node_set: BTreeSet<NodeId> = nodes.iter().copied().collect();

    // Serving totals per demand unit, locality, and reference checks.
    let mut served: BTreeMap<(VmId, NodeId, PonIndex), f64> = BTreeMap::new();
    for s in &placement.servings {
        let loc_node = match s.location {
            Location::Cloud(n) | Location::MetroFog(n) => n,
            Location::AccessFog { node, .. } => node,
        };
        let pon_ok = s.pon < pons_per_node
            && match s.location {
                Location::AccessFog { pon, .. } => pon < pons_per_node,
                _ => true,
            };
        if !spec_ids.contains(&s.vm)
            || !node_set.contains(&s.node)
            || !node_set.contains(&loc_node)
            || !pon_ok
        {
            violations.push(Violation::UnknownReference {
                vm: s.vm,
                node: s.node.max(loc_node),
            });
            continue;
        }
        let local = match s.location {
            Location::Cloud(_) => true,
            Location::MetroFog(n) => n == s.node,
            Location::AccessFog { node, pon } => node == s.node && pon == s.pon,
        };
        if !local {
            violations.push(Violation::Locality {
                vm: s.vm,
                node: s.node,
                pon: s.pon,
                location: s.location,
            });
        }
        *served.entry((s.vm, s.node, s.pon)).or_insert(0.0) += s.traffic_mbps;
    }

    for e in &demand.entries {
        let got = served.remove(&(e.vm, e.node, e.pon)).unwrap_or(0.0);
        if (got - e.traffic_mbps).abs() > opts.tolerance_mbps {
            violations.push(Violation::Conservation {
                vm: e.vm,
                node: e.node,
                pon: e.pon,
                served_mbps: got,
                demand_mbps: e.traffic_mbps,
            });
        }
    }
    // Servings for units with no demand entry at all.
    for ((vm, node, pon), got) in served {
        if got.abs() > opts.tolerance_mbps {
            violations.push(Violation::Conservation {
                vm,
                node,
                pon,
                served_mbps: got,
                demand_mbps: 0.0,
            });
        }
    }

    // Replica linking: indicator = 1 iff served traffic at that replica > 0.
    let per_replica = placement.served_per_replica();
    let mut linked: BTreeSet<(VmId, Location)> = BTreeSet::new();
    for (&(vm, loc), &traffic) in &per_replica {
        if traffic > 0.0 {
            linked.insert((vm, loc));
        }
    }
    let declared: BTreeSet<(VmId, Location)> = placement
        .cloud_replicas
        .iter()
        .map(|&(v, n)| (v, Location::Cloud(n)))
        .chain(
            placement
                .metro_fog_replicas
                .iter()
                .map(|&(v, n)| (v, Location::MetroFog(n))),
        )
        .chain(
            placement
                .access_fog_replicas
                .iter()
                .map(|&(v, node, pon)| (v, Location::AccessFog { node, pon })),
        )
        .collect();
    for &(vm, loc) in declared.difference(&linked) {
        violations.push(Violation::ReplicaLinking {
            vm,
            location: loc,
            present: true,
            served_mbps: per_replica.get(&(vm, loc)).copied().unwrap_or(0.0),
        });
    }
    for &(vm, loc) in linked.difference(&declared) {
        violations.push(Violation::ReplicaLinking {
            vm,
            location: loc,
            present: false,
            served_mbps: per_replica[&(vm, loc)],
        });
    }

    if opts.strict_capacity {
        let caps: BTreeMap<VmId, f64> = specs
            .iter()
            .map(|s| (s.id, s.full_replica_traffic_mbps()))
            .collect();
        for (&(vm, loc), &traffic) in &per_replica {
            if let Some(&cap) = caps.get(&vm) {
                if traffic > cap + opts.tolerance_mbps {
                    violations.push(Violation::Capacity {
                        vm,
                        location: loc,
                        served_mbps: traffic,
                        capacity_mbps: cap,
                    });
                }
            }
        }
    }

    violations
}

/// Per-replica and per-site workloads implied by a placement.
#[derive(Debug, Clone, Default)]
pub struct WorkloadLedger {
    pub per_replica: BTreeMap<(VmId, Location), f64>,
    pub cloud_sites: BTreeMap<NodeId, f64>,
    pub metro_fog_sites: BTreeMap<NodeId, f64>,
    pub access_fog_sites: BTreeMap<(NodeId, PonIndex), f64>,
}

impl WorkloadLedger {
    pub fn total_pct(&self) -> f64 {
        self.per_replica.values().sum()
    }
}

/// Apply the per-VM workload model to every replica and sum per site.
pub fn workloads(
    placement: &Placement,
    specs: &[VmSpec],
    mode: LinearMode,
) -> Result<WorkloadLedger> {
    let by_id: BTreeMap<VmId, &VmSpec> = specs.iter().map(|s| (s.id, s)).collect();
    let mut ledger = WorkloadLedger::default();
    for (&(vm, loc), &traffic) in &placement.served_per_replica() {
        let spec = by_id.get(&vm).ok_or_else(|| {
            crate::Error::InvalidParameter(format!("serving references unknown VM {vm}"))
        })?;
        let w = crate::catalog::replica_workload(spec, traffic, traffic > 0.0, mode)?;
        if w == 0.0 {
            continue;
        }
        ledger.per_replica.insert((vm, loc), w);
        match loc {
            Location::Cloud(n) => *ledger.cloud_sites.entry(n).or_insert(0.0) += w,
            Location::MetroFog(n) => *ledger.metro_fog_sites.entry(n).or_insert(0.0) += w,
            Location::AccessFog { node, pon } => {
                *ledger.access_fog_sites.entry((node, pon)).or_insert(0.0) += w
            }
        }
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{derive_traffic, derive_users, WorkloadProfile};
    use crate::topology::AttachmentPlan;

    fn specs() -> Vec<VmSpec> {
        vec![VmSpec {
            id: 1,
            profile: WorkloadProfile::Linear { baseline_pct: 1.0 },
            peak_workload_pct: 50.0,
            rate_mbps: 25.0,
            max_users_per_replica: 800,
            popularity_share: 0.1,
        }]
    }

    fn demand(nodes: &[NodeId]) -> DemandMatrix {
        let plan = AttachmentPlan {
            pons_per_node: 1,
            onus_per_pon: 16,
            olts_per_pon: 1,
            olt_capacity_mbps: 1_280_000.0,
        };
        derive_traffic(
            derive_users(&specs(), 100.0, nodes, &plan).unwrap(),
            &specs(),
        )
    }

    fn serve_all_from_cloud(demand: &DemandMatrix, site: NodeId) -> Placement {
        Placement::from_servings(
            demand
                .entries
                .iter()
                .map(|e| Serving {
                    vm: e.vm,
                    node: e.node,
                    pon: e.pon,
                    location: Location::Cloud(site),
                    traffic_mbps: e.traffic_mbps,
                })
                .collect(),
        )
    }

    #[test]
    fn single_cloud_serving_everything_is_feasible() {
        let d = demand(&[1, 2, 3]);
        let p = serve_all_from_cloud(&d, 2);
        let v = validate(&p, &d, &specs(), &[1, 2, 3], 1, ValidateOptions::default());
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn broken_conservation_is_reported() {
        let d = demand(&[1, 2]);
        let mut p = serve_all_from_cloud(&d, 1);
        p.servings[0].traffic_mbps *= 0.5;
        let v = validate(&p, &d, &specs(), &[1, 2], 1, ValidateOptions::default());
        assert!(matches!(v[0], Violation::Conservation { vm: 1, .. }));
    }

    #[test]
    fn foreign_access_fog_breaks_locality() {
        let d = demand(&[1, 2]);
        let servings: Vec<Serving> = d
            .entries
            .iter()
            .map(|e| Serving {
                vm: e.vm,
                node: e.node,
                pon: e.pon,
                // every demand pinned to node 1's access fog, including node 2's
                location: Location::AccessFog { node: 1, pon: 0 },
                traffic_mbps: e.traffic_mbps,
            })
            .collect();
        let p = Placement::from_servings(servings);
        let v = validate(&p, &d, &specs(), &[1, 2], 1, ValidateOptions::default());
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::Locality { node: 2, .. })));
    }

    #[test]
    fn stale_replica_indicator_is_a_linking_violation() {
        let d = demand(&[1]);
        let mut p = serve_all_from_cloud(&d, 1);
        p.metro_fog_replicas.insert((1, 1)); // declared but serves nothing
        let v = validate(&p, &d, &specs(), &[1], 1, ValidateOptions::default());
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::ReplicaLinking { present: true, .. })));
    }

    #[test]
    fn capacity_check_only_fires_in_strict_mode() {
        let d = demand(&[1, 2, 3, 4, 5]); // 10 users/PON * 25 Mbps * 5 nodes
        let p = serve_all_from_cloud(&d, 1);
        let relaxed = validate(&p, &d, &specs(), &[1, 2, 3, 4, 5], 1, ValidateOptions::default());
        assert!(relaxed.is_empty());
        // shrink the cap below one PON's demand
        let mut tight = specs();
        tight[0].max_users_per_replica = 8; // T_v = 200 Mbps < 1250 served
        let strict = validate(
            &p,
            &d,
            &tight,
            &[1, 2, 3, 4, 5],
            1,
            ValidateOptions {
                strict_capacity: true,
                ..Default::default()
            },
        );
        assert!(strict
            .iter()
            .any(|x| matches!(x, Violation::Capacity { .. })));
    }

    #[test]
    fn cloud_demand_matrix_rows_follow_the_single_site() {
        let d = demand(&[1, 2, 3]);
        let p = serve_all_from_cloud(&d, 2);
        let l = p.cloud_demand_matrix();
        assert_eq!(l.len(), 3);
        assert!(l.keys().all(|&(s, _)| s == 2));
        // same-node entry is allowed and kept
        assert!(l.contains_key(&(2, 2)));
    }

    #[test]
    fn all_local_access_fogs_leave_the_core_empty() {
        let d = demand(&[1, 2]);
        let servings: Vec<Serving> = d
            .entries
            .iter()
            .map(|e| Serving {
                vm: e.vm,
                node: e.node,
                pon: e.pon,
                location: Location::AccessFog {
                    node: e.node,
                    pon: e.pon,
                },
                traffic_mbps: e.traffic_mbps,
            })
            .collect();
        let p = Placement::from_servings(servings);
        assert!(p.cloud_demand_matrix().is_empty());
        let v = validate(&p, &d, &specs(), &[1, 2], 1, ValidateOptions::default());
        assert!(v.is_empty());
    }

    #[test]
    fn workload_ledger_sums_split_replicas() {
        // one VM split evenly over two metro fogs at half T_v each:
        // each replica at baseline + slope * 10000 = 25.5
        let spec = &specs()[0];
        let servings = vec![
            Serving {
                vm: 1,
                node: 1,
                pon: 0,
                location: Location::MetroFog(1),
                traffic_mbps: 10_000.0,
            },
            Serving {
                vm: 1,
                node: 2,
                pon: 0,
                location: Location::MetroFog(2),
                traffic_mbps: 10_000.0,
            },
        ];
        let p = Placement::from_servings(servings);
        let ledger = workloads(&p, &specs(), LinearMode::Default).unwrap();
        assert!((ledger.metro_fog_sites[&1] - 25.5).abs() < 1e-12);
        assert!((ledger.metro_fog_sites[&2] - 25.5).abs() < 1e-12);
        assert_eq!(ledger.per_replica.len(), 2);
        let _ = spec;
    }

    #[test]
    fn constant_profile_charges_peak_per_site() {
        let mut s = specs();
        s[0].profile = WorkloadProfile::Constant;
        let servings = vec![
            Serving {
                vm: 1,
                node: 1,
                pon: 0,
                location: Location::Cloud(1),
                traffic_mbps: 10.0,
            },
            Serving {
                vm: 1,
                node: 2,
                pon: 0,
                location: Location::Cloud(2),
                traffic_mbps: 500.0,
            },
            Serving {
                vm: 1,
                node: 3,
                pon: 0,
                location: Location::Cloud(3),
                traffic_mbps: 0.5,
            },
        ];
        let p = Placement::from_servings(servings);
        let ledger = workloads(&p, &s, LinearMode::Default).unwrap();
        for site in [1, 2, 3] {
            assert_eq!(ledger.cloud_sites[&site], 50.0);
        }
    }

    #[test]
    fn empty_placement_yields_empty_ledger() {
        let p = Placement::default();
        let ledger = workloads(&p, &specs(), LinearMode::Default).unwrap();
        assert!(ledger.per_replica.is_empty());
        assert_eq!(ledger.total_pct(), 0.0);
    }
}
