//! VM service catalog: workload profiles, data rates and popularity, plus the
//! derivation of per-PON user counts and demand traffic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::topology::AttachmentPlan;
use crate::{Error, NodeId, PonIndex, Result, VmId};

/// Workload-versus-users profile of a VM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkloadProfile {
    /// CPU demand is the peak workload whenever a replica exists, however
    /// many users it serves.
    Constant,
    /// CPU demand grows linearly with served traffic on top of a standing
    /// baseline needed to run the application at all.
    Linear { baseline_pct: f64 },
}

impl WorkloadProfile {
    pub fn baseline_pct(&self) -> f64 {
        match self {
            WorkloadProfile::Constant => 0.0,
            WorkloadProfile::Linear { baseline_pct } => *baseline_pct,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, WorkloadProfile::Linear { .. })
    }
}

/// How the linear profile charges its baseline.
///
/// `Default` charges the baseline once per active replica and adds the slope
/// term. `Literal` scales the baseline with the served-traffic fraction, which
/// algebraically collapses the workload to peak * served/full; both modes
/// return the peak workload exactly at full load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearMode {
    #[default]
    Default,
    Literal,
}

/// One VM service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmSpec {
    pub id: VmId,
    pub profile: WorkloadProfile,
    /// Peak CPU workload W_v, in percent of one server.
    pub peak_workload_pct: f64,
    /// Per-user download rate r_v, in Mbps.
    pub rate_mbps: f64,
    /// Maximum users served by a single replica.
    pub max_users_per_replica: u32,
    /// Share of the PON user population requesting this VM, as a fraction.
    pub popularity_share: f64,
}

impl VmSpec {
    /// Traffic of a replica serving its full user complement: T_v = x * r_v.
    pub fn full_replica_traffic_mbps(&self) -> f64 {
        self.max_users_per_replica as f64 * self.rate_mbps
    }

    /// Workload slope per unit traffic: (W_v - M) / T_v.
    pub fn workload_slope_per_mbps(&self) -> f64 {
        (self.peak_workload_pct - self.profile.baseline_pct()) / self.full_replica_traffic_mbps()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peak_workload_pct > 0.0 && self.peak_workload_pct <= 100.0) {
            return Err(Error::InvalidScenario(format!(
                "VM {}: peak workload must be in (0, 100], got {}",
                self.id, self.peak_workload_pct
            )));
        }
        if let WorkloadProfile::Linear { baseline_pct } = self.profile {
            if !(0.0..=self.peak_workload_pct).contains(&baseline_pct) {
                return Err(Error::InvalidScenario(format!(
                    "VM {}: baseline must be in [0, peak], got {}",
                    self.id, baseline_pct
                )));
            }
        }
        if self.max_users_per_replica == 0 || self.rate_mbps <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "VM {}: per-replica user cap and rate must be strictly positive",
                self.id
            )));
        }
        if !(self.popularity_share > 0.0 && self.popularity_share <= 1.0) {
            return Err(Error::InvalidScenario(format!(
                "VM {}: popularity share must be in (0, 1], got {}",
                self.id, self.popularity_share
            )));
        }
        Ok(())
    }
}

/// User population model: how many users sit in each PON and how they split
/// across VM popularity groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularityModel {
    pub users_per_pon: f64,
    /// (popularity share in percent, number of VMs at that share).
    pub groups: Vec<(f64, u32)>,
}

impl PopularityModel {
    pub fn total_share_pct(&self) -> f64 {
        self.groups
            .iter()
            .map(|(share, count)| share * *count as f64)
            .sum()
    }
}

/// One demand unit: users of VM `vm` in PON `pon` at core node `node`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandEntry {
    pub vm: VmId,
    pub node: NodeId,
    pub pon: PonIndex,
    pub users: u64,
    pub traffic_mbps: f64,
}

/// Demand per (vm, pon, node), in deterministic (vm, node, pon) order.
#[derive(Debug, Clone, Default)]
pub struct DemandMatrix {
    pub entries: Vec<DemandEntry>,
    /// Per-VM difference between the rounded user total and the intended
    /// share of the population. Reported, never silently redistributed.
    pub rounding_residual: BTreeMap<VmId, f64>,
}

impl DemandMatrix {
    pub fn total_users(&self, vm: VmId) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.vm == vm)
            .map(|e| e.users)
            .sum()
    }

    pub fn total_traffic_mbps(&self) -> f64 {
        self.entries.iter().map(|e| e.traffic_mbps).sum()
    }
}

/// Round half away from zero; user counts are nonnegative here.
fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Derive uniform per-PON user counts: U = round(users_per_pon * share),
/// identical across every (pon, node) pair.
pub fn derive_users(
    specs: &[VmSpec],
    users_per_pon: f64,
    nodes: &[NodeId],
    attachment: &AttachmentPlan,
) -> Result<DemandMatrix> {
    let total_share: f64 = specs.iter().map(|s| s.popularity_share).sum();
    if total_share > 1.0 + 1e-9 {
        return Err(Error::InvalidScenario(format!(
            "popularity shares sum to {:.4}, above 100%",
            total_share * 100.0
        )));
    }
    if users_per_pon < 0.0 {
        return Err(Error::InvalidScenario("users_per_pon must be >= 0".into()));
    }

    let pon_count = nodes.len() as f64 * attachment.pons_per_node as f64;
    let mut entries = Vec::new();
    let mut rounding_residual = BTreeMap::new();
    for spec in specs {
        let users = round_half_up(users_per_pon * spec.popularity_share);
        let intended = users_per_pon * spec.popularity_share * pon_count;
        rounding_residual.insert(spec.id, users as f64 * pon_count - intended);
        for &node in nodes {
            for pon in 0..attachment.pons_per_node {
                entries.push(DemandEntry {
                    vm: spec.id,
                    node,
                    pon,
                    users,
                    traffic_mbps: 0.0,
                });
            }
        }
    }
    entries.sort_by_key(|e| (e.vm, e.node, e.pon));
    Ok(DemandMatrix {
        entries,
        rounding_residual,
    })
}

/// Fill in traffic: D = U * r_v, elementwise, in Mbps.
pub fn derive_traffic(mut demand: DemandMatrix, specs: &[VmSpec]) -> DemandMatrix {
    let rates: BTreeMap<VmId, f64> = specs.iter().map(|s| (s.id, s.rate_mbps)).collect();
    for e in &mut demand.entries {
        e.traffic_mbps = e.users as f64 * rates[&e.vm];
    }
    demand
}

/// Workload of one VM replica serving `served_traffic_mbps`, in percent of a
/// server CPU.
///
/// Constant profile: the peak workload whenever the replica exists.
/// Linear profile, default mode: baseline + slope * served.
/// Linear profile, literal mode: (served/T_v) * baseline + slope * served,
/// i.e. peak * served / T_v.
pub fn replica_workload(
    spec: &VmSpec,
    served_traffic_mbps: f64,
    replica_present: bool,
    mode: LinearMode,
) -> Result<f64> {
    if served_traffic_mbps > 0.0 && !replica_present {
        return Err(Error::InvalidParameter(format!(
            "VM {}: {} Mbps served by an absent replica",
            spec.id, served_traffic_mbps
        )));
    }
    if served_traffic_mbps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "VM {}: negative served traffic",
            spec.id
        )));
    }
    if !replica_present {
        return Ok(0.0);
    }
    Ok(match spec.profile {
        WorkloadProfile::Constant => spec.peak_workload_pct,
        WorkloadProfile::Linear { baseline_pct } => {
            let slope = spec.workload_slope_per_mbps();
            match mode {
                LinearMode::Default => baseline_pct + slope * served_traffic_mbps,
                LinearMode::Literal => {
                    let fraction = served_traffic_mbps / spec.full_replica_traffic_mbps();
                    fraction * baseline_pct + slope * served_traffic_mbps
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_vm() -> VmSpec {
        VmSpec {
            id: 1,
            profile: WorkloadProfile::Linear { baseline_pct: 1.0 },
            peak_workload_pct: 50.0,
            rate_mbps: 25.0,
            max_users_per_replica: 800,
            popularity_share: 0.16,
        }
    }

    fn plan() -> AttachmentPlan {
        AttachmentPlan {
            pons_per_node: 2,
            onus_per_pon: 512,
            olts_per_pon: 1,
            olt_capacity_mbps: 1_280_000.0,
        }
    }

    #[test]
    fn users_follow_popularity_share() {
        let spec = linear_vm();
        let demand = derive_users(&[spec], 13_000.0, &[1, 2], &plan()).unwrap();
        assert!(demand.entries.iter().all(|e| e.users == 2080));
        assert_eq!(demand.entries.len(), 4);
    }

    #[test]
    fn users_round_half_up() {
        let mut spec = linear_vm();
        spec.popularity_share = 0.0005; // 13000 * 0.05% = 6.5 -> 7
        let demand = derive_users(&[spec], 13_000.0, &[1], &plan()).unwrap();
        assert_eq!(demand.entries[0].users, 7);
        // residual vs the intended total is reported
        let residual = demand.rounding_residual[&1];
        assert!((residual - (7.0 - 6.5) * 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_share_yields_zero_users() {
        let spec = linear_vm();
        let demand = derive_users(&[spec], 0.0, &[1], &plan()).unwrap();
        assert_eq!(demand.entries[0].users, 0);
    }

    #[test]
    fn shares_above_one_are_rejected() {
        let mut a = linear_vm();
        a.popularity_share = 0.7;
        let mut b = linear_vm();
        b.id = 2;
        b.popularity_share = 0.5;
        assert!(derive_users(&[a, b], 100.0, &[1], &plan()).is_err());
    }

    #[test]
    fn traffic_is_users_times_rate() {
        let spec = linear_vm();
        let demand = derive_users(&[spec.clone()], 13_000.0, &[1], &plan()).unwrap();
        let demand = derive_traffic(demand, &[spec]);
        // 2080 users * 25 Mbps = 52 Gbps per PON
        assert_eq!(demand.entries[0].traffic_mbps, 52_000.0);
    }

    #[test]
    fn traffic_of_zero_users_is_zero() {
        let mut spec = linear_vm();
        spec.popularity_share = 1e-9;
        let demand = derive_users(&[spec.clone()], 100.0, &[1], &plan()).unwrap();
        let demand = derive_traffic(demand, &[spec]);
        assert_eq!(demand.entries[0].traffic_mbps, 0.0);
    }

    #[test]
    fn single_vm_scenario_traffic() {
        // 800 users in total at 0.1 Mbps is 80 Mbps of demand
        let users = 800u64;
        let rate = 0.1;
        assert!((users as f64 * rate - 80.0).abs() < 1e-12);
    }

    #[test]
    fn full_load_workload_is_peak_in_both_modes() {
        let spec = linear_vm(); // T_v = 20000 Mbps
        for mode in [LinearMode::Default, LinearMode::Literal] {
            let w = replica_workload(&spec, 20_000.0, true, mode).unwrap();
            assert_eq!(w, 50.0);
        }
    }

    #[test]
    fn half_load_default_mode_keeps_standing_baseline() {
        let spec = linear_vm();
        let w = replica_workload(&spec, 10_000.0, true, LinearMode::Default).unwrap();
        assert!((w - 25.5).abs() < 1e-12);
        // literal mode scales the baseline away: 50 * 10000/20000 = 25
        let w = replica_workload(&spec, 10_000.0, true, LinearMode::Literal).unwrap();
        assert!((w - 25.0).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_ignores_served_traffic() {
        let spec = VmSpec {
            profile: WorkloadProfile::Constant,
            ..linear_vm()
        };
        for served in [0.0, 5_000.0, 20_000.0] {
            let w = replica_workload(&spec, served, true, LinearMode::Default).unwrap();
            assert_eq!(w, 50.0);
        }
    }

    #[test]
    fn absent_replica_with_traffic_is_inconsistent() {
        let spec = linear_vm();
        assert!(replica_workload(&spec, 1.0, false, LinearMode::Default).is_err());
        assert_eq!(
            replica_workload(&spec, 0.0, false, LinearMode::Default).unwrap(),
            0.0
        );
    }

    #[test]
    fn literal_mode_is_split_invariant() {
        let spec = linear_vm();
        let total = 17_321.0;
        let whole = replica_workload(&spec, total, true, LinearMode::Literal).unwrap();
        let parts: f64 = [0.25, 0.35, 0.4]
            .iter()
            .map(|f| replica_workload(&spec, total * f, true, LinearMode::Literal).unwrap())
            .sum();
        assert!((whole - parts).abs() < 1e-9);
    }

    #[test]
    fn default_mode_split_overhead_is_baseline_per_extra_replica() {
        let spec = linear_vm();
        let total = 18_000.0;
        let whole = replica_workload(&spec, total, true, LinearMode::Default).unwrap();
        let k = 3;
        let split: f64 = (0..k)
            .map(|_| {
                replica_workload(&spec, total / k as f64, true, LinearMode::Default).unwrap()
            })
            .sum();
        assert!((split - whole - (k - 1) as f64 * 1.0).abs() < 1e-9);
    }
}
