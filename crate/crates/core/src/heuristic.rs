//! Two-phase placement heuristic. The offline phase finds the most energy
//! efficient placement per VM type (k cloud replicas for every k, all metro
//! fogs, or all access fogs); the online phase matches incoming VMs to their
//! type, places them accordingly, routes cloud traffic min-hop and prices
//! the consolidated result once.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::catalog::{VmSpec, WorkloadProfile};
use crate::oracle::{best_k_subset, binomial, greedy_site_chain, FastEval};
use crate::placement::{Placement, Serving};
use crate::power::PowerBreakdown;
use crate::scenario::{EvalContext, OnlineOrder};
use crate::{Error, NodeId, Result, VmId};

/// Classification key: VMs sharing a key share an offline placement recipe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VmTypeKey {
    pub profile: ProfileKind,
    pub baseline_pct: f64,
    pub peak_workload_pct: f64,
    pub rate_mbps: f64,
    pub popularity_share_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Constant,
    Linear,
}

impl VmTypeKey {
    pub fn of(spec: &VmSpec) -> Self {
        let (profile, baseline_pct) = match spec.profile {
            WorkloadProfile::Constant => (ProfileKind::Constant, 0.0),
            WorkloadProfile::Linear { baseline_pct } => (ProfileKind::Linear, baseline_pct),
        };
        VmTypeKey {
            profile,
            baseline_pct,
            peak_workload_pct: spec.peak_workload_pct,
            rate_mbps: spec.rate_mbps,
            popularity_share_pct: spec.popularity_share * 100.0,
        }
    }

    fn sort_key(&self) -> (ProfileKind, u64, u64, u64, u64) {
        (
            self.profile,
            self.baseline_pct.to_bits(),
            self.peak_workload_pct.to_bits(),
            self.rate_mbps.to_bits(),
            self.popularity_share_pct.to_bits(),
        )
    }
}

/// Placement recipe chosen for a VM type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Clouds { sites: Vec<NodeId> },
    AllMetroFogs,
    AllAccessFogs,
}

impl std::fmt::Display for Recipe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Recipe::Clouds { sites } => write!(f, "clouds(k={})", sites.len()),
            Recipe::AllMetroFogs => write!(f, "all-metro-fogs"),
            Recipe::AllAccessFogs => write!(f, "all-access-fogs"),
        }
    }
}

/// Audit record for one k-cloud candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudCandidate {
    pub k: usize,
    pub sites: Vec<NodeId>,
    pub power_w: f64,
    /// "exhaustive" or "greedy", per the subset bound.
    pub mode: String,
}

/// One offline table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineEntry {
    pub key: VmTypeKey,
    pub recipe: Recipe,
    /// Power of the chosen recipe on the type's canonical single-VM demand
    /// (zero-traffic fog replicas pruned).
    pub power_w: f64,
    /// Same recipe with empty fog replicas left in place, when different.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unpruned_power_w: Option<f64>,
    pub cloud_candidates: Vec<CloudCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metro_fog_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access_fog_power_w: Option<f64>,
}

/// The persisted offline phase output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineTable {
    pub version: u32,
    pub scenario: String,
    pub entries: Vec<OfflineEntry>,
}

pub const OFFLINE_TABLE_VERSION: u32 = 1;

impl OfflineTable {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("offline table serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let table: OfflineTable = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if table.version != OFFLINE_TABLE_VERSION {
            return Err(Error::Parse(format!(
                "offline table version {} unsupported (expected {})",
                table.version, OFFLINE_TABLE_VERSION
            )));
        }
        Ok(table)
    }

    fn exact_match(&self, key: &VmTypeKey) -> Option<&OfflineEntry> {
        self.entries.iter().find(|e| e.key == *key)
    }

    /// Exact bucket hit, or the nearest key by normalized L1 distance over
    /// (log10 rate, baseline %, log10 popularity) within the same profile
    /// family. Ties resolve toward the smaller key.
    pub fn classify(&self, key: &VmTypeKey, nearest_fallback: bool) -> Option<&OfflineEntry> {
        if let Some(e) = self.exact_match(key) {
            return Some(e);
        }
        if !nearest_fallback {
            return None;
        }
        let family: Vec<&OfflineEntry> = self
            .entries
            .iter()
            .filter(|e| e.key.profile == key.profile)
            .collect();
        let pool = if family.is_empty() {
            self.entries.iter().collect()
        } else {
            family
        };
        let dims = |k: &VmTypeKey| {
            [
                k.rate_mbps.log10(),
                k.baseline_pct,
                k.popularity_share_pct.log10(),
            ]
        };
        let mut spans = [0.0f64; 3];
        for e in &pool {
            let d = dims(&e.key);
            let q = dims(key);
            for i in 0..3 {
                spans[i] = spans[i].max((d[i] - q[i]).abs());
            }
        }
        pool.into_iter().min_by(|a, b| {
            let dist = |e: &OfflineEntry| -> f64 {
                let d = dims(&e.key);
                let q = dims(key);
                (0..3)
                    .map(|i| {
                        if spans[i] > 0.0 {
                            (d[i] - q[i]).abs() / spans[i]
                        } else {
                            0.0
                        }
                    })
                    .sum()
            };
            dist(a)
                .partial_cmp(&dist(b))
                .unwrap()
                .then(a.key.sort_key().cmp(&b.key.sort_key()))
        })
    }
}

/// Offline phase: for each distinct VM type in the catalog, search the
/// recipe space on its canonical single-VM demand and keep the argmin.
pub fn offline_phase(ctx: &EvalContext) -> Result<OfflineTable> {
    let mut keys: Vec<(VmTypeKey, VmId)> = Vec::new();
    for spec in &ctx.specs {
        let key = VmTypeKey::of(spec);
        if !keys.iter().any(|(k, _)| *k == key) {
            keys.push((key, spec.id));
        }
    }
    keys.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));

    let mut entries = Vec::new();
    for (key, representative) in keys {
        entries.push(offline_entry(ctx, key, representative)?);
    }
    Ok(OfflineTable {
        version: OFFLINE_TABLE_VERSION,
        scenario: ctx.run_name_hint(),
        entries,
    })
}

fn offline_entry(ctx: &EvalContext, key: VmTypeKey, representative: VmId) -> Result<OfflineEntry> {
    let eval = FastEval::new(ctx, Some(representative))?;
    let n_sites = eval.site_nodes().len();
    let mut scratch = eval.new_scratch();

    let greedy = greedy_site_chain(&eval);
    let mut cloud_candidates = Vec::with_capacity(n_sites);
    for k in 1..=n_sites {
        let exhaustive = binomial(n_sites, k) <= ctx.run.subset_exhaustive_bound as u128;
        let (sites, power_w, mode) = if exhaustive {
            let (sites, power) = best_k_subset(&eval, k, ctx.run.subset_exhaustive_bound)?;
            (sites, power, "exhaustive")
        } else {
            let (sites, power) = greedy[k - 1].clone();
            (sites, power, "greedy")
        };
        cloud_candidates.push(CloudCandidate {
            k,
            sites,
            power_w,
            mode: mode.into(),
        });
    }

    // Fog scenarios: replicate to every metro fog / every access fog. Units
    // only exist where demand is positive, so zero-traffic replicas are
    // pruned by construction; the unpruned figure adds the baseline servers
    // an empty replica would keep busy.
    let spec = ctx.spec(representative);
    let mut assignment = vec![0u8; eval.unit_count()];
    let metro_fog_power_w = eval.metro_fog_digit().map(|digit| {
        assignment.fill(digit);
        eval.evaluate(&assignment, &mut scratch)
    });
    let access_fog_power_w = eval.access_fog_digit().map(|digit| {
        assignment.fill(digit);
        eval.evaluate(&assignment, &mut scratch)
    });
    let empty_replica_workload =
        crate::catalog::replica_workload(spec, 0.0, true, ctx.settings.linear_mode)?;
    let empty_site_w = |count: usize, pue: f64| {
        let servers =
            (empty_replica_workload / ctx.params.compute.server_max_workload_pct).ceil();
        count as f64 * pue * servers * ctx.params.compute.server_w
    };

    let nodes_with_demand: std::collections::BTreeSet<NodeId> =
        eval.search_space().units.iter().map(|u| u.node).collect();
    let pons_with_demand = eval.unit_count();
    let empty_mf_sites = ctx.topo.node_count() - nodes_with_demand.len();
    let empty_af_sites =
        ctx.topo.node_count() * ctx.attachment.pons_per_node as usize - pons_with_demand;

    // Candidate order fixes ties: clouds by ascending k, then metro fogs,
    // then access fogs.
    let mut best: Option<(f64, Recipe, Option<f64>)> = None;
    let mut consider = |power: f64, recipe: Recipe, unpruned: Option<f64>| {
        if best.as_ref().is_none_or(|(bp, _, _)| power < *bp) {
            best = Some((power, recipe, unpruned));
        }
    };
    for c in &cloud_candidates {
        consider(
            c.power_w,
            Recipe::Clouds {
                sites: c.sites.clone(),
            },
            None,
        );
    }
    if let Some(p) = metro_fog_power_w {
        let unpruned = (empty_mf_sites > 0 && empty_replica_workload > 0.0)
            .then(|| p + empty_site_w(empty_mf_sites, ctx.pue.metro_fog));
        consider(p, Recipe::AllMetroFogs, unpruned);
    }
    if let Some(p) = access_fog_power_w {
        let unpruned = (empty_af_sites > 0 && empty_replica_workload > 0.0)
            .then(|| p + empty_site_w(empty_af_sites, ctx.pue.access_fog));
        consider(p, Recipe::AllAccessFogs, unpruned);
    }

    let (power_w, recipe, unpruned_power_w) = best.expect("at least the cloud recipes exist");
    Ok(OfflineEntry {
        key,
        recipe,
        power_w,
        unpruned_power_w,
        cloud_candidates,
        metro_fog_power_w,
        access_fog_power_w,
    })
}

/// Outcome of the online phase.
pub struct HeuristicOutcome {
    pub placement: Placement,
    pub breakdown: PowerBreakdown,
    pub power_w: f64,
    /// Recipe applied per VM, in placement order.
    pub decisions: Vec<(VmId, Recipe)>,
    pub offline_duration: Duration,
    pub online_duration: Duration,
}

/// Online phase: place every catalog VM per its type's offline recipe and
/// price the consolidated placement once.
pub fn online_phase(ctx: &EvalContext, table: &OfflineTable) -> Result<HeuristicOutcome> {
    let start = Instant::now();
    let mut order: Vec<&VmSpec> = ctx.specs.iter().collect();
    match ctx.run.online_order {
        OnlineOrder::DescendingPopularity => {
            order.sort_by(|a, b| {
                b.popularity_share
                    .partial_cmp(&a.popularity_share)
                    .unwrap()
                    .then(a.id.cmp(&b.id))
            });
        }
        OnlineOrder::Catalog => {}
    }

    let mut servings = Vec::new();
    let mut decisions = Vec::new();
    for spec in order {
        let key = VmTypeKey::of(spec);
        let entry = table
            .classify(&key, ctx.run.nearest_key_fallback)
            .ok_or(Error::UnclassifiedVm(spec.id))?;
        let recipe = entry.recipe.clone();
        for e in ctx.demand.entries.iter().filter(|e| e.vm == spec.id) {
            if e.traffic_mbps <= 0.0 {
                continue;
            }
            let location = match &recipe {
                Recipe::Clouds { sites } => crate::placement::Location::Cloud(
                    ctx.hops
                        .nearest_site(sites, e.node)
                        .expect("recipe has sites"),
                ),
                Recipe::AllMetroFogs => crate::placement::Location::MetroFog(e.node),
                Recipe::AllAccessFogs => crate::placement::Location::AccessFog {
                    node: e.node,
                    pon: e.pon,
                },
            };
            servings.push(Serving {
                vm: e.vm,
                node: e.node,
                pon: e.pon,
                location,
                traffic_mbps: e.traffic_mbps,
            });
        }
        decisions.push((spec.id, recipe));
    }

    let placement = Placement::from_servings(servings);
    let breakdown = ctx.total_power(&placement)?;
    let power_w = breakdown.total_w();
    Ok(HeuristicOutcome {
        placement,
        breakdown,
        power_w,
        decisions,
        offline_duration: Duration::ZERO,
        online_duration: start.elapsed(),
    })
}

/// Run both phases.
pub fn solve(ctx: &EvalContext) -> Result<HeuristicOutcome> {
    let offline_start = Instant::now();
    let table = offline_phase(ctx)?;
    let offline_duration = offline_start.elapsed();
    let mut outcome = online_phase(ctx, &table)?;
    outcome.offline_duration = offline_duration;
    Ok(outcome)
}

impl EvalContext {
    fn run_name_hint(&self) -> String {
        format!(
            "{} vms={} restriction={}",
            self.topo.node_count(),
            self.specs.len(),
            self.restriction.as_str()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::scenario::Restriction;

    fn toy(nodes: u32, users: f64, rate: f64) -> crate::scenario::Scenario {
        let mut s = crate::oracle::toy_scenario(nodes, users, rate);
        s.catalog.vms[0].profile = "linear".into();
        s.catalog.vms[0].baseline_pct = Some(1.0);
        s.catalog.vms[0].peak_workload_pct = 50.0;
        s
    }

    #[test]
    fn classify_hits_exact_buckets() {
        let table = OfflineTable {
            version: OFFLINE_TABLE_VERSION,
            scenario: "t".into(),
            entries: [1.0f64, 5.0, 40.0]
                .iter()
                .map(|&m| OfflineEntry {
                    key: VmTypeKey {
                        profile: ProfileKind::Linear,
                        baseline_pct: m,
                        peak_workload_pct: 50.0,
                        rate_mbps: 25.0,
                        popularity_share_pct: 16.0,
                    },
                    recipe: Recipe::AllMetroFogs,
                    power_w: m,
                    unpruned_power_w: None,
                    cloud_candidates: vec![],
                    metro_fog_power_w: None,
                    access_fog_power_w: None,
                })
                .collect(),
        };
        let exact = VmTypeKey {
            profile: ProfileKind::Linear,
            baseline_pct: 5.0,
            peak_workload_pct: 50.0,
            rate_mbps: 25.0,
            popularity_share_pct: 16.0,
        };
        assert_eq!(table.classify(&exact, true).unwrap().key.baseline_pct, 5.0);

        // M = 3% sits equidistant from the 1% and 5% buckets; the tie
        // resolves toward the smaller key.
        let between = VmTypeKey {
            baseline_pct: 3.0,
            ..exact
        };
        assert_eq!(
            table.classify(&between, true).unwrap().key.baseline_pct,
            1.0
        );
        assert!(table.classify(&between, false).is_none());
    }

    #[test]
    fn constant_profile_maps_to_constant_family() {
        let mut s = toy(3, 10.0, 1.0);
        s.catalog.vms[0].profile = "constant".into();
        s.catalog.vms[0].baseline_pct = None;
        let ctx = s.context().unwrap();
        let table = offline_phase(&ctx).unwrap();
        assert_eq!(table.entries.len(), 1);
        assert_eq!(table.entries[0].key.profile, ProfileKind::Constant);
    }

    #[test]
    fn offline_phase_is_idempotent() {
        let ctx = toy(4, 20.0, 10.0).context().unwrap();
        let a = offline_phase(&ctx).unwrap().to_toml();
        let b = offline_phase(&ctx).unwrap().to_toml();
        assert_eq!(a, b);
        let reparsed = OfflineTable::from_toml(&a).unwrap();
        assert_eq!(reparsed.to_toml(), a);
    }

    #[test]
    fn single_vm_online_equals_offline_recorded_power() {
        let ctx = toy(4, 20.0, 10.0).context().unwrap();
        let table = offline_phase(&ctx).unwrap();
        let outcome = online_phase(&ctx, &table).unwrap();
        assert!((outcome.power_w - table.entries[0].power_w).abs() < 1e-6);
    }

    #[test]
    fn empty_stream_is_pon_floor() {
        let mut s = toy(3, 0.0, 1.0);
        s.catalog.users_per_pon = 0.0;
        let ctx = s.context().unwrap();
        let outcome = solve(&ctx).unwrap();
        assert!(outcome.placement.servings.is_empty());
        let floor = ctx.pon_floor_w() + ctx.pue.network * 3.0 * ctx.params.core.optical_switch_w;
        assert!((outcome.power_w - floor).abs() < 1e-9);
    }

    #[test]
    fn heuristic_output_validates_and_tracks_oracle() {
        for (nodes, users, rate) in [(4, 20.0, 5.0), (5, 12.0, 25.0), (4, 40.0, 1.0)] {
            let ctx = toy(nodes, users, rate).context().unwrap();
            let heuristic = solve(&ctx).unwrap();
            assert!(ctx.total_power(&heuristic.placement).is_ok());
            let exact = oracle::solve_exact(&ctx).unwrap();
            assert!(heuristic.power_w >= exact.power_w - 1e-9);
            let gap = heuristic.power_w / exact.power_w;
            assert!(gap <= 1.05, "gap {gap} on nodes={nodes} rate={rate}");
        }
    }

    #[test]
    fn restriction_removes_fog_recipes() {
        let mut s = toy(4, 20.0, 10.0);
        s.run.restriction = Restriction::CloudsOnly;
        let ctx = s.context().unwrap();
        let table = offline_phase(&ctx).unwrap();
        let entry = &table.entries[0];
        assert!(entry.metro_fog_power_w.is_none());
        assert!(entry.access_fog_power_w.is_none());
        assert!(matches!(entry.recipe, Recipe::Clouds { .. }));
    }

    #[test]
    fn greedy_mode_kicks_in_above_the_subset_bound() {
        let mut s = toy(6, 20.0, 10.0);
        s.run.subset_exhaustive_bound = 10; // C(6,3) = 20 > 10
        let ctx = s.context().unwrap();
        let table = offline_phase(&ctx).unwrap();
        let modes: Vec<&str> = table.entries[0]
            .cloud_candidates
            .iter()
            .map(|c| c.mode.as_str())
            .collect();
        assert!(modes.contains(&"greedy"));
        assert!(modes.contains(&"exhaustive"));
    }
}
