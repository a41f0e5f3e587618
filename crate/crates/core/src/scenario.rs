//! Scenario files: a key-tree schema covering topology, attachment, power
//! parameters, the VM catalog, the user population and the run
//! configuration. Unknown keys are rejected; loading then re-serializing a
//! canonical file is byte-identical.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, DemandMatrix, LinearMode, PopularityModel, VmSpec, WorkloadProfile};
use crate::placement::ValidateOptions;
use crate::power::{
    ComputeParams, CoreParams, EvalSettings, MetroParams, PonParams, PowerParams, PueSet, TierLan,
};
use crate::routing::{AggPortMode, GroomingMode};
use crate::topology::{AttachmentPlan, CoreTopology, HopMatrix};
use crate::{Error, NodeId, Result, VmId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub span_km: f64,
    pub regen_reach_km: f64,
    pub wavelengths_per_fiber: u32,
    pub wavelength_rate_gbps: f64,
    pub nodes: Vec<NodeId>,
    /// Links encoded as "a-b:distance_km".
    pub links: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachmentSection {
    pub pons_per_node: u32,
    pub onus_per_pon: u32,
    pub olts_per_pon: u32,
    pub olt_capacity_gbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreParamsSection {
    pub router_port_w: f64,
    pub transponder_w: f64,
    pub edfa_w: f64,
    pub optical_switch_w: f64,
    pub regenerator_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetroParamsSection {
    pub port_rate_gbps: f64,
    pub port_w: f64,
    pub redundancy: f64,
    pub switch_rate_gbps: f64,
    pub switch_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PonParamsSection {
    pub olt_w: f64,
    pub onu_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierLanSection {
    pub switch_rate_gbps: f64,
    pub switch_w: f64,
    pub port_rate_gbps: f64,
    pub port_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeParamsSection {
    pub server_w: f64,
    pub server_max_workload_pct: f64,
    pub switch_redundancy: f64,
    pub cloud: TierLanSection,
    pub metro_fog: TierLanSection,
    pub access_fog: TierLanSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PueSection {
    pub cloud: f64,
    pub metro_fog: f64,
    pub access_fog: f64,
    pub network: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub core: CoreParamsSection,
    pub metro: MetroParamsSection,
    pub pon: PonParamsSection,
    pub compute: ComputeParamsSection,
    pub pue_best_practice: PueSection,
    pub pue_2014: PueSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VmSection {
    pub id: VmId,
    pub profile: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_pct: Option<f64>,
    pub peak_workload_pct: f64,
    pub rate_mbps: f64,
    pub max_users_per_replica: u32,
    pub popularity_share_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopularityGroupSection {
    pub share_pct: f64,
    pub vm_count: u32,
}

/// Generates a catalog of identical VMs spread over popularity groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    pub profile: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_pct: Option<f64>,
    pub peak_workload_pct: f64,
    pub rate_mbps: f64,
    pub max_users_per_replica: u32,
    pub groups: Vec<PopularityGroupSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSection {
    pub users_per_pon: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vms: Vec<VmSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerateSection>,
}

/// Which serving locations the solver may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    /// Clouds, metro fogs and access fogs.
    #[default]
    None,
    /// Clouds at any core node; no fogs.
    CloudsOnly,
    /// Clouds at the fixed `att_sites` list; no fogs.
    AttSites,
    /// Clouds plus metro fogs; no access fogs.
    CloudsMetro,
}

impl Restriction {
    pub fn as_str(self) -> &'static str {
        match self {
            Restriction::None => "none",
            Restriction::CloudsOnly => "clouds-only",
            Restriction::AttSites => "att-sites",
            Restriction::CloudsMetro => "clouds-metro",
        }
    }

    pub fn allows_metro_fog(self) -> bool {
        matches!(self, Restriction::None | Restriction::CloudsMetro)
    }

    pub fn allows_access_fog(self) -> bool {
        matches!(self, Restriction::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Oracle,
    #[default]
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PueProfile {
    #[default]
    BestPractice,
    Year2014,
}

impl PueProfile {
    pub fn as_str(self) -> &'static str {
        match self {
            PueProfile::BestPractice => "best_practice",
            PueProfile::Year2014 => "2014",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnlineOrder {
    /// Place the most popular VMs first so later VMs consolidate into
    /// residual capacity.
    #[default]
    DescendingPopularity,
    /// Catalog order, for experiments.
    Catalog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub solver: Solver,
    pub restriction: Restriction,
    pub att_sites: Vec<NodeId>,
    pub pue_profile: PueProfile,
    pub linear_mode: LinearMode,
    pub agg_port_mode: AggPortMode,
    pub grooming: GroomingMode,
    pub optical_switch_always_on: bool,
    pub clamp_amplifier_counts: bool,
    pub strict_capacity: bool,
    /// Hard ceiling on exhaustively enumerated placements.
    pub enumeration_bound: u64,
    /// Largest C(N, k) the offline phase enumerates exhaustively; larger k
    /// fall back to greedy marginal addition.
    pub subset_exhaustive_bound: u64,
    pub online_order: OnlineOrder,
    pub nearest_key_fallback: bool,
    pub seed: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            solver: Solver::Heuristic,
            restriction: Restriction::None,
            att_sites: vec![1, 3, 5, 6, 8, 11, 13, 17, 19, 20, 22, 25],
            pue_profile: PueProfile::BestPractice,
            linear_mode: LinearMode::Default,
            agg_port_mode: AggPortMode::Ceil,
            grooming: GroomingMode::Aggregate,
            optical_switch_always_on: true,
            clamp_amplifier_counts: true,
            strict_capacity: false,
            enumeration_bound: 10_000_000,
            subset_exhaustive_bound: 1_000_000,
            online_order: OnlineOrder::DescendingPopularity,
            nearest_key_fallback: true,
            seed: 0,
        }
    }
}

/// A full scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub topology: TopologySection,
    pub attachment: AttachmentSection,
    pub power: PowerSection,
    pub catalog: CatalogSection,
    pub run: RunSection,
}

fn parse_link(s: &str) -> Result<(NodeId, NodeId, f64)> {
    let bad = || Error::Parse(format!("link '{s}' is not of the form a-b:distance_km"));
    let (pair, dist) = s.split_once(':').ok_or_else(bad)?;
    let (a, b) = pair.split_once('-').ok_or_else(bad)?;
    Ok((
        a.parse().map_err(|_| bad())?,
        b.parse().map_err(|_| bad())?,
        dist.parse().map_err(|_| bad())?,
    ))
}

pub fn format_link(a: NodeId, b: NodeId, km: f64) -> String {
    format!("{a}-{b}:{km}")
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Canonical serialization. The bundled scenario files are produced by
    /// this writer, so load-then-serialize is byte-identical for them.
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        // Conversions run all structural checks.
        let topo = self.core_topology()?;
        let attachment = self.attachment_plan();
        attachment.validate()?;
        let specs = self.vm_specs()?;
        for s in &specs {
            s.validate()?;
        }
        let share: f64 = specs.iter().map(|s| s.popularity_share).sum();
        if share > 1.0 + 1e-9 {
            return Err(Error::InvalidScenario(format!(
                "popularity shares sum to {:.4}%, above 100%",
                share * 100.0
            )));
        }
        let ids: BTreeSet<VmId> = specs.iter().map(|s| s.id).collect();
        if ids.len() != specs.len() {
            return Err(Error::InvalidScenario("duplicate VM ids".into()));
        }
        for &site in &self.run.att_sites {
            if !topo.contains_node(site) {
                return Err(Error::InvalidScenario(format!(
                    "att_sites references unknown node {site}"
                )));
            }
        }
        self.pue().validate()?;
        if self.catalog.users_per_pon < 0.0 {
            return Err(Error::InvalidScenario("users_per_pon must be >= 0".into()));
        }
        Ok(())
    }

    pub fn core_topology(&self) -> Result<CoreTopology> {
        let links = self
            .topology
            .links
            .iter()
            .map(|s| parse_link(s))
            .collect::<Result<Vec<_>>>()?;
        CoreTopology::new(
            self.topology.nodes.clone(),
            links,
            self.topology.span_km,
            self.topology.regen_reach_km,
            self.topology.wavelengths_per_fiber,
            self.topology.wavelength_rate_gbps * 1000.0,
        )
    }

    pub fn attachment_plan(&self) -> AttachmentPlan {
        AttachmentPlan {
            pons_per_node: self.attachment.pons_per_node,
            onus_per_pon: self.attachment.onus_per_pon,
            olts_per_pon: self.attachment.olts_per_pon,
            olt_capacity_mbps: self.attachment.olt_capacity_gbps * 1000.0,
        }
    }

    pub fn power_params(&self) -> PowerParams {
        let p = &self.power;
        PowerParams {
            core: CoreParams {
                router_port_w: p.core.router_port_w,
                transponder_w: p.core.transponder_w,
                edfa_w: p.core.edfa_w,
                optical_switch_w: p.core.optical_switch_w,
                regenerator_w: p.core.regenerator_w,
            },
            metro: MetroParams {
                port_rate_mbps: p.metro.port_rate_gbps * 1000.0,
                port_w: p.metro.port_w,
                redundancy: p.metro.redundancy,
                switch_rate_mbps: p.metro.switch_rate_gbps * 1000.0,
                switch_w: p.metro.switch_w,
            },
            pon: PonParams {
                olt_w: p.pon.olt_w,
                onu_w: p.pon.onu_w,
            },
            compute: ComputeParams {
                server_w: p.compute.server_w,
                server_max_workload_pct: p.compute.server_max_workload_pct,
                switch_redundancy: p.compute.switch_redundancy,
                cloud: tier_lan(&p.compute.cloud),
                metro_fog: tier_lan(&p.compute.metro_fog),
                access_fog: tier_lan(&p.compute.access_fog),
            },
        }
    }

    pub fn pue(&self) -> PueSet {
        let s = match self.run.pue_profile {
            PueProfile::BestPractice => self.power.pue_best_practice,
            PueProfile::Year2014 => self.power.pue_2014,
        };
        PueSet {
            cloud: s.cloud,
            metro_fog: s.metro_fog,
            access_fog: s.access_fog,
            network: s.network,
        }
    }

    pub fn vm_specs(&self) -> Result<Vec<VmSpec>> {
        let mut specs = Vec::new();
        for vm in &self.catalog.vms {
            specs.push(VmSpec {
                id: vm.id,
                profile: parse_profile(&vm.profile, vm.baseline_pct)?,
                peak_workload_pct: vm.peak_workload_pct,
                rate_mbps: vm.rate_mbps,
                max_users_per_replica: vm.max_users_per_replica,
                popularity_share: vm.popularity_share_pct / 100.0,
            });
        }
        if let Some(g) = &self.catalog.generate {
            if !self.catalog.vms.is_empty() {
                return Err(Error::InvalidScenario(
                    "catalog.vms and catalog.generate cannot both be present".into(),
                ));
            }
            let profile = parse_profile(&g.profile, g.baseline_pct)?;
            let mut next_id: VmId = 1;
            for group in &g.groups {
                for _ in 0..group.vm_count {
                    specs.push(VmSpec {
                        id: next_id,
                        profile,
                        peak_workload_pct: g.peak_workload_pct,
                        rate_mbps: g.rate_mbps,
                        max_users_per_replica: g.max_users_per_replica,
                        popularity_share: group.share_pct / 100.0,
                    });
                    next_id += 1;
                }
            }
        }
        Ok(specs)
    }

    pub fn popularity_model(&self) -> PopularityModel {
        let groups = match &self.catalog.generate {
            Some(g) => g
                .groups
                .iter()
                .map(|gr| (gr.share_pct, gr.vm_count))
                .collect(),
            None => self
                .catalog
                .vms
                .iter()
                .map(|vm| (vm.popularity_share_pct, 1))
                .collect(),
        };
        PopularityModel {
            users_per_pon: self.catalog.users_per_pon,
            groups,
        }
    }

    pub fn eval_settings(&self) -> EvalSettings {
        EvalSettings {
            linear_mode: self.run.linear_mode,
            agg_port_mode: self.run.agg_port_mode,
            grooming: self.run.grooming,
            optical_switch_always_on: self.run.optical_switch_always_on,
            clamp_amplifier_counts: self.run.clamp_amplifier_counts,
            validate: ValidateOptions {
                strict_capacity: self.run.strict_capacity,
                ..Default::default()
            },
        }
    }

    /// Build the full evaluation context (topology, demand, hop matrix).
    pub fn context(&self) -> Result<EvalContext> {
        self.validate()?;
        let topo = self.core_topology()?;
        let attachment = self.attachment_plan();
        let specs = self.vm_specs()?;
        let demand = catalog::derive_traffic(
            catalog::derive_users(&specs, self.catalog.users_per_pon, topo.nodes(), &attachment)?,
            &specs,
        );
        let hops = topo.hop_matrix()?;
        let cloud_sites = match self.run.restriction {
            Restriction::AttSites => self.run.att_sites.iter().copied().collect(),
            _ => topo.nodes().to_vec(),
        };
        Ok(EvalContext {
            topo,
            attachment,
            specs,
            demand,
            hops,
            params: self.power_params(),
            pue: self.pue(),
            settings: self.eval_settings(),
            restriction: self.run.restriction,
            cloud_sites,
            run: self.run.clone(),
        })
    }
}

fn tier_lan(s: &TierLanSection) -> TierLan {
    TierLan {
        switch_rate_mbps: s.switch_rate_gbps * 1000.0,
        switch_w: s.switch_w,
        port_rate_mbps: s.port_rate_gbps * 1000.0,
        port_w: s.port_w,
    }
}

fn parse_profile(name: &str, baseline_pct: Option<f64>) -> Result<WorkloadProfile> {
    match name {
        "constant" => {
            if baseline_pct.is_some() {
                return Err(Error::InvalidScenario(
                    "constant profile takes no baseline_pct".into(),
                ));
            }
            Ok(WorkloadProfile::Constant)
        }
        "linear" => Ok(WorkloadProfile::Linear {
            baseline_pct: baseline_pct.unwrap_or(0.0),
        }),
        other => Err(Error::InvalidScenario(format!(
            "unknown workload profile '{other}'"
        ))),
    }
}

/// A scenario converted and precomputed for evaluation.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pub topo: CoreTopology,
    pub attachment: AttachmentPlan,
    pub specs: Vec<VmSpec>,
    pub demand: DemandMatrix,
    pub hops: HopMatrix,
    pub params: PowerParams,
    pub pue: PueSet,
    pub settings: EvalSettings,
    pub restriction: Restriction,
    /// Core nodes eligible to host clouds under the active restriction.
    pub cloud_sites: Vec<NodeId>,
    pub run: RunSection,
}

impl EvalContext {
    /// Validate and price a placement against this context.
    pub fn total_power(&self, placement: &crate::placement::Placement) -> Result<crate::power::PowerBreakdown> {
        crate::power::total_power(
            placement,
            &self.demand,
            &self.specs,
            &self.topo,
            &self.attachment,
            &self.params,
            self.pue,
            &self.settings,
        )
    }

    /// The scenario-constant PON floor, used as an invariance cross-check.
    pub fn pon_floor_w(&self) -> f64 {
        crate::power::pon_power_w(
            &self.attachment,
            self.topo.node_count(),
            &self.params.pon,
            self.pue.network,
        )
    }

    pub fn spec(&self, vm: VmId) -> &VmSpec {
        self.specs
            .iter()
            .find(|s| s.id == vm)
            .expect("vm id from this context")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::bundled;

    #[test]
    fn link_strings_round_trip() {
        let (a, b, km) = parse_link("3-17:1042.5").unwrap();
        assert_eq!((a, b, km), (3, 17, 1042.5));
        assert_eq!(format_link(3, 17, 1042.5), "3-17:1042.5");
        assert!(parse_link("3:17").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = bundled::att_single_vm().to_canonical_toml() + "\nmystery_knob = 4\n";
        assert!(Scenario::from_toml(&text).is_err());
    }

    #[test]
    fn bundled_scenarios_validate() {
        for s in [bundled::att_realistic(1.0, 25.0), bundled::att_single_vm()] {
            s.validate().unwrap();
            let ctx = s.context().unwrap();
            assert_eq!(ctx.topo.node_count(), 25);
            assert_eq!(ctx.topo.links().len(), 54);
        }
    }

    #[test]
    fn canonical_serialization_round_trips() {
        let s = bundled::att_realistic(1.0, 25.0);
        let text = s.to_canonical_toml();
        let reparsed = Scenario::from_toml(&text).unwrap();
        assert_eq!(s, reparsed);
        assert_eq!(text, reparsed.to_canonical_toml());
    }

    #[test]
    fn att_realistic_demand_matches_population() {
        let ctx = bundled::att_realistic(1.0, 25.0).context().unwrap();
        assert_eq!(ctx.specs.len(), 300);
        // 16% of 13k users in each of the 50 PONs
        let top = ctx
            .demand
            .entries
            .iter()
            .filter(|e| e.vm == 1)
            .collect::<Vec<_>>();
        assert_eq!(top.len(), 50);
        assert!(top.iter().all(|e| e.users == 2080));
        assert!(top.iter().all(|e| e.traffic_mbps == 52_000.0));
    }

    #[test]
    fn att_sites_restriction_narrows_cloud_candidates() {
        let mut s = bundled::att_realistic(1.0, 25.0);
        s.run.restriction = Restriction::AttSites;
        let ctx = s.context().unwrap();
        assert_eq!(ctx.cloud_sites.len(), 12);
        assert!(!ctx.restriction.allows_metro_fog());
    }
}

pub mod bundled {
    //! Bundled scenario constructors. The committed `data/*.toml` files are
    //! emitted from these via `cloudfog emit-bundled`.

    use super::*;

    /// 25 named cities with great-circle link distances, numbered roughly
    /// west to east. Node 11 (Dallas) is the highest-degree hub.
    pub fn att_topology() -> TopologySection {
        // (id, name, lat, lon)
        let cities = att_cities();
        let mut links = Vec::new();
        for &(a, b) in ATT_LINKS {
            let ca = &cities[(a - 1) as usize];
            let cb = &cities[(b - 1) as usize];
            let km = great_circle_km(ca.1, ca.2, cb.1, cb.2).round();
            links.push(format_link(a, b, km));
        }
        TopologySection {
            span_km: 80.0,
            regen_reach_km: 2000.0,
            wavelengths_per_fiber: 32,
            wavelength_rate_gbps: 40.0,
            nodes: (1..=25).collect(),
            links,
        }
    }

    pub type City = (NodeId, f64, f64);

    pub fn att_cities() -> Vec<City> {
        vec![
            (1, 47.61, -122.33),  // Seattle
            (2, 45.52, -122.68),  // Portland
            (3, 37.77, -122.42),  // San Francisco
            (4, 34.05, -118.24),  // Los Angeles
            (5, 32.72, -117.16),  // San Diego
            (6, 33.45, -112.07),  // Phoenix
            (7, 40.76, -111.89),  // Salt Lake City
            (8, 39.74, -104.99),  // Denver
            (9, 31.76, -106.49),  // El Paso
            (10, 29.76, -95.37),  // Houston
            (11, 32.78, -96.80),  // Dallas
            (12, 39.10, -94.58),  // Kansas City
            (13, 38.63, -90.20),  // St. Louis
            (14, 44.98, -93.27),  // Minneapolis
            (15, 41.88, -87.63),  // Chicago
            (16, 39.77, -86.16),  // Indianapolis
            (17, 36.16, -86.78),  // Nashville
            (18, 29.95, -90.07),  // New Orleans
            (19, 33.75, -84.39),  // Atlanta
            (20, 28.54, -81.38),  // Orlando
            (21, 25.76, -80.19),  // Miami
            (22, 38.91, -77.04),  // Washington DC
            (23, 39.95, -75.17),  // Philadelphia
            (24, 40.71, -74.01),  // New York
            (25, 42.36, -71.06),  // Boston
        ]
    }

    /// 54 bidirectional links.
    const ATT_LINKS: &[(NodeId, NodeId)] = &[
        (1, 2),
        (1, 7),
        (1, 14),
        (2, 3),
        (2, 7),
        (3, 4),
        (3, 7),
        (3, 11),
        (4, 5),
        (4, 6),
        (4, 9),
        (5, 6),
        (6, 9),
        (6, 8),
        (7, 8),
        (7, 12),
        (8, 9),
        (8, 11),
        (8, 12),
        (8, 15),
        (9, 10),
        (9, 11),
        (10, 11),
        (10, 18),
        (11, 12),
        (11, 13),
        (11, 17),
        (11, 18),
        (11, 19),
        (12, 13),
        (12, 14),
        (13, 15),
        (13, 16),
        (13, 17),
        (14, 15),
        (15, 16),
        (15, 22),
        (15, 24),
        (16, 17),
        (16, 22),
        (17, 19),
        (18, 19),
        (18, 20),
        (19, 20),
        (19, 22),
        (20, 21),
        (21, 22),
        (22, 23),
        (22, 24),
        (23, 24),
        (24, 25),
        (14, 25),
        (17, 22),
        (19, 21),
    ];

    fn great_circle_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
        let (la1, lo1, la2, lo2) = (
            lat1.to_radians(),
            lon1.to_radians(),
            lat2.to_radians(),
            lon2.to_radians(),
        );
        let dlat = la2 - la1;
        let dlon = lo2 - lo1;
        let a = (dlat / 2.0).sin().powi(2) + la1.cos() * la2.cos() * (dlon / 2.0).sin().powi(2);
        2.0 * 6371.0 * a.sqrt().asin()
    }

    fn att_power() -> PowerSection {
        PowerSection {
            core: CoreParamsSection {
                router_port_w: 638.0,
                transponder_w: 129.0,
                edfa_w: 11.0,
                optical_switch_w: 85.0,
                regenerator_w: 114.0,
            },
            metro: MetroParamsSection {
                port_rate_gbps: 40.0,
                port_w: 30.0,
                redundancy: 2.0,
                switch_rate_gbps: 600.0,
                switch_w: 470.0,
            },
            pon: PonParamsSection {
                olt_w: 1842.0,
                onu_w: 5.0,
            },
            compute: ComputeParamsSection {
                server_w: 333.0,
                server_max_workload_pct: 100.0,
                switch_redundancy: 2.0,
                cloud: TierLanSection {
                    switch_rate_gbps: 600.0,
                    switch_w: 470.0,
                    port_rate_gbps: 40.0,
                    port_w: 30.0,
                },
                metro_fog: TierLanSection {
                    switch_rate_gbps: 600.0,
                    switch_w: 470.0,
                    port_rate_gbps: 40.0,
                    port_w: 13.0,
                },
                access_fog: TierLanSection {
                    switch_rate_gbps: 240.0,
                    switch_w: 210.0,
                    port_rate_gbps: 40.0,
                    port_w: 13.0,
                },
            },
            pue_best_practice: PueSection {
                cloud: 1.3,
                metro_fog: 1.4,
                access_fog: 1.5,
                network: 1.5,
            },
            pue_2014: PueSection {
                cloud: 1.7,
                metro_fog: 1.9,
                access_fog: 2.5,
                network: 1.5,
            },
        }
    }

    fn att_attachment() -> AttachmentSection {
        AttachmentSection {
            pons_per_node: 2,
            onus_per_pon: 512,
            olts_per_pon: 1,
            olt_capacity_gbps: 1280.0,
        }
    }

    /// Full-scale scenario: 300 VMs over six popularity groups, 13k users
    /// per PON.
    pub fn att_realistic(baseline_pct: f64, rate_mbps: f64) -> Scenario {
        Scenario {
            name: format!("att-realistic-{baseline_pct}pct-{rate_mbps}mbps"),
            topology: att_topology(),
            attachment: att_attachment(),
            power: att_power(),
            catalog: CatalogSection {
                users_per_pon: 13_000.0,
                vms: Vec::new(),
                generate: Some(GenerateSection {
                    profile: "linear".into(),
                    baseline_pct: Some(baseline_pct),
                    peak_workload_pct: 50.0,
                    rate_mbps,
                    max_users_per_replica: 800,
                    groups: vec![
                        PopularityGroupSection {
                            share_pct: 16.0,
                            vm_count: 1,
                        },
                        PopularityGroupSection {
                            share_pct: 5.0,
                            vm_count: 3,
                        },
                        PopularityGroupSection {
                            share_pct: 2.0,
                            vm_count: 5,
                        },
                        PopularityGroupSection {
                            share_pct: 1.0,
                            vm_count: 16,
                        },
                        PopularityGroupSection {
                            share_pct: 0.5,
                            vm_count: 65,
                        },
                        PopularityGroupSection {
                            share_pct: 0.05,
                            vm_count: 210,
                        },
                    ],
                }),
            },
            run: RunSection {
                // Aggregation ports stay fractional as in the solver
                // formulation this scenario reproduces.
                agg_port_mode: AggPortMode::Fractional,
                ..RunSection::default()
            },
        }
    }

    /// Single-VM study: one VM with 800 users in each PON, so a full
    /// replica per access fog serves exactly its user cap. Profile,
    /// workload and rate are swept by the CLI.
    pub fn att_single_vm() -> Scenario {
        Scenario {
            name: "att-single-vm".into(),
            topology: att_topology(),
            attachment: att_attachment(),
            power: att_power(),
            catalog: CatalogSection {
                users_per_pon: 800.0,
                vms: vec![VmSection {
                    id: 1,
                    profile: "linear".into(),
                    baseline_pct: Some(0.0),
                    peak_workload_pct: 10.0,
                    rate_mbps: 0.1,
                    max_users_per_replica: 800,
                    popularity_share_pct: 100.0,
                }],
                generate: None,
            },
            run: RunSection {
                agg_port_mode: AggPortMode::Fractional,
                ..RunSection::default()
            },
        }
    }
}
