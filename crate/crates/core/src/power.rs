//! Equipment sizing and the power model: every power term is
//! count * unit-watts * segment-PUE, summed over six network segments.

use std::collections::BTreeMap;

use crate::catalog::{LinearMode, VmSpec};
use crate::placement::{self, Location, Placement, ValidateOptions};
use crate::routing::{self, AggPortMode, CoreState, GroomingMode};
use crate::topology::{AttachmentPlan, CoreTopology};
use crate::{Error, NodeId, PonIndex, Result};

/// Core (IP over WDM) device ratings, watts.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreParams {
    pub router_port_w: f64,
    pub transponder_w: f64,
    pub edfa_w: f64,
    pub optical_switch_w: f64,
    pub regenerator_w: f64,
}

/// Metro gateway ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct MetroParams {
    pub port_rate_mbps: f64,
    pub port_w: f64,
    pub redundancy: f64,
    pub switch_rate_mbps: f64,
    pub switch_w: f64,
}

/// PON device ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct PonParams {
    pub olt_w: f64,
    pub onu_w: f64,
}

/// LAN ratings of one compute tier (cloud, metro fog or access fog).
#[derive(Debug, Clone, PartialEq)]
pub struct TierLan {
    pub switch_rate_mbps: f64,
    pub switch_w: f64,
    pub port_rate_mbps: f64,
    pub port_w: f64,
}

/// Compute-tier ratings shared by clouds and fogs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeParams {
    pub server_w: f64,
    pub server_max_workload_pct: f64,
    pub switch_redundancy: f64,
    pub cloud: TierLan,
    pub metro_fog: TierLan,
    pub access_fog: TierLan,
}

/// Power usage effectiveness per segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PueSet {
    pub cloud: f64,
    pub metro_fog: f64,
    pub access_fog: f64,
    pub network: f64,
}

impl PueSet {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cloud", self.cloud),
            ("metro_fog", self.metro_fog),
            ("access_fog", self.access_fog),
            ("network", self.network),
        ] {
            if v < 1.0 {
                return Err(Error::InvalidScenario(format!(
                    "PUE {name} must be >= 1, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// All device ratings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerParams {
    pub core: CoreParams,
    pub metro: MetroParams,
    pub pon: PonParams,
    pub compute: ComputeParams,
}

impl PowerParams {
    /// Equipment ratings used throughout the bundled scenarios.
    pub fn defaults() -> Self {
        PowerParams {
            core: CoreParams {
                router_port_w: 638.0,
                transponder_w: 129.0,
                edfa_w: 11.0,
                optical_switch_w: 85.0,
                regenerator_w: 114.0,
            },
            metro: MetroParams {
                port_rate_mbps: 40_000.0,
                port_w: 30.0,
                redundancy: 2.0,
                switch_rate_mbps: 600_000.0,
                switch_w: 470.0,
            },
            pon: PonParams {
                olt_w: 1842.0,
                onu_w: 5.0,
            },
            compute: ComputeParams {
                server_w: 333.0,
                server_max_workload_pct: 100.0,
                switch_redundancy: 2.0,
                cloud: TierLan {
                    switch_rate_mbps: 600_000.0,
                    switch_w: 470.0,
                    port_rate_mbps: 40_000.0,
                    port_w: 30.0,
                },
                metro_fog: TierLan {
                    switch_rate_mbps: 600_000.0,
                    switch_w: 470.0,
                    port_rate_mbps: 40_000.0,
                    port_w: 13.0,
                },
                access_fog: TierLan {
                    switch_rate_mbps: 240_000.0,
                    switch_w: 210.0,
                    port_rate_mbps: 40_000.0,
                    port_w: 13.0,
                },
            },
        }
    }

    /// Best-practice data center PUE values.
    pub fn pue_best_practice() -> PueSet {
        PueSet {
            cloud: 1.3,
            metro_fog: 1.4,
            access_fog: 1.5,
            network: 1.5,
        }
    }

    /// 2014-era data center PUE values.
    pub fn pue_2014() -> PueSet {
        PueSet {
            cloud: 1.7,
            metro_fog: 1.9,
            access_fog: 2.5,
            network: 1.5,
        }
    }
}

/// Evaluation switches shared by all solvers and reports.
#[derive(Debug, Clone, Copy)]
pub struct EvalSettings {
    pub linear_mode: LinearMode,
    pub agg_port_mode: AggPortMode,
    pub grooming: GroomingMode,
    /// Charge optical switches at every core node regardless of traffic.
    pub optical_switch_always_on: bool,
    /// Clamp per-link EDFA/regenerator counts at zero (the span formulas go
    /// negative on short links).
    pub clamp_amplifier_counts: bool,
    pub validate: ValidateOptions,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            linear_mode: LinearMode::Default,
            agg_port_mode: AggPortMode::Ceil,
            grooming: GroomingMode::Aggregate,
            optical_switch_always_on: true,
            clamp_amplifier_counts: true,
            validate: ValidateOptions::default(),
        }
    }
}

/// Network segment of a power term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Segment {
    Core,
    Metro,
    Pon,
    Cloud,
    MetroFog,
    AccessFog,
}

impl Segment {
    pub const ALL: [Segment; 6] = [
        Segment::Core,
        Segment::Metro,
        Segment::Pon,
        Segment::Cloud,
        Segment::MetroFog,
        Segment::AccessFog,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Core => "core",
            Segment::Metro => "metro",
            Segment::Pon => "pon",
            Segment::Cloud => "cloud",
            Segment::MetroFog => "metro_fog",
            Segment::AccessFog => "access_fog",
        }
    }
}

/// Device class of a power term. Counts already include redundancy
/// multipliers, so watts = count * unit_watts * pue holds for every term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeviceClass {
    Server,
    Switch,
    RouterPort,
    AggPortCloud,
    AggPortEdge,
    Transponder,
    Edfa,
    OpticalSwitch,
    Regenerator,
    Olt,
    Onu,
}

impl DeviceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviceClass::Server => "server",
            DeviceClass::Switch => "switch",
            DeviceClass::RouterPort => "router_port",
            DeviceClass::AggPortCloud => "agg_port_cloud",
            DeviceClass::AggPortEdge => "agg_port_edge",
            DeviceClass::Transponder => "transponder",
            DeviceClass::Edfa => "edfa",
            DeviceClass::OpticalSwitch => "optical_switch",
            DeviceClass::Regenerator => "regenerator",
            DeviceClass::Olt => "olt",
            DeviceClass::Onu => "onu",
        }
    }
}

/// One audited power term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub segment: Segment,
    pub device_class: DeviceClass,
    pub count: f64,
    pub unit_watts: f64,
    pub pue: f64,
}

impl PowerTerm {
    pub fn watts(&self) -> f64 {
        self.count * self.unit_watts * self.pue
    }
}

/// Power consumption split by segment and device class.
#[derive(Debug, Clone, Default)]
pub struct PowerBreakdown {
    pub terms: Vec<PowerTerm>,
}

impl PowerBreakdown {
    pub fn total_w(&self) -> f64 {
        self.terms.iter().map(PowerTerm::watts).sum()
    }

    pub fn segment_w(&self, segment: Segment) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.segment == segment)
            .map(PowerTerm::watts)
            .sum()
    }
}

/// Sink for power terms: the reporting path collects them, optimizer hot
/// loops fold them straight into a running total.
pub trait TermSink {
    fn term(&mut self, term: PowerTerm);
}

impl TermSink for PowerBreakdown {
    fn term(&mut self, term: PowerTerm) {
        self.terms.push(term);
    }
}

/// Accumulates watts only.
#[derive(Debug, Default)]
pub struct TotalOnly(pub f64);

impl TermSink for TotalOnly {
    fn term(&mut self, term: PowerTerm) {
        self.0 += term.watts();
    }
}

/// Servers needed for a site workload: ceil(workload / per-server capacity).
pub fn size_servers(total_workload_pct: f64, server_max_workload_pct: f64) -> u64 {
    debug_assert!(total_workload_pct >= 0.0);
    (total_workload_pct / server_max_workload_pct).ceil() as u64
}

/// Router ports and switches for a site traffic volume.
pub fn size_ports_switches(traffic_mbps: f64, port_rate_mbps: f64, switch_rate_mbps: f64) -> (u64, u64) {
    debug_assert!(traffic_mbps >= 0.0);
    (
        (traffic_mbps / port_rate_mbps).ceil() as u64,
        (traffic_mbps / switch_rate_mbps).ceil() as u64,
    )
}

/// Load on one compute site.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SiteLoad {
    pub traffic_mbps: f64,
    pub workload_pct: f64,
}

/// Everything the power model needs to price a placement, after workloads
/// and traffic have been aggregated per site.
#[derive(Debug, Clone, Default)]
pub struct SiteAggregates {
    pub cloud: BTreeMap<NodeId, SiteLoad>,
    pub metro_fog: BTreeMap<NodeId, SiteLoad>,
    pub access_fog: BTreeMap<(NodeId, PonIndex), SiteLoad>,
    /// Cloud-bound plus metro-fog-bound traffic per node; access-fog traffic
    /// never reaches the metro.
    pub metro_transit: BTreeMap<NodeId, f64>,
    /// L[s][d]: traffic from the cloud at s to users at d.
    pub cloud_demand: BTreeMap<(NodeId, NodeId), f64>,
}

impl SiteAggregates {
    /// Aggregate a validated placement.
    pub fn from_placement(
        placement: &Placement,
        specs: &[VmSpec],
        mode: LinearMode,
    ) -> Result<Self> {
        let ledger = placement::workloads(placement, specs, mode)?;
        let mut agg = SiteAggregates {
            cloud_demand: placement.cloud_demand_matrix(),
            ..Default::default()
        };
        for (&(vm, loc), &traffic) in &placement.served_per_replica() {
            if traffic <= 0.0 {
                continue;
            }
            let w = ledger.per_replica.get(&(vm, loc)).copied().unwrap_or(0.0);
            match loc {
                Location::Cloud(s) => {
                    let e = agg.cloud.entry(s).or_default();
                    e.traffic_mbps += traffic;
                    e.workload_pct += w;
                }
                Location::MetroFog(s) => {
                    let e = agg.metro_fog.entry(s).or_default();
                    e.traffic_mbps += traffic;
                    e.workload_pct += w;
                    *agg.metro_transit.entry(s).or_insert(0.0) += traffic;
                }
                Location::AccessFog { node, pon } => {
                    let e = agg.access_fog.entry((node, pon)).or_default();
                    e.traffic_mbps += traffic;
                    e.workload_pct += w;
                }
            }
        }
        for (&(_, d), &traffic) in &agg.cloud_demand {
            *agg.metro_transit.entry(d).or_insert(0.0) += traffic;
        }
        Ok(agg)
    }
}

/// Compute-tier power terms (servers, then switches and ports).
fn tier_power<S: TermSink>(
    segment: Segment,
    loads: impl Iterator<Item = SiteLoad>,
    lan: &TierLan,
    compute: &ComputeParams,
    pue: f64,
    sink: &mut S,
) {
    let mut servers = 0u64;
    let mut switches = 0u64;
    let mut ports = 0u64;
    for load in loads {
        servers += size_servers(load.workload_pct, compute.server_max_workload_pct);
        let (p, sw) = size_ports_switches(load.traffic_mbps, lan.port_rate_mbps, lan.switch_rate_mbps);
        ports += p;
        switches += sw;
    }
    sink.term(PowerTerm {
        segment,
        device_class: DeviceClass::Server,
        count: servers as f64,
        unit_watts: compute.server_w,
        pue,
    });
    sink.term(PowerTerm {
        segment,
        device_class: DeviceClass::Switch,
        count: switches as f64 * compute.switch_redundancy,
        unit_watts: lan.switch_w,
        pue,
    });
    sink.term(PowerTerm {
        segment,
        device_class: DeviceClass::RouterPort,
        count: ports as f64,
        unit_watts: lan.port_w,
        pue,
    });
}

/// PON segment power: constant per scenario, independent of placement.
pub fn pon_power<S: TermSink>(
    attachment: &AttachmentPlan,
    node_count: usize,
    params: &PonParams,
    network_pue: f64,
    sink: &mut S,
) {
    let pons = node_count as f64 * attachment.pons_per_node as f64;
    sink.term(PowerTerm {
        segment: Segment::Pon,
        device_class: DeviceClass::Olt,
        count: pons * attachment.olts_per_pon as f64,
        unit_watts: params.olt_w,
        pue: network_pue,
    });
    sink.term(PowerTerm {
        segment: Segment::Pon,
        device_class: DeviceClass::Onu,
        count: pons * attachment.onus_per_pon as f64,
        unit_watts: params.onu_w,
        pue: network_pue,
    });
}

/// PON segment watts alone, used as a placement-invariance cross-check.
pub fn pon_power_w(
    attachment: &AttachmentPlan,
    node_count: usize,
    params: &PonParams,
    network_pue: f64,
) -> f64 {
    let mut sink = TotalOnly::default();
    pon_power(attachment, node_count, params, network_pue, &mut sink);
    sink.0
}

/// Metro gateway power from per-node transit traffic.
pub fn metro_power<S: TermSink>(
    metro_transit: &BTreeMap<NodeId, f64>,
    params: &MetroParams,
    network_pue: f64,
    sink: &mut S,
) {
    let mut ports = 0u64;
    let mut switches = 0u64;
    for &traffic in metro_transit.values() {
        if traffic <= 0.0 {
            continue;
        }
        let (p, sw) = size_ports_switches(traffic, params.port_rate_mbps, params.switch_rate_mbps);
        ports += p;
        switches += sw;
    }
    sink.term(PowerTerm {
        segment: Segment::Metro,
        device_class: DeviceClass::RouterPort,
        count: ports as f64 * params.redundancy,
        unit_watts: params.port_w,
        pue: network_pue,
    });
    sink.term(PowerTerm {
        segment: Segment::Metro,
        device_class: DeviceClass::Switch,
        count: switches as f64,
        unit_watts: params.switch_w,
        pue: network_pue,
    });
}

/// Core network power under the non-bypass model.
pub fn core_power<S: TermSink>(
    state: &CoreState,
    topo: &CoreTopology,
    params: &CoreParams,
    network_pue: f64,
    settings: &EvalSettings,
    sink: &mut S,
) {
    let agg_cloud: f64 = state.agg_ports_cloud.values().sum();
    let agg_edge: f64 = state.agg_ports_edge.values().sum();
    let wavelengths = state.total_wavelengths() as f64;

    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::AggPortCloud,
        count: agg_cloud,
        unit_watts: params.router_port_w,
        pue: network_pue,
    });
    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::AggPortEdge,
        count: agg_edge,
        unit_watts: params.router_port_w,
        pue: network_pue,
    });
    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::RouterPort,
        count: wavelengths,
        unit_watts: params.router_port_w,
        pue: network_pue,
    });
    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::Transponder,
        count: wavelengths,
        unit_watts: params.transponder_w,
        pue: network_pue,
    });

    let mut edfas = 0.0;
    let mut regen_wavelengths = 0.0;
    for (link, &fibers) in &state.fibers {
        let distance = topo.link_distance_km(*link).expect("routed link exists");
        let (amps, regens) = if settings.clamp_amplifier_counts {
            (
                crate::topology::edfa_count(distance, topo.span_km).unwrap() as f64,
                crate::topology::regen_count(distance, topo.regen_reach_km).unwrap() as f64,
            )
        } else {
            (
                crate::topology::edfa_count_literal(distance, topo.span_km).unwrap() as f64,
                crate::topology::regen_count_literal(distance, topo.regen_reach_km).unwrap() as f64,
            )
        };
        edfas += fibers as f64 * amps;
        regen_wavelengths += state.wavelengths[link] as f64 * regens;
    }
    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::Edfa,
        count: edfas,
        unit_watts: params.edfa_w,
        pue: network_pue,
    });

    let optical_switches = if settings.optical_switch_always_on {
        topo.node_count() as f64
    } else {
        let mut active: std::collections::BTreeSet<NodeId> = std::collections::BTreeSet::new();
        active.extend(state.agg_ports_cloud.keys());
        active.extend(state.agg_ports_edge.keys());
        for link in state.wavelengths.keys() {
            active.insert(link.0);
            active.insert(link.1);
        }
        active.len() as f64
    };
    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::OpticalSwitch,
        count: optical_switches,
        unit_watts: params.optical_switch_w,
        pue: network_pue,
    });
    sink.term(PowerTerm {
        segment: Segment::Core,
        device_class: DeviceClass::Regenerator,
        count: regen_wavelengths,
        unit_watts: params.regenerator_w,
        pue: network_pue,
    });
}

/// Price aggregated site loads: routes the cloud demand, then emits every
/// segment's terms into the sink.
pub fn evaluate<S: TermSink>(
    agg: &SiteAggregates,
    topo: &CoreTopology,
    attachment: &AttachmentPlan,
    params: &PowerParams,
    pue: PueSet,
    settings: &EvalSettings,
    sink: &mut S,
) -> Result<()> {
    let state = routing::route_all(
        &agg.cloud_demand,
        topo,
        params.metro.redundancy,
        settings.agg_port_mode,
        settings.grooming,
    )?;
    core_power(&state, topo, &params.core, pue.network, settings, sink);
    metro_power(&agg.metro_transit, &params.metro, pue.network, sink);
    pon_power(attachment, topo.node_count(), &params.pon, pue.network, sink);
    tier_power(
        Segment::Cloud,
        agg.cloud.values().copied(),
        &params.compute.cloud,
        &params.compute,
        pue.cloud,
        sink,
    );
    tier_power(
        Segment::MetroFog,
        agg.metro_fog.values().copied(),
        &params.compute.metro_fog,
        &params.compute,
        pue.metro_fog,
        sink,
    );
    tier_power(
        Segment::AccessFog,
        agg.access_fog.values().copied(),
        &params.compute.access_fog,
        &params.compute,
        pue.access_fog,
        sink,
    );
    Ok(())
}

/// Validate a placement and price it. Returns the full per-term breakdown.
#[allow(clippy::too_many_arguments)]
pub fn total_power(
    placement: &Placement,
    demand: &crate::catalog::DemandMatrix,
    specs: &[VmSpec],
    topo: &CoreTopology,
    attachment: &AttachmentPlan,
    params: &PowerParams,
    pue: PueSet,
    settings: &EvalSettings,
) -> Result<PowerBreakdown> {
    let violations = placement::validate(
        placement,
        demand,
        specs,
        topo.nodes(),
        attachment.pons_per_node,
        settings.validate,
    );
    if !violations.is_empty() {
        return Err(Error::Infeasible(violations.len(), violations[0].to_string()));
    }
    let agg = SiteAggregates::from_placement(placement, specs, settings.linear_mode)?;
    let mut breakdown = PowerBreakdown::default();
    evaluate(&agg, topo, attachment, params, pue, settings, &mut breakdown)?;
    Ok(breakdown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::WorkloadProfile;
    use crate::placement::Serving;

    fn topo2() -> CoreTopology {
        CoreTopology::new(
            vec![1, 2],
            vec![(1, 2, 160.0)],
            80.0,
            2000.0,
            32,
            40_000.0,
        )
        .unwrap()
    }

    fn plan() -> AttachmentPlan {
        AttachmentPlan {
            pons_per_node: 1,
            onus_per_pon: 512,
            olts_per_pon: 1,
            olt_capacity_mbps: 1_280_000.0,
        }
    }

    #[test]
    fn server_sizing_is_a_ceiling() {
        assert_eq!(size_servers(125.0, 100.0), 2);
        assert_eq!(size_servers(0.0, 100.0), 0);
        assert_eq!(size_servers(900.0, 100.0), 9);
    }

    #[test]
    fn port_and_switch_sizing_are_ceilings() {
        assert_eq!(size_ports_switches(52_000.0, 40_000.0, 600_000.0), (2, 1));
        assert_eq!(size_ports_switches(0.0, 40_000.0, 600_000.0), (0, 0));
        assert_eq!(size_ports_switches(600_000.0, 40_000.0, 600_000.0), (15, 1));
    }

    #[test]
    fn pon_power_matches_hand_arithmetic() {
        // one PON: 1.5 * (1842 + 512*5) = 6603 W
        let w = pon_power_w(&plan(), 1, &PowerParams::defaults().pon, 1.5);
        assert!((w - 6603.0).abs() < 1e-9);
        // AT&T scale: 25 nodes * 2 PONs
        let att = AttachmentPlan {
            pons_per_node: 2,
            ..plan()
        };
        let w = pon_power_w(&att, 25, &PowerParams::defaults().pon, 1.5);
        assert!((w - 330_150.0).abs() < 1e-6);
        let none = AttachmentPlan {
            pons_per_node: 1,
            ..plan()
        };
        assert_eq!(pon_power_w(&none, 0, &PowerParams::defaults().pon, 1.5), 0.0);
    }

    #[test]
    fn single_cloud_server_power() {
        // 1 server, no switches/ports, c = 1.3 -> 432.9 W
        let params = PowerParams::defaults();
        let mut sink = PowerBreakdown::default();
        tier_power(
            Segment::Cloud,
            std::iter::once(SiteLoad {
                traffic_mbps: 0.0,
                workload_pct: 50.0,
            }),
            &params.compute.cloud,
            &params.compute,
            1.3,
            &mut sink,
        );
        let server_term = sink
            .terms
            .iter()
            .find(|t| t.device_class == DeviceClass::Server)
            .unwrap();
        assert!((server_term.watts() - 432.9).abs() < 1e-9);
    }

    #[test]
    fn switch_redundancy_doubles_the_powered_count() {
        // 2 sized switches with redundancy 2 at 470 W and c = 1.3 -> 2444 W
        let params = PowerParams::defaults();
        let mut sink = PowerBreakdown::default();
        tier_power(
            Segment::Cloud,
            std::iter::once(SiteLoad {
                traffic_mbps: 1_200_000.0, // ceil(1200/600) = 2 switches
                workload_pct: 0.0,
            }),
            &params.compute.cloud,
            &params.compute,
            1.3,
            &mut sink,
        );
        let sw = sink
            .terms
            .iter()
            .find(|t| t.device_class == DeviceClass::Switch)
            .unwrap();
        assert_eq!(sw.count, 4.0);
        assert!((sw.watts() - 1.3 * (2.0 * 2.0 * 470.0)).abs() < 1e-9);
    }

    #[test]
    fn metro_power_examples() {
        let params = PowerParams::defaults();
        let mut transit = BTreeMap::new();
        transit.insert(1, 52_000.0);
        let mut sink = TotalOnly::default();
        metro_power(&transit, &params.metro, 1.5, &mut sink);
        assert!((sink.0 - 885.0).abs() < 1e-9);

        transit.insert(1, 600_000.0);
        let mut sink = TotalOnly::default();
        metro_power(&transit, &params.metro, 1.5, &mut sink);
        assert!((sink.0 - 2055.0).abs() < 1e-9);

        let mut sink = TotalOnly::default();
        metro_power(&BTreeMap::new(), &params.metro, 1.5, &mut sink);
        assert_eq!(sink.0, 0.0);
    }

    #[test]
    fn core_power_single_demand_single_link() {
        // one 40 Gbps demand over one 160 km link:
        // n * (638*(1+2+1) + 129 + 11 + 2*85 + 0)
        let topo = topo2();
        let params = PowerParams::defaults();
        let mut l = BTreeMap::new();
        l.insert((1, 2), 40_000.0);
        let state = routing::route_all(
            &l,
            &topo,
            2.0,
            AggPortMode::Ceil,
            GroomingMode::Aggregate,
        )
        .unwrap();
        let mut sink = TotalOnly::default();
        core_power(
            &state,
            &topo,
            &params.core,
            1.5,
            &EvalSettings::default(),
            &mut sink,
        );
        let expected = 1.5 * (638.0 * 4.0 + 129.0 + 11.0 + 2.0 * 85.0);
        assert!((sink.0 - expected).abs() < 1e-9);
    }

    #[test]
    fn idle_core_keeps_only_optical_switches() {
        let topo = topo2();
        let params = PowerParams::defaults();
        let state = routing::route_all(
            &BTreeMap::new(),
            &topo,
            2.0,
            AggPortMode::Ceil,
            GroomingMode::Aggregate,
        )
        .unwrap();
        let mut sink = TotalOnly::default();
        core_power(
            &state,
            &topo,
            &params.core,
            1.5,
            &EvalSettings::default(),
            &mut sink,
        );
        assert!((sink.0 - 1.5 * 2.0 * 85.0).abs() < 1e-9);

        // idle-suppression flag zeroes the remaining floor
        let mut sink = TotalOnly::default();
        core_power(
            &state,
            &topo,
            &params.core,
            1.5,
            &EvalSettings {
                optical_switch_always_on: false,
                ..Default::default()
            },
            &mut sink,
        );
        assert_eq!(sink.0, 0.0);
    }

    #[test]
    fn total_power_refuses_infeasible_placements() {
        let topo = topo2();
        let specs = vec![VmSpec {
            id: 1,
            profile: WorkloadProfile::Constant,
            peak_workload_pct: 10.0,
            rate_mbps: 1.0,
            max_users_per_replica: 800,
            popularity_share: 1.0,
        }];
        let demand = crate::catalog::derive_traffic(
            crate::catalog::derive_users(&specs, 16.0, topo.nodes(), &plan()).unwrap(),
            &specs,
        );
        // placement serving only half the nodes
        let p = Placement::from_servings(vec![Serving {
            vm: 1,
            node: 1,
            pon: 0,
            location: Location::Cloud(1),
            traffic_mbps: 16.0,
        }]);
        let err = total_power(
            &p,
            &demand,
            &specs,
            &topo,
            &plan(),
            &PowerParams::defaults(),
            PowerParams::pue_best_practice(),
            &EvalSettings::default(),
        );
        assert!(matches!(err, Err(Error::Infeasible(..))));
    }

    #[test]
    fn empty_placement_with_zero_demand_is_pon_floor_plus_optical_switches() {
        let topo = topo2();
        let specs: Vec<VmSpec> = Vec::new();
        let demand = crate::catalog::DemandMatrix::default();
        let p = Placement::default();
        let bd = total_power(
            &p,
            &demand,
            &specs,
            &topo,
            &plan(),
            &PowerParams::defaults(),
            PowerParams::pue_best_practice(),
            &EvalSettings::default(),
        )
        .unwrap();
        let pon = pon_power_w(&plan(), 2, &PowerParams::defaults().pon, 1.5);
        assert!((bd.total_w() - (pon + 1.5 * 2.0 * 85.0)).abs() < 1e-9);
        assert!((bd.segment_w(Segment::Pon) - pon).abs() < 1e-9);
    }

    #[test]
    fn breakdown_total_equals_sum_of_segments() {
        let topo = topo2();
        let specs = vec![VmSpec {
            id: 1,
            profile: WorkloadProfile::Linear { baseline_pct: 1.0 },
            peak_workload_pct: 50.0,
            rate_mbps: 25.0,
            max_users_per_replica: 800,
            popularity_share: 0.5,
        }];
        let demand = crate::catalog::derive_traffic(
            crate::catalog::derive_users(&specs, 1000.0, topo.nodes(), &plan()).unwrap(),
            &specs,
        );
        let servings = demand
            .entries
            .iter()
            .map(|e| Serving {
                vm: e.vm,
                node: e.node,
                pon: e.pon,
                location: Location::Cloud(2),
                traffic_mbps: e.traffic_mbps,
            })
            .collect();
        let p = Placement::from_servings(servings);
        let bd = total_power(
            &p,
            &demand,
            &specs,
            &topo,
            &plan(),
            &PowerParams::defaults(),
            PowerParams::pue_best_practice(),
            &EvalSettings::default(),
        )
        .unwrap();
        let by_segment: f64 = Segment::ALL.iter().map(|&s| bd.segment_w(s)).sum();
        assert!((bd.total_w() - by_segment).abs() < 1e-9);
        assert!(bd.terms.iter().all(|t| t.watts() >= 0.0));
    }
}
