//! Exact optimizer: exhaustive enumeration over integral serving
//! assignments. Tractable at desk scale, and the ground truth the heuristic
//! is measured against.

use rand::Rng;
use rayon::prelude::*;

use crate::catalog::{LinearMode, WorkloadProfile};
use crate::placement::{Location, Placement, Serving};
use crate::power::PowerBreakdown;
use crate::routing::GroomingMode;
use crate::scenario::EvalContext;
use crate::topology::LinkKey;
use crate::{Error, NodeId, PonIndex, Result, VmId};

/// One demand unit to be assigned a serving location.
#[derive(Debug, Clone, Copy)]
pub struct DemandUnit {
    pub vm: VmId,
    pub node: NodeId,
    pub pon: PonIndex,
    pub traffic_mbps: f64,
}

/// The per-unit candidate space of a scenario: every allowed cloud site,
/// then the unit's own metro fog, then its own access fog.
pub struct SearchSpace {
    pub units: Vec<DemandUnit>,
    pub candidates_per_unit: usize,
}

impl SearchSpace {
    /// Total number of integral placements.
    pub fn size(&self) -> u128 {
        (self.candidates_per_unit as u128)
            .checked_pow(self.units.len() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn check_bound(&self, bound: u64) -> Result<u64> {
        let size = self.size();
        if size > bound as u128 {
            return Err(Error::TooLarge {
                required: size,
                bound,
            });
        }
        Ok(size as u64)
    }
}

/// Result of an exact solve.
pub struct OracleSolution {
    pub placement: Placement,
    pub breakdown: PowerBreakdown,
    pub power_w: f64,
    pub candidates_evaluated: u64,
}

// --------------------------------------------------------------------------
// Fast assignment evaluator
// --------------------------------------------------------------------------

struct VmData {
    id: VmId,
    profile: WorkloadProfile,
    peak_pct: f64,
    slope_per_mbps: f64,
    full_traffic_mbps: f64,
}

struct UnitData {
    vm_idx: usize,
    node_idx: usize,
    pon: PonIndex,
    traffic: f64,
}

struct LinkData {
    edfas: f64,
    regens: f64,
}

/// Flat-array power evaluator over serving assignments. It prices exactly
/// what [`crate::power::total_power`] prices; the oracle re-checks its
/// winner through that public path.
pub struct FastEval<'a> {
    ctx: &'a EvalContext,
    nodes: Vec<NodeId>,
    node_count: usize,
    pons_per_node: usize,
    vms: Vec<VmData>,
    units: Vec<UnitData>,
    pub(crate) sites: Vec<usize>, // allowed cloud sites, as node indices
    has_metro_fog: bool,
    has_access_fog: bool,
    links: Vec<LinkData>,
    /// Link indices of the min-hop path for each (src node idx, dst idx).
    path_links: Vec<Vec<u16>>,
    /// Hop count for each (src node idx, dst idx), for nearest-site rules.
    hop: Vec<u32>,
    /// Scenario-constant watts: PON floor plus always-on optical switches.
    floor_w: f64,
    wavelength_rate: f64,
    wavelengths_per_fiber: f64,
}

/// Reusable evaluation buffers.
pub struct Scratch {
    cloud_vm_site: Vec<f64>,
    mf_vm_node: Vec<f64>,
    af_vm_pon: Vec<f64>,
    l_matrix: Vec<f64>,
    /// (site, dst) pairs with nonzero demand this evaluation.
    touched_pairs: Vec<(u16, u16)>,
    link_traffic: Vec<f64>,
    touched_links: Vec<u16>,
    link_demand_wavelengths: Vec<f64>,
    site_out: Vec<f64>,
    arrivals: Vec<f64>,
    assignment: Vec<u8>,
}

impl<'a> FastEval<'a> {
    /// Build an evaluator over the demand of `vm_filter` (or all VMs).
    pub fn new(ctx: &'a EvalContext, vm_filter: Option<VmId>) -> Result<Self> {
        let nodes = ctx.topo.nodes().to_vec();
        let node_count = nodes.len();
        let node_idx = |n: NodeId| nodes.binary_search(&n).expect("node id in topology");
        let pons_per_node = ctx.attachment.pons_per_node as usize;

        let mut vms = Vec::new();
        for spec in &ctx.specs {
            if vm_filter.is_some_and(|id| id != spec.id) {
                continue;
            }
            vms.push(VmData {
                id: spec.id,
                profile: spec.profile,
                peak_pct: spec.peak_workload_pct,
                slope_per_mbps: spec.workload_slope_per_mbps(),
                full_traffic_mbps: spec.full_replica_traffic_mbps(),
            });
        }
        let vm_idx_of = |id: VmId| vms.iter().position(|v| v.id == id).unwrap();

        let mut units = Vec::new();
        for e in &ctx.demand.entries {
            if vm_filter.is_some_and(|id| id != e.vm) {
                continue;
            }
            if e.traffic_mbps <= 0.0 {
                continue;
            }
            units.push(UnitData {
                vm_idx: vm_idx_of(e.vm),
                node_idx: node_idx(e.node),
                pon: e.pon,
                traffic: e.traffic_mbps,
            });
        }

        let link_keys: Vec<LinkKey> = ctx.topo.links().keys().copied().collect();
        let link_index = |key: LinkKey| link_keys.binary_search(&key).unwrap() as u16;
        let links = link_keys
            .iter()
            .map(|&key| {
                let d = ctx.topo.link_distance_km(key).unwrap();
                let (edfas, regens) = if ctx.settings.clamp_amplifier_counts {
                    (
                        crate::topology::edfa_count(d, ctx.topo.span_km).unwrap() as f64,
                        crate::topology::regen_count(d, ctx.topo.regen_reach_km).unwrap() as f64,
                    )
                } else {
                    (
                        crate::topology::edfa_count_literal(d, ctx.topo.span_km).unwrap() as f64,
                        crate::topology::regen_count_literal(d, ctx.topo.regen_reach_km).unwrap()
                            as f64,
                    )
                };
                LinkData { edfas, regens }
            })
            .collect();

        let mut path_links = vec![Vec::new(); node_count * node_count];
        let mut hop = vec![0u32; node_count * node_count];
        for (si, &s) in nodes.iter().enumerate() {
            for (di, &d) in nodes.iter().enumerate() {
                let path = ctx.topo.min_hop_path(s, d)?;
                hop[si * node_count + di] = path.len() as u32;
                path_links[si * node_count + di] = path
                    .iter()
                    .map(|&(a, b)| link_index(LinkKey::new(a, b)))
                    .collect();
            }
        }

        let floor_w = ctx.pon_floor_w()
            + if ctx.settings.optical_switch_always_on {
                ctx.pue.network * node_count as f64 * ctx.params.core.optical_switch_w
            } else {
                0.0
            };

        Ok(FastEval {
            sites: ctx.cloud_sites.iter().map(|&s| node_idx(s)).collect(),
            has_metro_fog: ctx.restriction.allows_metro_fog(),
            has_access_fog: ctx.restriction.allows_access_fog(),
            nodes,
            node_count,
            pons_per_node,
            vms,
            units,
            links,
            path_links,
            hop,
            floor_w,
            wavelength_rate: ctx.topo.wavelength_rate_mbps,
            wavelengths_per_fiber: ctx.topo.wavelengths_per_fiber as f64,
            ctx,
        })
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace {
            units: self
                .units
                .iter()
                .map(|u| DemandUnit {
                    vm: self.vms[u.vm_idx].id,
                    node: self.nodes[u.node_idx],
                    pon: u.pon,
                    traffic_mbps: u.traffic,
                })
                .collect(),
            candidates_per_unit: self.candidate_count(),
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.sites.len() + self.has_metro_fog as usize + self.has_access_fog as usize
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn site_nodes(&self) -> Vec<NodeId> {
        self.sites.iter().map(|&si| self.nodes[si]).collect()
    }

    /// Location encoded by candidate digit `c` for unit `i`.
    pub fn location_of(&self, unit: usize, c: u8) -> Location {
        let c = c as usize;
        let u = &self.units[unit];
        if c < self.sites.len() {
            Location::Cloud(self.nodes[self.sites[c]])
        } else if c == self.sites.len() && self.has_metro_fog {
            Location::MetroFog(self.nodes[u.node_idx])
        } else {
            Location::AccessFog {
                node: self.nodes[u.node_idx],
                pon: u.pon,
            }
        }
    }

    /// Candidate digit serving `unit` from its own metro fog.
    pub fn metro_fog_digit(&self) -> Option<u8> {
        self.has_metro_fog.then_some(self.sites.len() as u8)
    }

    /// Candidate digit serving `unit` from its own access fog.
    pub fn access_fog_digit(&self) -> Option<u8> {
        self.has_access_fog
            .then_some((self.sites.len() + self.has_metro_fog as usize) as u8)
    }

    /// Candidate digit that serves `unit` from the nearest member of
    /// `subset` (indices into the allowed-site list), lowest node id on
    /// ties.
    pub fn nearest_site_digit(&self, unit: usize, subset: &[usize]) -> u8 {
        let d = self.units[unit].node_idx;
        let best = subset
            .iter()
            .copied()
            .min_by_key(|&si| {
                (
                    self.hop[self.sites[si] * self.node_count + d],
                    self.nodes[self.sites[si]],
                )
            })
            .expect("nonempty subset");
        best as u8
    }

    pub fn new_scratch(&self) -> Scratch {
        let n = self.node_count;
        let v = self.vms.len();
        Scratch {
            cloud_vm_site: vec![0.0; v * n],
            mf_vm_node: vec![0.0; v * n],
            af_vm_pon: vec![0.0; v * n * self.pons_per_node],
            l_matrix: vec![0.0; n * n],
            touched_pairs: Vec::with_capacity(self.units.len()),
            link_traffic: vec![0.0; self.links.len()],
            touched_links: Vec::with_capacity(self.links.len()),
            link_demand_wavelengths: vec![0.0; self.links.len()],
            site_out: vec![0.0; n],
            arrivals: vec![0.0; n],
            assignment: vec![0; self.units.len()],
        }
    }

    fn workload(&self, vm: &VmData, traffic: f64, mode: LinearMode) -> f64 {
        if traffic <= 0.0 {
            return 0.0;
        }
        match vm.profile {
            WorkloadProfile::Constant => vm.peak_pct,
            WorkloadProfile::Linear { baseline_pct } => match mode {
                LinearMode::Default => baseline_pct + vm.slope_per_mbps * traffic,
                LinearMode::Literal => {
                    (traffic / vm.full_traffic_mbps) * baseline_pct + vm.slope_per_mbps * traffic
                }
            },
        }
    }

    /// Price one assignment (digit per unit). Includes the scenario floor.
    pub fn evaluate(&self, assignment: &[u8], s: &mut Scratch) -> f64 {
        let n = self.node_count;
        let v = self.vms.len();
        let p = self.pons_per_node;
        s.cloud_vm_site.fill(0.0);
        s.mf_vm_node.fill(0.0);
        s.af_vm_pon.fill(0.0);
        for &(site, d) in &s.touched_pairs {
            s.l_matrix[site as usize * n + d as usize] = 0.0;
        }
        s.touched_pairs.clear();
        for &li in &s.touched_links {
            s.link_traffic[li as usize] = 0.0;
            s.link_demand_wavelengths[li as usize] = 0.0;
        }
        s.touched_links.clear();

        let n_sites = self.sites.len();
        for (u, &digit) in self.units.iter().zip(assignment) {
            let c = digit as usize;
            if c < n_sites {
                let site = self.sites[c];
                s.cloud_vm_site[u.vm_idx * n + site] += u.traffic;
                let cell = site * n + u.node_idx;
                if s.l_matrix[cell] == 0.0 {
                    s.touched_pairs.push((site as u16, u.node_idx as u16));
                }
                s.l_matrix[cell] += u.traffic;
            } else if c == n_sites && self.has_metro_fog {
                s.mf_vm_node[u.vm_idx * n + u.node_idx] += u.traffic;
            } else {
                s.af_vm_pon[(u.vm_idx * n + u.node_idx) * p + u.pon as usize] += u.traffic;
            }
        }

        let ctx = self.ctx;
        let params = &ctx.params;
        let pue = ctx.pue;
        let mode = ctx.settings.linear_mode;
        let mut total = self.floor_w;

        // Compute tiers.
        let server_cap = params.compute.server_max_workload_pct;
        let server_w = params.compute.server_w;
        let sw_red = params.compute.switch_redundancy;
        for (tier_pue, lan, per_site, sites_len) in [
            (pue.cloud, &params.compute.cloud, &s.cloud_vm_site, n),
            (pue.metro_fog, &params.compute.metro_fog, &s.mf_vm_node, n),
            (
                pue.access_fog,
                &params.compute.access_fog,
                &s.af_vm_pon,
                n * p,
            ),
        ] {
            let mut servers = 0u64;
            let mut switches = 0u64;
            let mut ports = 0u64;
            for site in 0..sites_len {
                let mut traffic = 0.0;
                let mut workload = 0.0;
                for vm in 0..v {
                    let t = per_site[vm * sites_len + site];
                    if t > 0.0 {
                        traffic += t;
                        workload += self.workload(&self.vms[vm], t, mode);
                    }
                }
                if traffic <= 0.0 {
                    continue;
                }
                servers += (workload / server_cap).ceil() as u64;
                ports += (traffic / lan.port_rate_mbps).ceil() as u64;
                switches += (traffic / lan.switch_rate_mbps).ceil() as u64;
            }
            total += tier_pue
                * (servers as f64 * server_w
                    + switches as f64 * sw_red * lan.switch_w
                    + ports as f64 * lan.port_w);
        }

        // Core routing and metro transit.
        let rate = self.wavelength_rate;
        s.touched_pairs.sort_unstable();
        s.site_out.fill(0.0);
        s.arrivals.fill(0.0);
        for &(site, d) in &s.touched_pairs {
            let l = s.l_matrix[site as usize * n + d as usize];
            s.site_out[site as usize] += l;
            s.arrivals[d as usize] += l;
            for &li in &self.path_links[site as usize * n + d as usize] {
                if s.link_traffic[li as usize] == 0.0 {
                    s.touched_links.push(li);
                }
                s.link_traffic[li as usize] += l;
                s.link_demand_wavelengths[li as usize] += (l / rate).ceil();
            }
        }
        let mut agg_cloud = 0.0;
        let mut metro_ports = 0u64;
        let mut metro_switches = 0u64;
        let mut agg_edge = 0.0;
        for site in 0..n {
            if s.site_out[site] > 0.0 {
                agg_cloud += ctx.settings.agg_port_mode.size(s.site_out[site], rate);
            }
        }
        for d in 0..n {
            let mut mf = 0.0;
            for vm in 0..v {
                mf += s.mf_vm_node[vm * n + d];
            }
            if s.arrivals[d] > 0.0 {
                agg_edge += params.metro.redundancy
                    * ctx.settings.agg_port_mode.size(s.arrivals[d], rate);
            }
            let transit = s.arrivals[d] + mf;
            if transit > 0.0 {
                metro_ports += (transit / params.metro.port_rate_mbps).ceil() as u64;
                metro_switches += (transit / params.metro.switch_rate_mbps).ceil() as u64;
            }
        }
        total += pue.network
            * (metro_ports as f64 * params.metro.redundancy * params.metro.port_w
                + metro_switches as f64 * params.metro.switch_w);

        let mut wavelengths = 0.0;
        let mut edfas = 0.0;
        let mut regen_wavelengths = 0.0;
        let mut active_nodes = 0.0;
        s.touched_links.sort_unstable();
        for &li in &s.touched_links {
            let li = li as usize;
            let t = s.link_traffic[li];
            if t <= 0.0 {
                continue;
            }
            let link = &self.links[li];
            let w = match ctx.settings.grooming {
                GroomingMode::Aggregate => (t / rate).ceil(),
                GroomingMode::PerDemand => s.link_demand_wavelengths[li],
            };
            let fibers = (w / self.wavelengths_per_fiber).ceil();
            wavelengths += w;
            edfas += fibers * link.edfas;
            regen_wavelengths += w * link.regens;
        }
        if !ctx.settings.optical_switch_always_on {
            // Idle suppression: count nodes touched by lit links or ports.
            let mut active = vec![false; n];
            let keys: Vec<_> = ctx.topo.links().keys().collect();
            for &li in &s.touched_links {
                let key = keys[li as usize];
                active[self.nodes.binary_search(&key.0).unwrap()] = true;
                active[self.nodes.binary_search(&key.1).unwrap()] = true;
            }
            for &(site, d) in &s.touched_pairs {
                active[site as usize] = true;
                active[d as usize] = true;
            }
            active_nodes = active.iter().filter(|&&a| a).count() as f64;
        }
        total += pue.network
            * (params.core.router_port_w * (agg_cloud + agg_edge + wavelengths)
                + params.core.transponder_w * wavelengths
                + params.core.edfa_w * edfas
                + params.core.optical_switch_w * active_nodes
                + params.core.regenerator_w * regen_wavelengths);

        total
    }

    /// Turn an assignment into servings.
    pub fn placement(&self, assignment: &[u8]) -> Placement {
        let servings = self
            .units
            .iter()
            .enumerate()
            .map(|(i, u)| Serving {
                vm: self.vms[u.vm_idx].id,
                node: self.nodes[u.node_idx],
                pon: u.pon,
                location: self.location_of(i, assignment[i]),
                traffic_mbps: u.traffic,
            })
            .collect();
        Placement::from_servings(servings)
    }
}

// --------------------------------------------------------------------------
// Exhaustive solvers
// --------------------------------------------------------------------------

/// Exact argmin over all integral serving assignments.
///
/// Ties break toward the lexicographically smallest assignment in canonical
/// unit order (clouds by ascending node id, then metro fog, then access
/// fog), so outputs are reproducible across machines and thread counts.
pub fn solve_exact(ctx: &EvalContext) -> Result<OracleSolution> {
    let eval = FastEval::new(ctx, None)?;
    let space = eval.search_space();
    let units = eval.unit_count();
    if units == 0 {
        let placement = Placement::default();
        let breakdown = ctx.total_power(&placement)?;
        let power_w = breakdown.total_w();
        return Ok(OracleSolution {
            placement,
            breakdown,
            power_w,
            candidates_evaluated: 1,
        });
    }
    let total = space.check_bound(ctx.run.enumeration_bound)?;
    let radix = eval.candidate_count() as u64;

    let decode = |mut idx: u64, digits: &mut [u8]| {
        for slot in digits.iter_mut().rev() {
            *slot = (idx % radix) as u8;
            idx /= radix;
        }
    };

    let best = (0..total)
        .into_par_iter()
        .map_init(
            || eval.new_scratch(),
            |scratch, idx| {
                let mut digits = std::mem::take(&mut scratch.assignment);
                decode(idx, &mut digits);
                let power = eval.evaluate(&digits, scratch);
                scratch.assignment = digits;
                (power, idx)
            },
        )
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| {
                if (b.0, b.1) < (a.0, a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let mut digits = vec![0u8; units];
    decode(best.1, &mut digits);
    let placement = eval.placement(&digits);
    let breakdown = ctx.total_power(&placement)?;
    let power_w = breakdown.total_w();
    debug_assert!(
        (power_w - best.0).abs() <= 1e-6 * power_w.max(1.0),
        "fast evaluator disagrees with the audited path: {} vs {}",
        best.0,
        power_w
    );
    Ok(OracleSolution {
        placement,
        breakdown,
        power_w,
        candidates_evaluated: total,
    })
}

/// Best k-subset of cloud sites for one VM, every demand unit assigned to
/// its min-hop-nearest chosen site (lowest node id on ties).
///
/// Returns the chosen sites and the resulting power (scenario floor
/// included). Errors if C(sites, k) exceeds the enumeration bound.
pub fn enumerate_k_cloud_subsets(
    ctx: &EvalContext,
    vm: VmId,
    k: usize,
) -> Result<(Vec<NodeId>, f64)> {
    let eval = FastEval::new(ctx, Some(vm))?;
    best_k_subset(&eval, k, ctx.run.enumeration_bound)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) as u128 / (i + 1) as u128;
    }
    result
}

pub(crate) fn best_k_subset(eval: &FastEval, k: usize, bound: u64) -> Result<(Vec<NodeId>, f64)> {
    let n_sites = eval.sites.len();
    if k == 0 || k > n_sites {
        return Err(Error::InvalidParameter(format!(
            "subset size {k} out of range 1..={n_sites}"
        )));
    }
    let combos = binomial(n_sites, k);
    if combos > bound as u128 {
        return Err(Error::TooLarge {
            required: combos,
            bound,
        });
    }

    let best = (0..combos as u64)
        .into_par_iter()
        .map_init(
            || (eval.new_scratch(), vec![0usize; k]),
            |(scratch, subset), idx| {
                unrank_combination(idx as u128, n_sites, k, subset);
                let mut digits = std::mem::take(&mut scratch.assignment);
                for unit in 0..eval.unit_count() {
                    digits[unit] = eval.nearest_site_digit(unit, subset);
                }
                let power = eval.evaluate(&digits, scratch);
                scratch.assignment = digits;
                (power, idx)
            },
        )
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );

    let mut subset = vec![0usize; k];
    unrank_combination(best.1 as u128, n_sites, k, &mut subset);
    let sites = subset
        .iter()
        .map(|&si| eval.nodes[eval.sites[si]])
        .collect();
    Ok((sites, best.0))
}

/// Write the `rank`-th k-combination of 0..n (lexicographic) into `out`.
fn unrank_combination(mut rank: u128, n: usize, k: usize, out: &mut [usize]) {
    let mut next = 0usize;
    for slot in 0..k {
        let mut candidate = next;
        loop {
            let remaining = binomial(n - candidate - 1, k - slot - 1);
            if rank < remaining {
                break;
            }
            rank -= remaining;
            candidate += 1;
        }
        out[slot] = candidate;
        next = candidate + 1;
    }
}

/// Greedy marginal-power site addition: for every k in 1..=N, the greedily
/// grown site set and its power, lowest node id on ties.
pub(crate) fn greedy_site_chain(eval: &FastEval) -> Vec<(Vec<NodeId>, f64)> {
    let n_sites = eval.sites.len();
    let mut scratch = eval.new_scratch();
    let mut chosen: Vec<usize> = Vec::new();
    let mut chain = Vec::new();
    let mut digits = vec![0u8; eval.unit_count()];
    for _ in 0..n_sites {
        let mut best: Option<(f64, NodeId, usize)> = None;
        for candidate in 0..n_sites {
            if chosen.contains(&candidate) {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(candidate);
            trial.sort_unstable();
            for unit in 0..eval.unit_count() {
                digits[unit] = eval.nearest_site_digit(unit, &trial);
            }
            let power = eval.evaluate(&digits, &mut scratch);
            let node = eval.nodes[eval.sites[candidate]];
            if best.is_none_or(|(bp, bn, _)| (power, node) < (bp, bn)) {
                best = Some((power, node, candidate));
            }
        }
        let (power, _, site) = best.expect("site available");
        chosen.push(site);
        chosen.sort_unstable();
        chain.push((
            chosen
                .iter()
                .map(|&si| eval.nodes[eval.sites[si]])
                .collect(),
            power,
        ));
    }
    chain
}

/// A uniformly random integral assignment, for dominance checks.
pub fn random_placement<R: Rng>(ctx: &EvalContext, rng: &mut R) -> Result<Placement> {
    let eval = FastEval::new(ctx, None)?;
    let radix = eval.candidate_count() as u8;
    let digits: Vec<u8> = (0..eval.unit_count())
        .map(|_| rng.gen_range(0..radix))
        .collect();
    Ok(eval.placement(&digits))
}

/// A small line-topology scenario for exact solves, shared by tests.
#[cfg(test)]
pub(crate) fn toy_scenario(nodes: u32, users_per_pon: f64, rate_mbps: f64) -> crate::scenario::Scenario {
    use crate::scenario::bundled;
    let mut s = bundled::att_single_vm();
    s.name = format!("toy-line-{nodes}");
    s.topology.nodes = (1..=nodes).collect();
    s.topology.links = (1..nodes)
        .map(|i| crate::scenario::format_link(i, i + 1, 120.0))
        .collect();
    s.attachment.pons_per_node = 1;
    s.catalog.users_per_pon = users_per_pon;
    s.catalog.vms[0].rate_mbps = rate_mbps;
    s.catalog.vms[0].profile = "constant".into();
    s.catalog.vms[0].baseline_pct = None;
    s.run.att_sites = vec![1];
    s
}
