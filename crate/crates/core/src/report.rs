//! CSV report writers. All files use '.' decimals, '\n' line endings and a
//! mandatory header row; rows are emitted in deterministic order so reports
//! are byte-for-byte reproducible.

use std::fmt::Write as _;

use crate::catalog::DemandMatrix;
use crate::placement::{Location, Placement};
use crate::power::PowerBreakdown;
use crate::routing::CoreState;
use crate::scenario::EvalContext;
use crate::topology::CoreTopology;

/// Trim a float for CSV: integral values print without a fraction.
fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Power breakdown audit trail: one row per (segment, device class).
pub fn power_breakdown_csv(b: &PowerBreakdown) -> String {
    let mut out = String::from("segment,device_class,count,unit_watts,pue,watts\n");
    for t in &b.terms {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.segment.as_str(),
            t.device_class.as_str(),
            num(t.count),
            num(t.unit_watts),
            num(t.pue),
            num(t.watts())
        )
        .unwrap();
    }
    writeln!(out, "total,,,,,{}", num(b.total_w())).unwrap();
    out
}

fn location_fields(loc: Location) -> (&'static str, String) {
    match loc {
        Location::Cloud(s) => ("cloud", s.to_string()),
        Location::MetroFog(s) => ("metro_fog", s.to_string()),
        Location::AccessFog { node, pon } => ("access_fog", format!("{node}/{pon}")),
    }
}

/// Serving entries: one row per (vm, pon, node, location).
pub fn servings_csv(p: &Placement) -> String {
    let mut out = String::from("vm,pon,node,location_kind,location,traffic_mbps\n");
    for s in &p.servings {
        let (kind, loc) = location_fields(s.location);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.vm,
            s.pon,
            s.node,
            kind,
            loc,
            num(s.traffic_mbps)
        )
        .unwrap();
    }
    out
}

/// Replica indicators: one row per (vm, location).
pub fn replicas_csv(p: &Placement) -> String {
    let mut out = String::from("vm,location_kind,location\n");
    for &(vm, s) in &p.cloud_replicas {
        writeln!(out, "{vm},cloud,{s}").unwrap();
    }
    for &(vm, s) in &p.metro_fog_replicas {
        writeln!(out, "{vm},metro_fog,{s}").unwrap();
    }
    for &(vm, node, pon) in &p.access_fog_replicas {
        writeln!(out, "{vm},access_fog,{node}/{pon}").unwrap();
    }
    out
}

/// Parse placement CSVs written by [`servings_csv`] and [`replicas_csv`]
/// back into a placement (the interchange between solvers and the
/// validator).
pub fn parse_placement(
    servings_text: &str,
    replicas_text: Option<&str>,
) -> crate::Result<Placement> {
    let bad = |line: usize, msg: &str| {
        crate::Error::Parse(format!("placement csv line {}: {msg}", line + 1))
    };
    let parse_location = |kind: &str, loc: &str, line: usize| -> crate::Result<Location> {
        Ok(match kind {
            "cloud" => Location::Cloud(loc.parse().map_err(|_| bad(line, "bad node id"))?),
            "metro_fog" => Location::MetroFog(loc.parse().map_err(|_| bad(line, "bad node id"))?),
            "access_fog" => {
                let (node, pon) = loc
                    .split_once('/')
                    .ok_or_else(|| bad(line, "access fog location is node/pon"))?;
                Location::AccessFog {
                    node: node.parse().map_err(|_| bad(line, "bad node id"))?,
                    pon: pon.parse().map_err(|_| bad(line, "bad pon index"))?,
                }
            }
            other => return Err(bad(line, &format!("unknown location kind '{other}'"))),
        })
    };

    let mut servings = Vec::new();
    for (i, line) in servings_text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(i, "expected 6 fields"));
        }
        servings.push(crate::placement::Serving {
            vm: f[0].parse().map_err(|_| bad(i, "bad vm id"))?,
            pon: f[1].parse().map_err(|_| bad(i, "bad pon index"))?,
            node: f[2].parse().map_err(|_| bad(i, "bad node id"))?,
            location: parse_location(f[3], f[4], i)?,
            traffic_mbps: f[5].parse().map_err(|_| bad(i, "bad traffic"))?,
        });
    }
    let mut placement = Placement::from_servings(servings);

    // An explicit replicas file overrides the derived indicator sets, so the
    // validator can catch stale indicators.
    if let Some(text) = replicas_text {
        placement.cloud_replicas.clear();
        placement.metro_fog_replicas.clear();
        placement.access_fog_replicas.clear();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(i, "expected 3 fields"));
            }
            let vm = f[0].parse().map_err(|_| bad(i, "bad vm id"))?;
            match parse_location(f[1], f[2], i)? {
                Location::Cloud(s) => {
                    placement.cloud_replicas.insert((vm, s));
                }
                Location::MetroFog(s) => {
                    placement.metro_fog_replicas.insert((vm, s));
                }
                Location::AccessFog { node, pon } => {
                    placement.access_fog_replicas.insert((vm, node, pon));
                }
            }
        }
    }
    Ok(placement)
}

/// Demand matrix export.
pub fn demand_csv(demand: &DemandMatrix) -> String {
    let mut out = String::from("vm,pon,node,users,traffic_mbps\n");
    for e in &demand.entries {
        writeln!(
            out,
            "{},{},{},{},{}",
            e.vm,
            e.pon,
            e.node,
            e.users,
            num(e.traffic_mbps)
        )
        .unwrap();
    }
    out
}

/// Routed core state: one row per lit link.
pub fn core_state_csv(state: &CoreState, topo: &CoreTopology) -> String {
    let mut out = String::from("link,traffic_mbps,wavelengths,fibers,edfas,regenerators\n");
    for (link, &traffic) in &state.link_traffic_mbps {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            link,
            num(traffic),
            state.wavelengths[link],
            state.fibers[link],
            topo.link_edfas(*link).unwrap(),
            topo.link_regens(*link).unwrap()
        )
        .unwrap();
    }
    out
}

/// One comparison-summary row.
pub struct SummaryRow {
    pub approach: String,
    pub rate_mbps: f64,
    pub baseline_pct: f64,
    pub total_w: f64,
    pub baseline_name: String,
    pub saving_pct: f64,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out =
        String::from("approach,rate_mbps,baseline_pct,total_w,vs,saving_pct\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.approach,
            num(r.rate_mbps),
            num(r.baseline_pct),
            num(r.total_w),
            r.baseline_name,
            num(r.saving_pct)
        )
        .unwrap();
    }
    out
}

/// One single-VM sweep row: the winning tier and replica distribution.
pub struct SweepRow {
    pub profile: String,
    pub workload_pct: f64,
    pub rate_mbps: f64,
    pub pue_profile: String,
    pub winner: String,
    pub cloud_replicas: usize,
    pub metro_fog_replicas: usize,
    pub access_fog_replicas: usize,
    pub total_w: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "profile,workload_pct,rate_mbps,pue_profile,winner,cloud_replicas,metro_fog_replicas,access_fog_replicas,total_w\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.profile,
            num(r.workload_pct),
            num(r.rate_mbps),
            r.pue_profile,
            r.winner,
            r.cloud_replicas,
            r.metro_fog_replicas,
            r.access_fog_replicas,
            num(r.total_w)
        )
        .unwrap();
    }
    out
}

/// Re-derive every emitted term as count x unit-watts x PUE and confirm the
/// PON segment equals the placement-independent floor. Returns the audited
/// total.
pub fn audit_breakdown(ctx: &EvalContext, breakdown: &PowerBreakdown) -> crate::Result<f64> {
    for t in &breakdown.terms {
        let recomputed = t.count * t.unit_watts * t.pue;
        if (t.watts() - recomputed).abs() > 1e-9 * recomputed.abs().max(1.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "power term {}/{} fails count*unit*pue audit",
                t.segment.as_str(),
                t.device_class.as_str()
            )));
        }
    }
    let pon = breakdown.segment_w(crate::power::Segment::Pon);
    let floor = ctx.pon_floor_w();
    if (pon - floor).abs() > 1e-6 * floor.max(1.0) {
        return Err(crate::Error::InvalidParameter(format!(
            "PON segment {pon} W differs from the scenario floor {floor} W"
        )));
    }
    Ok(breakdown.total_w())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::Serving;

    fn sample_placement() -> Placement {
        Placement::from_servings(vec![
            Serving {
                vm: 1,
                node: 2,
                pon: 0,
                location: Location::Cloud(1),
                traffic_mbps: 40.5,
            },
            Serving {
                vm: 1,
                node: 3,
                pon: 1,
                location: Location::AccessFog { node: 3, pon: 1 },
                traffic_mbps: 16.0,
            },
        ])
    }

    #[test]
    fn placement_csvs_round_trip() {
        let p = sample_placement();
        let servings = servings_csv(&p);
        let replicas = replicas_csv(&p);
        let parsed = parse_placement(&servings, Some(&replicas)).unwrap();
        assert_eq!(parsed, p);
    }

    #[test]
    fn malformed_placement_rows_are_rejected() {
        assert!(parse_placement("vm,pon,node,location_kind,location,traffic_mbps\n1,0,2,cloud\n", None).is_err());
        assert!(parse_placement(
            "vm,pon,node,location_kind,location,traffic_mbps\n1,0,2,warehouse,1,5\n",
            None
        )
        .is_err());
    }

    #[test]
    fn csv_numbers_trim_trailing_zero_fractions() {
        assert_eq!(num(52000.0), "52000");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-3.0), "-3");
    }
}
