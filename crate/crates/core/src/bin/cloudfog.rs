//! Scenario runner CLI: solve placements, sweep the single-VM study, compare
//! placement approaches and validate placement files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use cloudfog::heuristic::{self, Recipe};
use cloudfog::oracle;
use cloudfog::placement::ValidateOptions;
use cloudfog::report::{self, SummaryRow, SweepRow};
use cloudfog::scenario::{bundled, PueProfile, Restriction, Scenario, Solver};

#[derive(Parser)]
#[command(name = "cloudfog", version, about = "Energy-minimal VM placement over a cloud-fog architecture")]
struct Cli {
    /// Worker threads (also CLOUDFOG_WORKERS); defaults to all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed override for randomized scenario generation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for report files.
    #[arg(long, short, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write its reports.
    Run(RunArgs),
    /// Sweep the single-VM study grid and write the tier-selection table.
    SweepSingleVm(SweepArgs),
    /// Compare placement approaches (OC&F, OC&F1, OC, ATT) on one scenario.
    Compare(CompareArgs),
    /// Validate a placement CSV against a scenario.
    Validate(ValidateArgs),
    /// Write the bundled scenario files into a directory.
    EmitBundled {
        #[arg(long, default_value = "data")]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario file path, or bundled:att-realistic / bundled:att-single-vm.
    #[arg(long)]
    scenario: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Override the scenario's solver.
    #[arg(long)]
    solver: Option<String>,
    /// Override the scenario's restriction
    /// (none|clouds-only|att-sites|clouds-metro).
    #[arg(long)]
    restriction: Option<String>,
    /// Override the PUE profile (best-practice|2014).
    #[arg(long)]
    pue_profile: Option<String>,
    /// Override every generated VM's user data rate.
    #[arg(long)]
    rate_mbps: Option<f64>,
    /// Override every generated VM's linear workload baseline.
    #[arg(long)]
    baseline_pct: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_delimiter = ',', default_value = "constant,linear")]
    profiles: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
    workloads: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,20,50,100,200")]
    rates: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "best-practice,2014")]
    pues: Vec<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    baselines: Option<Vec<f64>>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Servings CSV (vm,pon,node,location_kind,location,traffic_mbps).
    #[arg(long)]
    servings: PathBuf,
    /// Optional replicas CSV; when given, its indicators are checked
    /// against the servings.
    #[arg(long)]
    replicas: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("CLOUDFOG_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .ok();
    }

    match cli.command {
        Command::Run(args) => run(&cli.out, cli.seed, args),
        Command::SweepSingleVm(args) => sweep(&cli.out, args),
        Command::Compare(args) => compare(&cli.out, args),
        Command::Validate(args) => validate(args),
        Command::EmitBundled { dir } => emit_bundled(&dir),
    }
}

fn load_scenario(spec: &str) -> anyhow::Result<Scenario> {
    match spec {
        "bundled:att-realistic" => Ok(bundled::att_realistic(1.0, 25.0)),
        "bundled:att-single-vm" => Ok(bundled::att_single_vm()),
        path => {
            Scenario::load(Path::new(path)).with_context(|| format!("loading scenario {path}"))
        }
    }
}

fn parse_restriction(s: &str) -> anyhow::Result<Restriction> {
    Ok(match s {
        "none" => Restriction::None,
        "clouds-only" => Restriction::CloudsOnly,
        "att-sites" => Restriction::AttSites,
        "clouds-metro" => Restriction::CloudsMetro,
        other => bail!("unknown restriction '{other}'"),
    })
}

fn parse_pue(s: &str) -> anyhow::Result<PueProfile> {
    Ok(match s {
        "best-practice" | "best_practice" => PueProfile::BestPractice,
        "2014" | "year2014" => PueProfile::Year2014,
        other => bail!("unknown PUE profile '{other}'"),
    })
}

fn apply_overrides(scenario: &mut Scenario, rate_mbps: Option<f64>, baseline_pct: Option<f64>) {
    if let Some(g) = scenario.catalog.generate.as_mut() {
        if let Some(r) = rate_mbps {
            g.rate_mbps = r;
        }
        if let Some(b) = baseline_pct {
            g.baseline_pct = Some(b);
        }
    }
    for vm in &mut scenario.catalog.vms {
        if let Some(r) = rate_mbps {
            vm.rate_mbps = r;
        }
        if let Some(b) = baseline_pct {
            if vm.profile == "linear" {
                vm.baseline_pct = Some(b);
            }
        }
    }
}

fn write(out_dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn run(out_dir: &Path, seed: Option<u64>, args: RunArgs) -> anyhow::Result<()> {
    let mut scenario = load_scenario(&args.scenario.scenario)?;
    if let Some(s) = &args.solver {
        scenario.run.solver = match s.as_str() {
            "oracle" => Solver::Oracle,
            "heuristic" => Solver::Heuristic,
            other => bail!("unknown solver '{other}'"),
        };
    }
    if let Some(r) = &args.restriction {
        scenario.run.restriction = parse_restriction(r)?;
    }
    if let Some(p) = &args.pue_profile {
        scenario.run.pue_profile = parse_pue(p)?;
    }
    if let Some(seed) = seed {
        scenario.run.seed = seed;
    }
    apply_overrides(&mut scenario, args.rate_mbps, args.baseline_pct);

    let ctx = scenario.context()?;
    let name = scenario.name.clone();
    let (placement, breakdown) = match scenario.run.solver {
        Solver::Oracle => {
            let sol = oracle::solve_exact(&ctx)?;
            println!(
                "oracle: {} candidates evaluated, total {:.1} W",
                sol.candidates_evaluated, sol.power_w
            );
            (sol.placement, sol.breakdown)
        }
        Solver::Heuristic => {
            let outcome = heuristic::solve(&ctx)?;
            println!(
                "heuristic: offline {:?}, online {:?}, total {:.1} W",
                outcome.offline_duration, outcome.online_duration, outcome.power_w
            );
            let table = heuristic::offline_phase(&ctx)?;
            write(out_dir, &format!("{name}-offline-table.toml"), &table.to_toml())?;
            (outcome.placement, outcome.breakdown)
        }
    };

    report::audit_breakdown(&ctx, &breakdown).context("per-term power audit")?;
    let state = cloudfog::routing::route_all(
        &placement.cloud_demand_matrix(),
        &ctx.topo,
        ctx.params.metro.redundancy,
        ctx.settings.agg_port_mode,
        ctx.settings.grooming,
    )?;
    write(
        out_dir,
        &format!("{name}-breakdown.csv"),
        &report::power_breakdown_csv(&breakdown),
    )?;
    write(out_dir, &format!("{name}-servings.csv"), &report::servings_csv(&placement))?;
    write(out_dir, &format!("{name}-replicas.csv"), &report::replicas_csv(&placement))?;
    write(out_dir, &format!("{name}-demand.csv"), &report::demand_csv(&ctx.demand))?;
    write(
        out_dir,
        &format!("{name}-core.csv"),
        &report::core_state_csv(&state, &ctx.topo),
    )?;
    println!(
        "total: {:.1} W (core {:.1}, metro {:.1}, pon {:.1}, cloud {:.1}, metro fog {:.1}, access fog {:.1})",
        breakdown.total_w(),
        breakdown.segment_w(cloudfog::power::Segment::Core),
        breakdown.segment_w(cloudfog::power::Segment::Metro),
        breakdown.segment_w(cloudfog::power::Segment::Pon),
        breakdown.segment_w(cloudfog::power::Segment::Cloud),
        breakdown.segment_w(cloudfog::power::Segment::MetroFog),
        breakdown.segment_w(cloudfog::power::Segment::AccessFog),
    );
    println!("reports written to {}", out_dir.display());
    Ok(())
}

fn recipe_label(recipe: &Recipe) -> &'static str {
    match recipe {
        Recipe::Clouds { .. } => "cloud",
        Recipe::AllMetroFogs => "metro_fog",
        Recipe::AllAccessFogs => "access_fog",
    }
}

fn sweep(out_dir: &Path, args: SweepArgs) -> anyhow::Result<()> {
    let base = load_scenario(&args.scenario.scenario)?;
    if base.catalog.vms.len() != 1 {
        bail!("sweep-single-vm needs a single-VM scenario");
    }
    let mut rows = Vec::new();
    for profile in &args.profiles {
        for &workload in &args.workloads {
            for &rate in &args.rates {
                for pue in &args.pues {
                    let mut s = base.clone();
                    s.catalog.vms[0].profile = profile.clone();
                    s.catalog.vms[0].baseline_pct = (profile == "linear").then_some(0.0);
                    s.catalog.vms[0].peak_workload_pct = workload;
                    s.catalog.vms[0].rate_mbps = rate;
                    s.run.pue_profile = parse_pue(pue)?;
                    let ctx = s.context()?;
                    let table = heuristic::offline_phase(&ctx)?;
                    let outcome = heuristic::online_phase(&ctx, &table)?;
                    let p = &outcome.placement;
                    rows.push(SweepRow {
                        profile: profile.clone(),
                        workload_pct: workload,
                        rate_mbps: rate,
                        pue_profile: parse_pue(pue)?.as_str().into(),
                        winner: recipe_label(&outcome.decisions[0].1).into(),
                        cloud_replicas: p.cloud_replicas.len(),
                        metro_fog_replicas: p.metro_fog_replicas.len(),
                        access_fog_replicas: p.access_fog_replicas.len(),
                        total_w: outcome.power_w,
                    });
                    let r = rows.last().unwrap();
                    println!(
                        "{} W={} r={} pue={}: {} ({} cloud / {} mf / {} af) {:.1} W",
                        r.profile,
                        r.workload_pct,
                        r.rate_mbps,
                        r.pue_profile,
                        r.winner,
                        r.cloud_replicas,
                        r.metro_fog_replicas,
                        r.access_fog_replicas,
                        r.total_w
                    );
                }
            }
        }
    }
    let path = write(out_dir, "single-vm-sweep.csv", &report::sweep_csv(&rows))?;
    println!("sweep grid written to {}", path.display());
    Ok(())
}

fn compare(out_dir: &Path, args: CompareArgs) -> anyhow::Result<()> {
    let base = load_scenario(&args.scenario.scenario)?;
    let rates = args.rates.unwrap_or_else(|| {
        vec![base
            .catalog
            .generate
            .as_ref()
            .map(|g| g.rate_mbps)
            .unwrap_or(25.0)]
    });
    let baselines = args.baselines.unwrap_or_else(|| {
        vec![base
            .catalog
            .generate
            .as_ref()
            .and_then(|g| g.baseline_pct)
            .unwrap_or(1.0)]
    });

    let approaches = [
        ("OC&F", Restriction::None),
        ("OC&F1", Restriction::CloudsMetro),
        ("OC", Restriction::CloudsOnly),
        ("ATT", Restriction::AttSites),
    ];
    let mut rows = Vec::new();
    for &rate in &rates {
        for &baseline in &baselines {
            let mut totals = Vec::new();
            for (label, restriction) in approaches {
                let mut s = base.clone();
                apply_overrides(&mut s, Some(rate), Some(baseline));
                s.run.restriction = restriction;
                let ctx = s.context()?;
                let outcome = heuristic::solve(&ctx)?;
                report::audit_breakdown(&ctx, &outcome.breakdown)?;
                println!(
                    "rate {rate} baseline {baseline}: {label} total {:.1} W (offline {:?}, online {:?})",
                    outcome.power_w, outcome.offline_duration, outcome.online_duration
                );
                totals.push((label, outcome.power_w));
            }
            let total_of = |name: &str| totals.iter().find(|(l, _)| *l == name).unwrap().1;
            for (label, total) in &totals {
                rows.push(SummaryRow {
                    approach: label.to_string(),
                    rate_mbps: rate,
                    baseline_pct: baseline,
                    total_w: *total,
                    baseline_name: "-".into(),
                    saving_pct: 0.0,
                });
            }
            for (a, b) in [
                ("OC&F", "ATT"),
                ("OC&F", "OC"),
                ("OC", "ATT"),
                ("OC&F", "OC&F1"),
            ] {
                let saving = (1.0 - total_of(a) / total_of(b)) * 100.0;
                println!("  {a} saves {saving:.1}% vs {b}");
                rows.push(SummaryRow {
                    approach: a.to_string(),
                    rate_mbps: rate,
                    baseline_pct: baseline,
                    total_w: total_of(a),
                    baseline_name: b.to_string(),
                    saving_pct: saving,
                });
            }
        }
    }
    let path = write(out_dir, "comparison-summary.csv", &report::summary_csv(&rows))?;
    println!("comparison summary written to {}", path.display());
    Ok(())
}

fn validate(args: ValidateArgs) -> anyhow::Result<()> {
    let scenario = load_scenario(&args.scenario.scenario)?;
    let ctx = scenario.context()?;
    let servings = std::fs::read_to_string(&args.servings)?;
    let replicas = args.replicas.map(std::fs::read_to_string).transpose()?;
    let placement = report::parse_placement(&servings, replicas.as_deref())?;
    let violations = cloudfog::placement::validate(
        &placement,
        &ctx.demand,
        &ctx.specs,
        ctx.topo.nodes(),
        ctx.attachment.pons_per_node,
        ValidateOptions {
            strict_capacity: scenario.run.strict_capacity,
            ..Default::default()
        },
    );
    if violations.is_empty() {
        println!("ok: placement satisfies all checked constraints");
        Ok(())
    } else {
        for v in &violations {
            println!("violation: {v}");
        }
        std::process::exit(3);
    }
}

fn emit_bundled(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    for scenario in [bundled::att_realistic(1.0, 25.0), bundled::att_single_vm()] {
        let path = dir.join(format!("{}.toml", scenario.name));
        std::fs::write(&path, scenario.to_canonical_toml())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
