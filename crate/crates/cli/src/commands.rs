use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::time::Duration;

use hgbs_core::analysis::{
    blocked_fraction, compute_cost, connectivity_order, connectivity_pz, memory_cost, resiliency_pr,
    resiliency_pr_without_replacement, scheme_connectivity, to_f64, CostModel, MemoryModel, Scheme, TrafficModel,
    WordMult,
};
use hgbs_core::rng::sub_rng;
use hgbs_core::simulate::{
    agreement_sweep, mc_blocked_traffic, mc_compromise_random, mc_compromise_selective, mc_random_break_budget,
    mc_same_zone, reestablish_after_break, SimReport, SIM_COLUMNS,
};
use hgbs_core::{assign_keying_material, make_grid, DegreePolicy, Deployment, Error, FieldModulus, GridParams};

use crate::report::{emit_report, Cell, Meta, Report};
use crate::{
    AnalyzeArgs, AnalyzeWhat, CliError, Command, CompareArgs, DeployArgs, KeyArgs, OutputArgs, SchemeName,
    SimulateArgs, SimulateWhat,
};

type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn execute(command: Command, meta: &Meta, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Deploy(args) => deploy(&args, stdout),
        Command::Key(args) => key(&args, stdout),
        Command::Analyze(args) => {
            let report = analyze(&args)?;
            write_report(&report, &args.output, meta, stdout)
        }
        Command::Simulate(args) => {
            let report = simulate(&args)?;
            write_report(&report, &args.output, meta, stdout)
        }
        Command::Compare(args) => {
            let report = compare(&args)?;
            write_report(&report, &args.output, meta, stdout)
        }
    }
}

fn write_report(report: &Report, out: &OutputArgs, meta: &Meta, stdout: &mut dyn Write) -> CliResult<()> {
    let meta = (!out.no_meta).then_some(meta);
    match &out.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit_report(report, out.format, meta, &mut w)?;
            w.flush()?;
        }
        None => emit_report(report, out.format, meta, stdout)?,
    }
    Ok(())
}

fn need<T: Copy>(value: Option<T>, flag: &str, context: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("{flag} is required for {context}")))
}

fn load(path: &std::path::Path) -> CliResult<Deployment> {
    let text = fs::read_to_string(path)?;
    Ok(Deployment::from_json(&text)?)
}

fn deploy(args: &DeployArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let grid = make_grid(args.order, args.unit)?;
    let policy = DegreePolicy::new(args.policy, args.alpha, grid.zone_size())?;
    let modulus = match args.modulus {
        Some(q) => FieldModulus::new(q)?,
        None => FieldModulus::default(),
    };
    let mut dep = assign_keying_material(grid, policy, modulus, args.seed)?;
    if let Some(d) = args.truncate {
        dep = dep.truncate_rings(d)?;
    }
    if args.no_authority {
        dep = dep.without_authority();
    }
    fs::write(&args.out, dep.to_json())?;
    writeln!(
        stdout,
        "N={} t0={} polynomials={}",
        grid.capacity(),
        policy.base(),
        dep.polynomial_count()
    )?;
    Ok(())
}

fn key(args: &KeyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let dep = load(&args.deployment)?;
    let grid = dep.grid();
    let (i, j) = (grid.decode_id(args.i)?, grid.decode_id(args.j)?);
    match dep.establish_key(i, j) {
        Ok(k) => {
            let order = i.common_order(j)?;
            writeln!(stdout, "order={order} key={} hex={:#018x}", k.value(), k.value())?;
        }
        Err(Error::OrderTruncated { .. }) if args.relay => {
            let seed = args.seed.expect("clap enforces --seed with --relay");
            let mut rng = sub_rng(seed, &[args.i, args.j]);
            let path = dep.establish_path_key(i, j, &mut rng)?;
            writeln!(
                stdout,
                "relay={} key={} hex={:#018x}",
                path.relay.encode(),
                path.key.value(),
                path.key.value()
            )?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn traffic(n: u32, unnormalized: bool, beta: f64) -> CliResult<TrafficModel> {
    let model = if unnormalized {
        TrafficModel::geometric_unnormalized(n)?
    } else {
        TrafficModel::geometric(n)?
    };
    Ok(model.with_beta(beta)?)
}

fn zone_size(args: &AnalyzeArgs, context: &str) -> CliResult<u64> {
    match (args.zone_size, args.unit) {
        (Some(m), _) => Ok(m),
        (None, Some(k)) => {
            let side = 2 * k as u64;
            Ok(side * side)
        }
        (None, None) => Err(CliError::Usage(format!(
            "--unit or --zone-size is required for {context}"
        ))),
    }
}

fn base_policy(args: &AnalyzeArgs, zone: Option<u64>, context: &str) -> CliResult<DegreePolicy> {
    let kind = args.policy.unwrap_or(hgbs_core::PolicyKind::Flat);
    match (args.t0, args.alpha, zone) {
        (Some(t0), _, _) => Ok(DegreePolicy::with_base_degree(kind, t0)),
        (None, Some(alpha), Some(m)) => Ok(DegreePolicy::new(kind, alpha, m)?),
        _ => Err(CliError::Usage(format!(
            "--t0, or --alpha with --unit/--zone-size, is required for {context}"
        ))),
    }
}

fn analyze(args: &AnalyzeArgs) -> CliResult<Report> {
    let ctx = |what: &str| format!("--what {what}");
    match args.what {
        AnalyzeWhat::Connectivity => {
            let n = need(args.order, "--order", &ctx("connectivity"))?;
            let mut r = Report::new(&["order", "beta", "connectivity"]);
            for i in 1..=n {
                r.push(vec![
                    i.into(),
                    args.beta.into(),
                    connectivity_order(i, n, args.beta)?.into(),
                ]);
            }
            Ok(r)
        }
        AnalyzeWhat::Pz => {
            let n = need(args.order, "--order", &ctx("pz"))?;
            let m = zone_size(args, &ctx("pz"))?;
            let mut r = Report::new(&[
                "z",
                "n",
                "m",
                "probability",
                "bound",
                "probability_exact",
                "bound_exact",
            ]);
            for z in 1..=n {
                let p = connectivity_pz(z, n, m)?;
                r.push(vec![
                    z.into(),
                    n.into(),
                    m.into(),
                    to_f64(&p.probability).into(),
                    to_f64(&p.bound).into(),
                    p.probability.to_string().into(),
                    p.bound.to_string().into(),
                ]);
            }
            Ok(r)
        }
        AnalyzeWhat::Memory => {
            let c = ctx("memory");
            let nodes = need(args.nodes, "--nodes", &c)?;
            let n = need(args.order, "--order", &c)?;
            let alpha = need(args.alpha, "--alpha", &c)?;
            let models = match args.model {
                Some(m) => vec![m],
                None => MemoryModel::ALL.to_vec(),
            };
            let mut r = Report::new(&["model", "nodes", "n", "alpha", "lg_q", "bits", "bits_exact"]);
            for model in models {
                let cost = memory_cost(nodes, n, alpha, args.lgq, model)?;
                r.push(vec![
                    model.name().into(),
                    nodes.into(),
                    n.into(),
                    alpha.into(),
                    args.lgq.into(),
                    cost.bits.into(),
                    cost.bits_exact.into(),
                ]);
            }
            Ok(r)
        }
        AnalyzeWhat::Cost => {
            let c = ctx("cost");
            let n = need(args.order, "--order", &c)?;
            let zone = zone_size(args, &c).ok();
            let policy = base_policy(args, zone, &c)?;
            let weights = traffic(n, args.unnormalized, args.beta)?;
            let mults = match args.word_mult {
                Some(w) => vec![w],
                None => vec![WordMult::Schoolbook64, WordMult::Karatsuba64, WordMult::Mixed16x64],
            };
            let mut r = Report::new(&[
                "n",
                "policy",
                "t0",
                "comparison_cost",
                "word_mult",
                "per_field_mult",
                "field_mults",
                "word_mults",
                "field_mults_exact",
                "word_mults_exact",
            ]);
            for word_mult in mults {
                let cost = compute_cost(
                    &policy,
                    &weights,
                    &CostModel {
                        comparison_cost: args.comparison_cost,
                        word_mult,
                    },
                );
                r.push(vec![
                    n.into(),
                    policy.kind().to_string().into(),
                    policy.base().into(),
                    args.comparison_cost.into(),
                    word_mult.name().into(),
                    word_mult.per_field_mult().into(),
                    to_f64(&cost.field_mults).into(),
                    to_f64(&cost.word_mults).into(),
                    cost.field_mults.to_string().into(),
                    cost.word_mults.to_string().into(),
                ]);
            }
            Ok(r)
        }
        AnalyzeWhat::Resiliency => {
            let c = ctx("resiliency");
            let n = need(args.order, "--order", &c)?;
            let m = zone_size(args, &c)?;
            let t0 = base_policy(args, Some(m), &c)?.base() as u64;
            let nodes = GridParams::new(n, 1).map(|g| g.zones() * m)?;
            if args.nc.is_empty() {
                return Err(CliError::Usage(format!("--nc is required for {c}")));
            }
            let mut r = Report::new(&[
                "nc",
                "n",
                "m",
                "nodes",
                "t0",
                "paper_literal",
                "threshold_corrected",
                "without_replacement",
            ]);
            for &nc in &args.nc {
                r.push(vec![
                    nc.into(),
                    n.into(),
                    m.into(),
                    nodes.into(),
                    t0.into(),
                    resiliency_pr(nc, t0, m, nodes)?.into(),
                    resiliency_pr(nc, t0 + 1, m, nodes)?.into(),
                    resiliency_pr_without_replacement(nc, t0 + 1, m, nodes)?.into(),
                ]);
            }
            Ok(r)
        }
        AnalyzeWhat::Blocked => {
            let n = need(args.order, "--order", &ctx("blocked"))?;
            let weights = traffic(n, args.unnormalized, args.beta)?;
            let mut r = Report::new(&["i", "weight", "blocked", "blocked_exact"]);
            for i in 1..=n {
                let b = blocked_fraction(i, &weights)?;
                r.push(vec![
                    i.into(),
                    to_f64(weights.weight(i).expect("order in range")).into(),
                    to_f64(&b).into(),
                    b.to_string().into(),
                ]);
            }
            Ok(r)
        }
        AnalyzeWhat::Ctf => {
            let n = need(args.order, "--order", &ctx("ctf"))?;
            let weights = traffic(n, args.unnormalized, args.beta)?;
            let mut r = Report::new(&["i", "weight", "weight_exact"]);
            for (i, w) in weights.weights().iter().enumerate() {
                r.push(vec![(i as u32 + 1).into(), to_f64(w).into(), w.to_string().into()]);
            }
            Ok(r)
        }
    }
}

fn sim_row(s: &SimReport) -> Vec<Cell> {
    vec![
        s.kind.into(),
        s.n.into(),
        s.k.into(),
        s.alpha.into(),
        s.policy.clone().into(),
        s.param.clone().into(),
        s.trials.into(),
        s.seed.into(),
        s.estimate.into(),
        s.closed_form.into(),
        s.abs_error.into(),
    ]
}

/// Same estimate compared against another closed form.
fn relabel(s: &SimReport, kind: &'static str, closed: f64) -> SimReport {
    SimReport { kind, ..s.clone() }.with_result(s.estimate, Some(closed), s.wall_time)
}

fn simulate(args: &SimulateArgs) -> CliResult<Report> {
    let dep = load(&args.deployment)?;
    let grid = dep.grid();
    let mut r = Report::new(&SIM_COLUMNS);
    match args.what {
        SimulateWhat::SameZone => {
            let orders = match args.z {
                Some(z) => vec![z],
                None => (1..=grid.order()).collect(),
            };
            for z in orders {
                r.push(sim_row(&mc_same_zone(grid, z, args.trials, args.seed)?));
            }
        }
        SimulateWhat::CompromiseRandom => {
            if args.nc.is_empty() {
                return Err(CliError::Usage("--nc is required for --what compromise-random".into()));
            }
            for &nc in &args.nc {
                let c = mc_compromise_random(&dep, nc, args.trials, args.seed)?;
                r.push(sim_row(&c.zone_break));
                r.push(sim_row(&relabel(
                    &c.zone_break,
                    "compromise-random-paper-literal",
                    c.paper_literal,
                )));
                r.push(sim_row(&relabel(
                    &c.zone_break,
                    "compromise-random-distinct-draw",
                    c.without_replacement,
                )));
                r.push(sim_row(&c.affected_links));
            }
        }
        SimulateWhat::CompromiseSelective => {
            let budget = need(args.budget, "--budget", "--what compromise-selective")?;
            let s = mc_compromise_selective(&dep, args.zone, budget, args.trials, args.seed)?;
            r.push(sim_row(&s.zone_break));
            r.push(sim_row(&s.affected_links));
            if s.min_break_budget.is_some() {
                r.push(sim_row(&mc_random_break_budget(
                    &dep,
                    args.zone,
                    args.trials,
                    args.seed,
                )?));
            }
        }
        SimulateWhat::Blocked => {
            let n = grid.order();
            let weights = TrafficModel::geometric(n)?;
            let orders = match args.i {
                Some(i) => vec![i],
                None => (1..=n).collect(),
            };
            for i in orders {
                let measured = mc_blocked_traffic(&dep, i, &weights)?;
                let closed = blocked_fraction(i, &weights)?;
                let row = SimReport::for_deployment("blocked", &dep, format!("i={i}"), args.trials, args.seed)
                    .with_result(to_f64(&measured), Some(to_f64(&closed)), Duration::ZERO);
                r.push(sim_row(&row));
                if i < n {
                    let rec = reestablish_after_break(&dep, i)?;
                    let rate = rec.agreed as f64 / rec.affected_pairs.max(1) as f64;
                    let row = SimReport::for_deployment(
                        "reestablish",
                        &dep,
                        format!("i={i};fallback={};pairs={}", rec.fallback_order, rec.affected_pairs),
                        args.trials,
                        args.seed,
                    )
                    .with_result(rate, Some(1.0), Duration::ZERO);
                    r.push(sim_row(&row));
                }
            }
        }
        SimulateWhat::Agreement => {
            let a = agreement_sweep(&dep)?;
            let mut row = a.to_sim_report(&dep);
            row.seed = args.seed;
            r.push(sim_row(&row));
        }
    }
    Ok(r)
}

fn compare(args: &CompareArgs) -> CliResult<Report> {
    let mut r = Report::new(&["scheme", "params", "connectivity"]);
    for &name in &args.scheme {
        let ctx = format!("--scheme {}", format!("{name:?}").to_lowercase());
        let (scheme, params) = match name {
            SchemeName::Hgbs => (Scheme::Hgbs, String::new()),
            SchemeName::Gbs | SchemeName::Gbs3d | SchemeName::Plat => {
                let nodes = need(args.nodes, "--nodes", &ctx)?;
                let scheme = match name {
                    SchemeName::Gbs => Scheme::Gbs { nodes },
                    SchemeName::Gbs3d => Scheme::Gbs3d { nodes },
                    _ => Scheme::Plat { nodes },
                };
                (scheme, format!("N={nodes}"))
            }
            SchemeName::Eg => {
                let pool = need(args.pool, "--pool", &ctx)?;
                let ring = need(args.ring, "--ring", &ctx)?;
                (Scheme::Eg { pool, ring }, format!("P={pool};k={ring}"))
            }
            SchemeName::Cps => {
                let m = need(args.m, "--m", &ctx)?;
                let nodes = need(args.nodes, "--nodes", &ctx)?;
                (Scheme::Cps { m, nodes }, format!("m={m};N={nodes}"))
            }
            SchemeName::Ddhv => {
                let omega = need(args.omega, "--omega", &ctx)?;
                let tau = need(args.tau, "--tau", &ctx)?;
                (Scheme::Ddhv { omega, tau }, format!("omega={omega};tau={tau}"))
            }
        };
        r.push(vec![
            scheme.name().into(),
            params.into(),
            scheme_connectivity(&scheme)?.into(),
        ]);
    }
    Ok(r)
}
