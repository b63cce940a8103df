use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lifespan_core::campaign::{bound_for, reconcile, run_campaign, simulate, Verdict, DOMINANCE_SLACK};
use lifespan_core::chain::check_minorant;
use lifespan_core::config::Config;
use lifespan_core::exponents::{blowup_rate_identity, compute_alpha, compute_pq, int, lifespan_exponent, to_f64};
use lifespan_core::ode::{integrate, Outcome};
use lifespan_core::output::{
    campaign_table, header, load_report, loglog_table, num, opt, save_report, trace_table, write_csv_atomic,
    write_text_atomic,
};
use lifespan_core::test_function::build_psi;
use lifespan_core::{Error, Result};

/// Lifespan experiments for cyclic semilinear heat systems.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on error.
#[derive(Parser)]
#[command(name = "lifespan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for campaigns (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for replicate jitter.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact exponent vector, regime and decay vectors.
    Exponents,
    /// Lifespan upper bound T_0 for the configured data.
    Bound,
    /// Integrate the reduced ODE system.
    Ode,
    /// Eigenfunction profile and eigen-inequality checks.
    Testfn,
    /// One PDE run with functional traces.
    Simulate,
    /// Amplitude sweep with a log-log fit.
    Campaign,
    /// Verdict for a finished campaign.
    Reconcile {
        /// Campaign report; defaults to OUT/report.toml.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Replace alpha_max in the prediction (negative control).
        #[arg(long)]
        alpha_max: Option<f64>,
    },
}

fn config(common: &Common) -> Result<Config> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required for this subcommand".into()))?;
    Config::load(path)
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn exponents(common: &Common) -> Result<bool> {
    let cfg = config(common)?;
    let params = cfg.params()?;
    let profile = compute_alpha(&params)?;
    let identity = blowup_rate_identity(&params)?;
    let l = profile.l_case2.as_ref().or(profile.l_case1.as_ref());
    let rows: Vec<Vec<String>> = (0..params.k())
        .map(|j| {
            vec![
                (j + 1).to_string(),
                params.p(j).to_string(),
                profile.alpha[j].to_string(),
                num(to_f64(&profile.alpha[j])),
                l.map(|l| l[j].to_string()).unwrap_or_default(),
                identity[j].to_string(),
            ]
        })
        .collect();
    let path = common.out.join("exponents.csv");
    write_csv_atomic(&path, &header(&["j", "p", "alpha", "alpha_float", "l", "rate_identity"]), &rows)?;
    println!("n = {}, k = {}", params.n(), params.k());
    println!(
        "alpha_max = {} (component {}), {}",
        profile.alpha_max,
        profile.argmax_index + 1,
        profile.criticality
    );
    if let Ok(e) = lifespan_exponent(&profile) {
        println!("lifespan exponent = {e}");
    }
    if params.k() >= 2 {
        let pq = compute_pq(&params)?;
        println!("P_1 - Q_1 - 1 = {}", pq.big_p(0) - pq.big_q(0) - int(1));
    }
    let ok = identity.iter().all(|b| *b);
    println!("rate identity: {}", status(ok));
    println!("wrote {}", path.display());
    Ok(ok)
}

fn bound(common: &Common) -> Result<bool> {
    let cfg = config(common)?;
    let exp = cfg.experiment()?;
    let eps = cfg.eps();
    let spec = build_psi(exp.params.n())?;
    let b = bound_for(&exp, &spec, eps)?;
    let j0 = b.j0;
    let m = &b.minorant;
    let lambdas: Vec<String> = b.lambda_chain.iter().map(|v| num(*v)).collect();
    let row = vec![
        num(eps),
        (j0 + 1).to_string(),
        num(b.r0),
        num(b.t0),
        num(b.u_at_r0),
        num(b.threshold),
        num(m.t0_tilde),
        num(m.offset),
        num(m.amplitude),
        num(m.rate),
        num(b.kappa),
        num(b.constant),
        lambdas.join(";"),
    ];
    let path = common.out.join("bound.csv");
    write_csv_atomic(
        &path,
        &header(&[
            "eps", "j0", "r0", "t0", "u_r0", "threshold", "t0_tilde", "offset", "amplitude", "rate", "kappa",
            "constant", "lambda_chain",
        ]),
        &[row],
    )?;
    println!("R_0 = {}, T_0 = {}, threshold = {}", b.r0, b.t0, b.threshold);
    println!("wrote {}", path.display());
    Ok(true)
}

fn ode(common: &Common) -> Result<bool> {
    let cfg = config(common)?;
    let (spec, horizon, rel_tol) = cfg.ode_spec()?;
    let run = integrate(&spec, horizon, rel_tol)?;
    let k = spec.k();
    let mut head = header(&["t"]);
    head.extend((1..=k).map(|j| format!("f_{j}")));
    let rows: Vec<Vec<String>> = run
        .trajectory
        .times
        .iter()
        .zip(&run.trajectory.states)
        .map(|(t, y)| std::iter::once(num(*t)).chain(y.iter().map(|v| num(*v))).collect())
        .collect();
    write_csv_atomic(&common.out.join("trajectory.csv"), &head, &rows)?;

    let e = run.estimate;
    let outcome = match e.outcome {
        Outcome::BlowUp(_) => "blowup",
        Outcome::GlobalUpTo(_) => "global",
    };
    // the closed-form minorant applies from k = 2 with damping and data above threshold
    let check = if k >= 2 && spec.lambda_tilde > 0.0 {
        match check_minorant(&spec, rel_tol) {
            Ok(c) => Some(c),
            Err(Error::BelowThreshold { threshold, .. }) => {
                println!("f_2(0) below the minorant threshold {threshold}; no bound");
                None
            }
            Err(err) => return Err(err),
        }
    } else {
        None
    };
    let row = vec![
        outcome.into(),
        opt(e.t_num()),
        num(e.bracket.0),
        num(e.bracket.1),
        num(e.extrapolation_exponent),
        num(e.achieved_max),
        opt(check.as_ref().map(|c| c.minorant.t0_tilde)),
        check.as_ref().map(|c| c.holds().to_string()).unwrap_or_default(),
    ];
    write_csv_atomic(
        &common.out.join("ode_summary.csv"),
        &header(&["outcome", "t_num", "t_low", "t_high", "exponent", "achieved_max", "t0_tilde", "minorant_holds"]),
        &[row],
    )?;
    match e.t_num() {
        Some(t) => println!("blow-up at T_num = {t} (bracket [{}, {}])", e.bracket.0, e.bracket.1),
        None => println!("global up to {horizon}"),
    }
    let ok = check.as_ref().map(|c| c.holds()).unwrap_or(true);
    if let Some(c) = &check {
        println!("minorant: T0~ = {}, {}", c.minorant.t0_tilde, status(ok));
    }
    Ok(ok)
}

fn testfn(common: &Common) -> Result<bool> {
    let cfg = config(common)?;
    let spec = build_psi(cfg.system.n)?;
    let points = cfg.testfn.points.max(2);
    let rows: Vec<Vec<String>> = (0..points)
        .map(|i| {
            let r = i as f64 / (points - 1) as f64;
            let res = if r < 1.0 { spec.laplacian_psi(r) + 0.5 * spec.lambda * spec.psi(r) } else { 0.0 };
            vec![num(r), num(spec.psi(r)), num(spec.laplacian_psi(r)), num(res)]
        })
        .collect();
    write_csv_atomic(&common.out.join("psi.csv"), &header(&["r", "psi", "laplacian_psi", "residual"]), &rows)?;
    let radii: Vec<f64> = (0..10_000).map(|i| i as f64 / 10_000.0).collect();
    let residual = spec.eigen_residual(&radii);
    let norm = spec.l1_norm();
    let mut ok = residual < 1e-8 && (norm - 1.0).abs() < 1e-10;
    let mut checks = Vec::new();
    for &big_r in &cfg.testfn.radii {
        let margin = spec.eigen_inequality_margin(big_r, 4000);
        ok &= margin >= -1e-10;
        checks.push(vec![num(big_r), num(margin), (margin >= -1e-10).to_string()]);
    }
    write_csv_atomic(&common.out.join("eigen_check.csv"), &header(&["R", "margin", "ok"]), &checks)?;
    println!("n = {}, lambda = {}, |psi|_1 = {norm}, residual = {residual:e}", spec.n, spec.lambda);
    println!("eigenfunction checks: {}", status(ok));
    Ok(ok)
}

fn simulate_cmd(common: &Common) -> Result<bool> {
    let cfg = config(common)?;
    let exp = cfg.experiment()?;
    let eps = cfg.eps();
    let case = simulate(&exp, eps)?;
    let (head, rows) = trace_table(&case.report);
    write_csv_atomic(&common.out.join("trace.csv"), &head, &rows)?;
    let e = case.report.blowup;
    let dominated = match (e.t_num(), &case.bound) {
        (Some(t), Some(b)) => Some(t <= b.t0 * (1.0 + DOMINANCE_SLACK)),
        _ => None,
    };
    let holds = case.inequality.as_ref().map(|w| w.holds);
    let decay = case
        .report
        .decay_exponents
        .as_ref()
        .map(|d| d.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"))
        .unwrap_or_default();
    let row = vec![
        num(eps),
        if e.t_num().is_some() { "blowup" } else { "global" }.into(),
        opt(e.t_num()),
        num(e.bracket.0),
        num(e.bracket.1),
        opt(case.bound.as_ref().map(|b| b.t0)),
        opt(case.bound.as_ref().map(|b| b.r0)),
        dominated.map(|b| b.to_string()).unwrap_or_default(),
        holds.map(|b| b.to_string()).unwrap_or_default(),
        decay,
        case.report.steps.to_string(),
        case.mesh_nodes.to_string(),
    ];
    write_csv_atomic(
        &common.out.join("summary.csv"),
        &header(&[
            "eps", "outcome", "t_num", "t_low", "t_high", "t0", "r0", "dominated", "inequality_holds", "decay",
            "steps", "mesh_nodes",
        ]),
        &[row],
    )?;
    match (e.t_num(), &case.bound) {
        (Some(t), Some(b)) => println!("T_num = {t}, T_0 = {}, R_0 = {}", b.t0, b.r0),
        (Some(t), None) => println!("T_num = {t}"),
        (None, _) => println!("global up to {}", e.bracket.0),
    }
    if let Some(d) = &case.report.decay_exponents {
        println!("sup-norm decay exponents: {d:?}");
    }
    let ok = dominated.unwrap_or(true) && holds.unwrap_or(true);
    println!("checks: {}", status(ok));
    Ok(ok)
}

fn campaign_cmd(common: &Common) -> Result<bool> {
    let cfg = config(common)?;
    let campaign = cfg.campaign(common.seed, common.jobs)?;
    let report = run_campaign(&campaign)?;
    let out = &common.out;
    save_report(&out.join("report.toml"), &report)?;
    let (h, rows) = campaign_table(&report);
    write_csv_atomic(&out.join("campaign.csv"), &h, &rows)?;
    let (h, rows) = loglog_table(&report);
    write_csv_atomic(&out.join("loglog.csv"), &h, &rows)?;
    if let Some(f) = report.fit {
        write_csv_atomic(
            &out.join("fit.csv"),
            &header(&["slope", "intercept", "half_width", "points", "predicted", "tolerance"]),
            &[vec![
                num(f.slope),
                num(f.intercept),
                num(f.half_width),
                f.points.to_string(),
                opt(report.predicted_slope),
                num(report.slope_tolerance),
            ]],
        )?;
    }
    if report.all_global() {
        let text = format!("verdict: GLOBAL\nall {} runs global up to the horizon\n", report.runs.len());
        write_text_atomic(&out.join("verdict.txt"), &text)?;
        print!("{text}");
        return Ok(true);
    }
    let rec = reconcile(&report);
    write_text_atomic(&out.join("verdict.txt"), &rec.text())?;
    print!("{}", rec.text());
    Ok(rec.verdict == Verdict::Pass)
}

fn reconcile_cmd(common: &Common, report: Option<&Path>, alpha_max: Option<f64>) -> Result<bool> {
    let path = report.map(Path::to_path_buf).unwrap_or_else(|| common.out.join("report.toml"));
    let mut report = load_report(&path)?;
    if let Some(a) = alpha_max {
        report = report.with_alpha_max(a);
    }
    let rec = reconcile(&report);
    write_text_atomic(&common.out.join("verdict.txt"), &rec.text())?;
    print!("{}", rec.text());
    Ok(rec.verdict == Verdict::Pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match &cli.command {
        Command::Exponents => exponents(c),
        Command::Bound => bound(c),
        Command::Ode => ode(c),
        Command::Testfn => testfn(c),
        Command::Simulate => simulate_cmd(c),
        Command::Campaign => campaign_cmd(c),
        Command::Reconcile { report, alpha_max } => reconcile_cmd(c, report.as_deref(), *alpha_max),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
