//! Subcommand implementations. Each returns the CSV document it produced
//! after writing it to `--out` (or stdout).

use std::path::Path;

use mprk_core::experiments::{self, ScanPlan, ScanResult};
use mprk_core::stability::{self, Classification};
use mprk_core::{integrate, Error, LinearPds, MprkParams, Regime, State, TwoSpeciesSystem};

use crate::cli::{
    Command, ConvergenceArgs, IntegrateArgs, ScanAlphaDeltaArgs, ScanDeltaArgs, StabilityArgs,
};
use crate::csv::{fmt_f64, CsvDoc};
use crate::matrix_file::parse_matrix;
use crate::{parallel, CliError};

type CmdResult = Result<CsvDoc, CliError>;

/// Maps library errors onto the exit code contract: bad input is a usage
/// error, failures of the numerics are runtime errors.
fn core_err(e: Error) -> CliError {
    match e {
        Error::Validation(_)
        | Error::Degenerate(_)
        | Error::ZeroAlpha
        | Error::Domain(_)
        | Error::Dimension { .. } => CliError::usage(e),
        _ => CliError::runtime(e),
    }
}

fn emit(doc: CsvDoc, out: Option<&Path>) -> CmdResult {
    doc.emit(out)
        .map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))?;
    Ok(doc)
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

pub fn run(command: &Command) -> CmdResult {
    match command {
        Command::Integrate(a) => cmd_integrate(a),
        Command::ScanDelta(a) => cmd_scan_delta(a),
        Command::ScanAlphaDelta(a) => cmd_scan_alpha_delta(a),
        Command::Stability(a) => cmd_stability(a),
        Command::Convergence(a) => cmd_convergence(a),
    }
}

pub fn cmd_integrate(args: &IntegrateArgs) -> CmdResult {
    let params = MprkParams::new(args.alpha).map_err(core_err)?;
    let two_species = args.a.is_some() || args.b.is_some() || args.delta.is_some();
    let from_file = args.matrix.is_some() || args.y0.is_some();
    let mut provenance = format!(
        "mprk integrate --alpha {} --dt {} --steps {}",
        fmt_f64(args.alpha),
        fmt_f64(args.dt),
        args.steps
    );

    let (pds, y0) = match (two_species, from_file) {
        (true, true) => {
            return Err(CliError::Usage(
                "use either --a/--b/--delta or --matrix/--y0, not both".into(),
            ))
        }
        (false, false) => {
            return Err(CliError::Usage(
                "missing system: give --a (with optional --b, --delta) or --matrix with --y0"
                    .into(),
            ))
        }
        (true, false) => {
            let a = args
                .a
                .ok_or_else(|| CliError::Usage("missing required flag --a".into()))?;
            let b = args.b.unwrap_or(a);
            let delta = args.delta.unwrap_or(0.0);
            provenance += &format!(
                " --a {} --b {} --delta {}",
                fmt_f64(a),
                fmt_f64(b),
                fmt_f64(delta)
            );
            let sys = TwoSpeciesSystem::new(a, b).map_err(core_err)?;
            let y0 = experiments::initial_value(delta).map_err(core_err)?;
            (sys.to_linear(), y0)
        }
        (false, true) => {
            let path = args
                .matrix
                .as_ref()
                .ok_or_else(|| CliError::Usage("missing required flag --matrix".into()))?;
            let y0 = args
                .y0
                .clone()
                .ok_or_else(|| CliError::Usage("missing required flag --y0".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let m = parse_matrix(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let n = m.dim();
            let pds = LinearPds::new(m).map_err(core_err)?;
            if y0.len() != n {
                return Err(CliError::Usage(format!(
                    "--y0 has {} entries but the matrix is {n}x{n}",
                    y0.len()
                )));
            }
            provenance += &format!(" --matrix {} --y0 {}", path.display(), list(&y0));
            let y0 = State::new(0.0, y0)
                .map_err(|e| CliError::Usage(format!("--y0 must be strictly positive: {e}")))?;
            (pds, y0)
        }
    };

    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(CliError::Usage(format!(
            "--dt must be positive, got {}",
            args.dt
        )));
    }
    let traj = integrate(&pds, &y0, args.dt, args.steps, &params).map_err(core_err)?;

    let n = y0.y.len();
    let mut header: Vec<String> = vec!["step".into(), "t".into()];
    header.extend((1..=n).map(|i| format!("y_{i}")));
    header.push("mass".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut doc = CsvDoc::new(&provenance, &header);
    for (k, s) in traj.states.iter().enumerate() {
        let mut row = vec![k.to_string(), fmt_f64(s.t)];
        row.extend(s.y.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(s.mass()));
        doc.row(row);
    }
    emit(doc, args.out.as_deref())
}

fn run_plan(plan: ScanPlan, threads: Option<usize>) -> Result<ScanResult, CliError> {
    let threads = parallel::resolve_threads(threads).map_err(CliError::Usage)?;
    parallel::run_scan(plan, threads).map_err(core_err)
}

fn report_scan(result: &ScanResult) {
    let ambiguous = result.ambiguous();
    if !ambiguous.is_empty() {
        eprintln!(
            "warning: {} cell(s) with 1e-6 <= d <= 1e-2 need manual review, first at alpha={}, delta={}",
            ambiguous.len(),
            fmt_f64(ambiguous[0].0),
            fmt_f64(ambiguous[0].1)
        );
    }
    let diverged = result
        .cells
        .iter()
        .filter(|c| c.class() == experiments::DistanceClass::Diverged)
        .count();
    if diverged > 0 {
        eprintln!("warning: {diverged} cell(s) failed to integrate");
    }
}

fn scan_row(fields: &mut Vec<String>, cell: &experiments::CellOutcome, with_states: bool) {
    fields.push(fmt_f64(cell.distance()));
    fields.push(cell.class().name().to_string());
    if with_states {
        match cell.final_state() {
            Some([y1, y2]) => {
                fields.push(fmt_f64(y1));
                fields.push(fmt_f64(y2));
            }
            None => {
                fields.push(String::new());
                fields.push(String::new());
            }
        }
    }
}

pub fn cmd_scan_delta(args: &ScanDeltaArgs) -> CmdResult {
    let plan = ScanPlan::delta_sweep(args.alpha, args.a, args.dt, args.steps, args.samples)
        .map_err(core_err)?;
    let result = run_plan(plan, args.threads.threads)?;
    report_scan(&result);
    if let Some(t) = result.delta_transition(0) {
        eprintln!(
            "stable -> unstable between delta={} and delta={}",
            fmt_f64(t.below),
            fmt_f64(t.above)
        );
    }

    let provenance = format!(
        "mprk scan-delta --alpha {} --a {} --dt {} --steps {} --samples {}{}",
        fmt_f64(args.alpha),
        fmt_f64(args.a),
        fmt_f64(args.dt),
        args.steps,
        args.samples,
        if args.with_states {
            " --with-states"
        } else {
            ""
        }
    );
    let mut header = vec!["delta", "d", "class"];
    if args.with_states {
        header.extend(["y_1", "y_2"]);
    }
    let mut doc = CsvDoc::new(&provenance, &header);
    for (_, delta, cell) in result.iter() {
        let mut row = vec![fmt_f64(delta)];
        scan_row(&mut row, cell, args.with_states);
        doc.row(row);
    }
    emit(doc, args.out.as_deref())
}

pub fn cmd_scan_alpha_delta(args: &ScanAlphaDeltaArgs) -> CmdResult {
    let alphas = experiments::alpha_axis(args.alpha_min, args.alpha_max, args.alpha_samples)
        .map_err(core_err)?;
    let deltas = experiments::delta_axis(args.delta_samples).map_err(core_err)?;
    let plan = ScanPlan::new(args.a, args.dt, args.steps, alphas, deltas).map_err(core_err)?;
    let result = run_plan(plan, args.threads.threads)?;
    report_scan(&result);
    if let Some(b) = result.alpha_star() {
        eprintln!(
            "alpha* = {} +/- {}",
            fmt_f64(b.midpoint()),
            fmt_f64(b.uncertainty())
        );
    }

    let provenance = format!(
        "mprk scan-alpha-delta --alpha-min {} --alpha-max {} --alpha-samples {} --delta-samples {} --a {} --dt {} --steps {}{}",
        fmt_f64(args.alpha_min),
        fmt_f64(args.alpha_max),
        args.alpha_samples,
        args.delta_samples,
        fmt_f64(args.a),
        fmt_f64(args.dt),
        args.steps,
        if args.with_states { " --with-states" } else { "" }
    );
    let mut header = vec!["alpha", "delta", "d", "class"];
    if args.with_states {
        header.extend(["y_1", "y_2"]);
    }
    let mut doc = CsvDoc::new(&provenance, &header);
    for (alpha, delta, cell) in result.iter() {
        let mut row = vec![fmt_f64(alpha), fmt_f64(delta)];
        scan_row(&mut row, cell, args.with_states);
        doc.row(row);
    }
    emit(doc, args.out.as_deref())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn cmd_stability(args: &StabilityArgs) -> CmdResult {
    let alpha = args.alpha;
    let regime = Regime::of(alpha).map_err(core_err)?;
    let sweep = args.zmin.is_some() || args.zmax.is_some() || args.n.is_some();
    let pair = args.dt.is_some() || args.lambda.is_some();
    let modes = [args.z.is_some(), pair, sweep]
        .iter()
        .filter(|m| **m)
        .count();
    if modes > 1 {
        return Err(CliError::Usage(
            "choose one of --z, --dt/--lambda, or --zmin/--zmax/--n".into(),
        ));
    }
    let z_star = stability::z_star(alpha).ok();

    if let Some(z) = args.z {
        let r = stability::stability_function(alpha, z).map_err(core_err)?;
        let class = Classification::from_modulus(r.abs());
        let provenance = format!(
            "mprk stability --alpha {} --z {}",
            fmt_f64(alpha),
            fmt_f64(z)
        );
        let mut doc = CsvDoc::new(&provenance, &["R", "|R|", "class", "z_star"]);
        doc.row([
            fmt_f64(r),
            fmt_f64(r.abs()),
            class.name().into(),
            opt(z_star),
        ]);
        return emit(doc, args.out.as_deref());
    }

    if pair {
        let (Some(dt), Some(lambda)) = (args.dt, args.lambda) else {
            return Err(CliError::Usage(
                "--dt and --lambda must be given together".into(),
            ));
        };
        let rep = stability::classify(alpha, dt, lambda).map_err(core_err)?;
        let provenance = format!(
            "mprk stability --alpha {} --dt {} --lambda {}",
            fmt_f64(alpha),
            fmt_f64(dt),
            fmt_f64(lambda)
        );
        let mut doc = CsvDoc::new(&provenance, &["R", "|R|", "class", "z_star"]);
        doc.row([
            fmt_f64(rep.r_value),
            fmt_f64(rep.modulus),
            rep.classification.name().into(),
            opt(rep.z_star),
        ]);
        return emit(doc, args.out.as_deref());
    }

    if sweep {
        let (Some(zmin), Some(zmax)) = (args.zmin, args.zmax) else {
            return Err(CliError::Usage(
                "--zmin and --zmax must be given together".into(),
            ));
        };
        let n = args.n.unwrap_or(101);
        if n < 2 || zmin.partial_cmp(&zmax) != Some(std::cmp::Ordering::Less) {
            return Err(CliError::Usage(format!(
                "sweep needs zmin < zmax and n >= 2 (got {zmin}, {zmax}, {n})"
            )));
        }
        let provenance = format!(
            "mprk stability --alpha {} --zmin {} --zmax {} --n {n}",
            fmt_f64(alpha),
            fmt_f64(zmin),
            fmt_f64(zmax)
        );
        let mut doc = CsvDoc::new(&provenance, &["z", "R"]);
        let h = (zmax - zmin) / (n - 1) as f64;
        for k in 0..n {
            let z = if k == n - 1 {
                zmax
            } else {
                zmin + k as f64 * h
            };
            let cell = match stability::stability_function(alpha, z) {
                Ok(r) => fmt_f64(r),
                Err(_) if z > 0.0 && regime != Regime::NonnegativeAll => "undefined".into(),
                Err(_) => "pole".into(),
            };
            doc.row([fmt_f64(z), cell]);
        }
        return emit(doc, args.out.as_deref());
    }

    let provenance = format!("mprk stability --alpha {}", fmt_f64(alpha));
    let mut doc = CsvDoc::new(&provenance, &["alpha", "regime", "z_star"]);
    doc.row([fmt_f64(alpha), regime.name().into(), opt(z_star)]);
    emit(doc, args.out.as_deref())
}

pub fn default_dt_list() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> CmdResult {
    let dts = args.dt_list.clone().unwrap_or_else(default_dt_list);
    let rows = experiments::convergence_order(args.alpha, args.a, args.delta, &dts, args.horizon)
        .map_err(core_err)?;
    let provenance = format!(
        "mprk convergence --alpha {} --a {} --delta {} --dt-list {} --horizon {}",
        fmt_f64(args.alpha),
        fmt_f64(args.a),
        fmt_f64(args.delta),
        list(&dts),
        fmt_f64(args.horizon)
    );
    let mut doc = CsvDoc::new(&provenance, &["dt", "error", "order"]);
    for row in &rows {
        let error = match &row.error {
            Ok(e) => fmt_f64(*e),
            Err(msg) => {
                eprintln!("warning: dt={} failed: {msg}", fmt_f64(row.dt));
                "failed".into()
            }
        };
        doc.row([fmt_f64(row.dt), error, opt(row.order)]);
    }
    emit(doc, args.out.as_deref())
}
