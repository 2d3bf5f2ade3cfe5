//! Subcommand bodies.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use mana_core::chain::{apply_phase_rotation_layer, ground_state_with, LanczosOptions};
use mana_core::measures::mana;
use mana_core::sampler::{derive_seed, mutual_mana, thermo_integrate_mana, BetaSchedule, Integration};
use mana_core::wigner::{full_table, RegionSpec};
use mana_core::StateVector;

use crate::cli::*;
use crate::config;
use crate::fit::{chord_x, fit_line, ChordFit, Point};
use crate::qsv::StateFile;

pub const MANA_HEADER: [&str; 9] = ["L", "d", "h", "J", "p", "method", "mana", "stderr", "seconds"];
pub const MUTUAL_HEADER: [&str; 5] = ["L", "ell", "chord_x", "I_M", "stderr"];
pub const INTEGRAND_HEADER: [&str; 3] = ["beta", "integrand", "stderr"];
pub const FIT_HEADER: [&str; 7] = ["x", "n_points", "slope", "slope_err", "gamma", "gamma_err", "r_squared"];

/// A size limit of the command line tool.
#[derive(Debug)]
pub struct GuardError(pub String);

impl fmt::Display for GuardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GuardError {}

pub mod exit {
    pub const OK: i32 = 0;
    pub const GUARD: i32 = 2;
    pub const DIAGNOSTIC: i32 = 3;
    pub const IO: i32 = 4;
}

/// Exit status for an error: guard and input errors 2, convergence and
/// sampler diagnostics 3, I/O 4.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<mana_core::Error>() {
            return if e.is_diagnostic() { exit::DIAGNOSTIC } else { exit::GUARD };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return exit::IO;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { exit::IO } else { exit::GUARD };
        }
    }
    exit::GUARD
}

fn guard(what: &str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(GuardError(format!("{what}: L = {n} exceeds the limit {limit}")).into());
    }
    Ok(())
}

/// Formats numbers with Rust's shortest round-trip representation.
fn num(x: f64) -> String {
    x.to_string()
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes `<out>.meta`: the flags as `key = value` (readable with
/// `--config`) after `# key = value` lines of context.
fn write_meta(out: &Path, command: &str, context: &[(String, String)], flags: &[(String, String)]) -> Result<()> {
    let mut text = format!("# command = {command}\n# version = {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in context {
        text.push_str(&format!("# {k} = {v}\n"));
    }
    let flags: Vec<(String, String)> = flags
        .iter()
        .filter(|(_, v)| v != "false")
        .cloned()
        .collect();
    text.push_str(&config::render(&flags));
    let path = meta_path(out);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Reads `key` from a metadata file, whether or not it is commented.
pub fn read_meta_value(out: &Path, key: &str) -> Option<String> {
    let text = std::fs::read_to_string(meta_path(out)).ok()?;
    text.lines().find_map(|line| {
        let line = line.trim().trim_start_matches('#').trim();
        let (k, v) = line.split_once('=')?;
        (k.trim() == key).then(|| v.trim().to_string())
    })
}

fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn load(path: &Path) -> Result<StateFile> {
    StateFile::load(path).with_context(|| format!("reading state {}", path.display()))
}

fn solve_state(model: &ModelArgs, n_sites: usize, h: f64) -> Result<(StateFile, f64, usize, f64)> {
    let chain = model.model(n_sites, h)?;
    let opts = LanczosOptions {
        tol: model.tol,
        max_iter: model.max_iter,
        seed: model.lanczos_seed,
        ..LanczosOptions::default()
    };
    let gs = ground_state_with(&chain, &opts)?;
    let file = StateFile {
        energy: gs.energy,
        j: model.j,
        h: if model.p.is_some() { 1.0 } else { h },
        p: model.p.unwrap_or(f64::NAN),
        psi: gs.psi,
    };
    Ok((file, gs.residual_norm, gs.iterations, gs.negation_expectation))
}

pub fn solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (file, residual, iterations, negation) = solve_state(&args.model, args.l, args.h)?;
    file.save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    writeln!(stdout, "energy = {}", file.energy)?;
    writeln!(stdout, "residual = {residual}")?;
    writeln!(stdout, "iterations = {iterations}")?;
    writeln!(stdout, "negation = {negation}")?;
    let mut flags = vec![("L".into(), args.l.to_string()), ("h".into(), args.h.to_string())];
    flags.extend(args.model.pairs());
    flags.push(("out".into(), args.out.display().to_string()));
    write_meta(&args.out, "solve", &[("energy".into(), num(file.energy))], &flags)?;
    Ok(exit::OK)
}

/// Mana of a state, with its standard error and the integration details
/// for the Monte Carlo path.
pub fn measure_mana(
    psi: &StateVector,
    method: Method,
    sampler: &SamplerArgs,
) -> Result<(f64, f64, Option<Integration>)> {
    let n = psi.n_sites();
    match method {
        Method::Exact => {
            guard("exact mana", n, EXACT_MAX_SITES)?;
            let table = full_table(psi, &RegionSpec::full(n)?)?;
            Ok((mana(&table), 0.0, None))
        }
        Method::Mc => {
            guard("Monte Carlo mana", n, MC_MAX_SITES)?;
            let mut schedule = BetaSchedule::uniform(sampler.beta_points, &sampler.config())?;
            schedule.auto_refine = !sampler.no_refine;
            let ti = thermo_integrate_mana(psi, &schedule)?;
            Ok((ti.mana.mean, ti.mana.std_error, Some(ti)))
        }
    }
}

fn mana_row(file: &StateFile, method: Method, value: f64, err: f64, seconds: f64) -> Vec<String> {
    vec![
        file.psi.n_sites().to_string(),
        file.psi.dim().d().to_string(),
        num(file.h),
        num(file.j),
        num(file.p),
        method.name().into(),
        num(value),
        num(err),
        format!("{seconds:.3}"),
    ]
}

fn write_integrand(path: &Path, ti: &Integration) -> Result<()> {
    let mut w = csv_writer(Some(path))?;
    w.write_record(INTEGRAND_HEADER)?;
    for (b, e) in ti.grid.iter().zip(&ti.integrand) {
        w.write_record([num(*b), num(e.mean), num(e.std_error)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn mana_cmd(args: &ManaArgs) -> Result<i32> {
    let file = load(&args.state)?;
    let start = Instant::now();
    let (value, err, ti) = measure_mana(&file.psi, args.method, &args.sampler)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut w = csv_writer(args.out.as_deref())?;
    w.write_record(MANA_HEADER)?;
    w.write_record(mana_row(&file, args.method, value, err, seconds))?;
    w.flush()?;
    if let (Some(path), Some(ti)) = (&args.integrand_out, &ti) {
        write_integrand(path, ti)?;
    }
    if let Some(out) = &args.out {
        let mut flags = vec![
            ("state".into(), args.state.display().to_string()),
            ("method".into(), args.method.name().into()),
        ];
        flags.extend(args.sampler.pairs());
        flags.push(("out".into(), out.display().to_string()));
        let mut context = vec![];
        if let Some(ti) = &ti {
            context.push(("grid-points".into(), ti.grid.len().to_string()));
            context.push(("statistical-error".into(), num(ti.statistical_error)));
            context.push(("discretization-error".into(), num(ti.discretization_error)));
        }
        write_meta(out, "mana", &context, &flags)?;
    }
    Ok(exit::OK)
}

pub fn sweep(args: &SweepArgs, stderr: &mut dyn Write) -> Result<i32> {
    if args.h_values.is_empty() || args.l.is_empty() {
        bail!(GuardError("sweep needs at least one L and one h".into()));
    }
    let limit = match args.method {
        Method::Exact => EXACT_MAX_SITES,
        Method::Mc => MC_MAX_SITES,
    };
    for &l in &args.l {
        guard("sweep", l, limit)?;
    }
    let mut w = csv_writer(args.out.as_deref())?;
    w.write_record(MANA_HEADER)?;
    let mut index = 0u64;
    for &l in &args.l {
        for &h in &args.h_values {
            let start = Instant::now();
            let (file, _, _, _) = solve_state(&args.model, l, h)?;
            let mut sampler = args.sampler.clone();
            sampler.seed = derive_seed(args.sampler.seed, index);
            let (value, err, _) = measure_mana(&file.psi, args.method, &sampler)?;
            let seconds = start.elapsed().as_secs_f64();
            w.write_record(mana_row(&file, args.method, value, err, seconds))?;
            w.flush()?;
            writeln!(stderr, "L={l} h={h}: mana {value} +- {err} ({seconds:.1} s)")?;
            index += 1;
        }
    }
    if let Some(out) = &args.out {
        let join = |v: Vec<String>| v.join(",");
        let mut flags = vec![
            ("L".into(), join(args.l.iter().map(|x| x.to_string()).collect())),
            ("h-values".into(), join(args.h_values.iter().map(|x| x.to_string()).collect())),
            ("method".into(), args.method.name().into()),
        ];
        flags.extend(args.model.pairs());
        flags.extend(args.sampler.pairs());
        flags.push(("out".into(), out.display().to_string()));
        write_meta(out, "sweep", &[], &flags)?;
    }
    Ok(exit::OK)
}

/// `M(AB) - M(A) - M(B)` from three exact tables.
pub fn exact_mutual(psi: &StateVector, ell: usize) -> Result<f64> {
    let n = psi.n_sites();
    let m = |r: RegionSpec| -> Result<f64> { Ok(mana(&full_table(psi, &r)?)) };
    Ok(m(RegionSpec::full(n)?)? - m(RegionSpec::range(0, ell, n)?)? - m(RegionSpec::range(ell, n, n)?)?)
}

/// One mutual-mana row; chains of different `ell` use independent seeds.
pub fn mutual_row(psi: &StateVector, ell: usize, method: Method, sampler: &SamplerArgs) -> Result<(f64, f64)> {
    match method {
        Method::Exact => Ok((exact_mutual(psi, ell)?, 0.0)),
        Method::Mc => {
            let base = sampler.config();
            let a = base.with_seed(derive_seed(sampler.seed, 2 * ell as u64));
            let b = base.with_seed(derive_seed(sampler.seed, 2 * ell as u64 + 1));
            let r = mutual_mana(psi, ell, &a, &b)?;
            Ok((r.value, r.std_error))
        }
    }
}

pub fn mutual(args: &MutualArgs, stderr: &mut dyn Write) -> Result<i32> {
    let file = load(&args.state)?;
    let n = file.psi.n_sites();
    let limit = match args.method {
        Method::Exact => EXACT_MAX_SITES,
        Method::Mc => MC_MAX_SITES,
    };
    guard("mutual mana", n, limit)?;
    let ell_max = args.ell_max.unwrap_or(n.saturating_sub(1));
    if !(1 <= args.ell_min && args.ell_min <= ell_max && ell_max < n) {
        bail!(GuardError(format!(
            "need 1 <= ell-min <= ell-max < L, got {}..={ell_max} with L = {n}",
            args.ell_min
        )));
    }
    let mut w = csv_writer(args.out.as_deref())?;
    w.write_record(MUTUAL_HEADER)?;
    let mut status = exit::OK;
    for ell in args.ell_min..=ell_max {
        let start = Instant::now();
        let (value, err) = match mutual_row(&file.psi, ell, args.method, &args.sampler) {
            Ok(v) => v,
            Err(e) if e.downcast_ref::<mana_core::Error>().is_some_and(|c| c.is_diagnostic()) => {
                writeln!(stderr, "ell={ell}: {e:#}")?;
                status = exit::DIAGNOSTIC;
                (f64::NAN, f64::NAN)
            }
            Err(e) => return Err(e),
        };
        w.write_record([n.to_string(), ell.to_string(), num(chord_x(ell, n)), num(value), num(err)])?;
        w.flush()?;
        writeln!(stderr, "ell={ell}: {value} +- {err} ({:.1} s)", start.elapsed().as_secs_f64())?;
    }
    if let Some(out) = &args.out {
        let mut flags = vec![
            ("state".into(), args.state.display().to_string()),
            ("ell-min".into(), args.ell_min.to_string()),
            ("ell-max".into(), ell_max.to_string()),
            ("method".into(), args.method.name().into()),
        ];
        flags.extend(args.sampler.pairs());
        flags.push(("out".into(), out.display().to_string()));
        let context = [("J".into(), num(file.j)), ("h".into(), num(file.h)), ("p".into(), num(file.p))];
        write_meta(out, "mutual", &context, &flags)?;
    }
    Ok(status)
}

/// A row of a mutual-mana CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutualRow {
    pub chain_len: usize,
    pub ell: usize,
    pub chord_x: f64,
    pub value: f64,
    pub stderr: f64,
}

pub fn read_mutual_csv(path: &Path) -> Result<Vec<MutualRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{} has no column {name:?}", path.display()))
            .map_err(|e| GuardError(format!("{e:#}")).into())
    };
    let idx = [col("L")?, col("ell")?, col("chord_x")?, col("I_M")?, col("stderr")?];
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> {
            rec[idx[i]]
                .trim()
                .parse::<f64>()
                .map_err(|e| GuardError(format!("bad number {:?}: {e}", &rec[idx[i]])).into())
        };
        rows.push(MutualRow {
            chain_len: f(0)? as usize,
            ell: f(1)? as usize,
            chord_x: f(2)?,
            value: f(3)?,
            stderr: f(4)?,
        });
    }
    Ok(rows)
}

/// Selects rows in `ell_min..=ell_max` (and even `ell` when asked) and fits
/// them against the chosen axis.
pub fn fit_rows(rows: &[MutualRow], axis: Axis, ell_min: usize, ell_max: usize, even_only: bool) -> Result<ChordFit> {
    let points: Vec<Point> = rows
        .iter()
        .filter(|r| r.ell >= ell_min && r.ell <= ell_max && (!even_only || r.ell % 2 == 0))
        .map(|r| Point {
            x: match axis {
                Axis::Chord => r.chord_x,
                Axis::Ell => r.ell as f64,
            },
            y: r.value,
            sigma: r.stderr,
        })
        .collect();
    fit_line(&points).map_err(|e| GuardError(e.to_string()).into())
}

pub fn fit(args: &FitArgs, stdout: &mut dyn Write) -> Result<i32> {
    let rows = read_mutual_csv(&args.input)?;
    let Some(chain_len) = rows.first().map(|r| r.chain_len) else {
        bail!(GuardError(format!("{} has no rows", args.input.display())));
    };
    let j = args
        .j
        .or_else(|| read_meta_value(&args.input, "J").and_then(|v| v.parse().ok()));
    let even_only = args.even_only.unwrap_or(j.is_some_and(|j| j < 0.0));
    let ell_max = args.ell_max.unwrap_or(chain_len.saturating_sub(2));
    let f = fit_rows(&rows, args.x, args.ell_min, ell_max, even_only)?;
    let axis = match args.x {
        Axis::Chord => "chord",
        Axis::Ell => "ell",
    };
    writeln!(stdout, "slope = {} +- {}", f.slope, f.slope_err)?;
    writeln!(stdout, "gamma = {} +- {}", f.gamma, f.gamma_err)?;
    writeln!(stdout, "r_squared = {}", f.r_squared)?;
    writeln!(stdout, "points = {}", f.points.len())?;
    if let Some(out) = &args.out {
        let mut w = csv_writer(Some(out))?;
        w.write_record(FIT_HEADER)?;
        w.write_record([
            axis.to_string(),
            f.points.len().to_string(),
            num(f.slope),
            num(f.slope_err),
            num(f.gamma),
            num(f.gamma_err),
            num(f.r_squared),
        ])?;
        w.flush()?;
        let flags = vec![
            ("input".into(), args.input.display().to_string()),
            ("x".into(), axis.into()),
            ("ell-min".into(), args.ell_min.to_string()),
            ("ell-max".into(), ell_max.to_string()),
            ("even-only".into(), if even_only { "yes" } else { "no" }.into()),
            ("out".into(), out.display().to_string()),
        ];
        write_meta(out, "fit", &[], &flags)?;
    }
    Ok(exit::OK)
}

pub fn rotate(args: &RotateArgs) -> Result<i32> {
    let mut file = load(&args.state)?;
    file.psi = apply_phase_rotation_layer(&file.psi, args.theta)?;
    file.save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let flags = vec![
        ("state".into(), args.state.display().to_string()),
        ("theta".into(), num(args.theta)),
        ("out".into(), args.out.display().to_string()),
    ];
    write_meta(&args.out, "rotate", &[], &flags)?;
    Ok(exit::OK)
}

pub fn run(cli: &Cli) -> Result<i32> {
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    match &cli.command {
        Command::Solve(a) => solve(a, &mut stdout),
        Command::Mana(a) => mana_cmd(a),
        Command::Sweep(a) => sweep(a, &mut stderr),
        Command::Mutual(a) => mutual(a, &mut stderr),
        Command::Fit(a) => fit(a, &mut stdout),
        Command::Rotate(a) => rotate(a),
    }
}
