//! Command-line driver for the radial fourth-order Liouville laboratory.
//!
//! Every run resolves its configuration (flags > `LIOUVILLE4_OUTDIR` env >
//! JSON config file > defaults), writes its data files into the output
//! directory, and finishes with a `manifest.json` listing the tool version,
//! the resolved configuration, and a sha256 for each output file. Identical
//! configurations produce byte-identical outputs; wall-clock time is only
//! recorded under `--timing`.

// validation guards use `!(x > 0.0)` so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use liouville4::diagnostics::{detect_monotone_breaks, diagnostic_series, neck_energy, regime_classify};
use liouville4::families::{
    build_family, dlap_v0, dv0, e4v0, lap_v0, out_frac, v0, FamilyKind, FamilyMember, FamilySpec,
};
use liouville4::greens::{
    g_delta_radial, h_delta_at_zero, pohozaev_terms, representation_residual, GreenApply,
    PolyGauss, RadialField,
};
use liouville4::grid::RadialGrid;
use liouville4::ode::OdeConfig;
use liouville4::profile::RadialProfile;
use liouville4::shooting::{asymptotic_slope, energy_vs_beta_scan, scan_to_csv, shoot};
use liouville4::verify;

#[derive(Parser)]
#[command(name = "liouville4", version, about = "Radial solver and checks for the fourth-order Liouville equation on balls in R^4")]
struct Cli {
    /// Output directory (overrides LIOUVILLE4_OUTDIR and the config file)
    #[arg(long, global = true)]
    outdir: Option<PathBuf>,

    /// JSON config file whose keys mirror the flags; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Record wall-clock seconds in the manifest (kept out of the default
    /// manifest so identical configs give byte-identical files)
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one shot with u(0)=0, Δu(0)=β, or a whole β range
    Shoot(ShootArgs),
    /// Energy-versus-β scan over an inclusive linear grid
    Scan(ScanArgs),
    /// Build a concentrating family, its diagnostic series, and the regime call
    Family(FamilyArgs),
    /// Shoot one trajectory and report class, energy, slope fit, monotone breaks
    Classify(ClassifyArgs),
    /// Green-kernel, representation-formula, and kernel-consistency checks
    Greens(GreensArgs),
    /// Pohozaev identity on the entire solution and on random smooth fields
    Pohozaev(PohozaevArgs),
    /// Run the acceptance criteria and write a report
    Verify(VerifyArgs),
    /// Export plot-ready CSVs (profiles, energy scan, d_k series, neck energies)
    ExportPlotdata(ExportArgs),
}

#[derive(Args)]
struct ShootArgs {
    /// Initial Laplacian β for a single shot
    #[arg(long)]
    beta: Option<f64>,
    /// β range "lo:hi:step" (inclusive); alternative to --beta
    #[arg(long)]
    beta_range: Option<String>,
    /// Integration endpoint
    #[arg(long)]
    rmax: Option<f64>,
    /// Relative step tolerance (absolute tolerance is tol/100)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    /// Number of grid points (>= 2)
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct FamilyArgs {
    /// Family kind: log, quad1, or quad2
    #[arg(long)]
    kind: Option<String>,
    /// Comma-separated strictly increasing concentration indices, e.g. 4,8,16,32
    #[arg(long)]
    k: Option<String>,
    /// Shooting β for quad1 (required for that kind, must exceed β*)
    #[arg(long)]
    beta: Option<f64>,
    /// Ball radius for masses, diagnostics, and the member CSV sample grid
    #[arg(long)]
    delta: Option<f64>,
    /// Integration endpoint for the quad1 backing shot
    #[arg(long)]
    rmax: Option<f64>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct GreensArgs {
    /// Ball radius δ for the kernel checks
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct PohozaevArgs {
    /// Evaluation radius for the random-field identity checks
    #[arg(long)]
    r: Option<f64>,
    /// Number of random fields
    #[arg(long)]
    count: Option<usize>,
    /// RNG seed for the field sample
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only criteria whose name contains this substring
    #[arg(long)]
    only: Option<String>,
    /// Override the headline tolerance of every selected criterion
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the random-field parts of the suite
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExportArgs {
    /// Ball radius for the family diagnostics
    #[arg(long)]
    delta: Option<f64>,
    /// Number of β grid points for the energy scan export
    #[arg(long)]
    beta_count: Option<usize>,
}

/// Input errors that should exit with status 2, like clap's own usage errors.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Config-file values; `Value::Null` when no file was given.
struct Conf(Value);

impl Conf {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(p) = path else { return Ok(Conf(Value::Null)) };
        let text = fs::read_to_string(p)
            .with_context(|| format!("reading config file {}", p.display()))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("config file {}: {e}", p.display())))?;
        if !v.is_object() {
            return Err(usage(format!("config file {} must be a JSON object", p.display())));
        }
        Ok(Conf(v))
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(Value::as_f64)
    }

    fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(Value::as_u64)
    }

    fn usize(&self, key: &str) -> Option<usize> {
        self.u64(key).map(|v| v as usize)
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).and_then(Value::as_str).map(str::to_owned)
    }
}

#[derive(Serialize)]
struct OutputEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    tool_version: &'static str,
    command: &'static str,
    config: Value,
    outputs: Vec<OutputEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_clock_seconds: Option<f64>,
}

/// Collects output files and their checksums, then writes the manifest.
struct Sink {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl Sink {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Sink { dir: dir.to_path_buf(), outputs: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.push(OutputEntry { path: name.to_owned(), sha256: hex });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn finish(self, command: &'static str, config: Value, wall: Option<f64>) -> Result<()> {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            outputs: self.outputs,
            wall_clock_seconds: wall,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if e.downcast_ref::<UsageError>().is_some() {
                eprintln!("usage error: {e}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let conf = Conf::load(cli.config.as_deref())?;
    let outdir: PathBuf = cli
        .outdir
        .or_else(|| std::env::var_os("LIOUVILLE4_OUTDIR").map(PathBuf::from))
        .or_else(|| conf.string("outdir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let started = Instant::now();
    let mut sink = Sink::new(&outdir)?;
    let outdir_str = outdir.display().to_string();

    let (command, config, code) = match cli.cmd {
        Cmd::Shoot(a) => cmd_shoot(a, &conf, &outdir_str, &mut sink)?,
        Cmd::Scan(a) => cmd_scan(a, &conf, &outdir_str, &mut sink)?,
        Cmd::Family(a) => cmd_family(a, &conf, &outdir_str, &mut sink)?,
        Cmd::Classify(a) => cmd_classify(a, &conf, &outdir_str, &mut sink)?,
        Cmd::Greens(a) => cmd_greens(a, &conf, &outdir_str, &mut sink)?,
        Cmd::Pohozaev(a) => cmd_pohozaev(a, &conf, &outdir_str, &mut sink)?,
        Cmd::Verify(a) => cmd_verify(a, &conf, &outdir_str, &mut sink)?,
        Cmd::ExportPlotdata(a) => cmd_export(a, &conf, &outdir_str, &mut sink)?,
    };

    let wall = cli.timing.then(|| started.elapsed().as_secs_f64());
    sink.finish(command, config, wall)?;
    Ok(code)
}

fn ode_config(rmax: f64, tol: f64) -> Result<OdeConfig> {
    let cfg = OdeConfig { rtol: tol, atol: tol * 1e-2, r_max: rmax, ..OdeConfig::default() };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

/// "lo:hi:step" with step > 0, hi >= lo, inclusive endpoints.
fn parse_beta_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("--beta-range wants lo:hi:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || hi < lo || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if n > 10_000 {
        return Err(usage(format!("--beta-range asks for {n} shots; cap is 10000")));
    }
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

fn cmd_shoot(
    a: ShootArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let rmax = a.rmax.or_else(|| conf.f64("rmax")).unwrap_or(50.0);
    let tol = a.tol.or_else(|| conf.f64("tol")).unwrap_or(1e-10);
    let cfg = ode_config(rmax, tol)?;
    let beta = a.beta.or_else(|| conf.f64("beta"));
    let range = a.beta_range.or_else(|| conf.string("beta_range"));

    let config = json!({
        "outdir": outdir,
        "beta": beta,
        "beta_range": range,
        "rmax": rmax,
        "tol": tol,
    });

    match (beta, range) {
        (Some(b), None) => {
            let sr = shoot(b, &cfg)?;
            sink.write("shoot_profile.csv", sr.profile.to_csv().as_bytes())?;
            sink.write_json("shoot_result.json", &sr)?;
            println!("beta = {b}: {} (confident: {})", sr.class, sr.confident);
        }
        (None, Some(spec)) => {
            let betas = parse_beta_range(&spec)?;
            let rows = energy_vs_beta_scan(&betas, &cfg);
            sink.write("shoot_scan.csv", scan_to_csv(&rows).as_bytes())?;
            println!("{} shots written to shoot_scan.csv", rows.len());
        }
        _ => return Err(usage("shoot wants exactly one of --beta or --beta-range")),
    }
    Ok(("shoot", config, ExitCode::SUCCESS))
}

fn cmd_scan(
    a: ScanArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let beta_min = a.beta_min.or_else(|| conf.f64("beta_min")).unwrap_or(0.7);
    let beta_max = a.beta_max.or_else(|| conf.f64("beta_max")).unwrap_or(2.0);
    let count = a.count.or_else(|| conf.usize("count")).unwrap_or(14);
    let rmax = a.rmax.or_else(|| conf.f64("rmax")).unwrap_or(50.0);
    let tol = a.tol.or_else(|| conf.f64("tol")).unwrap_or(1e-10);
    if count < 2 || !(beta_max > beta_min) {
        return Err(usage("scan wants beta_min < beta_max and count >= 2"));
    }
    let cfg = ode_config(rmax, tol)?;
    let betas: Vec<f64> = (0..count)
        .map(|i| beta_min + (beta_max - beta_min) * i as f64 / (count - 1) as f64)
        .collect();
    let rows = energy_vs_beta_scan(&betas, &cfg);
    sink.write("scan.csv", scan_to_csv(&rows).as_bytes())?;
    sink.write_json("scan.json", &rows)?;
    let config = json!({
        "outdir": outdir,
        "beta_min": beta_min,
        "beta_max": beta_max,
        "count": count,
        "rmax": rmax,
        "tol": tol,
    });
    println!("{count} shots written to scan.csv");
    Ok(("scan", config, ExitCode::SUCCESS))
}

fn member_csv(member: &FamilyMember, delta: f64) -> String {
    let mut out = String::from("r,u,du,lap_u,v_weight,density\n");
    let n = 400;
    for j in 0..=n {
        let r = delta * j as f64 / n as f64;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r,
            member.u(r),
            member.du(r),
            member.lap_u(r),
            member.v_weight(r),
            member.density(r)
        ));
    }
    out
}

fn cmd_family(
    a: FamilyArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let kind_s = a
        .kind
        .or_else(|| conf.string("kind"))
        .ok_or_else(|| usage("family wants --kind log|quad1|quad2"))?;
    let k_s = a
        .k
        .or_else(|| conf.string("k"))
        .ok_or_else(|| usage("family wants --k, e.g. --k 4,8,16,32"))?;
    let beta = a.beta.or_else(|| conf.f64("beta"));
    let delta = a.delta.or_else(|| conf.f64("delta")).unwrap_or(0.5);
    let rmax = a.rmax.or_else(|| conf.f64("rmax")).unwrap_or(50.0);

    let k_values: Vec<u32> = k_s
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("--k wants comma-separated integers, got {k_s:?}")))?;
    if k_values.is_empty() {
        return Err(usage("--k list is empty"));
    }
    if !k_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(usage("--k values must be strictly increasing"));
    }
    let kind = match kind_s.as_str() {
        "log" => FamilyKind::Log,
        "quad1" => {
            let b = beta.ok_or_else(|| usage("family --kind quad1 needs --beta"))?;
            FamilyKind::QuadI { beta: b }
        }
        "quad2" => FamilyKind::QuadII,
        other => return Err(usage(format!("unknown family kind {other:?}"))),
    };
    let spec = FamilySpec { kind, k_values: k_values.clone() };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    if !(delta > 0.0) {
        return Err(usage("--delta must be positive"));
    }

    let cfg = ode_config(rmax, 1e-10)?;
    let members = build_family(&spec, &cfg)?;
    let series = diagnostic_series(&members, delta)?;
    for member in &members {
        let name = format!("family_{}_k{}.csv", member.kind_slug(), member.k());
        sink.write(&name, member_csv(member, delta).as_bytes())?;
    }
    sink.write("diagnostic_series.csv", series.to_csv().as_bytes())?;
    let report = if members.len() >= 2 {
        let rep = regime_classify(&series)?;
        println!("regime: {} (confident: {})", rep.regime, rep.confident);
        serde_json::to_value(&rep)?
    } else {
        json!({ "regime": "inconclusive", "note": "need at least two members" })
    };
    sink.write_json("regime_report.json", &report)?;

    let member_rows: Vec<Value> = members
        .iter()
        .zip(&series.k)
        .zip(&series.mu)
        .zip(&series.d_k)
        .zip(&series.mass_delta)
        .map(|((((m, &k), &mu), &d_k), &mass)| {
            json!({
                "k": k,
                "mu": mu,
                "provenance": m.provenance(),
                "d_k": d_k,
                "mass_delta": mass,
            })
        })
        .collect();
    sink.write_json(
        "family_manifest.json",
        &json!({
            "kind": kind_s,
            "beta": beta,
            "delta": delta,
            "members": member_rows,
        }),
    )?;

    let config = json!({
        "outdir": outdir,
        "kind": kind_s,
        "k": k_s,
        "beta": beta,
        "delta": delta,
        "rmax": rmax,
    });
    Ok(("family", config, ExitCode::SUCCESS))
}

fn cmd_classify(
    a: ClassifyArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let beta = a
        .beta
        .or_else(|| conf.f64("beta"))
        .ok_or_else(|| usage("classify wants --beta"))?;
    let rmax = a.rmax.or_else(|| conf.f64("rmax")).unwrap_or(50.0);
    let tol = a.tol.or_else(|| conf.f64("tol")).unwrap_or(1e-10);
    let cfg = ode_config(rmax, tol)?;
    let sr = shoot(beta, &cfg)?;
    let slope_fit = asymptotic_slope(&sr.profile).ok();
    let breaks = detect_monotone_breaks(&sr.profile);
    sink.write_json(
        "classification.json",
        &json!({
            "beta": beta,
            "class": sr.class,
            "confident": sr.confident,
            "energy_total": sr.energy_total,
            "energy_quadrature": sr.energy_quadrature,
            "energy_tail": sr.energy_tail,
            "event": sr.event,
            "slope_fit": slope_fit,
            "monotone_breaks": breaks,
        }),
    )?;
    println!("beta = {beta}: {} (confident: {})", sr.class, sr.confident);
    let config = json!({ "outdir": outdir, "beta": beta, "rmax": rmax, "tol": tol });
    Ok(("classify", config, ExitCode::SUCCESS))
}

fn cmd_greens(
    a: GreensArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let delta = a.delta.or_else(|| conf.f64("delta")).unwrap_or(0.5);
    if !(delta > 0.0) {
        return Err(usage("--delta must be positive"));
    }

    // G applied to the constant 1 must reproduce (δ² − r²)/8 exactly.
    let ga = GreenApply::build(|_| 1.0, delta, 2048)?;
    let mut apply_const_dev: f64 = 0.0;
    for j in 0..=200 {
        let r = delta * j as f64 / 200.0;
        let exact = (delta * delta - r * r) / 8.0;
        apply_const_dev = apply_const_dev.max((ga.apply(r) - exact).abs());
    }

    // −(∂rr + 3/r ∂r) H_δ(0, ·) reproduces the kernel slice g_δ(0, ·).
    let h = delta * 2e-4;
    let mut kernel_consistency_worst: f64 = 0.0;
    for j in 1..=20 {
        let r = delta * j as f64 / 21.0;
        let f = |x: f64| h_delta_at_zero(x, delta).unwrap();
        let (f2p, f1p, f0, f1m, f2m) = (f(r + 2.0 * h), f(r + h), f(r), f(r - h), f(r - 2.0 * h));
        let d2 = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h);
        let d1 = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
        let lap = -(d2 + 3.0 * d1 / r);
        let g = g_delta_radial(0.0, r, delta)?;
        kernel_consistency_worst = kernel_consistency_worst.max((lap - g).abs() / g);
    }

    let grid = RadialGrid::uniform(0.0, 1.2 * delta, 512)?;
    let pv0 = RadialProfile::from_fns(grid.clone(), v0, dv0, lap_v0, dlap_v0)?;
    let res_v0 = representation_residual(&pv0, delta, |_| 1.0)?;
    let pbi = RadialProfile::from_fns(grid, |r| -r * r / 8.0, |r| -r / 4.0, |_| 1.0, |_| 0.0)?;
    let res_bi = representation_residual(&pbi, delta, |_| 0.0)?;

    sink.write_json(
        "greens_checks.json",
        &json!({
            "delta": delta,
            "kernel_mid": g_delta_radial(delta / 3.0, delta / 2.0, delta)?,
            "h_delta_mid": h_delta_at_zero(delta / 2.0, delta)?,
            "apply_const_dev": apply_const_dev,
            "kernel_consistency_worst": kernel_consistency_worst,
            "representation_residual_v0": res_v0,
            "representation_residual_biharmonic": res_bi,
        }),
    )?;
    println!(
        "greens checks at delta = {delta}: apply dev {apply_const_dev:.3e}, v0 residual {res_v0:.3e}"
    );
    let config = json!({ "outdir": outdir, "delta": delta });
    Ok(("greens", config, ExitCode::SUCCESS))
}

/// The entire solution as a field: Δ²v₀ = e^{4v₀} with weight 1.
struct V0Field;

impl RadialField for V0Field {
    fn u(&self, r: f64) -> f64 {
        v0(r)
    }
    fn du(&self, r: f64) -> f64 {
        dv0(r)
    }
    fn w(&self, r: f64) -> f64 {
        lap_v0(r)
    }
    fn dw(&self, r: f64) -> f64 {
        dlap_v0(r)
    }
    fn bih(&self, r: f64) -> f64 {
        e4v0(r)
    }
}

fn cmd_pohozaev(
    a: PohozaevArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let r = a.r.or_else(|| conf.f64("r")).unwrap_or(2.0);
    let count = a.count.or_else(|| conf.usize("count")).unwrap_or(100);
    let seed = a.seed.or_else(|| conf.u64("seed")).unwrap_or(0);
    if !(r > 0.0) || count == 0 {
        return Err(usage("pohozaev wants --r > 0 and --count >= 1"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_identity_dev: f64 = 0.0;
    for _ in 0..count {
        let field = PolyGauss::sample(&mut rng);
        let t = pohozaev_terms(&field, r);
        let dev = (t.volume_term - t.boundary_term).abs() / (1.0 + t.boundary_term.abs());
        worst_identity_dev = worst_identity_dev.max(dev);
    }
    let t0 = pohozaev_terms(&V0Field, 50.0);
    let v0_energy_rel_dev =
        (t0.boundary_term + liouville4::SIXTEEN_PI_SQ).abs() / liouville4::SIXTEEN_PI_SQ;

    sink.write_json(
        "pohozaev.json",
        &json!({
            "r": r,
            "count": count,
            "seed": seed,
            "worst_identity_dev": worst_identity_dev,
            "v0_terms_at_50": t0,
            "v0_energy_rel_dev": v0_energy_rel_dev,
        }),
    )?;
    println!(
        "pohozaev: worst identity dev {worst_identity_dev:.3e} over {count} fields; v0 energy rel dev {v0_energy_rel_dev:.3e}"
    );
    let config = json!({ "outdir": outdir, "r": r, "count": count, "seed": seed });
    Ok(("pohozaev", config, ExitCode::SUCCESS))
}

fn cmd_verify(
    a: VerifyArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let only = a.only.or_else(|| conf.string("only"));
    let tol = a.tol.or_else(|| conf.f64("tol"));
    let seed = a.seed.or_else(|| conf.u64("seed")).unwrap_or(0);
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(usage("--tol must be positive"));
        }
    }

    let results = verify::run_all(tol, seed, only.as_deref());
    if results.is_empty() {
        let names: Vec<&str> = verify::CRITERIA.iter().map(|&(_, n)| n).collect();
        return Err(usage(format!(
            "--only {:?} matches no criterion; available: {}",
            only.unwrap_or_default(),
            names.join(", ")
        )));
    }
    for r in &results {
        let tag = if r.passed { "pass" } else { "FAIL" };
        println!("[{tag}] {:>2} {} — {}", r.id, r.name, r.detail);
    }
    let all_passed = results.iter().all(|r| r.passed);
    sink.write_json(
        "verify_report.json",
        &json!({
            "seed": seed,
            "tol": tol,
            "all_passed": all_passed,
            "results": results,
        }),
    )?;
    let config = json!({ "outdir": outdir, "only": only, "tol": tol, "seed": seed });
    if all_passed {
        Ok(("verify", config, ExitCode::SUCCESS))
    } else {
        let failed: Vec<&str> =
            results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        eprintln!("failed criteria: {}", failed.join(", "));
        Ok(("verify", config, ExitCode::from(1)))
    }
}

fn cmd_export(
    a: ExportArgs,
    conf: &Conf,
    outdir: &str,
    sink: &mut Sink,
) -> Result<(&'static str, Value, ExitCode)> {
    let delta = a.delta.or_else(|| conf.f64("delta")).unwrap_or(0.5);
    let beta_count = a.beta_count.or_else(|| conf.usize("beta_count")).unwrap_or(14);
    if !(delta > 0.0) || beta_count < 2 {
        return Err(usage("export-plotdata wants --delta > 0 and --beta-count >= 2"));
    }
    let cfg = OdeConfig::default();

    // entire solution: quadratic clustering near the origin, out to r = 50
    let mut csv = String::from("r,v0,dv0,lap_v0,density\n");
    for j in 0..=600 {
        let x = j as f64 / 600.0;
        let r = 50.0 * x * x;
        csv.push_str(&format!("{},{},{},{},{}\n", r, v0(r), dv0(r), lap_v0(r), e4v0(r)));
    }
    sink.write("plot_v0.csv", csv.as_bytes())?;

    let betas: Vec<f64> = (0..beta_count)
        .map(|i| 0.7 + (2.0 - 0.7) * i as f64 / (beta_count - 1) as f64)
        .collect();
    let rows = energy_vs_beta_scan(&betas, &cfg);
    sink.write("plot_energy_vs_beta.csv", scan_to_csv(&rows).as_bytes())?;

    let mut dk = String::from("kind,k,mu,d_k,mass_delta\n");
    let specs = [
        FamilySpec { kind: FamilyKind::Log, k_values: vec![4, 8, 16, 32, 64] },
        FamilySpec { kind: FamilyKind::QuadI { beta: 1.5 }, k_values: vec![4, 8, 16, 32] },
        FamilySpec { kind: FamilyKind::QuadII, k_values: vec![2, 3, 4] },
    ];
    for spec in &specs {
        let members = build_family(spec, &cfg)?;
        let series = diagnostic_series(&members, delta)?;
        for i in 0..series.len() {
            dk.push_str(&format!(
                "{},{},{},{},{}\n",
                spec.kind.slug(),
                series.k[i],
                series.mu[i],
                series.d_k[i],
                series.mass_delta[i]
            ));
        }
    }
    sink.write("plot_dk_series.csv", dk.as_bytes())?;

    // neck energies of the deepest log member against the closed form
    let member = build_family(
        &FamilySpec { kind: FamilyKind::Log, k_values: vec![64] },
        &cfg,
    )?
    .remove(0);
    let mut neck = String::from("big_r,neck_energy,closed_form\n");
    for big_r in [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0] {
        let e = neck_energy(&member, big_r, delta)?;
        let closed =
            liouville4::SIXTEEN_PI_SQ * (out_frac(big_r) - out_frac(delta / member.mu()));
        neck.push_str(&format!("{big_r},{e},{closed}\n"));
    }
    sink.write("plot_neck_energy.csv", neck.as_bytes())?;

    println!("plot data written: v0 profile, energy scan, d_k series, neck energies");
    let config = json!({ "outdir": outdir, "delta": delta, "beta_count": beta_count });
    Ok(("export-plotdata", config, ExitCode::SUCCESS))
}
