//! Command line front end: CSV scans of the two-photon interferometer
//! rates, envelope reports, and a closed-form-vs-integrator check.
//!
//! Values come from the closed forms unless `--oracle` adds a numerically
//! integrated column. Flags beat `--config` key=value entries, which beat
//! the built-in 810 nm / 5 nm / 0.67 nm defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biphoton::analysis::{
    estimate_period, extract_envelope, fit_hom_dip, scan, scan_axis, try_scan, visibility,
    AxisKind, CurveMeta, RateCurve,
};
use biphoton::certify::{run_certification, CertifySettings};
use biphoton::interferometer::DelayConfig;
use biphoton::oracle::{
    numeric_coincidence_rate, numeric_hom_rate, OracleConfig,
};
use biphoton::rates::{coincidence_rate_degraded, hom_rate, RatePoint};
use biphoton::sources::SourceModel;
use biphoton::spectra::SpectralProfile;
use biphoton::SPEED_OF_LIGHT;
use clap::{Args, Parser, Subcommand};

const OUT_DIR_VAR: &str = "BIPHOTON_OUT_DIR";
const STANDARD_SEPARATIONS: [f64; 4] = [0.0, 62e-6, 2.8e-3, 5.7e-3];

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Two-photon interferometer scans")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coalescence-dip scan over the packet separation, plus a dip fit
    Hom(ScanArgs),
    /// Half-wavelength fringe scan over the detector-arm delay
    Fringe(ScanArgs),
    /// Packet-scale scan with envelope extraction and classification
    Packet(ScanArgs),
    /// Compare the closed forms against the numeric integrator
    OracleCheck(CheckArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Source preparation: spdc, separable, or distinguishable
    #[arg(long)]
    source: Option<String>,
    /// Photon center wavelength in nm
    #[arg(long)]
    lambda0: Option<f64>,
    /// Filter intensity FWHM in nm
    #[arg(long)]
    filter_fwhm: Option<f64>,
    /// Pump intensity FWHM in nm; 0 means monochromatic (spdc only)
    #[arg(long)]
    pump_fwhm: Option<f64>,
    /// Packet separation with a unit suffix: 100um, 2.8mm, 500nm
    #[arg(long)]
    x1: Option<String>,
    /// Scan range start:stop:step in um
    #[arg(long, allow_hyphen_values = true)]
    scan: Option<String>,
    /// Add a numerically integrated oracle_rate column
    #[arg(long)]
    oracle: bool,
    /// Fringe visibility factor in (0, 1] applied to the closed form
    #[arg(long)]
    vis_degrade: Option<f64>,
    /// Output CSV path (a directory for the multi-panel fringe scan)
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value defaults file; '#' starts a comment
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Random draws per certification case
    #[arg(long)]
    points: Option<usize>,
    /// Seed for the certification draws
    #[arg(long)]
    seed: Option<u64>,
    /// Report path
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value defaults file; '#' starts a comment
    #[arg(long)]
    config: Option<PathBuf>,
}

enum AppError {
    Usage(String),
    Runtime(String),
}

impl From<biphoton::Error> for AppError {
    fn from(e: biphoton::Error) -> Self {
        match e {
            biphoton::Error::InvalidParameter(_)
            | biphoton::Error::DegenerateProfile
            | biphoton::Error::PumpDetuned { .. } => AppError::Usage(e.to_string()),
            _ => AppError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Hom(args) => run_hom(args),
        Cmd::Fringe(args) => run_fringe(args),
        Cmd::Packet(args) => run_packet(args),
        Cmd::OracleCheck(args) => run_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SourceKind {
    Spdc,
    Separable,
    Distinguishable,
}

impl SourceKind {
    fn name(self) -> &'static str {
        match self {
            Self::Spdc => "spdc",
            Self::Separable => "separable",
            Self::Distinguishable => "distinguishable",
        }
    }
}

struct Settings {
    kind: SourceKind,
    lambda0: f64,
    filter_fwhm: f64,
    pump_fwhm: f64,
    x1: Option<f64>,
    scan: Option<(f64, f64, f64)>,
    oracle: bool,
    vis: f64,
    out: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 9] = [
    "source",
    "lambda0",
    "filter_fwhm",
    "pump_fwhm",
    "x1",
    "scan",
    "vis_degrade",
    "points",
    "seed",
];

fn load_config(path: Option<&Path>) -> Result<BTreeMap<String, String>, AppError> {
    let mut map = BTreeMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(AppError::Usage(format!(
                "config {} line {}: expected key=value",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(AppError::Usage(format!(
                "config {} line {}: unknown key '{key}'",
                path.display(),
                idx + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn config_f64(cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, AppError> {
    cfg.get(key)
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| AppError::Usage(format!("config {key}: not a number: {s}")))
        })
        .transpose()
}

fn parse_source(name: &str) -> Result<SourceKind, AppError> {
    match name {
        "spdc" => Ok(SourceKind::Spdc),
        "separable" => Ok(SourceKind::Separable),
        "distinguishable" => Ok(SourceKind::Distinguishable),
        other => Err(AppError::Usage(format!(
            "unknown source '{other}'; expected spdc, separable, or distinguishable"
        ))),
    }
}

fn parse_length(text: &str) -> Result<f64, AppError> {
    let text = text.trim();
    for (suffix, scale) in [("um", 1e-6), ("mm", 1e-3), ("nm", 1e-9)] {
        if let Some(number) = text.strip_suffix(suffix) {
            return number
                .trim()
                .parse::<f64>()
                .map(|v| v * scale)
                .map_err(|_| AppError::Usage(format!("bad length '{text}'")));
        }
    }
    Err(AppError::Usage(format!(
        "length '{text}' needs a um, mm, or nm suffix"
    )))
}

fn parse_scan(text: &str) -> Result<(f64, f64, f64), AppError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || AppError::Usage(format!("bad scan '{text}'; expected start:stop:step in um"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut values = [0.0; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| bad())? * 1e-6;
    }
    Ok((values[0], values[1], values[2]))
}

fn resolve(args: &ScanArgs) -> Result<Settings, AppError> {
    let cfg = load_config(args.config.as_deref())?;
    let source_name = args
        .source
        .clone()
        .or_else(|| cfg.get("source").cloned())
        .unwrap_or_else(|| "spdc".to_string());
    let kind = parse_source(&source_name)?;
    let lambda0 = args.lambda0.or(config_f64(&cfg, "lambda0")?).unwrap_or(810.0);
    let filter_fwhm = args.filter_fwhm.or(config_f64(&cfg, "filter_fwhm")?).unwrap_or(5.0);
    let pump_fwhm = args.pump_fwhm.or(config_f64(&cfg, "pump_fwhm")?).unwrap_or(0.67);
    let x1 = match (&args.x1, cfg.get("x1")) {
        (Some(text), _) | (None, Some(text)) => Some(parse_length(text)?),
        (None, None) => None,
    };
    let scan = match (&args.scan, cfg.get("scan")) {
        (Some(text), _) | (None, Some(text)) => Some(parse_scan(text)?),
        (None, None) => None,
    };
    let vis = args.vis_degrade.or(config_f64(&cfg, "vis_degrade")?).unwrap_or(1.0);
    if !(vis > 0.0 && vis <= 1.0) {
        return Err(AppError::Usage(format!("vis_degrade {vis} is outside (0, 1]")));
    }
    if args.oracle && vis < 1.0 {
        return Err(AppError::Usage(
            "--oracle integrates the ideal instrument; drop --vis-degrade".into(),
        ));
    }
    Ok(Settings {
        kind,
        lambda0,
        filter_fwhm,
        pump_fwhm,
        x1,
        scan,
        oracle: args.oracle,
        vis,
        out: args.out.clone(),
    })
}

/// The pump line sits at exactly twice the filter center so the fringe null
/// survives in floating point.
fn build_source(s: &Settings) -> Result<SourceModel, AppError> {
    let filter = SpectralProfile::from_wavelength(s.lambda0 * 1e-9, s.filter_fwhm * 1e-9)?;
    let source = match s.kind {
        SourceKind::Spdc => {
            let width = if s.pump_fwhm == 0.0 {
                0.0
            } else {
                SpectralProfile::from_wavelength(0.5 * s.lambda0 * 1e-9, s.pump_fwhm * 1e-9)?
                    .width()
            };
            // Center built from the filter, not the wavelength, so the pump sits
            // at exactly twice the filter frequency regardless of rounding.
            let pump = SpectralProfile::new(2.0 * filter.center_frequency(), width)?;
            SourceModel::spdc(pump, filter)?
        }
        SourceKind::Separable => SourceModel::separable(filter)?,
        SourceKind::Distinguishable => SourceModel::distinguishable(filter)?,
    };
    Ok(source)
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn out_file(explicit: &Option<PathBuf>, default_name: String) -> PathBuf {
    explicit.clone().unwrap_or_else(|| out_dir().join(default_name))
}

fn format_um(length: f64) -> String {
    let um = length * 1e6;
    if (um - um.round()).abs() < 1e-9 {
        format!("{}", um.round() as i64)
    } else {
        format!("{um}")
    }
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<(), AppError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        let cols: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
        text.push_str(&cols.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn rate_rows(points: &[RatePoint], oracle: Option<&[RatePoint]>) -> Vec<Vec<f64>> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| match oracle {
            Some(o) => vec![p.axis * 1e6, p.rate, o[i].rate],
            None => vec![p.axis * 1e6, p.rate],
        })
        .collect()
}

fn csv_header(oracle: bool) -> &'static str {
    if oracle {
        "axis_um,rate,oracle_rate"
    } else {
        "axis_um,rate"
    }
}

fn run_hom(args: ScanArgs) -> Result<(), AppError> {
    let s = resolve(&args)?;
    if s.kind == SourceKind::Distinguishable {
        return Err(AppError::Usage(
            "orthogonally polarized photons show no coalescence dip".into(),
        ));
    }
    let source = build_source(&s)?;
    let (start, stop, step) = s.scan.unwrap_or((-150e-6, 150e-6, 1.5e-6));
    let axis = scan_axis(start, stop, step)?;
    let width = source.photon_width();
    let vis = s.vis;
    let points = scan(&axis, |x| {
        1.0 - vis * (1.0 - hom_rate(width, x / SPEED_OF_LIGHT))
    });
    let oracle = oracle_column(s.oracle, &axis, |x| {
        numeric_hom_rate(&source, x / SPEED_OF_LIGHT, &OracleConfig::default())
    })?;
    let path = out_file(&s.out, format!("hom_{}.csv", s.kind.name()));
    write_csv(&path, csv_header(s.oracle), &rate_rows(&points, oracle.as_deref()))?;

    let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
    match RateCurve::from_points(&points, meta).and_then(|curve| fit_hom_dip(&curve)) {
        Ok(fit) => println!(
            "dip fit: width {:.4e} rad/s (photon bandwidth {:.4e}), visibility {:.4}, \
             rms residual {:.2e}",
            fit.width, width, fit.visibility, fit.rms_residual
        ),
        Err(e) => println!("dip fit unavailable: {e}"),
    }
    Ok(())
}

fn oracle_column<F>(enabled: bool, axis: &[f64], eval: F) -> Result<Option<Vec<RatePoint>>, AppError>
where
    F: Fn(f64) -> biphoton::Result<f64> + Sync + Send,
{
    if !enabled {
        return Ok(None);
    }
    Ok(Some(try_scan(axis, eval)?))
}

fn run_fringe(args: ScanArgs) -> Result<(), AppError> {
    let s = resolve(&args)?;
    let source = build_source(&s)?;
    let (start, stop, step) = s.scan.unwrap_or((-1.215e-6, 1.215e-6, 0.01265625e-6));
    let axis = scan_axis(start, stop, step)?;
    let name = |x1: f64| format!("fringe_{}_x1_{}um.csv", s.kind.name(), format_um(x1));

    let panels: Vec<(f64, PathBuf)> = match s.x1 {
        Some(x1) => vec![(x1, out_file(&s.out, name(x1)))],
        None => {
            let dir = s.out.clone().unwrap_or_else(out_dir);
            STANDARD_SEPARATIONS.iter().map(|&x1| (x1, dir.join(name(x1)))).collect()
        }
    };

    let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
    for (x1, path) in panels {
        let points = scan(&axis, |x| {
            coincidence_rate_degraded(&source, &DelayConfig::from_path_lengths(x1, x), s.vis)
        });
        let oracle = oracle_column(s.oracle, &axis, |x| {
            numeric_coincidence_rate(
                &source,
                &DelayConfig::from_path_lengths(x1, x),
                &OracleConfig::default(),
            )
        })?;
        write_csv(&path, csv_header(s.oracle), &rate_rows(&points, oracle.as_deref()))?;

        let analysis = RateCurve::from_points(&points, meta).and_then(|curve| {
            let period = estimate_period(&curve)?;
            let vis = visibility(&curve, 0.5 * (start + stop), stop - start)?;
            Ok((period, vis))
        });
        match analysis {
            Ok((period, vis)) => println!(
                "x1 = {} um: period {:.2} nm, visibility {:.4}",
                format_um(x1),
                period * 1e9,
                vis
            ),
            Err(e) => println!("x1 = {} um: fringe analysis unavailable: {e}", format_um(x1)),
        }
    }
    Ok(())
}

fn run_packet(args: ScanArgs) -> Result<(), AppError> {
    let s = resolve(&args)?;
    let source = build_source(&s)?;
    let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
    let x1 = s.x1.unwrap_or(0.0);
    let (start, stop, step) = s.scan.unwrap_or_else(|| {
        let effective = meta.effective_coherence_extent();
        let extent = if effective.is_finite() {
            meta.photon_coherence_extent().max(effective)
        } else {
            meta.photon_coherence_extent()
        };
        let reach = x1.abs() + 5.0 * extent;
        (-reach, reach, meta.fringe_period() / 16.0)
    });
    let axis = scan_axis(start, stop, step)?;
    let points = scan(&axis, |x| {
        coincidence_rate_degraded(&source, &DelayConfig::from_path_lengths(x1, x), s.vis)
    });
    let oracle = oracle_column(s.oracle, &axis, |x| {
        numeric_coincidence_rate(
            &source,
            &DelayConfig::from_path_lengths(x1, x),
            &OracleConfig::default(),
        )
    })?;
    let path = out_file(&s.out, format!("packet_{}_x1_{}um.csv", s.kind.name(), format_um(x1)));
    write_csv(&path, csv_header(s.oracle), &rate_rows(&points, oracle.as_deref()))?;

    let report = RateCurve::from_points(&points, meta).and_then(|curve| extract_envelope(&curve));
    match report {
        Ok(report) => {
            let rows: Vec<Vec<f64>> = report
                .upper
                .iter()
                .zip(&report.lower)
                .map(|(u, l)| vec![u.axis * 1e6, u.rate, l.rate])
                .collect();
            let envelope_path = path.with_file_name(format!(
                "{}_envelope.csv",
                path.file_stem().unwrap_or_default().to_string_lossy()
            ));
            write_csv(&envelope_path, "axis_um,upper,lower", &rows)?;
            println!(
                "envelope: {} (dephased level {:.4})",
                report.classification, report.baseline
            );
            let peaks = report.side_peaks();
            if peaks.is_empty() {
                println!("side peaks: none");
            } else {
                let described: Vec<String> = peaks
                    .iter()
                    .map(|p| format!("{:.1} um height {:.3}", p.axis * 1e6, p.rate))
                    .collect();
                println!("side peaks: {}", described.join(", "));
            }
        }
        Err(e) => println!("envelope analysis unavailable: {e}"),
    }
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<(), AppError> {
    let cfg = load_config(args.config.as_deref())?;
    let points = match (args.points, cfg.get("points")) {
        (Some(n), _) => n,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| AppError::Usage(format!("config points: not a count: {s}")))?,
        (None, None) => 50,
    };
    let seed = match (args.seed, cfg.get("seed")) {
        (Some(n), _) => n,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| AppError::Usage(format!("config seed: not an integer: {s}")))?,
        (None, None) => 0,
    };
    let settings = CertifySettings {
        seed,
        points_per_case: points,
        oracle: OracleConfig::default(),
    };
    let report = run_certification(&settings)?;
    print!("{report}");
    let path = out_file(&args.out, "oracle_check.txt".to_string());
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(&path, report.to_string())?;
    println!("wrote {}", path.display());
    if !report.passed() {
        return Err(AppError::Runtime("certification failed".into()));
    }
    Ok(())
}
