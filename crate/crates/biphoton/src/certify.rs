//! Randomized cross-validation of every closed-form rate against the
//! numeric integrator.
//!
//! Each case draws source parameters and delays from physically sensible
//! ranges with a seeded generator, so a report is reproducible bit for bit.
//! Points are generated serially and evaluated in parallel when the
//! `parallel` feature is on; a point whose integration fails to converge
//! counts as a failure rather than aborting the run.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interferometer::DelayConfig;
use crate::oracle::{
    numeric_coincidence_rate, numeric_hom_rate, numeric_singles_rate, OracleConfig,
};
use crate::rates;
use crate::sources::SourceModel;
use crate::spectra::SpectralProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CertifySettings {
    pub seed: u64,
    pub points_per_case: usize,
    pub oracle: OracleConfig,
}

impl Default for CertifySettings {
    fn default() -> Self {
        Self { seed: 0, points_per_case: 50, oracle: OracleConfig::default() }
    }
}

/// Result of one cross-validation case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub name: &'static str,
    pub points: usize,
    /// Largest |numeric - closed| / max(|closed|, 1) over the case;
    /// infinite when a point failed to converge.
    pub max_relative_error: f64,
    /// Parameters of the worst point.
    pub worst_case: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub tolerance: f64,
    pub cases: Vec<CaseOutcome>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }
}

impl fmt::Display for CaseOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<28} {:>3} points  max rel err {:.3e}  worst: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.points,
            self.max_relative_error,
            self.worst_case
        )
    }
}

impl fmt::Display for CertifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "closed forms vs numeric integration, relative tolerance {:.1e}",
            self.tolerance
        )?;
        for case in &self.cases {
            writeln!(f, "{case}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Pair,
    Separable,
    Distinguishable,
}

struct CertifyPoint {
    source: SourceModel,
    tau1: f64,
    tau2: f64,
    label: String,
}

fn draw_source(rng: &mut ChaCha8Rng, family: Family) -> (SourceModel, String) {
    let lambda0 = rng.random_range(700.0..900.0) * 1e-9;
    let filter_fwhm = rng.random_range(2.0..8.0) * 1e-9;
    let filter = SpectralProfile::from_wavelength(lambda0, filter_fwhm).expect("range is valid");
    let base = format!("lambda0={:.1}nm filter={:.2}nm", lambda0 * 1e9, filter_fwhm * 1e9);
    match family {
        Family::Pair => {
            let pump_fwhm = rng.random_range(0.3..4.0) * 1e-9;
            // Half the center wavelength puts the pump line at exactly twice
            // the filter center frequency.
            let pump = SpectralProfile::from_wavelength(lambda0 / 2.0, pump_fwhm)
                .expect("range is valid");
            let source = SourceModel::spdc(pump, filter).expect("degenerate by construction");
            (source, format!("pair {base} pump={:.2}nm", pump_fwhm * 1e9))
        }
        Family::Separable => {
            (SourceModel::separable(filter).expect("nonzero width"), format!("separable {base}"))
        }
        Family::Distinguishable => (
            SourceModel::distinguishable(filter).expect("nonzero width"),
            format!("distinguishable {base}"),
        ),
    }
}

fn coincidence_points(rng: &mut ChaCha8Rng, family: Family, n: usize) -> Vec<CertifyPoint> {
    (0..n)
        .map(|_| {
            let (source, label) = draw_source(rng, family);
            let tc = source.photon_profile().coherence_time();
            let u1 = rng.random_range(0.0..4.0);
            let u2 = rng.random_range(-4.0..4.0);
            CertifyPoint {
                source,
                tau1: u1 * tc,
                tau2: u2 * tc,
                label: format!("{label} tau1={u1:.2}tc tau2={u2:.2}tc"),
            }
        })
        .collect()
}

fn evaluate_case<F>(points: &[CertifyPoint], eval: F) -> Vec<Result<f64>>
where
    F: Fn(&CertifyPoint) -> Result<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().map(&eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().map(eval).collect()
    }
}

fn relative_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1.0)
}

fn summarize(
    name: &'static str,
    points: &[CertifyPoint],
    results: Vec<Result<f64>>,
    tolerance: f64,
) -> CaseOutcome {
    let mut max_error = -1.0;
    let mut worst = String::new();
    let mut failures = 0usize;
    for (point, result) in points.iter().zip(results) {
        match result {
            Ok(error) => {
                if error > max_error {
                    max_error = error;
                    worst = point.label.clone();
                }
            }
            Err(err) => {
                failures += 1;
                max_error = f64::INFINITY;
                worst = format!("{} [{err}]", point.label);
            }
        }
    }
    CaseOutcome {
        name,
        points: points.len(),
        max_relative_error: max_error,
        worst_case: worst,
        passed: failures == 0 && max_error <= tolerance,
    }
}

/// Runs every cross-validation case and collects a report. All randomness
/// comes from `settings.seed`, so equal settings give equal reports.
pub fn run_certification(settings: &CertifySettings) -> Result<CertifyReport> {
    settings.oracle.validate()?;
    if settings.points_per_case == 0 {
        return Err(Error::InvalidParameter("need at least one point per case".into()));
    }
    let n = settings.points_per_case;
    let tolerance = settings.oracle.relative_tolerance;
    let oracle = &settings.oracle;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut cases = Vec::new();

    let coincidence = |p: &CertifyPoint| {
        let delays = DelayConfig::new(p.tau1, p.tau2);
        let numeric = numeric_coincidence_rate(&p.source, &delays, oracle)?;
        Ok(relative_error(numeric, rates::coincidence_rate(&p.source, &delays)))
    };
    for (family, name) in [
        (Family::Pair, "pair-coincidence"),
        (Family::Separable, "separable-coincidence"),
        (Family::Distinguishable, "distinguishable-coincidence"),
    ] {
        let points = coincidence_points(&mut rng, family, n);
        let results = evaluate_case(&points, coincidence);
        cases.push(summarize(name, &points, results, tolerance));
    }

    // Coalescence dip after the first splitter, for the two models that
    // interfere there.
    let points: Vec<CertifyPoint> = (0..n)
        .map(|i| {
            let family = if i % 2 == 0 { Family::Pair } else { Family::Separable };
            let (source, label) = draw_source(&mut rng, family);
            let tc = source.photon_profile().coherence_time();
            let u1 = rng.random_range(0.0..4.0);
            CertifyPoint {
                source,
                tau1: u1 * tc,
                tau2: 0.0,
                label: format!("{label} tau1={u1:.2}tc"),
            }
        })
        .collect();
    let results = evaluate_case(&points, |p| {
        let numeric = numeric_hom_rate(&p.source, p.tau1, oracle)?;
        Ok(relative_error(numeric, rates::hom_rate(p.source.photon_width(), p.tau1)))
    });
    cases.push(summarize("coalescence-dip", &points, results, tolerance));

    let points: Vec<CertifyPoint> = (0..n)
        .map(|i| {
            let family = [Family::Pair, Family::Separable, Family::Distinguishable][i % 3];
            let (source, label) = draw_source(&mut rng, family);
            let tc = source.photon_profile().coherence_time();
            let u1 = rng.random_range(0.0..4.0);
            let u2 = rng.random_range(-4.0..4.0);
            CertifyPoint {
                source,
                tau1: u1 * tc,
                tau2: u2 * tc,
                label: format!("{label} tau1={u1:.2}tc tau2={u2:.2}tc"),
            }
        })
        .collect();
    let results = evaluate_case(&points, |p| {
        let delays = DelayConfig::new(p.tau1, p.tau2);
        let numeric = numeric_singles_rate(&p.source, &delays, oracle)?;
        Ok(relative_error(numeric, rates::FLAT_SINGLES_RATE))
    });
    cases.push(summarize("singles-flatness", &points, results, tolerance));

    Ok(CertifyReport { tolerance, cases })
}
