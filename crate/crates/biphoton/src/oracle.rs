//! Brute-force numeric evaluation of the detection rates by direct
//! integration of the path amplitudes, used to cross-check the closed forms
//! in [`crate::rates`] without sharing any algebra with them.
//!
//! For the independent-photon models the two-photon amplitude is a sum of
//! products of single-photon envelopes, so the double time integral of its
//! modulus squared contracts into per-axis overlap (Gram) matrices: an exact
//! refactoring of O(paths · n²) cell sums into O(paths² · n) overlaps. For
//! pair sources the amplitude at fixed pump frequency depends only on the
//! detection-time difference, which makes the integral one-dimensional; the
//! rates at fixed pump frequency are then averaged incoherently over the
//! pump spectrum. Averaging amplitudes instead of rates is wrong, and a
//! regression test pins the size of that mistake.
//!
//! Every rate is normalized by the same integration evaluated at a fringe
//! delay of 50 coherence times, averaged over one fringe period so that a
//! non-decaying fringe (monochromatic pump) cancels by discrete orthogonality.
//!
//! Public entry points evaluate at the configured resolution and again with
//! doubled sample counts, returning [`Error::NotConverged`] when the two
//! disagree beyond the configured tolerance.

use num_complex::Complex64;

use crate::interferometer::{
    enumerate_paths, hom_output_fields, interferometer_output_fields, DelayConfig, FieldTerm,
    InputMode,
};
use crate::sources::{SinglePhotonKernel, SourceModel, SpdcPairKernel, WavepacketKernel};
use crate::spectra::SpectralProfile;
use crate::{Error, Result};

/// Fringe delay, in photon coherence times, treated as the fully dephased
/// reference level.
const BASELINE_COHERENCE_TIMES: f64 = 50.0;

/// Number of equally spaced sub-period offsets averaged into the baseline.
/// A full period of the half-wavelength fringe sampled at 16 points sums to
/// zero exactly, so even a never-decaying fringe drops out.
const BASELINE_PHASE_STEPS: usize = 16;

/// Resolution and tolerance of the numeric integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Grid margin beyond the outermost wavepacket center, in coherence
    /// times. Envelope tails at the default 8 are below e⁻⁶⁴.
    pub time_half_window: f64,
    /// Samples per time axis (difference-coordinate grids use twice this).
    pub time_samples_per_axis: usize,
    /// Samples across the pump spectral weight for pair sources.
    pub pump_samples: usize,
    /// Largest accepted relative shift when all sample counts are doubled.
    pub relative_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            time_half_window: 8.0,
            time_samples_per_axis: 512,
            pump_samples: 256,
            relative_tolerance: 1e-3,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.time_half_window.is_finite() || self.time_half_window < 5.0 {
            return Err(Error::InvalidParameter(format!(
                "time half window must be at least 5 coherence times, got {}",
                self.time_half_window
            )));
        }
        if self.time_samples_per_axis < 64 {
            return Err(Error::InvalidParameter(format!(
                "need at least 64 time samples per axis, got {}",
                self.time_samples_per_axis
            )));
        }
        if self.pump_samples < 8 {
            return Err(Error::InvalidParameter(format!(
                "need at least 8 pump samples, got {}",
                self.pump_samples
            )));
        }
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance <= 0.1) {
            return Err(Error::InvalidParameter(format!(
                "relative tolerance must lie in (0, 0.1], got {:e}",
                self.relative_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Resolution {
    time_samples: usize,
    pump_samples: usize,
}

impl Resolution {
    fn of(config: &OracleConfig) -> Self {
        Self {
            time_samples: config.time_samples_per_axis,
            pump_samples: config.pump_samples,
        }
    }

    // Both directions double together: a pump grid that aliases at the
    // baseline delay can look self-consistent if only the time grid refines.
    fn doubled(&self) -> Self {
        Self { time_samples: 2 * self.time_samples, pump_samples: 2 * self.pump_samples }
    }
}

/// Uniform grid; sums over it are trapezoid-accurate because every integrand
/// here decays to nothing well inside the margins.
struct Grid {
    lo: f64,
    step: f64,
    n: usize,
}

impl Grid {
    fn covering(centers: &[f64], margin: f64, n: usize) -> Self {
        let lo = centers.iter().copied().fold(f64::INFINITY, f64::min) - margin;
        let hi = centers.iter().copied().fold(f64::NEG_INFINITY, f64::max) + margin;
        Self { lo, step: (hi - lo) / (n - 1) as f64, n }
    }

    fn symmetric(half_span: f64, n: usize) -> Self {
        Self { lo: -half_span, step: 2.0 * half_span / (n - 1) as f64, n }
    }

    fn value(&self, i: usize) -> f64 {
        self.lo + self.step * i as f64
    }
}

/// One detection amplitude in detector-slot form: the photon detected in the
/// first slot is offset by `alpha`, the one in the second by `beta`, with
/// the product of splitter coefficients in `coeff` (carrier not included).
#[derive(Debug, Clone, Copy)]
struct SlotPath {
    alpha: f64,
    beta: f64,
    coeff: Complex64,
    group: u8,
}

fn slot_paths(source: &SourceModel, delays: &DelayConfig) -> Vec<SlotPath> {
    enumerate_paths(source, delays)
        .into_iter()
        .map(|p| {
            let (alpha, beta) =
                if p.exchanged { (p.shift_b, p.shift_a) } else { (p.shift_a, p.shift_b) };
            SlotPath {
                alpha,
                beta,
                coeff: Complex64::new(0.0, 0.25 * f64::from(p.sign)),
                group: p.coherence_group,
            }
        })
        .collect()
}

/// The two amplitudes of a coincidence between the first splitter's outputs:
/// either photon a reaches the first detector, or photon b does.
fn hom_slot_paths(tau1: f64) -> Vec<SlotPath> {
    let [first, second] = hom_output_fields(&DelayConfig::new(tau1, 0.0));
    let mut paths = Vec::with_capacity(2);
    for tc in &first {
        for td in &second {
            if tc.input != td.input {
                paths.push(SlotPath {
                    alpha: tc.shift,
                    beta: td.shift,
                    coeff: tc.coeff * td.coeff,
                    group: 0,
                });
            }
        }
    }
    paths
}

/// ∫∫ |Σ_k c_k g(t-α_k) g(t'-β_k)|² dt dt', contracted through per-axis
/// overlaps; paths in different coherence groups add incoherently.
fn packet_gram_rate(
    paths: &[SlotPath],
    kernel: &SinglePhotonKernel,
    window: f64,
    time_samples: usize,
) -> f64 {
    let margin = window * std::f64::consts::SQRT_2 / kernel.width();
    let centers: Vec<f64> = paths.iter().flat_map(|p| [p.alpha, p.beta]).collect();
    let grid = Grid::covering(&centers, margin, time_samples);
    let overlap = |a: f64, b: f64| {
        (0..grid.n)
            .map(|i| {
                let t = grid.value(i);
                kernel.envelope(t - a) * kernel.envelope(t - b)
            })
            .sum::<f64>()
            * grid.step
    };
    // Carriers factor out of each envelope up to exp(iω₀(α+β)) per path.
    let omega0 = kernel.center_frequency();
    let weights: Vec<Complex64> = paths
        .iter()
        .map(|p| p.coeff * Complex64::from_polar(1.0, omega0 * (p.alpha + p.beta)))
        .collect();
    let mut total = 0.0;
    for j in 0..paths.len() {
        for k in j..paths.len() {
            if paths[j].group != paths[k].group {
                continue;
            }
            let term = (weights[j] * weights[k].conj()).re
                * overlap(paths[j].alpha, paths[k].alpha)
                * overlap(paths[j].beta, paths[k].beta);
            total += if j == k { term } else { 2.0 * term };
        }
    }
    total
}

struct PumpSample {
    frequency: f64,
    weight: f64,
}

/// Samples the pump weight: spectral density times the squared filter
/// detuning factor. The product is a Gaussian whose width is the effective
/// bandwidth, so the grid is built on that scale (and on its own center,
/// which a detuned pump pulls away from the pump line).
fn spdc_pump_grid(pump: &SpectralProfile, kernel: &SpdcPairKernel, n: usize) -> Vec<PumpSample> {
    if pump.is_monochromatic() {
        return vec![PumpSample { frequency: pump.center_frequency(), weight: 1.0 }];
    }
    let pw = pump.width();
    let fw = kernel.filter_width();
    let inv = 1.0 / (pw * pw) + 1.0 / (fw * fw);
    let sigma = inv.sqrt().recip();
    let center =
        (pump.center_frequency() / (pw * pw) + 2.0 * kernel.filter_center() / (fw * fw)) / inv;
    // Six sigma keeps the truncated tail mass (~e^-18) far below the part in
    // a million agreement the pair rate is held to.
    let half = 6.0 * sigma;
    (0..n)
        .map(|i| {
            let frequency = center - half + 2.0 * half * i as f64 / (n - 1) as f64;
            let det = kernel.detuning_amplitude(frequency);
            PumpSample {
                frequency,
                weight: pump.pump_density(frequency).expect("pump is not monochromatic")
                    * det
                    * det,
            }
        })
        .collect()
}

/// Rate of a pair source: per pump frequency the amplitude lives on the
/// detection-time difference alone, M(x) = Σ_k c_k(ω_p) D(x - (α_k - β_k)),
/// and the overlaps of D are pump-independent. The per-frequency rates are
/// then weight-summed (incoherently; the pump has no phase relation across
/// its spectrum).
fn pair_gram_rate(
    paths: &[SlotPath],
    kernel: &SpdcPairKernel,
    pump: &[PumpSample],
    window: f64,
    samples: usize,
) -> f64 {
    let tc = std::f64::consts::SQRT_2 / kernel.filter_width();
    let deltas: Vec<f64> = paths.iter().map(|p| p.alpha - p.beta).collect();
    let reach = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    // The difference envelope is √2 wider than a one-photon envelope.
    let grid = Grid::symmetric(reach + 2.0 * window * tc, samples);
    let m = paths.len();
    let mut overlaps = vec![0.0; m * m];
    for j in 0..m {
        for k in j..m {
            let o = (0..grid.n)
                .map(|i| {
                    let x = grid.value(i);
                    kernel.difference_envelope(x - deltas[j])
                        * kernel.difference_envelope(x - deltas[k])
                })
                .sum::<f64>()
                * grid.step;
            overlaps[j * m + k] = o;
            overlaps[k * m + j] = o;
        }
    }
    let mut total = 0.0;
    for sample in pump {
        let weights: Vec<Complex64> = paths
            .iter()
            .map(|p| {
                p.coeff * Complex64::from_polar(1.0, 0.5 * sample.frequency * (p.alpha + p.beta))
            })
            .collect();
        let mut rate = 0.0;
        for j in 0..m {
            for k in j..m {
                if paths[j].group != paths[k].group {
                    continue;
                }
                let term = (weights[j] * weights[k].conj()).re * overlaps[j * m + k];
                rate += if j == k { term } else { 2.0 * term };
            }
        }
        total += sample.weight * rate;
    }
    total
}

fn raw_coincidence(source: &SourceModel, delays: &DelayConfig, window: f64, res: &Resolution) -> f64 {
    let paths = slot_paths(source, delays);
    match source.kernel().expect("source constructors reject monochromatic photons") {
        WavepacketKernel::Single(kernel) => {
            packet_gram_rate(&paths, &kernel, window, res.time_samples)
        }
        WavepacketKernel::Pair(kernel) => {
            let pump = spdc_pump_grid(
                source.pump().expect("pair sources carry a pump"),
                &kernel,
                res.pump_samples,
            );
            pair_gram_rate(&paths, &kernel, &pump, window, 2 * res.time_samples)
        }
    }
}

/// Dephased reference level at the same τ₁, period-averaged.
fn baseline_coincidence(source: &SourceModel, tau1: f64, window: f64, res: &Resolution) -> f64 {
    let far = BASELINE_COHERENCE_TIMES * std::f64::consts::SQRT_2 / source.photon_width();
    let period = std::f64::consts::PI / source.center_frequency();
    (0..BASELINE_PHASE_STEPS)
        .map(|k| {
            let tau2 = far + k as f64 * period / BASELINE_PHASE_STEPS as f64;
            raw_coincidence(source, &DelayConfig::new(tau1, tau2), window, res)
        })
        .sum::<f64>()
        / BASELINE_PHASE_STEPS as f64
}

fn with_convergence<F: Fn(&Resolution) -> f64>(config: &OracleConfig, eval: F) -> Result<f64> {
    let base = Resolution::of(config);
    let coarse = eval(&base);
    let fine = eval(&base.doubled());
    let shift = (fine - coarse).abs() / fine.abs().max(1.0);
    if shift > config.relative_tolerance {
        return Err(Error::NotConverged {
            coarse_samples: base.time_samples,
            coarse,
            fine,
            shift,
            tolerance: config.relative_tolerance,
        });
    }
    Ok(fine)
}

/// Coincidence rate at the final output by direct path-amplitude
/// integration, normalized to the dephased level; the numeric counterpart of
/// [`crate::rates::coincidence_rate`].
pub fn numeric_coincidence_rate(
    source: &SourceModel,
    delays: &DelayConfig,
    config: &OracleConfig,
) -> Result<f64> {
    config.validate()?;
    with_convergence(config, |res| {
        raw_coincidence(source, delays, config.time_half_window, res)
            / baseline_coincidence(source, delays.tau1, config.time_half_window, res)
    })
}

fn raw_hom(source: &SourceModel, tau1: f64, window: f64, res: &Resolution) -> f64 {
    let paths = hom_slot_paths(tau1);
    match source.kernel().expect("source constructors reject monochromatic photons") {
        WavepacketKernel::Single(kernel) => {
            packet_gram_rate(&paths, &kernel, window, res.time_samples)
        }
        WavepacketKernel::Pair(kernel) => {
            // Both amplitudes share the slot sum α+β = τ₁, so the pump
            // carrier is a common phase at every pump frequency and the pump
            // average cancels against the baseline exactly; one degenerate
            // sample is not an approximation.
            let sample = PumpSample { frequency: 2.0 * kernel.filter_center(), weight: 1.0 };
            pair_gram_rate(&paths, &kernel, &[sample], window, 2 * res.time_samples)
        }
    }
}

/// Coincidence rate between the first splitter's two outputs, normalized to
/// the separated-packet level; the numeric counterpart of
/// [`crate::rates::hom_rate`]. Orthogonally polarized photons never
/// coalesce, so the dip is undefined for them and rejected.
pub fn numeric_hom_rate(source: &SourceModel, tau1: f64, config: &OracleConfig) -> Result<f64> {
    config.validate()?;
    if matches!(source, SourceModel::DistinguishablePolarized { .. }) {
        return Err(Error::InvalidParameter(
            "coalescence dip is undefined for orthogonally polarized photons".into(),
        ));
    }
    let far = BASELINE_COHERENCE_TIMES * std::f64::consts::SQRT_2 / source.photon_width();
    with_convergence(config, |res| {
        raw_hom(source, tau1, config.time_half_window, res)
            / raw_hom(source, far, config.time_half_window, res)
    })
}

fn packet_singles_fraction(
    port: &[FieldTerm],
    kernel: &SinglePhotonKernel,
    window: f64,
    res: &Resolution,
) -> f64 {
    let margin = window * std::f64::consts::SQRT_2 / kernel.width();
    let shifts: Vec<f64> = port.iter().map(|t| t.shift).collect();
    let grid = Grid::covering(&shifts, margin, res.time_samples);
    let overlap = |a: f64, b: f64| {
        (0..grid.n)
            .map(|i| {
                let t = grid.value(i);
                kernel.envelope(t - a) * kernel.envelope(t - b)
            })
            .sum::<f64>()
            * grid.step
    };
    let omega0 = kernel.center_frequency();
    let mut detected = 0.0;
    // The two input photons are independent, so their intensities add.
    for input in [InputMode::A, InputMode::B] {
        let terms: Vec<&FieldTerm> = port.iter().filter(|t| t.input == input).collect();
        for j in &terms {
            for k in &terms {
                let c = j.coeff * Complex64::from_polar(1.0, omega0 * j.shift)
                    * (k.coeff * Complex64::from_polar(1.0, omega0 * k.shift)).conj();
                detected += c.re * overlap(j.shift, k.shift);
            }
        }
    }
    // Self-normalized: one photon's flux on the same grid, times two photons.
    detected / (2.0 * overlap(shifts[0], shifts[0]))
}

fn pair_singles_fraction(
    port: &[FieldTerm],
    kernel: &SpdcPairKernel,
    pump_profile: &SpectralProfile,
    window: f64,
    res: &Resolution,
) -> f64 {
    let tc = std::f64::consts::SQRT_2 / kernel.filter_width();
    let shifts: Vec<f64> = port.iter().map(|t| t.shift).collect();
    let reach = shifts
        .iter()
        .flat_map(|a| shifts.iter().map(move |b| (a - b).abs()))
        .fold(0.0f64, f64::max);
    let grid = Grid::symmetric(reach + 2.0 * window * tc, 2 * res.time_samples);
    // Tracing out the undetected partner leaves overlaps of the difference
    // envelope at the branch separations, independent of pump frequency.
    let overlap = |d: f64| {
        (0..grid.n)
            .map(|i| {
                let x = grid.value(i);
                kernel.difference_envelope(x) * kernel.difference_envelope(x - d)
            })
            .sum::<f64>()
            * grid.step
    };
    let inputs: [Vec<&FieldTerm>; 2] = [
        port.iter().filter(|t| t.input == InputMode::A).collect(),
        port.iter().filter(|t| t.input == InputMode::B).collect(),
    ];
    let branch_overlaps: [Vec<f64>; 2] = inputs.clone().map(|terms| {
        terms
            .iter()
            .flat_map(|j| terms.iter().map(|k| overlap(j.shift - k.shift)).collect::<Vec<_>>())
            .collect()
    });
    let norm = overlap(0.0);
    let pump = spdc_pump_grid(pump_profile, kernel, res.pump_samples);
    let mut num = 0.0;
    let mut den = 0.0;
    for sample in &pump {
        let mut detected = 0.0;
        for (terms, overlaps) in inputs.iter().zip(&branch_overlaps) {
            for (j, tj) in terms.iter().enumerate() {
                for (k, tk) in terms.iter().enumerate() {
                    let c = tj.coeff * Complex64::from_polar(1.0, 0.5 * sample.frequency * tj.shift)
                        * (tk.coeff
                            * Complex64::from_polar(1.0, 0.5 * sample.frequency * tk.shift))
                        .conj();
                    detected += c.re * overlaps[j * terms.len() + k];
                }
            }
        }
        num += sample.weight * detected;
        den += sample.weight * 2.0 * norm;
    }
    num / den
}

/// Time-integrated one-photon rate at the first final output as a fraction
/// of the total flux; the numeric counterpart of
/// [`crate::rates::FLAT_SINGLES_RATE`]. Self-normalized, no baseline needed.
pub fn numeric_singles_rate(
    source: &SourceModel,
    delays: &DelayConfig,
    config: &OracleConfig,
) -> Result<f64> {
    config.validate()?;
    let [port, _] = interferometer_output_fields(delays);
    with_convergence(config, |res| {
        match source.kernel().expect("source constructors reject monochromatic photons") {
            WavepacketKernel::Single(kernel) => {
                packet_singles_fraction(&port, &kernel, config.time_half_window, res)
            }
            WavepacketKernel::Pair(kernel) => pair_singles_fraction(
                &port,
                &kernel,
                source.pump().expect("pair sources carry a pump"),
                config.time_half_window,
                res,
            ),
        }
    })
}
