//! Scan generation and curve analysis: fringe visibility and period,
//! envelope extraction and classification, and dip fitting.
//!
//! Everything here treats a curve as data. The only physics it borrows is
//! the expected fringe period and the coherence extents carried in
//! [`CurveMeta`], so the same routines apply to closed-form scans, numeric
//! integrations, and measured data alike.

use crate::rates::{self, RatePoint};
use crate::sources::SourceModel;
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Physical meaning of a scan axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// Delay in seconds.
    Delay,
    /// Path-length difference in meters.
    PathLength,
}

/// Source facts a curve analysis needs, expressed on the curve's axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMeta {
    pub axis: AxisKind,
    pub center_frequency: f64,
    pub photon_width: f64,
    pub effective_width: f64,
}

impl CurveMeta {
    pub fn for_source(source: &SourceModel, axis: AxisKind) -> Self {
        Self {
            axis,
            center_frequency: source.center_frequency(),
            photon_width: source.photon_width(),
            effective_width: source.effective_width(),
        }
    }

    /// Expected period of the half-wavelength fringe, in axis units.
    pub fn fringe_period(&self) -> f64 {
        match self.axis {
            AxisKind::Delay => rates::fringe_period_delay(self.center_frequency),
            AxisKind::PathLength => rates::fringe_period_length(self.center_frequency),
        }
    }

    fn extent(&self, width: f64) -> f64 {
        let time = std::f64::consts::SQRT_2 / width;
        match self.axis {
            AxisKind::Delay => time,
            AxisKind::PathLength => SPEED_OF_LIGHT * time,
        }
    }

    /// One-photon coherence extent √2/Δω, in axis units.
    pub fn photon_coherence_extent(&self) -> f64 {
        self.extent(self.photon_width)
    }

    /// Fringe-envelope coherence extent √2/Δω_e, in axis units; infinite for
    /// a monochromatic pump.
    pub fn effective_coherence_extent(&self) -> f64 {
        self.extent(self.effective_width)
    }
}

/// A rate scan on a uniform, increasing axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    axis: Vec<f64>,
    rates: Vec<f64>,
    meta: CurveMeta,
}

impl RateCurve {
    pub fn new(axis: Vec<f64>, rates: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        if axis.len() != rates.len() {
            return Err(Error::InvalidCurve(format!(
                "axis has {} points but rates has {}",
                axis.len(),
                rates.len()
            )));
        }
        if axis.len() < 2 {
            return Err(Error::InvalidCurve("need at least two points".into()));
        }
        if axis.iter().chain(rates.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        if rates.iter().any(|&r| r < 0.0) {
            return Err(Error::InvalidCurve("negative rate".into()));
        }
        let step = axis[1] - axis[0];
        if step <= 0.0 {
            return Err(Error::InvalidCurve("axis must increase".into()));
        }
        for pair in axis.windows(2) {
            if ((pair[1] - pair[0]) - step).abs() > 1e-6 * step {
                return Err(Error::InvalidCurve("axis must be uniform".into()));
            }
        }
        Ok(Self { axis, rates, meta })
    }

    pub fn from_points(points: &[RatePoint], meta: CurveMeta) -> Result<Self> {
        Self::new(
            points.iter().map(|p| p.axis).collect(),
            points.iter().map(|p| p.rate).collect(),
            meta,
        )
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn meta(&self) -> &CurveMeta {
        &self.meta
    }

    pub fn step(&self) -> f64 {
        self.axis[1] - self.axis[0]
    }

    pub fn points(&self) -> Vec<RatePoint> {
        self.axis
            .iter()
            .zip(&self.rates)
            .map(|(&axis, &rate)| RatePoint { axis, rate })
            .collect()
    }

    fn point(&self, i: usize) -> RatePoint {
        RatePoint { axis: self.axis[i], rate: self.rates[i] }
    }
}

/// Uniform axis from `start` to `stop` inclusive (up to rounding) in steps
/// of `step`.
pub fn scan_axis(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bad scan range {start:e}..{stop:e} step {step:e}"
        )));
    }
    if stop < start {
        return Err(Error::InvalidParameter("scan stop precedes start".into()));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Evaluates `rate` over the axis, in parallel when the `parallel` feature
/// is enabled. Output order always matches the axis.
#[cfg(feature = "parallel")]
pub fn scan<F>(axis: &[f64], rate: F) -> Vec<RatePoint>
where
    F: Fn(f64) -> f64 + Sync,
{
    use rayon::prelude::*;
    axis.par_iter().map(|&x| RatePoint { axis: x, rate: rate(x) }).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn scan<F>(axis: &[f64], rate: F) -> Vec<RatePoint>
where
    F: Fn(f64) -> f64,
{
    scan_sequential(axis, rate)
}

/// Single-threaded counterpart of [`scan`], kept unconditionally for
/// comparison benchmarks.
pub fn scan_sequential<F>(axis: &[f64], rate: F) -> Vec<RatePoint>
where
    F: Fn(f64) -> f64,
{
    axis.iter().map(|&x| RatePoint { axis: x, rate: rate(x) }).collect()
}

/// Fallible variant of [`scan`]: the first error wins.
#[cfg(feature = "parallel")]
pub fn try_scan<F>(axis: &[f64], rate: F) -> Result<Vec<RatePoint>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    axis.par_iter().map(|&x| Ok(RatePoint { axis: x, rate: rate(x)? })).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_scan<F>(axis: &[f64], rate: F) -> Result<Vec<RatePoint>>
where
    F: Fn(f64) -> Result<f64>,
{
    axis.iter().map(|&x| Ok(RatePoint { axis: x, rate: rate(x)? })).collect()
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when they are collinear. Positions need not be equispaced.
fn quadratic_vertex(p0: RatePoint, p1: RatePoint, p2: RatePoint) -> RatePoint {
    let (d01, d21) = (p0.axis - p1.axis, p2.axis - p1.axis);
    let (y01, y21) = (p0.rate - p1.rate, p2.rate - p1.rate);
    let denom = d01 * y21 - d21 * y01;
    if denom.abs() < 1e-300 {
        return p1;
    }
    let offset = 0.5 * (d01 * d01 * y21 - d21 * d21 * y01) / denom;
    if !offset.is_finite() || offset.abs() > d01.abs().max(d21.abs()) {
        return p1;
    }
    // Lagrange value of the same parabola at the vertex.
    let x = p1.axis + offset;
    let l0 = (x - p1.axis) * (x - p2.axis) / ((p0.axis - p1.axis) * (p0.axis - p2.axis));
    let l1 = (x - p0.axis) * (x - p2.axis) / ((p1.axis - p0.axis) * (p1.axis - p2.axis));
    let l2 = (x - p0.axis) * (x - p1.axis) / ((p2.axis - p0.axis) * (p2.axis - p1.axis));
    RatePoint { axis: x, rate: l0 * p0.rate + l1 * p1.rate + l2 * p2.rate }
}

fn refined(curve: &RateCurve, i: usize) -> RatePoint {
    if i == 0 || i + 1 == curve.axis.len() {
        return curve.point(i);
    }
    quadratic_vertex(curve.point(i - 1), curve.point(i), curve.point(i + 1))
}

fn check_fringe_resolution(curve: &RateCurve) -> Result<f64> {
    let period = curve.meta.fringe_period();
    if curve.step() > period / 16.0 * (1.0 + 1e-9) {
        return Err(Error::InvalidCurve(format!(
            "step {:e} too coarse for fringe period {:e}; need 16 samples per period",
            curve.step(),
            period
        )));
    }
    Ok(period)
}

/// Fringe visibility (max-min)/(max+min) within `window` around `center`,
/// with parabolic refinement of both extrema. The window must span at least
/// two fringe periods.
pub fn visibility(curve: &RateCurve, center: f64, window: f64) -> Result<f64> {
    let period = check_fringe_resolution(curve)?;
    if window < 2.0 * period {
        return Err(Error::InvalidCurve(format!(
            "visibility window {window:e} spans less than two fringe periods"
        )));
    }
    let (lo, hi) = (center - 0.5 * window, center + 0.5 * window);
    let inside: Vec<usize> =
        (0..curve.axis.len()).filter(|&i| curve.axis[i] >= lo && curve.axis[i] <= hi).collect();
    if (inside.len() as f64) < 2.0 * period / curve.step() {
        return Err(Error::InvalidCurve("visibility window lies outside the curve".into()));
    }
    let &imax = inside.iter().max_by(|&&a, &&b| curve.rates[a].total_cmp(&curve.rates[b])).unwrap();
    let &imin = inside.iter().min_by(|&&a, &&b| curve.rates[a].total_cmp(&curve.rates[b])).unwrap();
    let top = refined(curve, imax).rate;
    let bottom = refined(curve, imin).rate;
    if top + bottom <= 0.0 || top <= bottom {
        return Err(Error::Unresolved("no fringe contrast in the window".into()));
    }
    Ok((top - bottom) / (top + bottom))
}

/// Fringe period from the mean spacing of rising mean-level crossings.
pub fn estimate_period(curve: &RateCurve) -> Result<f64> {
    check_fringe_resolution(curve)?;
    let rates = &curve.rates;
    let top = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bottom = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = 0.5 * (top + bottom);
    let mut crossings = Vec::new();
    for i in 0..rates.len() - 1 {
        if rates[i] < mean && rates[i + 1] >= mean {
            let frac = (mean - rates[i]) / (rates[i + 1] - rates[i]);
            crossings.push(curve.axis[i] + frac * curve.step());
        }
    }
    if crossings.len() < 5 {
        return Err(Error::Unresolved(format!(
            "only {} rising crossings; need at least 5 to estimate a period",
            crossings.len()
        )));
    }
    Ok((crossings.last().unwrap() - crossings.first().unwrap()) / (crossings.len() - 1) as f64)
}

/// Shape of a coincidence envelope over a packet-scale scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeClass {
    /// One central dip region, upper and lower envelopes mirrored around the
    /// dephased level.
    SymmetricGaussian,
    /// Two revival humps that still carry a visible fringe, so the envelope
    /// is not mirror-symmetric about the dephased level.
    Asymmetric,
    /// Two fringe-free humps still attached to the central structure.
    DoubleHumpSingleDip,
    /// Two fully detached revival peaks far outside the fringe envelope.
    SidePeaks,
}

impl std::fmt::Display for EnvelopeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::SymmetricGaussian => "symmetric_gaussian",
            Self::Asymmetric => "asymmetric",
            Self::DoubleHumpSingleDip => "double_hump_single_dip",
            Self::SidePeaks => "side_peaks",
        })
    }
}

/// Per-period envelope of a fringe curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    /// Refined fringe maxima, one per period.
    pub upper: Vec<RatePoint>,
    /// Refined fringe minima, one per period.
    pub lower: Vec<RatePoint>,
    /// Dephased level estimated from the envelope edges.
    pub baseline: f64,
    pub classification: EnvelopeClass,
    pub meta: CurveMeta,
}

fn local_maxima(points: &[RatePoint]) -> Vec<RatePoint> {
    let mut out = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (a, b, c) = (points[i - 1].rate, points[i].rate, points[i + 1].rate);
        if b >= a && b >= c && (b > a || b > c) {
            out.push(quadratic_vertex(points[i - 1], points[i], points[i + 1]));
        }
    }
    out
}

fn classify(
    upper: &[RatePoint],
    lower: &[RatePoint],
    baseline: f64,
    meta: &CurveMeta,
) -> Result<EnvelopeClass> {
    let period = meta.fringe_period();
    let center = lower
        .iter()
        .min_by(|a, b| a.rate.total_cmp(&b.rate))
        .expect("envelope is never empty")
        .axis;
    let humps: Vec<RatePoint> =
        local_maxima(upper).into_iter().filter(|p| p.rate >= 1.1 * baseline).collect();
    if humps.is_empty() {
        return Err(Error::Unresolved(
            "no envelope structure above the dephased level".into(),
        ));
    }
    let off_center = 2.0 * period;
    let side = |sign: f64| {
        humps
            .iter()
            .filter(|p| sign * (p.axis - center) > off_center)
            .max_by(|a, b| a.rate.total_cmp(&b.rate))
            .copied()
    };
    match (side(-1.0), side(1.0)) {
        (None, None) => {
            // All significant structure sits on the center: the single-hump
            // shape, envelopes mirrored about the dephased level.
            Ok(EnvelopeClass::SymmetricGaussian)
        }
        (Some(left), Some(right)) => {
            let reach = 0.5 * (right.axis - left.axis);
            if ((right.axis - center) + (left.axis - center)).abs()
                > (0.1 * reach).max(2.0 * period)
            {
                return Err(Error::Unresolved("revival humps are not symmetric".into()));
            }
            // Detached means the envelope returns to the dephased level over
            // the middle half between the center and either hump.
            let valley = |sign: f64| {
                upper
                    .iter()
                    .filter(|p| {
                        let d = sign * (p.axis - center);
                        d >= 0.25 * reach && d <= 0.75 * reach
                    })
                    .map(|p| p.rate)
                    .fold(f64::INFINITY, f64::min)
            };
            let detached = valley(-1.0) <= 1.005 * baseline && valley(1.0) <= 1.005 * baseline;
            if detached && reach > 3.0 * meta.effective_coherence_extent() {
                return Ok(EnvelopeClass::SidePeaks);
            }
            // Fringe amplitude on the humps: half the gap between the
            // envelopes there.
            let nearest_lower = |x: f64| {
                lower
                    .iter()
                    .min_by(|a, b| (a.axis - x).abs().total_cmp(&(b.axis - x).abs()))
                    .expect("envelope is never empty")
                    .rate
            };
            let fringe = 0.5
                * ((right.rate - nearest_lower(right.axis))
                    + (left.rate - nearest_lower(left.axis)))
                / 2.0;
            if fringe >= 0.02 * baseline {
                Ok(EnvelopeClass::Asymmetric)
            } else {
                Ok(EnvelopeClass::DoubleHumpSingleDip)
            }
        }
        _ => Err(Error::Unresolved("revival hump on one side only".into())),
    }
}

/// Extracts per-period fringe extrema and classifies the envelope shape.
/// The scan must resolve the fringe (16 samples per period) and extend to
/// the dephased level on both ends, which anchors the baseline.
pub fn extract_envelope(curve: &RateCurve) -> Result<EnvelopeReport> {
    let period = check_fringe_resolution(curve)?;
    let first = curve.axis[0];
    let span = curve.axis[curve.axis.len() - 1] - first;
    let windows = (span / period).floor() as usize;
    if windows < 8 {
        return Err(Error::InvalidCurve(format!(
            "curve spans only {windows} fringe periods; need at least 8"
        )));
    }
    let mut upper = Vec::with_capacity(windows);
    let mut lower = Vec::with_capacity(windows);
    let step = curve.step();
    for w in 0..windows {
        let lo = ((w as f64 * period) / step).ceil() as usize;
        let hi = ((((w + 1) as f64) * period) / step).ceil() as usize;
        let hi = hi.min(curve.axis.len());
        if hi.saturating_sub(lo) < 3 {
            continue;
        }
        let imax = (lo..hi).max_by(|&a, &b| curve.rates[a].total_cmp(&curve.rates[b])).unwrap();
        let imin = (lo..hi).min_by(|&a, &b| curve.rates[a].total_cmp(&curve.rates[b])).unwrap();
        upper.push(refined(curve, imax));
        lower.push(refined(curve, imin));
    }
    if upper.len() < 8 {
        return Err(Error::InvalidCurve("too few usable fringe periods".into()));
    }
    let baseline = 0.25
        * (upper.first().unwrap().rate
            + upper.last().unwrap().rate
            + lower.first().unwrap().rate
            + lower.last().unwrap().rate);
    if baseline <= 0.0 {
        return Err(Error::InvalidCurve("dephased level is not positive".into()));
    }
    let classification = classify(&upper, &lower, baseline, &curve.meta)?;
    Ok(EnvelopeReport { upper, lower, baseline, classification, meta: curve.meta })
}

impl EnvelopeReport {
    /// Detached revival peaks: upper-envelope maxima at least 5% above the
    /// dephased level and more than three fringe-envelope coherence extents
    /// from the central dip, which excludes the shoulders of the central
    /// structure.
    pub fn side_peaks(&self) -> Vec<RatePoint> {
        let center = self
            .lower
            .iter()
            .min_by(|a, b| a.rate.total_cmp(&b.rate))
            .expect("envelope is never empty")
            .axis;
        let exclusion = 3.0 * self.meta.effective_coherence_extent();
        local_maxima(&self.upper)
            .into_iter()
            .filter(|p| p.rate >= 1.05 * self.baseline && (p.axis - center).abs() > exclusion)
            .collect()
    }
}

/// Result of fitting `b·(1 - V·exp(-w²τ²/2))` to a coalescence-dip scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomDipFit {
    /// Fitted width w in rad/s; matches the photon bandwidth for an ideal dip.
    pub width: f64,
    /// Fitted dip depth relative to the wings.
    pub visibility: f64,
    /// Root-mean-square residual in rate units.
    pub rms_residual: f64,
}

fn golden_minimum<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Fits a Gaussian dip to a coalescence scan: the center comes from the
/// refined minimum, the visibility is solved in closed form for each trial
/// width, and the width is bracketed by golden-section search around a
/// half-width seed.
pub fn fit_hom_dip(curve: &RateCurve) -> Result<HomDipFit> {
    if curve.axis.len() < 16 {
        return Err(Error::FitFailed("need at least 16 points".into()));
    }
    let to_delay = match curve.meta.axis {
        AxisKind::Delay => 1.0,
        AxisKind::PathLength => 1.0 / SPEED_OF_LIGHT,
    };
    let rates = &curve.rates;
    let n = rates.len();
    let wings = 0.5 * (rates[0] + rates[n - 1]);
    if wings <= 0.0 {
        return Err(Error::FitFailed("wings of the scan carry no rate".into()));
    }
    let imin = (0..n).min_by(|&a, &b| rates[a].total_cmp(&rates[b])).unwrap();
    if imin == 0 || imin == n - 1 {
        return Err(Error::FitFailed("no interior minimum".into()));
    }
    let depth = wings - rates[imin];
    if depth < 0.05 * wings {
        return Err(Error::FitFailed("dip depth below 5% of the wings".into()));
    }
    let center = refined(curve, imin).axis;

    // Half width at half depth seeds the width bracket.
    let half_level = wings - 0.5 * depth;
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imin;
        for i in range {
            if rates[i] >= half_level {
                let frac = (half_level - rates[prev]) / (rates[i] - rates[prev]);
                let x = curve.axis[prev] + frac * (curve.axis[i] - curve.axis[prev]);
                return Some((x - center).abs() * to_delay);
            }
            prev = i;
        }
        None
    };
    let right = crossing(&mut (imin + 1..n));
    let left = crossing(&mut (0..imin).rev());
    let tau_half = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (l + r),
        (Some(one), None) | (None, Some(one)) => one,
        (None, None) => return Err(Error::FitFailed("dip never recovers to half depth".into())),
    };
    let seed = (2.0 * std::f64::consts::LN_2).sqrt() / tau_half;

    let taus: Vec<f64> = curve.axis.iter().map(|x| (x - center) * to_delay).collect();
    let fit_at = |w: f64| -> (f64, f64) {
        let mut ee = 0.0;
        let mut cross = 0.0;
        for (&tau, &y) in taus.iter().zip(rates) {
            let e = (-0.5 * w * w * tau * tau).exp();
            ee += e * e;
            cross += e * (1.0 - y / wings);
        }
        let v = cross / ee;
        let rss: f64 = taus
            .iter()
            .zip(rates)
            .map(|(&tau, &y)| {
                let e = (-0.5 * w * w * tau * tau).exp();
                let r = y / wings - (1.0 - v * e);
                r * r
            })
            .sum();
        (rss, v)
    };
    let width = golden_minimum(seed / 6.0, 6.0 * seed, |w| fit_at(w).0);
    let (rss, visibility) = fit_at(width);
    // The edge average only estimates the dephased level if the scan extends
    // well past the fitted dip; otherwise the normalization is circular and
    // the returned width and visibility are fiction.
    let tau_edge = taus[0].abs().min(taus[n - 1].abs());
    if (-0.5 * width * width * tau_edge * tau_edge).exp() > 0.1 {
        return Err(Error::FitFailed("scan does not reach the dip wings".into()));
    }
    Ok(HomDipFit { width, visibility, rms_residual: wings * (rss / n as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::DelayConfig;
    use crate::spectra::SpectralProfile;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn filter() -> SpectralProfile {
        SpectralProfile::from_wavelength(810e-9, 5e-9).unwrap()
    }

    fn pair_source(pump_fwhm: f64) -> SourceModel {
        let pump = SpectralProfile::from_wavelength(405e-9, pump_fwhm).unwrap();
        SourceModel::spdc(pump, filter()).unwrap()
    }

    fn packet_curve(source: &SourceModel, x1: f64, scale: f64) -> RateCurve {
        let meta = CurveMeta::for_source(source, AxisKind::PathLength);
        let reach = x1
            + 5.0 * meta.photon_coherence_extent().max(meta.effective_coherence_extent());
        let step = meta.fringe_period() / 16.0;
        let axis = scan_axis(-reach, reach, step).unwrap();
        let points = scan(&axis, |x| {
            scale
                * rates::coincidence_rate(
                    source,
                    &DelayConfig::from_path_lengths(x1, x),
                )
        });
        RateCurve::from_points(&points, meta).unwrap()
    }

    #[test]
    fn scan_axis_is_inclusive_and_robust() {
        assert_eq!(scan_axis(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(scan_axis(-150.0, 150.0, 1.5).unwrap().len(), 201);
        assert!(scan_axis(0.0, -1.0, 0.5).is_err());
        assert!(scan_axis(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn parallel_and_sequential_scans_agree() {
        let axis = scan_axis(0.0, 10.0, 0.125).unwrap();
        let f = |x: f64| (x * 1.3).sin().powi(2);
        assert_eq!(scan(&axis, f), scan_sequential(&axis, f));
    }

    #[test]
    fn curve_validation_rejects_malformed_data() {
        let meta = CurveMeta::for_source(&pair_source(2e-9), AxisKind::Delay);
        assert!(RateCurve::new(vec![0.0, 1.0], vec![1.0], meta).is_err());
        assert!(RateCurve::new(vec![0.0, 1.0, 1.5], vec![1.0; 3], meta).is_err());
        assert!(RateCurve::new(vec![0.0, 1.0, 2.0], vec![1.0, -0.1, 1.0], meta).is_err());
        assert!(RateCurve::new(vec![0.0, 1.0, 2.0], vec![1.0, f64::NAN, 1.0], meta).is_err());
        assert!(RateCurve::new(vec![2.0, 1.0, 0.0], vec![1.0; 3], meta).is_err());
    }

    #[test]
    fn visibility_and_period_on_a_fringe_scan() {
        let source = pair_source(0.67e-9);
        let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
        let period = meta.fringe_period();
        let axis = scan_axis(-1.215e-6, 1.215e-6, period / 32.0).unwrap();
        let x1 = 62e-6;
        let points = scan(&axis, |x| {
            rates::coincidence_rate(&source, &DelayConfig::from_path_lengths(x1, x))
        });
        let curve = RateCurve::from_points(&points, meta).unwrap();

        let vis = visibility(&curve, 0.0, 2.43e-6).unwrap();
        assert!((vis - 1.0).abs() <= 1e-3, "visibility {vis}");
        let est = estimate_period(&curve).unwrap();
        assert_relative_eq!(est, 405e-9, max_relative = 5e-3);

        assert!(matches!(
            visibility(&curve, 0.0, 1.5 * period),
            Err(Error::InvalidCurve(_))
        ));
        assert!(matches!(
            visibility(&curve, 1.0, 2.43e-6),
            Err(Error::InvalidCurve(_))
        ));
    }

    #[test]
    fn period_estimate_survives_flips_and_offsets() {
        let source = pair_source(0.67e-9);
        let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
        let axis = scan_axis(-1.215e-6, 1.215e-6, meta.fringe_period() / 32.0).unwrap();
        let rates: Vec<f64> = axis
            .iter()
            .map(|&x| {
                rates::coincidence_rate(&source, &DelayConfig::from_path_lengths(62e-6, x))
            })
            .collect();
        let top = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let flipped: Vec<f64> = rates.iter().map(|&r| top - r).collect();
        let shifted: Vec<f64> = rates.iter().map(|&r| r + 0.7).collect();

        let period = |values: Vec<f64>| {
            estimate_period(&RateCurve::new(axis.clone(), values, meta).unwrap()).unwrap()
        };
        let base = period(rates);
        assert_relative_eq!(period(flipped), base, max_relative = 1e-6);
        assert_relative_eq!(period(shifted), base, max_relative = 1e-12);
    }

    #[test]
    fn coarse_scans_are_rejected() {
        let source = pair_source(0.67e-9);
        let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
        let axis = scan_axis(-1.215e-6, 1.215e-6, meta.fringe_period() / 4.0).unwrap();
        let points = scan(&axis, |x| {
            rates::coincidence_rate(&source, &DelayConfig::from_path_lengths(0.0, x))
        });
        let curve = RateCurve::from_points(&points, meta).unwrap();
        assert!(matches!(visibility(&curve, 0.0, 2e-6), Err(Error::InvalidCurve(_))));
        assert!(matches!(estimate_period(&curve), Err(Error::InvalidCurve(_))));
        assert!(matches!(extract_envelope(&curve), Err(Error::InvalidCurve(_))));
    }

    #[test]
    fn envelope_morphologies_across_packet_separations() {
        let source = pair_source(2e-9);
        let expected = [
            (0.0, EnvelopeClass::SymmetricGaussian),
            (100e-6, EnvelopeClass::Asymmetric),
            (200e-6, EnvelopeClass::DoubleHumpSingleDip),
            (500e-6, EnvelopeClass::SidePeaks),
        ];
        for (x1, class) in expected {
            let report = extract_envelope(&packet_curve(&source, x1, 1.0)).unwrap();
            assert_eq!(report.classification, class, "x1 = {x1:e}");
            assert_relative_eq!(report.baseline, 1.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn classification_is_scale_invariant() {
        let source = pair_source(2e-9);
        let report = extract_envelope(&packet_curve(&source, 200e-6, 3.7)).unwrap();
        assert_eq!(report.classification, EnvelopeClass::DoubleHumpSingleDip);
        assert_relative_eq!(report.baseline, 3.7, max_relative = 1e-3);
    }

    #[test]
    fn side_peaks_are_located_and_shoulders_excluded() {
        let source = pair_source(2e-9);
        let report = extract_envelope(&packet_curve(&source, 500e-6, 1.0)).unwrap();
        let peaks = report.side_peaks();
        assert_eq!(peaks.len(), 2, "peaks: {peaks:?}");
        assert!((peaks[0].axis + 500e-6).abs() <= 2e-6);
        assert!((peaks[1].axis - 500e-6).abs() <= 2e-6);
        for p in &peaks {
            assert!((p.rate - 1.25).abs() <= 0.02, "height {}", p.rate);
        }
    }

    #[test]
    fn envelope_class_labels() {
        assert_eq!(EnvelopeClass::SymmetricGaussian.to_string(), "symmetric_gaussian");
        assert_eq!(EnvelopeClass::Asymmetric.to_string(), "asymmetric");
        assert_eq!(EnvelopeClass::DoubleHumpSingleDip.to_string(), "double_hump_single_dip");
        assert_eq!(EnvelopeClass::SidePeaks.to_string(), "side_peaks");
    }

    fn hom_samples() -> (Vec<f64>, Vec<f64>, CurveMeta) {
        let source = SourceModel::separable(filter()).unwrap();
        let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
        let axis = scan_axis(-150e-6, 150e-6, 1.5e-6).unwrap();
        let width = filter().width();
        let rates: Vec<f64> =
            axis.iter().map(|&x| rates::hom_rate(width, x / SPEED_OF_LIGHT)).collect();
        (axis, rates, meta)
    }

    #[test]
    fn dip_fit_recovers_width_and_visibility() {
        let (axis, rates, meta) = hom_samples();
        let fit = fit_hom_dip(&RateCurve::new(axis, rates, meta).unwrap()).unwrap();
        assert_relative_eq!(fit.width, filter().width(), max_relative = 1e-2);
        assert!((fit.visibility - 1.0).abs() <= 1e-3, "visibility {}", fit.visibility);
        assert!(fit.rms_residual <= 1e-3, "residual {}", fit.rms_residual);
    }

    #[test]
    fn dip_fit_tolerates_mild_noise() {
        let (axis, rates, meta) = hom_samples();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noisy: Vec<f64> =
            rates.iter().map(|&r| r * (1.0 + rng.random_range(-0.01..0.01))).collect();
        let fit = fit_hom_dip(&RateCurve::new(axis, noisy, meta).unwrap()).unwrap();
        assert_relative_eq!(fit.width, filter().width(), max_relative = 5e-2);
        assert!((fit.visibility - 1.0).abs() <= 2e-2);
    }

    #[test]
    fn dip_fit_rejects_featureless_data() {
        let meta = CurveMeta::for_source(&SourceModel::separable(filter()).unwrap(), AxisKind::Delay);
        let axis = scan_axis(0.0, 1.0, 0.02).unwrap();
        let rates = vec![1.0; axis.len()];
        let curve = RateCurve::new(axis, rates, meta).unwrap();
        assert!(matches!(fit_hom_dip(&curve), Err(Error::FitFailed(_))));
    }

    // A scan confined to the bottom of the dip has no view of the dephased
    // level, so the edge average undershoots it and the fit would report a
    // width and visibility that look plausible but are wrong.
    #[test]
    fn dip_fit_rejects_scan_that_stops_inside_the_dip() {
        let source = SourceModel::separable(filter()).unwrap();
        let meta = CurveMeta::for_source(&source, AxisKind::PathLength);
        let axis = scan_axis(-30e-6, 30e-6, 1.5e-6).unwrap();
        let width = filter().width();
        let rates: Vec<f64> =
            axis.iter().map(|&x| rates::hom_rate(width, x / SPEED_OF_LIGHT)).collect();
        let err = fit_hom_dip(&RateCurve::new(axis, rates, meta).unwrap()).unwrap_err();
        assert!(matches!(&err, Error::FitFailed(m) if m.contains("wings")), "{err}");
    }
}
