//! Inverse-pipeline front end: peak detection and dispersion statistics.
//!
//! * Detects multipath components as gated local maxima of an impulse-response
//!   magnitude: minimum height, minimum mutual separation, a near-field range
//!   gate for co-located snapshots, and a per-snapshot count cap.
//! * Refines detected delays to sub-tap precision with the shared
//!   single-component kernel fit.
//! * Computes power-weighted RMS delay/angular spreads, their empirical CDFs,
//!   and moment-matched Normal fits over a scan.

use crate::model::{Cir, CirKind, Padp, SPEED_OF_LIGHT};
use crate::synth;
use crate::{Error, Result};

// --- gate parameters ---------------------------------------------------------

/// Gates applied to candidate peaks, in the order: height, range, separation,
/// count.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakGateParams {
    /// Minimum peak power (dB, same reference as the input snapshot).
    pub p_min_db: f64,
    /// Minimum delay separation between reported peaks (seconds).
    pub dtau_min_s: f64,
    /// Minimum equivalent range (meters); applied to co-located snapshots only,
    /// where it suppresses the zero-delay coupling spike.
    pub r_min_m: f64,
    /// Maximum number of peaks reported per snapshot.
    pub k_max: usize,
}

impl Default for PeakGateParams {
    fn default() -> Self {
        PeakGateParams {
            p_min_db: -55.0,
            dtau_min_s: 2.2e-9,
            r_min_m: 0.5,
            k_max: 4,
        }
    }
}

impl PeakGateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dtau_min_s > 0.0) {
            return Err(Error::invalid("dtau_min must be positive"));
        }
        if !(self.r_min_m >= 0.0) {
            return Err(Error::invalid("r_min must be nonnegative"));
        }
        if self.k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        if self.p_min_db.is_nan() {
            return Err(Error::invalid("p_min must not be NaN"));
        }
        Ok(())
    }
}

// --- detected components -----------------------------------------------------

/// One detected multipath component.
#[derive(Debug, Clone, PartialEq)]
pub struct Mpc {
    /// Steering angle of the snapshot the peak came from; `None` for the
    /// separated-node link.
    pub steering_angle_deg: Option<f64>,
    /// Delay on the snapshot's own reference (seconds).
    pub excess_delay_s: f64,
    /// Peak power (dB).
    pub power_db: f64,
    /// Equivalent range: half the delay-equivalent distance for co-located
    /// snapshots (out-and-back), the full distance for the one-way link.
    pub range_m: f64,
    /// Tap the peak was detected on, for later windowed processing.
    pub tap_index: usize,
}

fn range_for(kind: &CirKind, delay_s: f64) -> f64 {
    match kind {
        CirKind::Monostatic { .. } => SPEED_OF_LIGHT * delay_s / 2.0,
        CirKind::Bistatic => SPEED_OF_LIGHT * delay_s,
    }
}

/// Detects gated local maxima of the snapshot's tap powers. Returns peaks in
/// descending power order, at most `k_max` of them, mutually separated by at
/// least `dtau_min_s`; co-located snapshots also drop peaks closer than
/// `r_min_m` in equivalent range. A plateau of equal taps counts once, at its
/// earliest tap.
pub fn detect_peaks(cir: &Cir, gates: &PeakGateParams) -> Result<Vec<Mpc>> {
    gates.validate()?;
    let n = cir.taps.len();
    if n == 0 {
        return Err(Error::invalid("snapshot has no taps"));
    }
    let p: Vec<f64> = (0..n).map(|i| cir.power_db(i)).collect();

    // Local maxima with earliest-tap plateau resolution.
    let mut candidates: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && p[j + 1] == p[i] {
            j += 1;
        }
        let left_ok = i == 0 || p[i - 1] < p[i];
        let right_ok = j == n - 1 || p[j + 1] < p[i];
        if left_ok && right_ok && p[i] > f64::NEG_INFINITY {
            candidates.push(i);
        }
        i = j + 1;
    }

    // Height and range gates.
    candidates.retain(|&k| p[k] >= gates.p_min_db);
    if matches!(cir.kind, CirKind::Monostatic { .. }) {
        candidates.retain(|&k| {
            let delay = cir.delay_of_tap(k);
            delay >= 0.0 && range_for(&cir.kind, delay) >= gates.r_min_m
        });
    }

    // Separation gate: strongest first, keep any peak far enough from all kept.
    candidates.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for &c in &candidates {
        let tc = cir.delay_of_tap(c);
        if kept
            .iter()
            .all(|&k| (tc - cir.delay_of_tap(k)).abs() >= gates.dtau_min_s)
        {
            kept.push(c);
            if kept.len() == gates.k_max {
                break;
            }
        }
    }

    let steering = match cir.kind {
        CirKind::Monostatic { steering_deg } => Some(steering_deg),
        CirKind::Bistatic => None,
    };
    Ok(kept
        .into_iter()
        .map(|k| {
            let delay = cir.delay_of_tap(k);
            Mpc {
                steering_angle_deg: steering,
                excess_delay_s: delay,
                power_db: p[k],
                range_m: range_for(&cir.kind, delay),
                tap_index: k,
            }
        })
        .collect())
}

/// Replaces each detected peak's delay, power, and range with the sub-tap
/// single-component fit around its tap. Detection membership is unchanged;
/// only the reported values sharpen.
pub fn refine_delays(cir: &Cir, mpcs: &mut [Mpc]) {
    for m in mpcs {
        let (mu, amp) = synth::fit_single_component(&cir.taps, m.tap_index);
        let delay = (cir.delay_offset_s + mu * cir.tap_spacing_s).max(0.0);
        m.excess_delay_s = delay;
        m.range_m = range_for(&cir.kind, delay);
        if amp.norm_sqr() > 0.0 {
            m.power_db = 10.0 * amp.norm_sqr().log10();
        }
    }
}

// --- RMS spreads -------------------------------------------------------------

fn weighted_rms_spread(profile: &[(f64, f64)]) -> Result<f64> {
    let mut total = 0.0;
    for &(x, w) in profile {
        if !x.is_finite() || !w.is_finite() || w < 0.0 {
            return Err(Error::invalid(
                "spread profile entries must be finite with nonnegative power",
            ));
        }
        total += w;
    }
    if !(total > 0.0) {
        return Err(Error::degenerate("spread profile carries no power"));
    }
    let mean: f64 = profile.iter().map(|&(x, w)| w * x).sum::<f64>() / total;
    let var: f64 = profile
        .iter()
        .map(|&(x, w)| w * (x - mean) * (x - mean))
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

/// Power-weighted RMS delay spread of a (delay seconds, linear power) profile.
pub fn rms_delay_spread(profile: &[(f64, f64)]) -> Result<f64> {
    weighted_rms_spread(profile)
}

/// Power-weighted RMS angular spread of an (angle degrees, linear power)
/// profile. Angles are treated on the line, not the circle: the steering span
/// is narrow enough that wrap-around never occurs.
pub fn rms_angular_spread(profile: &[(f64, f64)]) -> Result<f64> {
    weighted_rms_spread(profile)
}

// --- scan-level statistics ---------------------------------------------------

/// Empirical distribution of a spread sample set: samples ascending, with
/// probabilities `i/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    pub samples: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl Cdf {
    fn from_samples(mut samples: Vec<f64>) -> Cdf {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let probabilities = (1..=samples.len()).map(|i| i as f64 / n).collect();
        Cdf {
            samples,
            probabilities,
        }
    }
}

/// Moment-matched Normal summary of a sample set: sample mean and sample
/// standard deviation (n−1 denominator; 0 when fewer than two samples).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFit {
    pub mean: f64,
    pub std: f64,
}

impl NormalFit {
    fn from_samples(samples: &[f64]) -> NormalFit {
        if samples.is_empty() {
            return NormalFit {
                mean: 0.0,
                std: 0.0,
            };
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return NormalFit { mean, std: 0.0 };
        }
        let ss = samples
            .iter()
            .map(|&x| (x - mean) * (x - mean))
            .sum::<f64>();
        NormalFit {
            mean,
            std: (ss / (n - 1.0)).sqrt(),
        }
    }
}

/// Dispersion summary of one angle-delay power map.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadStats {
    /// (steering angle, RMS delay spread seconds), one entry per angle with
    /// power above the floor.
    pub per_angle_delay_spread: Vec<(f64, f64)>,
    /// (delay, RMS angular spread degrees), one entry per delay bin with power
    /// above the floor.
    pub per_bin_angle_spread: Vec<(f64, f64)>,
    pub delay_spread_cdf: Cdf,
    pub angle_spread_cdf: Cdf,
    pub delay_spread_fit: NormalFit,
    pub angle_spread_fit: NormalFit,
}

/// Computes per-angle delay spreads and per-bin angular spreads of a power map,
/// ignoring entries more than `floor_db` below the map's maximum, then
/// summarizes each spread family with its empirical CDF and Normal fit.
pub fn spread_statistics(padp: &Padp, floor_db: f64) -> Result<SpreadStats> {
    padp.validate()?;
    if !(floor_db > 0.0) {
        return Err(Error::invalid("floor must be a positive dB span"));
    }
    let peak = padp
        .power_db
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Err(Error::degenerate("power map is entirely silent"));
    }
    let threshold = peak - floor_db;

    let mut per_angle = Vec::new();
    for (i, row) in padp.power_db.iter().enumerate() {
        let profile: Vec<(f64, f64)> = row
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= threshold)
            .map(|(j, &p)| (padp.delays_s[j], 10f64.powf(p / 10.0)))
            .collect();
        if !profile.is_empty() {
            per_angle.push((padp.angles_deg[i], rms_delay_spread(&profile)?));
        }
    }

    let mut per_bin = Vec::new();
    for j in 0..padp.delays_s.len() {
        let profile: Vec<(f64, f64)> = padp
            .power_db
            .iter()
            .enumerate()
            .filter(|(_, row)| row[j] >= threshold)
            .map(|(i, row)| (padp.angles_deg[i], 10f64.powf(row[j] / 10.0)))
            .collect();
        if !profile.is_empty() {
            per_bin.push((padp.delays_s[j], rms_angular_spread(&profile)?));
        }
    }

    let delay_samples: Vec<f64> = per_angle.iter().map(|&(_, s)| s).collect();
    let angle_samples: Vec<f64> = per_bin.iter().map(|&(_, s)| s).collect();
    Ok(SpreadStats {
        delay_spread_fit: NormalFit::from_samples(&delay_samples),
        angle_spread_fit: NormalFit::from_samples(&angle_samples),
        delay_spread_cdf: Cdf::from_samples(delay_samples),
        angle_spread_cdf: Cdf::from_samples(angle_samples),
        per_angle_delay_spread: per_angle,
        per_bin_angle_spread: per_bin,
    })
}

// --- tests -------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cir_with_peaks(peaks: &[(usize, f64)], num_taps: usize, kind: CirKind) -> Cir {
        let mut taps = vec![Complex64::new(0.0, 0.0); num_taps];
        for &(tap, power_db) in peaks {
            taps[tap] = Complex64::new(10f64.powf(power_db / 20.0), 0.0);
        }
        Cir {
            taps,
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind,
        }
    }

    #[test]
    fn height_gate_keeps_the_two_peaks_above_threshold() {
        let cir = cir_with_peaks(
            &[(10, -40.0), (30, -50.0), (50, -60.0)],
            64,
            CirKind::Bistatic,
        );
        let mpcs = detect_peaks(&cir, &PeakGateParams::default()).unwrap();
        assert_eq!(mpcs.len(), 2);
        assert_eq!(mpcs[0].tap_index, 10);
        assert_eq!(mpcs[1].tap_index, 30);
        assert!((mpcs[0].power_db + 40.0).abs() < 1e-9);
        assert!((mpcs[1].excess_delay_s - 30e-9).abs() < 1e-21);
    }

    #[test]
    fn separation_gate_keeps_only_the_stronger_of_a_close_pair() {
        let cir = cir_with_peaks(&[(10, -45.0), (11, -40.0)], 64, CirKind::Bistatic);
        let mpcs = detect_peaks(&cir, &PeakGateParams::default()).unwrap();
        assert_eq!(mpcs.len(), 1);
        assert_eq!(mpcs[0].tap_index, 11);
    }

    #[test]
    fn range_gate_suppresses_near_field_peaks_on_co_located_snapshots() {
        let kind = CirKind::Monostatic { steering_deg: 0.0 };
        let cir = cir_with_peaks(&[(2, -10.0), (40, -30.0)], 64, kind);
        let mpcs = detect_peaks(&cir, &PeakGateParams::default()).unwrap();
        // Tap 2 sits at 0.30 m equivalent range, inside the 0.5 m gate.
        assert_eq!(mpcs.len(), 1);
        assert_eq!(mpcs[0].tap_index, 40);
        assert!((mpcs[0].range_m - 5.995849160).abs() < 1e-6);
    }

    #[test]
    fn range_gate_does_not_apply_to_the_one_way_link() {
        let cir = cir_with_peaks(&[(2, -10.0)], 64, CirKind::Bistatic);
        let mpcs = detect_peaks(&cir, &PeakGateParams::default()).unwrap();
        assert_eq!(mpcs.len(), 1);
        assert!((mpcs[0].range_m - SPEED_OF_LIGHT * 2e-9).abs() < 1e-9);
    }

    #[test]
    fn count_cap_keeps_the_strongest_peaks_in_descending_order() {
        let peaks: Vec<(usize, f64)> = (0..6).map(|k| (5 + 10 * k, -30.0 - k as f64)).collect();
        let cir = cir_with_peaks(&peaks, 80, CirKind::Bistatic);
        let mpcs = detect_peaks(&cir, &PeakGateParams::default()).unwrap();
        assert_eq!(mpcs.len(), 4);
        for w in mpcs.windows(2) {
            assert!(w[0].power_db >= w[1].power_db);
        }
        assert_eq!(mpcs[0].tap_index, 5);
        assert_eq!(mpcs[3].tap_index, 35);
    }

    #[test]
    fn plateau_counts_once_at_its_earliest_tap() {
        let mut taps = vec![Complex64::new(0.0, 0.0); 32];
        taps[7] = Complex64::new(0.5, 0.0);
        taps[8] = Complex64::new(0.5, 0.0);
        taps[9] = Complex64::new(0.2, 0.0);
        let cir = Cir {
            taps,
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        let gates = PeakGateParams {
            p_min_db: -40.0,
            ..PeakGateParams::default()
        };
        let mpcs = detect_peaks(&cir, &gates).unwrap();
        assert_eq!(mpcs.len(), 1);
        assert_eq!(mpcs[0].tap_index, 7);
    }

    #[test]
    fn detection_is_scale_covariant() {
        let cir = cir_with_peaks(
            &[(10, -40.0), (30, -50.0), (44, -53.0), (60, -61.0)],
            64,
            CirKind::Bistatic,
        );
        let g: f64 = 3.7;
        let shift = 20.0 * g.log10();
        let mut scaled = cir.clone();
        for t in &mut scaled.taps {
            *t *= Complex64::new(g, 0.0);
        }
        let gates = PeakGateParams::default();
        let shifted_gates = PeakGateParams {
            p_min_db: gates.p_min_db + shift,
            ..gates.clone()
        };
        let base = detect_peaks(&cir, &gates).unwrap();
        let moved = detect_peaks(&scaled, &shifted_gates).unwrap();
        assert_eq!(base.len(), moved.len());
        for (a, b) in base.iter().zip(&moved) {
            assert_eq!(a.tap_index, b.tap_index);
            assert_eq!(a.excess_delay_s, b.excess_delay_s);
            assert!((b.power_db - a.power_db - shift).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_gates_and_empty_snapshots_are_rejected() {
        let cir = cir_with_peaks(&[(10, -40.0)], 64, CirKind::Bistatic);
        let bad = PeakGateParams {
            dtau_min_s: 0.0,
            ..PeakGateParams::default()
        };
        assert!(detect_peaks(&cir, &bad).is_err());
        let none = PeakGateParams {
            k_max: 0,
            ..PeakGateParams::default()
        };
        assert!(detect_peaks(&cir, &none).is_err());
        let empty = Cir {
            taps: vec![],
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        assert!(detect_peaks(&empty, &PeakGateParams::default()).is_err());
    }

    #[test]
    fn silent_snapshot_yields_no_peaks() {
        let cir = Cir {
            taps: vec![Complex64::new(0.0, 0.0); 16],
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        assert!(detect_peaks(&cir, &PeakGateParams::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn refinement_recovers_a_fractional_tap_position() {
        let mu_true = 20.37;
        let amp = Complex64::from_polar(0.05, 0.4);
        let taps = synth::component_model(mu_true, amp, 128);
        let cir = Cir {
            taps,
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        let mut mpcs = detect_peaks(&cir, &PeakGateParams::default()).unwrap();
        assert_eq!(mpcs.len(), 1);
        assert_eq!(mpcs[0].tap_index, 20);
        refine_delays(&cir, &mut mpcs);
        assert!((mpcs[0].excess_delay_s - mu_true * 1e-9).abs() < 1e-15);
        assert!((mpcs[0].power_db - 20.0 * 0.05f64.log10()).abs() < 1e-6);
    }

    #[test]
    fn symmetric_two_point_delay_profile_spreads_to_half_the_gap() {
        let s = rms_delay_spread(&[(0.0, 1.0), (10e-9, 1.0)]).unwrap();
        assert!((s - 5e-9).abs() < 1e-21);
        let single = rms_delay_spread(&[(7e-9, 2.0)]).unwrap();
        assert_eq!(single, 0.0);
    }

    #[test]
    fn delay_spread_matches_the_pairwise_oracle() {
        let profile = [(0.0, 1.0), (10e-9, 0.5), (30e-9, 0.25)];
        let total: f64 = profile.iter().map(|&(_, w)| w).sum();
        let mut pairwise = 0.0;
        for &(ti, wi) in &profile {
            for &(tj, wj) in &profile {
                pairwise += wi * wj * (ti - tj) * (ti - tj);
            }
        }
        let oracle = (pairwise / (2.0 * total * total)).sqrt();
        let s = rms_delay_spread(&profile).unwrap();
        assert!((s - oracle).abs() < 1e-12, "{s} vs {oracle}");
    }

    #[test]
    fn spreads_are_shift_and_scale_invariant() {
        let profile = [(1e-9, 0.3), (4e-9, 1.1), (9e-9, 0.6)];
        let shifted: Vec<(f64, f64)> = profile.iter().map(|&(t, w)| (t + 5e-9, w)).collect();
        let scaled: Vec<(f64, f64)> = profile.iter().map(|&(t, w)| (t, 7.3 * w)).collect();
        let base = rms_delay_spread(&profile).unwrap();
        assert!((rms_delay_spread(&shifted).unwrap() - base).abs() < 1e-22);
        assert!((rms_delay_spread(&scaled).unwrap() - base).abs() < 1e-22);
    }

    #[test]
    fn angular_spread_handles_symmetric_and_uniform_grids() {
        let two = rms_angular_spread(&[(-30.0, 1.0), (30.0, 1.0)]).unwrap();
        assert!((two - 30.0).abs() < 1e-12);
        let uniform: Vec<(f64, f64)> = (-12..=12).map(|k| (5.0 * k as f64, 1.0)).collect();
        let s = rms_angular_spread(&uniform).unwrap();
        assert!((s - 1300f64.sqrt()).abs() < 1e-12);
        assert!((s - 36.06).abs() < 5e-3);
        assert_eq!(rms_angular_spread(&[(12.0, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn empty_and_negative_power_profiles_are_rejected() {
        assert!(rms_delay_spread(&[]).is_err());
        assert!(rms_delay_spread(&[(1e-9, 0.0), (2e-9, 0.0)]).is_err());
        assert!(rms_delay_spread(&[(1e-9, -0.5), (2e-9, 1.0)]).is_err());
        assert!(rms_delay_spread(&[(f64::NAN, 1.0)]).is_err());
    }

    fn padp_with_pairs() -> Padp {
        // Each angle has two equal taps: gaps of 10, 20, 30 ns give delay
        // spreads of exactly 5, 10, 15 ns.
        let delays: Vec<f64> = (0..64).map(|k| k as f64 * 1e-9).collect();
        let mut power = vec![vec![-200.0; 64]; 3];
        for (i, gap) in [10usize, 20, 30].iter().enumerate() {
            power[i][10] = 0.0;
            power[i][10 + gap] = 0.0;
        }
        Padp {
            angles_deg: vec![0.0, 10.0, 20.0],
            delays_s: delays,
            power_db: power,
        }
    }

    #[test]
    fn spread_statistics_matches_constructed_spreads_and_their_fit() {
        let stats = spread_statistics(&padp_with_pairs(), 30.0).unwrap();
        let spreads: Vec<f64> = stats
            .per_angle_delay_spread
            .iter()
            .map(|&(_, s)| s)
            .collect();
        assert_eq!(spreads.len(), 3);
        assert!((spreads[0] - 5e-9).abs() < 1e-21);
        assert!((spreads[1] - 10e-9).abs() < 1e-21);
        assert!((spreads[2] - 15e-9).abs() < 1e-21);
        assert!((stats.delay_spread_fit.mean - 10e-9).abs() < 1e-21);
        assert!((stats.delay_spread_fit.std - 5e-9).abs() < 1e-21);
        let cdf = &stats.delay_spread_cdf;
        assert_eq!(cdf.samples.len(), 3);
        assert!(cdf.samples.windows(2).all(|w| w[0] <= w[1]));
        assert!((cdf.probabilities[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((cdf.probabilities[2] - 1.0).abs() < 1e-15);
        // Four occupied delay bins -> four angular-spread samples; the shared
        // bin at 10 ns sees all three angles.
        assert_eq!(stats.per_bin_angle_spread.len(), 4);
        let shared = stats
            .per_bin_angle_spread
            .iter()
            .find(|&&(d, _)| (d - 10e-9).abs() < 1e-21)
            .unwrap();
        assert!((shared.1 - (200.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn floor_excludes_weak_entries_from_the_moments() {
        let mut padp = padp_with_pairs();
        // An entry 10 dB under the peak survives a 30 dB floor but not a 5 dB one.
        padp.power_db[0][40] = -10.0;
        let wide = spread_statistics(&padp, 30.0).unwrap();
        let tight = spread_statistics(&padp, 5.0).unwrap();
        assert!(wide.per_angle_delay_spread[0].1 > 5e-9);
        assert!((tight.per_angle_delay_spread[0].1 - 5e-9).abs() < 1e-21);
    }

    #[test]
    fn single_path_map_collapses_to_zero_spreads() {
        let padp = Padp {
            angles_deg: vec![0.0],
            delays_s: vec![0.0, 1e-9],
            power_db: vec![vec![0.0, -200.0]],
        };
        let stats = spread_statistics(&padp, 30.0).unwrap();
        assert_eq!(stats.per_angle_delay_spread, vec![(0.0, 0.0)]);
        assert_eq!(stats.per_bin_angle_spread, vec![(0.0, 0.0)]);
        assert_eq!(
            stats.delay_spread_fit,
            NormalFit {
                mean: 0.0,
                std: 0.0
            }
        );
        assert_eq!(
            stats.angle_spread_fit,
            NormalFit {
                mean: 0.0,
                std: 0.0
            }
        );
    }

    #[test]
    fn silent_map_is_a_domain_error() {
        let padp = Padp {
            angles_deg: vec![0.0, 5.0],
            delays_s: vec![0.0, 1e-9],
            power_db: vec![vec![f64::NEG_INFINITY; 2]; 2],
        };
        assert!(spread_statistics(&padp, 30.0).is_err());
    }

    #[test]
    fn detected_peak_powers_respect_all_gates_on_a_rendered_scan() {
        use crate::model::{NodeId, PointScatterer, Scene, SounderConfig};
        let cfg = SounderConfig {
            carrier_frequency_hz: 62.64e9,
            bandwidth_hz: 1.76e9,
            num_taps: 128,
            d_los_m: 4.0,
            angle_grid_deg: (-12..=12).map(|k| k as f64 * 5.0).collect(),
            hpbw_sensing_deg: 12.0,
            hpbw_comm_rx_deg: 120.0,
            tx_power_db: 63.0,
            noise_floor_db: f64::NEG_INFINITY,
        };
        let scene = Scene {
            mono1_pos_m: [0.0, 0.0],
            mono2_pos_m: [4.0, 0.0],
            scatterers: vec![
                PointScatterer {
                    position_m: [2.0, -1.5],
                    rcs_dbsm: 5.0,
                    label: "a".into(),
                },
                PointScatterer {
                    position_m: [1.0, 1.2],
                    rcs_dbsm: 2.0,
                    label: "b".into(),
                },
            ],
            walls: vec![],
            leakage_power_db: -18.0,
        };
        let (_, cirs) = synth::scan_monostatic(&scene, NodeId::Mono1, &cfg, 3).unwrap();
        let gates = PeakGateParams::default();
        for cir in &cirs {
            let mpcs = detect_peaks(cir, &gates).unwrap();
            assert!(mpcs.len() <= gates.k_max);
            for m in &mpcs {
                assert!(m.power_db >= gates.p_min_db);
                assert!(m.range_m >= gates.r_min_m);
            }
            for (i, x) in mpcs.iter().enumerate() {
                for y in mpcs.iter().skip(i + 1) {
                    assert!((x.excess_delay_s - y.excess_delay_s).abs() >= gates.dtau_min_s);
                }
            }
        }
    }
}
