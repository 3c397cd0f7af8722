//! Bistatic cross-section estimation referenced to the direct link path.
//!
//! * Reconstructs the total bounce-path length from the echo's excess delay
//!   over the line-of-sight arrival.
//! * Splits that path into transmitter- and receiver-side ranges using the
//!   co-located scan's range measurement.
//! * Evaluates the cross-section from the echo-to-direct power ratio and the
//!   reconstructed geometry, with the antenna-pattern weights divided back out.
//! * Separates overlapping arrivals by successive kernel-fit cancellation so
//!   echo powers near the strong direct path stay unbiased.

use num_complex::Complex64;

use crate::extract::{Mpc, PeakGateParams};
use crate::geo::{self, Association, Cluster};
use crate::model::{dist, Cir, SounderConfig, SPEED_OF_LIGHT};
use crate::synth::{
    beam_gain, component_model, fit_single_component, golden_section_max, offset_between,
};
use crate::{Error, Result};

// --- core formulas -----------------------------------------------------------

/// Total reflected-path length implied by an echo arriving `tau_ref − tau_los`
/// after the direct path of length `d_los_m`.
pub fn reconstruct_bistatic_path(tau_ref_s: f64, tau_los_s: f64, d_los_m: f64) -> Result<f64> {
    if tau_ref_s < tau_los_s {
        return Err(Error::invalid(
            "reference echo cannot arrive before the direct path",
        ));
    }
    Ok(d_los_m + SPEED_OF_LIGHT * (tau_ref_s - tau_los_s))
}

/// Splits a total bounce-path length at the reflector: the transmitter-side
/// range comes from the co-located round-trip delay, the receiver side is the
/// remainder.
pub fn split_ranges(d_bi_m: f64, tau_mono_s: f64) -> Result<(f64, f64)> {
    let r_t = SPEED_OF_LIGHT * tau_mono_s / 2.0;
    if !(r_t > 0.0) {
        return Err(Error::invalid("transmitter-side range must be positive"));
    }
    if r_t >= d_bi_m {
        return Err(Error::invalid(format!(
            "transmitter-side range {r_t:.4} m consumes the whole {d_bi_m:.4} m path"
        )));
    }
    Ok((r_t, d_bi_m - r_t))
}

/// Bistatic cross-section (dB square meters) from the echo-to-direct power
/// ratio and the reconstructed ranges.
pub fn estimate_rcs(delta_p_db: f64, r_t_m: f64, r_r_m: f64, d_los_m: f64) -> Result<f64> {
    if !(r_t_m > 0.0 && r_r_m > 0.0 && d_los_m > 0.0) {
        return Err(Error::invalid("ranges must be positive"));
    }
    Ok(
        delta_p_db + 20.0 * r_t_m.log10() + 20.0 * r_r_m.log10() - 20.0 * d_los_m.log10()
            + 10.0 * (4.0 * std::f64::consts::PI).log10(),
    )
}

/// Power ratio that would produce the given cross-section over the given
/// geometry — the exact inverse of `estimate_rcs`.
pub fn invert_for_delta_p(sigma_dbsm: f64, r_t_m: f64, r_r_m: f64, d_los_m: f64) -> Result<f64> {
    if !(r_t_m > 0.0 && r_r_m > 0.0 && d_los_m > 0.0) {
        return Err(Error::invalid("ranges must be positive"));
    }
    Ok(
        sigma_dbsm - 20.0 * r_t_m.log10() - 20.0 * r_r_m.log10() + 20.0 * d_los_m.log10()
            - 10.0 * (4.0 * std::f64::consts::PI).log10(),
    )
}

// --- component separation ----------------------------------------------------

/// Splits a snapshot into band-limited components by successive cancellation:
/// repeatedly fit the strongest remaining peak with the sampled-grid kernel,
/// subtract its full-length model, and finish with one refit sweep so mutually
/// overlapping components do not bias each other. Components weaker than
/// `p_min_db` are left in the residual. Returns (fractional tap, complex
/// amplitude) pairs, strongest first.
pub fn estimate_components(
    cir: &Cir,
    max_components: usize,
    p_min_db: f64,
) -> Vec<(f64, Complex64)> {
    let n = cir.taps.len();
    if n == 0 {
        return Vec::new();
    }
    let mut residual = cir.taps.clone();
    let mut comps: Vec<(f64, Complex64)> = Vec::new();
    let floor_amp = 10f64.powf(p_min_db / 20.0);
    for _ in 0..max_components {
        let (imax, peak) = residual
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty residual");
        if peak < floor_amp {
            break;
        }
        let (mu, amp) = fit_single_component(&residual, imax);
        let model = component_model(mu, amp, n);
        for (r, m) in residual.iter_mut().zip(&model) {
            *r -= m;
        }
        comps.push((mu, amp));
    }
    // Refit each component against the residual with itself restored: the
    // second pass sees the other components already removed.
    for i in 0..comps.len() {
        let (mu_old, amp_old) = comps[i];
        let model = component_model(mu_old, amp_old, n);
        for (r, m) in residual.iter_mut().zip(&model) {
            *r += m;
        }
        let around = (mu_old.round() as i64).rem_euclid(n as i64) as usize;
        let (mu, amp) = fit_single_component(&residual, around);
        let model = component_model(mu, amp, n);
        for (r, m) in residual.iter_mut().zip(&model) {
            *r -= m;
        }
        comps[i] = (mu, amp);
    }
    comps.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()));
    comps
}

// --- reflection-point selection ----------------------------------------------

/// Picks the point on a reflector cluster where the link actually bounces. A
/// single member speaks for itself. A line-like cluster (perpendicular RMS
/// ≤ 7.5 cm — an extended flat reflector) is refined to the minimum-path-sum
/// point along its axis, which is the specular point of the fitted line; the
/// refinement is kept only when that path sum agrees with the measured one to
/// 0.3 m. Anything else — a compact blob seen from several angles — uses the
/// centroid.
pub fn specular_point_on_cluster(
    members: &[[f64; 2]],
    p_t: [f64; 2],
    p_r: [f64; 2],
    d_bi_m: f64,
) -> [f64; 2] {
    if members.len() == 1 {
        return members[0];
    }
    let (centroid, axis, perp_rms) = geo::principal_axis(members);
    if perp_rms <= 0.075 {
        let at = |t: f64| [centroid[0] + t * axis[0], centroid[1] + t * axis[1]];
        let path_sum = |t: f64| {
            let p = at(t);
            dist(p, p_t) + dist(p, p_r)
        };
        let t = golden_section_max(-5.0, 5.0, 90, |t| -path_sum(t));
        if (path_sum(t) - d_bi_m).abs() <= 0.3 {
            return at(t);
        }
    }
    centroid
}

// --- pipeline ----------------------------------------------------------------

/// One reflector's reconstructed link geometry and cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsEstimate {
    /// Label of the cluster the echo was associated with.
    pub label: String,
    /// Total bounce-path length (meters).
    pub d_bi_m: f64,
    /// Transmitter-side range (meters).
    pub r_t_m: f64,
    /// Receiver-side range (meters).
    pub r_r_m: f64,
    /// Echo-to-direct power ratio (dB), antenna-pattern weights removed; feeds
    /// `estimate_rcs` directly.
    pub delta_p_db: f64,
    /// Estimated cross-section (dB square meters).
    pub sigma_dbsm: f64,
}

/// Everything the cross-section stage produced, including the intermediate
/// association table and the direct-path calibration values.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsReport {
    pub estimates: Vec<RcsEstimate>,
    pub associations: Vec<Association>,
    pub tau_los_s: f64,
    pub p_los_db: f64,
}

/// Direct-path reference and resolvable echoes separated out of one link
/// snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkEchoes {
    /// Absolute delay of the strongest (direct) arrival (s).
    pub tau_los_s: f64,
    /// Fitted power of the direct arrival (dB).
    pub p_los_db: f64,
    /// Gated echoes, strongest first; excess delays are relative to the direct
    /// arrival and `range_m` carries the excess path length.
    pub echoes: Vec<Mpc>,
}

/// Separates one link snapshot into the direct-path reference and the echo
/// candidates that clear the gates, via successive component cancellation (a
/// plain peak scan cannot read an echo sitting on the direct path's kernel
/// tail).
pub fn separate_link_echoes(bi_cir: &Cir, gates: &PeakGateParams) -> Result<LinkEchoes> {
    gates.validate()?;
    let comps = estimate_components(bi_cir, 12, gates.p_min_db);
    let Some(&(mu_los, amp_los)) = comps.first() else {
        return Err(Error::degenerate(
            "no direct-path arrival above the detection threshold",
        ));
    };
    let tau_los = bi_cir.delay_offset_s + mu_los * bi_cir.tap_spacing_s;
    let p_los = 10.0 * amp_los.norm_sqr().log10();

    // Echo candidates: resolvable from the direct path and from each other.
    let mut candidates: Vec<Mpc> = Vec::new();
    for &(mu, amp) in &comps[1..] {
        let tau = bi_cir.delay_offset_s + mu * bi_cir.tap_spacing_s;
        let excess = tau - tau_los;
        let power_db = 10.0 * amp.norm_sqr().log10();
        if excess < gates.dtau_min_s || power_db < gates.p_min_db {
            continue;
        }
        candidates.push(Mpc {
            steering_angle_deg: None,
            excess_delay_s: excess,
            power_db,
            range_m: SPEED_OF_LIGHT * excess,
            tap_index: (mu.round() as i64).rem_euclid(bi_cir.taps.len().max(1) as i64) as usize,
        });
    }
    candidates.sort_by(|a, b| b.power_db.total_cmp(&a.power_db));
    let mut gated: Vec<Mpc> = Vec::new();
    for c in candidates {
        if gated
            .iter()
            .all(|k| (c.excess_delay_s - k.excess_delay_s).abs() >= gates.dtau_min_s)
        {
            gated.push(c);
            if gated.len() == gates.k_max {
                break;
            }
        }
    }
    Ok(LinkEchoes {
        tau_los_s: tau_los,
        p_los_db: p_los,
        echoes: gated,
    })
}

/// Full cross-section stage over one link snapshot: separate the arrivals,
/// take the strongest as the direct-path reference, gate and associate the
/// rest to the reflector clusters, and chain path reconstruction, range
/// splitting, beam compensation, and the cross-section formula per match.
pub fn rcs_pipeline(
    bi_cir: &Cir,
    gates: &PeakGateParams,
    clusters: &[Cluster],
    config: &SounderConfig,
    p_t: [f64; 2],
    p_r: [f64; 2],
    assoc_tol_s: f64,
) -> Result<RcsReport> {
    config.validate()?;
    let d_los = config.d_los_m;
    let link = separate_link_echoes(bi_cir, gates)?;
    let (tau_los, p_los) = (link.tau_los_s, link.p_los_db);

    let associations = geo::associate_mpcs(&link.echoes, clusters, p_t, p_r, d_los, assoc_tol_s)?;

    let mut estimates = Vec::new();
    for assoc in &associations {
        let Some(label) = assoc.cluster_label.as_deref() else {
            continue;
        };
        let cluster = clusters
            .iter()
            .find(|c| c.label == label)
            .expect("association references a known cluster");
        let tau_ref = tau_los + assoc.measured_excess_delay_s;
        let d_bi = reconstruct_bistatic_path(tau_ref, tau_los, d_los)?;
        let members: Vec<[f64; 2]> = cluster.members.iter().map(|m| m.position_m).collect();
        let sp = specular_point_on_cluster(&members, p_t, p_r, d_bi);
        let (r_t, r_r) = split_ranges(d_bi, 2.0 * dist(sp, p_t) / SPEED_OF_LIGHT)?;
        let pattern_db = 10.0
            * beam_gain(offset_between(p_t, sp, p_r), config.hpbw_comm_rx_deg).log10()
            + 10.0 * beam_gain(offset_between(p_r, sp, p_t), config.hpbw_comm_rx_deg).log10();
        let delta_p = (assoc.comm_mpc.power_db - p_los) - pattern_db;
        let sigma = estimate_rcs(delta_p, r_t, r_r, d_los)?;
        estimates.push(RcsEstimate {
            label: label.to_string(),
            d_bi_m: d_bi,
            r_t_m: r_t,
            r_r_m: r_r,
            delta_p_db: delta_p,
            sigma_dbsm: sigma,
        });
    }
    estimates
        .sort_by(|a, b| (a.label.len(), a.label.as_str()).cmp(&(b.label.len(), b.label.as_str())));
    Ok(RcsReport {
        estimates,
        associations,
        tau_los_s: tau_los,
        p_los_db: p_los,
    })
}

// --- tests -------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::ScattererPoint;
    use crate::model::{CirKind, NodeId, PointScatterer, Scene, WallSegment};
    use crate::synth;

    #[test]
    fn zero_excess_reconstructs_the_direct_length() {
        let d = reconstruct_bistatic_path(13.3e-9, 13.3e-9, 4.0).unwrap();
        assert_eq!(d, 4.0);
    }

    #[test]
    fn ten_point_two_two_ns_excess_reconstructs_about_seven_meters() {
        let d = reconstruct_bistatic_path(10.22e-9, 0.0, 4.0).unwrap();
        assert!((d - (4.0 + SPEED_OF_LIGHT * 10.22e-9)).abs() < 1e-12);
        assert!((d - 7.0646).abs() < 2e-3, "{d}");
    }

    #[test]
    fn two_point_two_seven_ns_excess_reconstructs_four_point_six_eight() {
        let d = reconstruct_bistatic_path(2.27e-9, 0.0, 4.0).unwrap();
        assert!((d - 4.6805).abs() < 1e-4, "{d}");
    }

    #[test]
    fn acausal_reference_is_rejected() {
        assert!(reconstruct_bistatic_path(1e-9, 2e-9, 4.0).is_err());
    }

    #[test]
    fn split_reproduces_the_corner_ranges() {
        let tau_mono = 2.0 * 3.662 / SPEED_OF_LIGHT;
        let (r_t, r_r) = split_ranges(7.066, tau_mono).unwrap();
        assert!((r_t - 3.662).abs() < 1e-12);
        assert!((r_r - 3.404).abs() < 1e-12);
    }

    #[test]
    fn symmetric_split_halves_the_path() {
        let tau_mono = 2.0 / SPEED_OF_LIGHT;
        let (r_t, r_r) = split_ranges(2.0, tau_mono).unwrap();
        assert!((r_t - 1.0).abs() < 1e-12);
        assert!((r_r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_splits_are_rejected() {
        let tau_for = |r: f64| 2.0 * r / SPEED_OF_LIGHT;
        assert!(split_ranges(2.0, tau_for(2.0)).is_err());
        assert!(split_ranges(2.0, tau_for(2.5)).is_err());
        assert!(split_ranges(2.0, 0.0).is_err());
        assert!(split_ranges(2.0, -1e-9).is_err());
    }

    #[test]
    fn unit_geometry_reduces_to_the_sphere_constant() {
        let sigma = estimate_rcs(0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((sigma - 10.0 * (4.0 * std::f64::consts::PI).log10()).abs() < 1e-12);
        assert!((sigma - 10.992).abs() < 1e-3);
    }

    #[test]
    fn corner_geometry_with_known_ratio_gives_the_published_wall_value() {
        let sigma = estimate_rcs(-20.11, 3.662, 3.404, 4.0).unwrap();
        assert!((sigma - 0.76).abs() < 0.01, "{sigma}");
    }

    #[test]
    fn scaling_all_ranges_shifts_sigma_by_twenty_log() {
        let base = estimate_rcs(-15.0, 3.1, 2.2, 4.0).unwrap();
        for k in [0.5, 2.0, 7.3] {
            let scaled = estimate_rcs(-15.0, 3.1 * k, 2.2 * k, 4.0 * k).unwrap();
            assert!((scaled - base - 20.0 * k.log10()).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_p_inversion_round_trips() {
        let (r_t, r_r, d) = (3.662, 3.404, 4.0);
        for sigma in [-22.5, 0.76, 8.73] {
            let dp = invert_for_delta_p(sigma, r_t, r_r, d).unwrap();
            let back = estimate_rcs(dp, r_t, r_r, d).unwrap();
            assert!((back - sigma).abs() < 1e-9);
        }
    }

    #[test]
    fn non_positive_ranges_are_rejected() {
        assert!(estimate_rcs(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(estimate_rcs(0.0, 1.0, -2.0, 1.0).is_err());
        assert!(invert_for_delta_p(0.0, 1.0, 1.0, 0.0).is_err());
    }

    fn test_config() -> SounderConfig {
        SounderConfig {
            carrier_frequency_hz: 62.64e9,
            bandwidth_hz: 1.76e9,
            num_taps: 128,
            d_los_m: 4.0,
            angle_grid_deg: (-12..=12).map(|k| k as f64 * 5.0).collect(),
            hpbw_sensing_deg: 12.0,
            hpbw_comm_rx_deg: 120.0,
            tx_power_db: 63.0,
            noise_floor_db: f64::NEG_INFINITY,
        }
    }

    #[test]
    fn successive_cancellation_recovers_three_well_separated_components() {
        let cfg = test_config();
        let n = cfg.num_taps;
        let truth = [
            (10.0, Complex64::from_polar(10f64.powf(-20.0 / 20.0), 0.3)),
            (33.41, Complex64::from_polar(10f64.powf(-35.0 / 20.0), -1.2)),
            (70.2, Complex64::from_polar(10f64.powf(-50.0 / 20.0), 2.0)),
        ];
        let mut taps = vec![Complex64::new(0.0, 0.0); n];
        for &(mu, amp) in &truth {
            for (t, m) in taps.iter_mut().zip(synth::component_model(mu, amp, n)) {
                *t += m;
            }
        }
        let cir = Cir {
            taps,
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        let comps = estimate_components(&cir, 12, -55.0);
        assert_eq!(comps.len(), 3);
        for (found, want) in comps.iter().zip(&truth) {
            assert!(
                (found.0 - want.0).abs() < 1e-3,
                "mu {} vs {}",
                found.0,
                want.0
            );
            let err_db = 20.0 * (found.1.norm() / want.1.norm()).log10();
            assert!(err_db.abs() < 0.01, "amp error {err_db} dB");
        }
    }

    #[test]
    fn cancellation_respects_the_floor_and_the_cap() {
        let cfg = test_config();
        let n = cfg.num_taps;
        let mut taps = vec![Complex64::new(0.0, 0.0); n];
        for (mu, p) in [(10.0, -20.0), (40.0, -35.0), (90.0, -50.0)] {
            let amp = Complex64::from_polar(10f64.powf(p / 20.0), 0.0);
            for (t, m) in taps.iter_mut().zip(synth::component_model(mu, amp, n)) {
                *t += m;
            }
        }
        let cir = Cir {
            taps,
            tap_spacing_s: 1e-9,
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        assert_eq!(estimate_components(&cir, 12, -45.0).len(), 2);
        assert_eq!(estimate_components(&cir, 1, -55.0).len(), 1);
        assert!(estimate_components(&cir, 12, 100.0).is_empty());
    }

    #[test]
    fn specular_selection_refines_a_line_to_the_mirror_point() {
        let wall = WallSegment {
            endpoint_a_m: [1.658480, -3.626910],
            endpoint_b_m: [4.441670, -1.853820],
            rcs_dbsm: 0.0,
            label: String::new(),
        };
        let p_t = [0.0, 0.0];
        let p_r = [4.0, 0.0];
        let sp_true = synth::bistatic_specular_point(&wall, p_t, p_r).unwrap();
        let d_bi = dist(sp_true, p_t) + dist(sp_true, p_r);
        // Two points on the wall line, away from the specular point.
        let d = wall.direction();
        let a = wall.endpoint_a_m;
        let members = [
            [a[0] + 0.4 * d[0], a[1] + 0.4 * d[1]],
            [a[0] + 1.1 * d[0], a[1] + 1.1 * d[1]],
        ];
        let sp = specular_point_on_cluster(&members, p_t, p_r, d_bi);
        assert!(dist(sp, sp_true) < 1e-6, "off by {}", dist(sp, sp_true));
    }

    #[test]
    fn specular_selection_keeps_blobs_and_inconsistent_lines_at_the_centroid() {
        let p_t = [0.0, 0.0];
        let p_r = [4.0, 0.0];
        // A round blob: perpendicular scatter well above the line threshold.
        let blob = [
            [2.0, 1.0],
            [2.3, 1.25],
            [1.85, 1.3],
            [2.15, 0.8],
            [1.95, 1.12],
        ];
        let sp = specular_point_on_cluster(&blob, p_t, p_r, 5.0);
        let (centroid, _, _) = geo::principal_axis(&blob);
        assert!(dist(sp, centroid) < 1e-12);
        // A collinear pair whose minimum path sum disagrees with the measured
        // one: the refinement is rejected.
        let line = [[1.0, -2.0], [1.4, -2.0]];
        let sp2 = specular_point_on_cluster(&line, p_t, p_r, 9.5);
        assert!(dist(sp2, [1.2, -2.0]) < 1e-12);
        // A single member always speaks for itself.
        let sp3 = specular_point_on_cluster(&[[2.5, -1.8]], p_t, p_r, 5.42);
        assert_eq!(sp3, [2.5, -1.8]);
    }

    fn one_point_scene(sigma_dbsm: f64) -> Scene {
        Scene {
            mono1_pos_m: [0.0, 0.0],
            mono2_pos_m: [4.0, 0.0],
            scatterers: vec![PointScatterer {
                position_m: [2.5, -1.8],
                rcs_dbsm: sigma_dbsm,
                label: "target".into(),
            }],
            walls: vec![],
            leakage_power_db: -18.0,
        }
    }

    #[test]
    fn pipeline_recovers_a_point_scatterer_cross_section() {
        let cfg = test_config();
        let scene = one_point_scene(5.0);
        let bi = synth::render_bistatic(&scene, &cfg, 7).unwrap();
        let r_t_true = dist([2.5, -1.8], [0.0, 0.0]);
        let clusters = vec![Cluster {
            members: vec![ScattererPoint {
                position_m: [2.5, -1.8],
                source: NodeId::Mono1,
                steering_angle_deg: 35.0,
                range_m: r_t_true,
                power_db: -40.0,
            }],
            centroid_m: [2.5, -1.8],
            label: "C1".into(),
        }];
        let report = rcs_pipeline(
            &bi,
            &PeakGateParams::default(),
            &clusters,
            &cfg,
            [0.0, 0.0],
            [4.0, 0.0],
            5e-9,
        )
        .unwrap();
        assert_eq!(report.estimates.len(), 1);
        let est = &report.estimates[0];
        assert_eq!(est.label, "C1");
        assert!(
            (est.sigma_dbsm - 5.0).abs() < 0.5,
            "sigma {}",
            est.sigma_dbsm
        );
        assert!((est.r_t_m - r_t_true).abs() < 1e-6);
        assert!((est.r_t_m + est.r_r_m - est.d_bi_m).abs() < 1e-12);
        // The stored ratio and geometry reproduce the stored sigma exactly.
        let again = estimate_rcs(est.delta_p_db, est.r_t_m, est.r_r_m, cfg.d_los_m).unwrap();
        assert!((again - est.sigma_dbsm).abs() < 1e-9);
        // The direct-path reference sits at the node separation's delay.
        assert!((report.tau_los_s - 4.0 / SPEED_OF_LIGHT).abs() < 2e-12);
    }

    #[test]
    fn pipeline_with_no_reflectors_returns_no_estimates() {
        let cfg = test_config();
        let scene = Scene {
            mono1_pos_m: [0.0, 0.0],
            mono2_pos_m: [4.0, 0.0],
            scatterers: vec![],
            walls: vec![],
            leakage_power_db: -18.0,
        };
        let bi = synth::render_bistatic(&scene, &cfg, 7).unwrap();
        let report = rcs_pipeline(
            &bi,
            &PeakGateParams::default(),
            &[],
            &cfg,
            [0.0, 0.0],
            [4.0, 0.0],
            5e-9,
        )
        .unwrap();
        assert!(report.estimates.is_empty());
        assert!(report.associations.is_empty());
    }

    #[test]
    fn silent_snapshot_has_no_direct_path_reference() {
        let cfg = test_config();
        let cir = Cir {
            taps: vec![Complex64::new(0.0, 0.0); cfg.num_taps],
            tap_spacing_s: cfg.tap_spacing_s(),
            delay_offset_s: 0.0,
            kind: CirKind::Bistatic,
        };
        let err = rcs_pipeline(
            &cir,
            &PeakGateParams::default(),
            &[],
            &cfg,
            [0.0, 0.0],
            [4.0, 0.0],
            5e-9,
        );
        assert!(err.is_err());
    }

    #[test]
    fn unassociated_echoes_are_skipped_not_fatal() {
        let cfg = test_config();
        let scene = one_point_scene(5.0);
        let bi = synth::render_bistatic(&scene, &cfg, 7).unwrap();
        // No clusters: the echo stays unmatched, the run still succeeds.
        let report = rcs_pipeline(
            &bi,
            &PeakGateParams::default(),
            &[],
            &cfg,
            [0.0, 0.0],
            [4.0, 0.0],
            5e-9,
        )
        .unwrap();
        assert!(report.estimates.is_empty());
        assert_eq!(report.associations.len(), 1);
        assert!(report.associations[0].cluster_label.is_none());
    }
}
