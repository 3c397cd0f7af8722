//! Band-limited forward channel model used as the ground-truth oracle.
//!
//! * Enumerates propagation paths for co-located (round-trip) and separated-node
//!   (one-way) links from a scene: direct coupling, line of sight, point echoes,
//!   and mirror-point reflections off wall segments.
//! * Renders path lists to impulse responses on the sounder's frequency grid, with
//!   deterministic per-path phases derived from a seed.
//! * Provides the periodic interpolation kernel of the sampled grid plus a
//!   fractional-delay single-component fitter shared by the inverse stages.
//! * Adds seeded circularly-symmetric Gaussian noise when a finite floor is set.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    dist, dot, sub, Cir, CirKind, NodeId, Padp, Scene, SounderConfig, WallSegment, SPEED_OF_LIGHT,
};
use crate::{model, Error, Result};

// --- path components ---------------------------------------------------------

/// What produced a propagation path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathOrigin {
    /// Direct node-to-node path of a separated link.
    Los,
    /// Direct coupling inside a co-located transceiver, at zero delay.
    Leakage,
    /// Echo off the named reflector.
    Scatterer(String),
}

impl PathOrigin {
    /// Stable name used to derive the path's deterministic phase.
    pub fn phase_label(&self) -> String {
        match self {
            PathOrigin::Los => "los".to_string(),
            PathOrigin::Leakage => "leakage".to_string(),
            PathOrigin::Scatterer(label) => format!("scatterer:{label}"),
        }
    }
}

/// One resolvable propagation path prior to band-limiting.
#[derive(Debug, Clone, PartialEq)]
pub struct PathComponent {
    pub delay_s: f64,
    pub power_db: f64,
    pub origin: PathOrigin,
}

// --- beam model --------------------------------------------------------------

/// Gaussian mainlobe power gain, normalized to 1 at boresight; falls to exactly
/// one half at `offset = ±hpbw/2`.
pub fn beam_gain(offset_deg: f64, hpbw_deg: f64) -> f64 {
    assert!(hpbw_deg > 0.0, "beamwidth must be positive");
    let x = offset_deg / hpbw_deg;
    (-4.0 * std::f64::consts::LN_2 * x * x).exp()
}

/// Steering angle at which a co-located node sees the given point, following the
/// same sign convention the back-projection inverts.
pub fn aspect_angle_deg(node: NodeId, node_pos: [f64; 2], point: [f64; 2]) -> f64 {
    let d = sub(point, node_pos);
    let theta = match node {
        NodeId::Mono1 => (-d[1]).atan2(d[0]),
        NodeId::Mono2 => (-d[1]).atan2(-d[0]),
    };
    theta.to_degrees()
}

/// Angle (degrees, in `[0, 180]`) between the directions from `origin` toward
/// `target` and toward `boresight_at`.
pub(crate) fn offset_between(origin: [f64; 2], target: [f64; 2], boresight_at: [f64; 2]) -> f64 {
    let u = sub(target, origin);
    let v = sub(boresight_at, origin);
    let cross = u[0] * v[1] - u[1] * v[0];
    cross.abs().atan2(dot(u, v)).to_degrees()
}

// --- specular geometry -------------------------------------------------------

/// Reflection point on a wall for a co-located node: the foot of the
/// perpendicular, provided it falls inside the segment.
pub fn mono_specular_point(wall: &WallSegment, node_pos: [f64; 2]) -> Option<[f64; 2]> {
    let d = wall.direction();
    let s = dot(sub(node_pos, wall.endpoint_a_m), d);
    if s < 0.0 || s > wall.length_m() {
        return None;
    }
    Some([
        wall.endpoint_a_m[0] + s * d[0],
        wall.endpoint_a_m[1] + s * d[1],
    ])
}

/// Reflection point on a wall for a separated pair: mirror the receiver across
/// the wall line and intersect the transmitter-to-image segment with it. Returns
/// `None` when the nodes are not strictly on the same side or the intersection
/// leaves the segment.
pub fn bistatic_specular_point(
    wall: &WallSegment,
    p_t: [f64; 2],
    p_r: [f64; 2],
) -> Option<[f64; 2]> {
    let d = wall.direction();
    let n = [-d[1], d[0]];
    let off_t = dot(sub(p_t, wall.endpoint_a_m), n);
    let off_r = dot(sub(p_r, wall.endpoint_a_m), n);
    if off_t * off_r <= 0.0 {
        return None;
    }
    let image = [p_r[0] - 2.0 * off_r * n[0], p_r[1] - 2.0 * off_r * n[1]];
    // Signed offset varies linearly from off_t to -off_r along p_t -> image.
    let u = off_t / (off_t + off_r);
    let sp = [
        p_t[0] + u * (image[0] - p_t[0]),
        p_t[1] + u * (image[1] - p_t[1]),
    ];
    let s = dot(sub(sp, wall.endpoint_a_m), d);
    if s < 0.0 || s > wall.length_m() {
        return None;
    }
    Some(sp)
}

// --- path enumeration --------------------------------------------------------

const MIN_RANGE_M: f64 = 1e-9;

fn round_trip_echo_power_db(config: &SounderConfig, range: f64, rcs_dbsm: f64) -> f64 {
    let lambda = config.wavelength_m();
    let sigma = 10f64.powf(rcs_dbsm / 10.0);
    let four_pi_cubed = (4.0 * PI).powi(3);
    config.tx_power_db + 10.0 * (lambda * lambda * sigma / (four_pi_cubed * range.powi(4))).log10()
}

fn one_way_echo_power_db(config: &SounderConfig, r_t: f64, r_r: f64, rcs_dbsm: f64) -> f64 {
    let lambda = config.wavelength_m();
    let sigma = 10f64.powf(rcs_dbsm / 10.0);
    let four_pi_cubed = (4.0 * PI).powi(3);
    config.tx_power_db
        + 10.0 * (lambda * lambda * sigma / (four_pi_cubed * r_t * r_t * r_r * r_r)).log10()
}

/// Lists the paths a co-located node receives at one steering angle: the
/// zero-delay coupling component plus one echo per visible reflector, weighted
/// by the steered beam on both the outbound and return passes.
pub fn enumerate_paths_mono(
    scene: &Scene,
    node: NodeId,
    steering_deg: f64,
    config: &SounderConfig,
) -> Result<Vec<PathComponent>> {
    let pos = scene.node_pos(node);
    let mut paths = vec![PathComponent {
        delay_s: 0.0,
        power_db: scene.leakage_power_db,
        origin: PathOrigin::Leakage,
    }];

    let mut push_echo = |point: [f64; 2], rcs_dbsm: f64, label: String| -> Result<()> {
        let range = dist(point, pos);
        if range < MIN_RANGE_M {
            return Err(Error::invalid(format!(
                "reflector '{label}' coincides with node {}",
                node.name()
            )));
        }
        let aspect = aspect_angle_deg(node, pos, point);
        let gain = beam_gain(aspect - steering_deg, config.hpbw_sensing_deg);
        paths.push(PathComponent {
            delay_s: 2.0 * range / SPEED_OF_LIGHT,
            power_db: round_trip_echo_power_db(config, range, rcs_dbsm) + 20.0 * gain.log10(),
            origin: PathOrigin::Scatterer(label),
        });
        Ok(())
    };

    for s in &scene.scatterers {
        push_echo(s.position_m, s.rcs_dbsm, s.label.clone())?;
    }
    for (i, wall) in scene.walls.iter().enumerate() {
        if let Some(foot) = mono_specular_point(wall, pos) {
            push_echo(foot, wall.rcs_dbsm, wall_label(wall, i))?;
        }
    }
    Ok(paths)
}

/// Lists the paths of the separated-node link: line of sight at the free-space
/// power, plus one echo per reflector. Both ends use the wide link beam — the
/// transmitter aims at the receiver and vice versa — so echo and reference paths
/// see comparable antenna gains and the gain terms cancel in power ratios.
pub fn enumerate_paths_bi(scene: &Scene, config: &SounderConfig) -> Result<Vec<PathComponent>> {
    let p_t = scene.mono1_pos_m;
    let p_r = scene.mono2_pos_m;
    let d_los = dist(p_t, p_r);
    if d_los < MIN_RANGE_M {
        return Err(Error::invalid("link nodes coincide"));
    }
    let lambda = config.wavelength_m();
    let mut paths = vec![PathComponent {
        delay_s: d_los / SPEED_OF_LIGHT,
        power_db: config.tx_power_db + 20.0 * (lambda / (4.0 * PI * d_los)).log10(),
        origin: PathOrigin::Los,
    }];

    let mut push_echo = |point: [f64; 2], rcs_dbsm: f64, label: String| -> Result<()> {
        let r_t = dist(point, p_t);
        let r_r = dist(point, p_r);
        if r_t < MIN_RANGE_M || r_r < MIN_RANGE_M {
            return Err(Error::invalid(format!(
                "reflector '{label}' coincides with a link node"
            )));
        }
        let g_t = beam_gain(offset_between(p_t, point, p_r), config.hpbw_comm_rx_deg);
        let g_r = beam_gain(offset_between(p_r, point, p_t), config.hpbw_comm_rx_deg);
        paths.push(PathComponent {
            delay_s: (r_t + r_r) / SPEED_OF_LIGHT,
            power_db: one_way_echo_power_db(config, r_t, r_r, rcs_dbsm)
                + 10.0 * g_t.log10()
                + 10.0 * g_r.log10(),
            origin: PathOrigin::Scatterer(label),
        });
        Ok(())
    };

    for s in &scene.scatterers {
        push_echo(s.position_m, s.rcs_dbsm, s.label.clone())?;
    }
    for (i, wall) in scene.walls.iter().enumerate() {
        if let Some(sp) = bistatic_specular_point(wall, p_t, p_r) {
            push_echo(sp, wall.rcs_dbsm, wall_label(wall, i))?;
        }
    }
    Ok(paths)
}

/// Name used for a wall's echoes: its own label, or an index-derived fallback.
pub fn wall_label(wall: &WallSegment, index: usize) -> String {
    if wall.label.is_empty() {
        format!("wall{}", index + 1)
    } else {
        wall.label.clone()
    }
}

// --- rendering ---------------------------------------------------------------

/// Deterministic per-path phase: a hash of the path's name mixed with the seed.
fn path_phase(phase_seed: u64, label: &str) -> f64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &byte in label.as_bytes() {
        h = (h ^ byte as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut rng =
        ChaCha8Rng::seed_from_u64(mix64(h ^ phase_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    rng.gen::<f64>() * TAU
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Samples the listed paths onto the sounder's frequency grid and inverts to an
/// impulse response. Each path contributes its linear amplitude with a
/// deterministic phase; delays at or beyond the unambiguous span are rejected
/// rather than wrapped.
pub fn render_cir(
    paths: &[PathComponent],
    config: &SounderConfig,
    phase_seed: u64,
    kind: CirKind,
) -> Result<Cir> {
    let n = config.num_taps;
    let span = config.unambiguous_span_s();
    let df = config.freq_resolution_hz();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for p in paths {
        if p.delay_s < 0.0 {
            return Err(Error::invalid("path delay must be nonnegative"));
        }
        if p.delay_s >= span {
            return Err(Error::invalid(format!(
                "path delay {:.3} ns reaches beyond the unambiguous span {:.3} ns",
                p.delay_s * 1e9,
                span * 1e9
            )));
        }
        if p.power_db == f64::NEG_INFINITY {
            continue;
        }
        let amp = 10f64.powf(p.power_db / 20.0);
        let phase = path_phase(phase_seed, &p.origin.phase_label());
        for (k, slot) in spectrum.iter_mut().enumerate() {
            let angle = phase - TAU * (k as f64 * df) * p.delay_s;
            *slot += Complex64::from_polar(amp, angle);
        }
    }
    // Inverse DFT of the sampled spectrum.
    let mut taps = vec![Complex64::new(0.0, 0.0); n];
    let nf = n as f64;
    for (nn, tap) in taps.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &s) in spectrum.iter().enumerate() {
            let angle = TAU * (k as f64) * (nn as f64) / nf;
            acc += s * Complex64::from_polar(1.0, angle);
        }
        *tap = acc / nf;
    }
    Ok(Cir {
        taps,
        tap_spacing_s: config.tap_spacing_s(),
        delay_offset_s: 0.0,
        kind,
    })
}

/// Value at integer tap offset `x` of a unit path rendered through the sampled
/// frequency grid: the periodic interpolation kernel of the grid. Equals 1 at
/// `x = 0` and vanishes at every other integer.
pub fn dirichlet_kernel(x: f64, num_taps: usize) -> Complex64 {
    let nf = num_taps as f64;
    let s_small = (PI * x / nf).sin();
    if s_small.abs() < 1e-300 {
        return Complex64::new(1.0, 0.0);
    }
    let mag = (PI * x).sin() / (nf * s_small);
    let phase = PI * x * (nf - 1.0) / nf;
    Complex64::new(mag * phase.cos(), mag * phase.sin())
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section_max(lo: f64, hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (lo, hi);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Least-squares fit of one band-limited component near a tap: searches the
/// fractional position within ±0.6 taps of `around_tap` and returns the refined
/// position (in taps) with the fitted complex amplitude. The fit uses a short
/// cyclic window, so nearby strong components outside it bias the result only
/// through their decaying kernel tails.
pub fn fit_single_component(taps: &[Complex64], around_tap: usize) -> (f64, Complex64) {
    let n = taps.len();
    let half = 2usize.min(n.saturating_sub(1) / 2);
    let window: Vec<usize> = (-(half as i64)..=half as i64)
        .map(|d| (around_tap as i64 + d).rem_euclid(n as i64) as usize)
        .collect();
    let score = |mu: f64| -> f64 {
        let mut corr = Complex64::new(0.0, 0.0);
        let mut kk = 0.0;
        for &w in &window {
            let k = dirichlet_kernel(w as f64 - mu, n);
            corr += taps[w] * k.conj();
            kk += k.norm_sqr();
        }
        if kk == 0.0 {
            0.0
        } else {
            corr.norm_sqr() / kk
        }
    };
    let lo = around_tap as f64 - 0.6;
    let hi = around_tap as f64 + 0.6;
    let mu = golden_section_max(lo, hi, 70, score);
    let mut corr = Complex64::new(0.0, 0.0);
    let mut kk = 0.0;
    for &w in &window {
        let k = dirichlet_kernel(w as f64 - mu, n);
        corr += taps[w] * k.conj();
        kk += k.norm_sqr();
    }
    (mu, corr / kk)
}

/// Full-length model of one fitted component, for subtraction.
pub fn component_model(mu: f64, amp: Complex64, num_taps: usize) -> Vec<Complex64> {
    (0..num_taps)
        .map(|nn| amp * dirichlet_kernel(nn as f64 - mu, num_taps))
        .collect()
}

// --- noise -------------------------------------------------------------------

/// Adds circularly-symmetric complex Gaussian noise with the given average
/// per-tap power; a floor of `-inf` returns the input unchanged. Deterministic
/// per seed.
pub fn add_noise(cir: &Cir, noise_power_db: f64, seed: u64) -> Cir {
    if noise_power_db == f64::NEG_INFINITY {
        return cir.clone();
    }
    let sigma_component = (10f64.powf(noise_power_db / 10.0) / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = cir.clone();
    for tap in &mut out.taps {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        *tap += Complex64::new(r * c * sigma_component, r * s * sigma_component);
    }
    out
}

fn noise_seed(seed: u64, stream: u64, step: u64) -> u64 {
    mix64(mix64(seed ^ stream.wrapping_mul(0xa076_1d64_78bd_642f)) ^ step)
}

// --- scans -------------------------------------------------------------------

/// Sweeps one co-located node over the configured steering grid: per-angle path
/// enumeration, rendering, and (optionally) noise. Returns the excess-delay
/// power profile plus the raw per-angle impulse responses. Path phases reuse the
/// same seed at every angle, so a reflector keeps its phase across the sweep.
pub fn scan_monostatic(
    scene: &Scene,
    node: NodeId,
    config: &SounderConfig,
    seed: u64,
) -> Result<(Padp, Vec<Cir>)> {
    config.validate()?;
    scene.validate(config)?;
    let mut cirs = Vec::with_capacity(config.angle_grid_deg.len());
    let mut power = Vec::with_capacity(config.angle_grid_deg.len());
    for (ai, &angle) in config.angle_grid_deg.iter().enumerate() {
        let paths = enumerate_paths_mono(scene, node, angle, config)?;
        let clean = render_cir(
            &paths,
            config,
            seed,
            CirKind::Monostatic {
                steering_deg: angle,
            },
        )?;
        let noisy = add_noise(
            &clean,
            config.noise_floor_db,
            noise_seed(seed, node.index() as u64, ai as u64),
        );
        power.push((0..config.num_taps).map(|k| noisy.power_db(k)).collect());
        cirs.push(noisy);
    }
    let raw = Padp {
        angles_deg: config.angle_grid_deg.clone(),
        delays_s: (0..config.num_taps)
            .map(|k| k as f64 * config.tap_spacing_s())
            .collect(),
        power_db: power,
    };
    Ok((model::normalize_padp(&raw)?, cirs))
}

/// Renders the separated-node link snapshot, with noise when configured.
pub fn render_bistatic(scene: &Scene, config: &SounderConfig, seed: u64) -> Result<Cir> {
    config.validate()?;
    scene.validate(config)?;
    let paths = enumerate_paths_bi(scene, config)?;
    let clean = render_cir(&paths, config, seed, CirKind::Bistatic)?;
    Ok(add_noise(
        &clean,
        config.noise_floor_db,
        noise_seed(seed, 2, 0),
    ))
}

// --- tests -------------------------------------------------------------------
