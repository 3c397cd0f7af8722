//! Shared domain types and unit conventions.
//!
//! * All geometry is 2-D, in meters; angles are degrees; delays seconds; powers dB
//!   relative to one arbitrary common reference.
//! * The x axis points from the first node toward the second; steering angles follow
//!   the back-projection sign convention in [`crate::geo::backproject`].
//! * Types here are immutable value objects; every pipeline stage consumes and
//!   returns them without interior mutation.

use num_complex::Complex64;

use crate::{Error, Result};

/// Propagation speed used by every delay/range conversion (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

// --- nodes -------------------------------------------------------------------

/// Identifies one of the two co-located transceiver positions in a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeId {
    /// Node at `Scene::mono1_pos_m`; doubles as the link transmitter.
    Mono1,
    /// Node at `Scene::mono2_pos_m`; doubles as the link receiver.
    Mono2,
}

impl NodeId {
    pub fn name(self) -> &'static str {
        match self {
            NodeId::Mono1 => "mono1",
            NodeId::Mono2 => "mono2",
        }
    }

    pub fn index(self) -> usize {
        match self {
            NodeId::Mono1 => 0,
            NodeId::Mono2 => 1,
        }
    }
}

// --- sounder configuration ---------------------------------------------------

/// Sweep-hardware description: carrier, bandwidth, tap count, steering grid,
/// beamwidths, and reference power levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SounderConfig {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    /// Number of complex taps per impulse response.
    pub num_taps: usize,
    /// Node separation when the two nodes form a link (m).
    pub d_los_m: f64,
    /// Steering angles swept by each co-located scan (degrees, strictly increasing).
    pub angle_grid_deg: Vec<f64>,
    /// Half-power beamwidth of the steered sensing beam (degrees).
    pub hpbw_sensing_deg: f64,
    /// Half-power beamwidth of the wide link beam (degrees).
    pub hpbw_comm_rx_deg: f64,
    /// Transmit power in dB relative to the common reference.
    pub tx_power_db: f64,
    /// Average per-tap noise power in dB relative to the reference; `-inf` disables noise.
    pub noise_floor_db: f64,
}

impl SounderConfig {
    /// Delay spacing between consecutive taps: `1 / bandwidth` (s).
    pub fn tap_spacing_s(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    /// Spacing of the synthesized frequency grid: `bandwidth / num_taps` (Hz).
    pub fn freq_resolution_hz(&self) -> f64 {
        self.bandwidth_hz / self.num_taps as f64
    }

    /// Carrier wavelength (m).
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency_hz
    }

    /// Largest representable delay: `num_taps * tap_spacing` (s). Paths at or
    /// beyond this span would alias and are rejected by the forward model.
    pub fn unambiguous_span_s(&self) -> f64 {
        self.num_taps as f64 * self.tap_spacing_s()
    }

    /// Checks the structural invariants; returns the config unchanged on success.
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency_hz > 0.0) {
            return Err(Error::invalid("carrier frequency must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        if self.num_taps == 0 {
            return Err(Error::invalid("num_taps must be at least 1"));
        }
        if !(self.d_los_m > 0.0) {
            return Err(Error::invalid("node separation must be positive"));
        }
        if self.angle_grid_deg.is_empty() {
            return Err(Error::invalid("angle grid must not be empty"));
        }
        for pair in self.angle_grid_deg.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::invalid("angle grid must be strictly increasing"));
            }
        }
        for &a in &self.angle_grid_deg {
            if !(-90.0..=90.0).contains(&a) {
                return Err(Error::invalid(format!(
                    "steering angle {a} deg outside [-90, 90]"
                )));
            }
        }
        if !(self.hpbw_sensing_deg > 0.0) || !(self.hpbw_comm_rx_deg > 0.0) {
            return Err(Error::invalid("beamwidths must be strictly positive"));
        }
        if !self.tx_power_db.is_finite() {
            return Err(Error::invalid("tx power must be finite"));
        }
        if self.noise_floor_db.is_nan() || self.noise_floor_db == f64::INFINITY {
            return Err(Error::invalid(
                "noise floor must be finite or negative infinity",
            ));
        }
        Ok(())
    }
}

// --- scene -------------------------------------------------------------------

/// Idealized point reflector with a fixed cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct PointScatterer {
    pub position_m: [f64; 2],
    pub rcs_dbsm: f64,
    pub label: String,
}

/// Flat reflecting segment; echoes leave from the per-link mirror point,
/// so different node pairs see different effective reflection points.
#[derive(Debug, Clone, PartialEq)]
pub struct WallSegment {
    pub endpoint_a_m: [f64; 2],
    pub endpoint_b_m: [f64; 2],
    pub rcs_dbsm: f64,
    /// Optional name; empty means "use an index-derived name".
    pub label: String,
}

impl WallSegment {
    pub fn length_m(&self) -> f64 {
        dist(self.endpoint_a_m, self.endpoint_b_m)
    }

    /// Unit vector from endpoint a toward endpoint b.
    pub fn direction(&self) -> [f64; 2] {
        let len = self.length_m();
        [
            (self.endpoint_b_m[0] - self.endpoint_a_m[0]) / len,
            (self.endpoint_b_m[1] - self.endpoint_a_m[1]) / len,
        ]
    }
}

/// Ground-truth geometry consumed by the forward model and by validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub mono1_pos_m: [f64; 2],
    pub mono2_pos_m: [f64; 2],
    pub scatterers: Vec<PointScatterer>,
    pub walls: Vec<WallSegment>,
    /// Direct-coupling component observed at zero delay in co-located channels (dB).
    pub leakage_power_db: f64,
}

impl Scene {
    pub fn node_pos(&self, node: NodeId) -> [f64; 2] {
        match node {
            NodeId::Mono1 => self.mono1_pos_m,
            NodeId::Mono2 => self.mono2_pos_m,
        }
    }

    /// Checks structural invariants, including the node-separation consistency
    /// with the configured link distance.
    pub fn validate(&self, config: &SounderConfig) -> Result<()> {
        let sep = dist(self.mono1_pos_m, self.mono2_pos_m);
        if sep <= 0.0 {
            return Err(Error::invalid("the two node positions must differ"));
        }
        if (sep - config.d_los_m).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "node separation {sep:.9} m does not match configured link distance {:.9} m",
                config.d_los_m
            )));
        }
        for wall in &self.walls {
            if wall.length_m() <= 0.0 {
                return Err(Error::invalid("wall endpoints must differ"));
            }
        }
        Ok(())
    }
}

// --- measurement containers --------------------------------------------------

/// Which link produced an impulse response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CirKind {
    /// Co-located transmit/receive snapshot taken at one steering angle.
    Monostatic { steering_deg: f64 },
    /// Separated-node link snapshot.
    Bistatic,
}

/// Complex channel impulse response with uniform tap spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Cir {
    pub taps: Vec<Complex64>,
    pub tap_spacing_s: f64,
    /// Absolute delay of tap 0 (calibration offset, s).
    pub delay_offset_s: f64,
    pub kind: CirKind,
}

impl Cir {
    /// Absolute delay of tap `i` (s).
    pub fn delay_of_tap(&self, i: usize) -> f64 {
        self.delay_offset_s + i as f64 * self.tap_spacing_s
    }

    /// Tap power in dB (`-inf` for an exactly-zero tap).
    pub fn power_db(&self, i: usize) -> f64 {
        let mag = self.taps[i].norm();
        if mag == 0.0 {
            f64::NEG_INFINITY
        } else {
            20.0 * mag.log10()
        }
    }

    /// Sum of squared tap magnitudes.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Power grid over steering angle and delay, with the delay axis referenced to
/// the strongest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Padp {
    pub angles_deg: Vec<f64>,
    /// Delay of each column (s). After [`normalize_padp`] these are excess
    /// delays: the global power maximum sits at exactly 0.
    pub delays_s: Vec<f64>,
    /// `power_db[angle_index][delay_index]`.
    pub power_db: Vec<Vec<f64>>,
}

impl Padp {
    pub fn validate(&self) -> Result<()> {
        if self.power_db.len() != self.angles_deg.len() {
            return Err(Error::invalid(
                "power matrix row count must match angle count",
            ));
        }
        for row in &self.power_db {
            if row.len() != self.delays_s.len() {
                return Err(Error::invalid(
                    "power matrix column count must match delay count",
                ));
            }
        }
        Ok(())
    }

    /// Index of the strongest finite entry, scanning row-major so ties resolve
    /// to the earliest (angle, delay) cell. `None` when nothing is finite.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.power_db.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p.is_finite() && best.map_or(true, |(_, _, bp)| p > bp) {
                    best = Some((i, j, p));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

// --- conversions -------------------------------------------------------------

/// Round-trip delay to one-way range for a co-located node: `c * tau / 2`.
pub fn delay_to_range(tau_s: f64) -> Result<f64> {
    if tau_s < 0.0 || tau_s.is_nan() {
        return Err(Error::invalid(format!(
            "round-trip delay must be nonnegative, got {tau_s:e}"
        )));
    }
    Ok(SPEED_OF_LIGHT * tau_s / 2.0)
}

/// Re-references a profile's delay axis so the strongest entry sits at excess
/// delay zero. Powers are copied unchanged; pairwise delay differences are
/// preserved exactly.
pub fn normalize_padp(raw: &Padp) -> Result<Padp> {
    raw.validate()?;
    let (_, jmax) = raw
        .argmax()
        .ok_or_else(|| Error::degenerate("profile holds no finite power entry"))?;
    let shift = raw.delays_s[jmax];
    Ok(Padp {
        angles_deg: raw.angles_deg.clone(),
        delays_s: raw.delays_s.iter().map(|&d| d - shift).collect(),
        power_db: raw.power_db.clone(),
    })
}

// --- small vector helpers ----------------------------------------------------

/// Euclidean distance between two 2-D points.
pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Euclidean norm of a 2-D vector.
pub fn norm(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

// --- tests -------------------------------------------------------------------
