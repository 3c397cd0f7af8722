//! Scene documents and CSV serialization for every pipeline artifact.
//!
//! * one TOML document per run describing the room and the sounder
//!   (`schema_version = 1`); the steering grid is given either as an explicit
//!   list or as a start/stop/step range
//! * plain CSV for impulse responses, angle-delay power maps, path tables,
//!   scatterer points, cluster summaries, association reports, cross-section
//!   tables, dispersion series, empirical CDFs, and geometry-check curves
//! * every float is written with a fixed 9-significant-digit format so a rerun
//!   of the same configuration reproduces each file byte for byte

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::extract::{Cdf, Mpc};
use crate::geo::{Association, Cluster, ScattererPoint, ValidationReport};
use crate::model::{
    dist, Cir, CirKind, NodeId, Padp, PointScatterer, Scene, SounderConfig, WallSegment,
};
use crate::rcs::RcsEstimate;
use crate::{Error, Result};

// --- float formatting ---------------------------------------------------------

/// Formats a float with exactly nine significant digits (scientific notation),
/// the fixed convention for all CSV output. Special values map to `inf`,
/// `-inf`, and `nan`; zero (either sign) maps to `0`. Every output parses back
/// with [`parse_f64`].
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.8e}")
    }
}

/// Parses a float written by [`fmt_sig`] (or any standard decimal form).
pub fn parse_f64(token: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(format!("expected a number, got {token:?}")))
}

fn parse_usize(token: &str) -> Result<usize> {
    token
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(format!("expected a nonnegative integer, got {token:?}")))
}

// --- scene document -----------------------------------------------------------

/// Version stamp expected in every scene document.
pub const SCENE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct SceneDoc {
    schema_version: u32,
    sounder: SounderDoc,
    scene: SceneBody,
}

#[derive(Debug, Serialize, Deserialize)]
struct SounderDoc {
    carrier_frequency_hz: f64,
    bandwidth_hz: f64,
    num_taps: usize,
    hpbw_sensing_deg: f64,
    hpbw_comm_rx_deg: f64,
    tx_power_db: f64,
    noise_floor_db: f64,
    angle_grid: AngleGridDoc,
}

/// Steering grid: exactly one of the two forms must be present.
#[derive(Debug, Default, Serialize, Deserialize)]
struct AngleGridDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    list_deg: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stop_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step_deg: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SceneBody {
    mono1_pos_m: [f64; 2],
    mono2_pos_m: [f64; 2],
    leakage_power_db: f64,
    #[serde(default)]
    scatterers: Vec<ScattererDoc>,
    #[serde(default)]
    walls: Vec<WallDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScattererDoc {
    label: String,
    position_m: [f64; 2],
    rcs_dbsm: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct WallDoc {
    label: String,
    endpoint_a_m: [f64; 2],
    endpoint_b_m: [f64; 2],
    rcs_dbsm: f64,
}

fn expand_angle_grid(doc: &AngleGridDoc) -> Result<Vec<f64>> {
    match (&doc.list_deg, doc.start_deg, doc.stop_deg, doc.step_deg) {
        (Some(list), None, None, None) => {
            if list.is_empty() {
                return Err(Error::parse("angle_grid.list_deg must not be empty"));
            }
            Ok(list.clone())
        }
        (None, Some(start), Some(stop), Some(step)) => {
            if !step.is_finite() || step <= 0.0 {
                return Err(Error::parse("angle_grid.step_deg must be positive"));
            }
            if !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(Error::parse(
                    "angle_grid range must satisfy start_deg <= stop_deg",
                ));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(Error::parse(
            "angle_grid must give either list_deg or the full start_deg/stop_deg/step_deg range",
        )),
    }
}

/// Labels travel through comment-free single-line CSV cells, so restrict them
/// at the document boundary rather than at every writer.
fn check_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::parse("labels must not be empty"));
    }
    if label.contains(',') || label.contains('\n') || label.contains('\r') {
        return Err(Error::parse(format!(
            "label {label:?} must not contain commas or line breaks"
        )));
    }
    Ok(())
}

/// Parses a scene document from TOML text. The link distance is taken from the
/// node geometry, so the document cannot contradict itself.
pub fn parse_scene_doc(text: &str) -> Result<(Scene, SounderConfig)> {
    let doc: SceneDoc =
        toml::from_str(text).map_err(|e| Error::parse(format!("scene document: {e}")))?;
    if doc.schema_version != SCENE_SCHEMA_VERSION {
        return Err(Error::parse(format!(
            "unsupported schema_version {} (expected {SCENE_SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let angle_grid_deg = expand_angle_grid(&doc.sounder.angle_grid)?;
    let scene = Scene {
        mono1_pos_m: doc.scene.mono1_pos_m,
        mono2_pos_m: doc.scene.mono2_pos_m,
        scatterers: doc
            .scene
            .scatterers
            .iter()
            .map(|s| PointScatterer {
                position_m: s.position_m,
                rcs_dbsm: s.rcs_dbsm,
                label: s.label.clone(),
            })
            .collect(),
        walls: doc
            .scene
            .walls
            .iter()
            .map(|w| WallSegment {
                endpoint_a_m: w.endpoint_a_m,
                endpoint_b_m: w.endpoint_b_m,
                rcs_dbsm: w.rcs_dbsm,
                label: w.label.clone(),
            })
            .collect(),
        leakage_power_db: doc.scene.leakage_power_db,
    };
    for s in &scene.scatterers {
        check_label(&s.label)?;
    }
    for w in &scene.walls {
        check_label(&w.label)?;
    }
    let config = SounderConfig {
        carrier_frequency_hz: doc.sounder.carrier_frequency_hz,
        bandwidth_hz: doc.sounder.bandwidth_hz,
        num_taps: doc.sounder.num_taps,
        d_los_m: dist(scene.mono1_pos_m, scene.mono2_pos_m),
        angle_grid_deg,
        hpbw_sensing_deg: doc.sounder.hpbw_sensing_deg,
        hpbw_comm_rx_deg: doc.sounder.hpbw_comm_rx_deg,
        tx_power_db: doc.sounder.tx_power_db,
        noise_floor_db: doc.sounder.noise_floor_db,
    };
    config.validate()?;
    scene.validate(&config)?;
    Ok((scene, config))
}

/// Reads and validates a scene document from disk.
pub fn read_scene_doc(path: &Path) -> Result<(Scene, SounderConfig)> {
    let text = fs::read_to_string(path)?;
    parse_scene_doc(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Renders a scene and sounder back into document form. The steering grid is
/// always written as an explicit list (range shorthand is an input-side
/// convenience only).
pub fn scene_doc_string(scene: &Scene, config: &SounderConfig) -> Result<String> {
    config.validate()?;
    scene.validate(config)?;
    for s in &scene.scatterers {
        check_label(&s.label)?;
    }
    for w in &scene.walls {
        check_label(&w.label)?;
    }
    let doc = SceneDoc {
        schema_version: SCENE_SCHEMA_VERSION,
        sounder: SounderDoc {
            carrier_frequency_hz: config.carrier_frequency_hz,
            bandwidth_hz: config.bandwidth_hz,
            num_taps: config.num_taps,
            hpbw_sensing_deg: config.hpbw_sensing_deg,
            hpbw_comm_rx_deg: config.hpbw_comm_rx_deg,
            tx_power_db: config.tx_power_db,
            noise_floor_db: config.noise_floor_db,
            angle_grid: AngleGridDoc {
                list_deg: Some(config.angle_grid_deg.clone()),
                ..AngleGridDoc::default()
            },
        },
        scene: SceneBody {
            mono1_pos_m: scene.mono1_pos_m,
            mono2_pos_m: scene.mono2_pos_m,
            leakage_power_db: scene.leakage_power_db,
            scatterers: scene
                .scatterers
                .iter()
                .map(|s| ScattererDoc {
                    label: s.label.clone(),
                    position_m: s.position_m,
                    rcs_dbsm: s.rcs_dbsm,
                })
                .collect(),
            walls: scene
                .walls
                .iter()
                .map(|w| WallDoc {
                    label: w.label.clone(),
                    endpoint_a_m: w.endpoint_a_m,
                    endpoint_b_m: w.endpoint_b_m,
                    rcs_dbsm: w.rcs_dbsm,
                })
                .collect(),
        },
    };
    toml::to_string_pretty(&doc).map_err(|e| Error::parse(format!("scene document: {e}")))
}

/// Writes a scene document to disk.
pub fn write_scene_doc(path: &Path, scene: &Scene, config: &SounderConfig) -> Result<()> {
    fs::write(path, scene_doc_string(scene, config)?)?;
    Ok(())
}

// --- csv plumbing -------------------------------------------------------------

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::to_string)
        .filter(|l| !l.trim().is_empty())
        .collect())
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn expect_header(lines: &[String], index: usize, expected: &str) -> Result<()> {
    match lines.get(index) {
        Some(line) if line.trim() == expected => Ok(()),
        Some(line) => Err(Error::parse(format!(
            "expected header {expected:?}, got {line:?}"
        ))),
        None => Err(Error::parse(format!(
            "file ends before the {expected:?} header"
        ))),
    }
}

fn expect_columns<'a>(line: &'a str, count: usize) -> Result<Vec<&'a str>> {
    let fields = split_fields(line);
    if fields.len() != count {
        return Err(Error::parse(format!(
            "expected {count} comma-separated fields, got {} in {line:?}",
            fields.len()
        )));
    }
    Ok(fields)
}

// --- impulse responses --------------------------------------------------------

fn encode_kind(kind: CirKind) -> String {
    match kind {
        CirKind::Monostatic { steering_deg } => format!("monostatic:{}", fmt_sig(steering_deg)),
        CirKind::Bistatic => "bistatic".to_string(),
    }
}

fn decode_kind(token: &str) -> Result<CirKind> {
    if token == "bistatic" {
        return Ok(CirKind::Bistatic);
    }
    if let Some(angle) = token.strip_prefix("monostatic:") {
        return Ok(CirKind::Monostatic {
            steering_deg: parse_f64(angle)?,
        });
    }
    Err(Error::parse(format!(
        "unknown impulse-response kind {token:?}"
    )))
}

/// Writes one complex impulse response. The axis metadata rides in a leading
/// comment line so the file stands alone.
pub fn write_cir_csv(path: &Path, cir: &Cir) -> Result<()> {
    let mut text = format!(
        "# tap_spacing_s={} delay_offset_s={} kind={}\ntap_index,real,imag\n",
        fmt_sig(cir.tap_spacing_s),
        fmt_sig(cir.delay_offset_s),
        encode_kind(cir.kind)
    );
    for (i, tap) in cir.taps.iter().enumerate() {
        text.push_str(&format!("{i},{},{}\n", fmt_sig(tap.re), fmt_sig(tap.im)));
    }
    write_text(path, &text)
}

fn parse_comment_pairs(line: &str) -> Result<Vec<(String, String)>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::parse("first line must be a # comment with axis metadata"))?;
    body.split_whitespace()
        .map(|token| {
            token
                .split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::parse(format!("malformed metadata token {token:?}")))
        })
        .collect()
}

fn comment_value<'a>(pairs: &'a [(String, String)], key: &str) -> Result<&'a str> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::parse(format!("metadata comment is missing {key}=")))
}

/// Reads an impulse response written by [`write_cir_csv`].
pub fn read_cir_csv(path: &Path) -> Result<Cir> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(Error::parse(format!("{}: empty file", path.display())));
    }
    let pairs = parse_comment_pairs(&lines[0])?;
    let tap_spacing_s = parse_f64(comment_value(&pairs, "tap_spacing_s")?)?;
    let delay_offset_s = parse_f64(comment_value(&pairs, "delay_offset_s")?)?;
    let kind = decode_kind(comment_value(&pairs, "kind")?)?;
    if !(tap_spacing_s.is_finite() && tap_spacing_s > 0.0) || !delay_offset_s.is_finite() {
        return Err(Error::parse(
            "axis metadata must be finite with positive spacing",
        ));
    }
    expect_header(&lines, 1, "tap_index,real,imag")?;
    let mut taps = Vec::with_capacity(lines.len().saturating_sub(2));
    for line in &lines[2..] {
        let fields = expect_columns(line, 3)?;
        let index = parse_usize(fields[0])?;
        if index != taps.len() {
            return Err(Error::parse(format!(
                "tap rows must be consecutive from 0; row {} carries index {index}",
                taps.len()
            )));
        }
        taps.push(Complex64::new(parse_f64(fields[1])?, parse_f64(fields[2])?));
    }
    if taps.is_empty() {
        return Err(Error::parse("impulse response holds no taps"));
    }
    Ok(Cir {
        taps,
        tap_spacing_s,
        delay_offset_s,
        kind,
    })
}

// --- angle-delay power maps ---------------------------------------------------

/// Writes a power map as an angle-by-delay grid: the header row carries the
/// delay axis in nanoseconds, each data row starts with its steering angle.
pub fn write_padp_csv(path: &Path, padp: &Padp) -> Result<()> {
    padp.validate()?;
    let mut text = String::from("angle_deg");
    for &d in &padp.delays_s {
        text.push(',');
        text.push_str(&fmt_sig(d * 1e9));
    }
    text.push('\n');
    for (angle, row) in padp.angles_deg.iter().zip(&padp.power_db) {
        text.push_str(&fmt_sig(*angle));
        for &p in row {
            text.push(',');
            text.push_str(&fmt_sig(p));
        }
        text.push('\n');
    }
    write_text(path, &text)
}

/// Reads a power map written by [`write_padp_csv`].
pub fn read_padp_csv(path: &Path) -> Result<Padp> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(Error::parse(format!("{}: empty file", path.display())));
    }
    let header = split_fields(&lines[0]);
    if header.first() != Some(&"angle_deg") || header.len() < 2 {
        return Err(Error::parse(
            "power-map header must start with angle_deg followed by the delay axis",
        ));
    }
    let delays_s = header[1..]
        .iter()
        .map(|t| Ok(parse_f64(t)? * 1e-9))
        .collect::<Result<Vec<f64>>>()?;
    let mut angles_deg = Vec::new();
    let mut power_db = Vec::new();
    for line in &lines[1..] {
        let fields = expect_columns(line, delays_s.len() + 1)?;
        angles_deg.push(parse_f64(fields[0])?);
        power_db.push(
            fields[1..]
                .iter()
                .map(|t| parse_f64(t))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    let padp = Padp {
        angles_deg,
        delays_s,
        power_db,
    };
    padp.validate()?;
    Ok(padp)
}

// --- path tables --------------------------------------------------------------

/// Writes detected path components. The steering cell stays empty for link
/// (non-scanned) components; the tap spacing rides in a comment line so tap
/// indices can be rebuilt on read.
pub fn write_mpcs_csv(path: &Path, mpcs: &[Mpc], tap_spacing_s: f64) -> Result<()> {
    if !(tap_spacing_s.is_finite() && tap_spacing_s > 0.0) {
        return Err(Error::invalid("tap spacing must be positive"));
    }
    let mut text = format!(
        "# tap_spacing_s={}\nangle_deg,excess_delay_ns,power_db,range_m\n",
        fmt_sig(tap_spacing_s)
    );
    for mpc in mpcs {
        let angle = mpc.steering_angle_deg.map(fmt_sig).unwrap_or_default();
        text.push_str(&format!(
            "{angle},{},{},{}\n",
            fmt_sig(mpc.excess_delay_s * 1e9),
            fmt_sig(mpc.power_db),
            fmt_sig(mpc.range_m)
        ));
    }
    write_text(path, &text)
}

/// Reads a path table written by [`write_mpcs_csv`].
pub fn read_mpcs_csv(path: &Path) -> Result<Vec<Mpc>> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(Error::parse(format!("{}: empty file", path.display())));
    }
    let pairs = parse_comment_pairs(&lines[0])?;
    let tap_spacing_s = parse_f64(comment_value(&pairs, "tap_spacing_s")?)?;
    if !(tap_spacing_s.is_finite() && tap_spacing_s > 0.0) {
        return Err(Error::parse("tap spacing metadata must be positive"));
    }
    expect_header(&lines, 1, "angle_deg,excess_delay_ns,power_db,range_m")?;
    let mut mpcs = Vec::new();
    for line in &lines[2..] {
        let fields = expect_columns(line, 4)?;
        let steering_angle_deg = if fields[0].is_empty() {
            None
        } else {
            Some(parse_f64(fields[0])?)
        };
        let excess_delay_s = parse_f64(fields[1])? * 1e-9;
        mpcs.push(Mpc {
            steering_angle_deg,
            excess_delay_s,
            power_db: parse_f64(fields[2])?,
            range_m: parse_f64(fields[3])?,
            tap_index: (excess_delay_s / tap_spacing_s).round().max(0.0) as usize,
        });
    }
    Ok(mpcs)
}

// --- scatterer points and clusters --------------------------------------------

const POINTS_HEADER: &str = "x_m,y_m,source,steering_deg,range_m,power_db,cluster";

fn decode_node(token: &str) -> Result<NodeId> {
    match token {
        "mono1" => Ok(NodeId::Mono1),
        "mono2" => Ok(NodeId::Mono2),
        other => Err(Error::parse(format!("unknown source node {other:?}"))),
    }
}

/// Writes back-projected scatterer points with their cluster label; points
/// discarded by clustering follow with an empty cluster cell.
pub fn write_points_csv(
    path: &Path,
    clusters: &[Cluster],
    unclustered: &[ScattererPoint],
) -> Result<()> {
    let mut text = format!("{POINTS_HEADER}\n");
    let mut push = |p: &ScattererPoint, label: &str| {
        text.push_str(&format!(
            "{},{},{},{},{},{},{label}\n",
            fmt_sig(p.position_m[0]),
            fmt_sig(p.position_m[1]),
            p.source.name(),
            fmt_sig(p.steering_angle_deg),
            fmt_sig(p.range_m),
            fmt_sig(p.power_db)
        ));
    };
    for cluster in clusters {
        check_label(&cluster.label)?;
        for member in &cluster.members {
            push(member, &cluster.label);
        }
    }
    for point in unclustered {
        push(point, "");
    }
    write_text(path, &text)
}

/// Natural ordering for generated cluster labels: shorter first, then
/// lexicographic, so `C2` precedes `C10`.
fn label_order(a: &str, b: &str) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Reads a point table written by [`write_points_csv`], rebuilding the labeled
/// clusters (members keep file order; centroids are recomputed) alongside the
/// unlabeled leftovers.
pub fn read_points_csv(path: &Path) -> Result<(Vec<Cluster>, Vec<ScattererPoint>)> {
    let lines = read_lines(path)?;
    expect_header(&lines, 0, POINTS_HEADER)?;
    let mut labeled: Vec<(String, ScattererPoint)> = Vec::new();
    let mut unclustered = Vec::new();
    for line in &lines[1..] {
        let fields = expect_columns(line, 7)?;
        let point = ScattererPoint {
            position_m: [parse_f64(fields[0])?, parse_f64(fields[1])?],
            source: decode_node(fields[2])?,
            steering_angle_deg: parse_f64(fields[3])?,
            range_m: parse_f64(fields[4])?,
            power_db: parse_f64(fields[5])?,
        };
        if fields[6].is_empty() {
            unclustered.push(point);
        } else {
            labeled.push((fields[6].to_string(), point));
        }
    }
    let mut labels: Vec<String> = labeled.iter().map(|(l, _)| l.clone()).collect();
    labels.sort_by(|a, b| label_order(a, b));
    labels.dedup();
    let clusters = labels
        .into_iter()
        .map(|label| {
            let members: Vec<ScattererPoint> = labeled
                .iter()
                .filter(|(l, _)| *l == label)
                .map(|(_, p)| p.clone())
                .collect();
            let n = members.len() as f64;
            let centroid_m = [
                members.iter().map(|p| p.position_m[0]).sum::<f64>() / n,
                members.iter().map(|p| p.position_m[1]).sum::<f64>() / n,
            ];
            Cluster {
                members,
                centroid_m,
                label,
            }
        })
        .collect();
    Ok((clusters, unclustered))
}

/// Writes the one-row-per-cluster summary.
pub fn write_clusters_csv(path: &Path, clusters: &[Cluster]) -> Result<()> {
    let mut text = String::from("label,num_members,centroid_x_m,centroid_y_m,total_power_db\n");
    for cluster in clusters {
        check_label(&cluster.label)?;
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            cluster.label,
            cluster.members.len(),
            fmt_sig(cluster.centroid_m[0]),
            fmt_sig(cluster.centroid_m[1]),
            fmt_sig(10.0 * cluster.total_linear_power().log10())
        ));
    }
    write_text(path, &text)
}

// --- association reports ------------------------------------------------------

/// Writes the link-component-to-cluster association report; unmatched
/// components keep their prediction cells empty.
pub fn write_associations_csv(path: &Path, associations: &[Association]) -> Result<()> {
    let mut text =
        String::from("excess_delay_ns,power_db,cluster,predicted_excess_delay_ns,residual_ns\n");
    for a in associations {
        let cluster = a.cluster_label.clone().unwrap_or_default();
        let predicted = a
            .predicted_excess_delay_s
            .map(|v| fmt_sig(v * 1e9))
            .unwrap_or_default();
        let residual = a.residual_s.map(|v| fmt_sig(v * 1e9)).unwrap_or_default();
        text.push_str(&format!(
            "{},{},{cluster},{predicted},{residual}\n",
            fmt_sig(a.measured_excess_delay_s * 1e9),
            fmt_sig(a.comm_mpc.power_db)
        ));
    }
    write_text(path, &text)
}

// --- cross-section tables -----------------------------------------------------

/// Writes per-reflector cross-section estimates.
pub fn write_rcs_csv(path: &Path, estimates: &[RcsEstimate]) -> Result<()> {
    let mut text = String::from("label,d_bi_m,r_t_m,r_r_m,delta_p_db,sigma_dbsm\n");
    for e in estimates {
        check_label(&e.label)?;
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.label,
            fmt_sig(e.d_bi_m),
            fmt_sig(e.r_t_m),
            fmt_sig(e.r_r_m),
            fmt_sig(e.delta_p_db),
            fmt_sig(e.sigma_dbsm)
        ));
    }
    write_text(path, &text)
}

// --- generic series, CDFs, curves ---------------------------------------------

/// Writes a two-column series under the given header names.
pub fn write_series_csv(
    path: &Path,
    x_name: &str,
    y_name: &str,
    rows: &[(f64, f64)],
) -> Result<()> {
    let mut text = format!("{x_name},{y_name}\n");
    for &(x, y) in rows {
        text.push_str(&format!("{},{}\n", fmt_sig(x), fmt_sig(y)));
    }
    write_text(path, &text)
}

/// Writes an empirical CDF as (value, probability) pairs.
pub fn write_cdf_csv(path: &Path, cdf: &Cdf) -> Result<()> {
    let rows: Vec<(f64, f64)> = cdf
        .samples
        .iter()
        .zip(&cdf.probabilities)
        .map(|(&s, &p)| (s, p))
        .collect();
    write_series_csv(path, "value", "probability", &rows)
}

/// Writes labeled planar curves as (curve, x, y) rows, one polyline per label.
pub fn write_curves_csv(path: &Path, curves: &[(String, Vec<[f64; 2]>)]) -> Result<()> {
    let mut text = String::from("curve,x_m,y_m\n");
    for (label, points) in curves {
        check_label(label)?;
        for p in points {
            text.push_str(&format!("{label},{},{}\n", fmt_sig(p[0]), fmt_sig(p[1])));
        }
    }
    write_text(path, &text)
}

/// Writes the one-row geometric consistency summary.
pub fn write_validation_csv(path: &Path, report: &ValidationReport) -> Result<()> {
    let text = format!(
        "intersected,max_pairwise_gap_m,mean_x_m,mean_y_m,reference_distance_m\n{},{},{},{},{}\n",
        report.intersected,
        fmt_sig(report.max_pairwise_gap_m),
        fmt_sig(report.mean_point_m[0]),
        fmt_sig(report.mean_point_m[1]),
        fmt_sig(report.reference_distance_m)
    );
    write_text(path, &text)
}

// --- tests --------------------------------------------------------------------
