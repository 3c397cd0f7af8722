//! Scatterer geometry: back-projection, clustering, delay association, and
//! cross-curve validation.
//!
//! * Back-projects angle/range detections from either co-located node into the
//!   shared 2-D frame, with the two nodes facing opposite directions.
//! * Groups projected points into reflector clusters by transitive proximity.
//! * Predicts the one-way link's excess delay for any candidate point and
//!   associates link components to clusters by best delay agreement.
//! * Checks that sensing circles and the link ellipse meet at a common point
//!   and measures the spread of that crossing against a reference geometry.

use crate::extract::Mpc;
use crate::model::{dist, dot, norm, sub, NodeId, WallSegment, SPEED_OF_LIGHT};
use crate::synth::golden_section_max;
use crate::{Error, Result};

// --- points and clusters -----------------------------------------------------

/// One back-projected detection in the shared 2-D frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererPoint {
    pub position_m: [f64; 2],
    /// Node whose scan produced the detection.
    pub source: NodeId,
    pub steering_angle_deg: f64,
    pub range_m: f64,
    pub power_db: f64,
}

/// A group of mutually nearby scatterer points treated as one reflector.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<ScattererPoint>,
    pub centroid_m: [f64; 2],
    pub label: String,
}

impl Cluster {
    /// Sum of member powers on the linear scale.
    pub fn total_linear_power(&self) -> f64 {
        self.members
            .iter()
            .map(|m| 10f64.powf(m.power_db / 10.0))
            .sum()
    }
}

// --- back-projection ---------------------------------------------------------

/// Maps a (steering angle, range) detection to 2-D coordinates. The two nodes
/// face opposite directions, so the range leg runs along +x from node 1 and
/// along −x from node 2; positive angles swing toward −y for both.
pub fn backproject(node: NodeId, node_pos: [f64; 2], theta_deg: f64, r_m: f64) -> [f64; 2] {
    let (s, c) = theta_deg.to_radians().sin_cos();
    match node {
        NodeId::Mono1 => [node_pos[0] + r_m * c, node_pos[1] - r_m * s],
        NodeId::Mono2 => [node_pos[0] - r_m * c, node_pos[1] - r_m * s],
    }
}

/// Back-projects a batch of co-located-scan detections from one node. Every
/// input must carry a steering angle.
pub fn project_mpcs(mpcs: &[Mpc], node: NodeId, node_pos: [f64; 2]) -> Result<Vec<ScattererPoint>> {
    mpcs.iter()
        .map(|m| {
            let theta = m.steering_angle_deg.ok_or_else(|| {
                Error::invalid("cannot back-project a component without a steering angle")
            })?;
            Ok(ScattererPoint {
                position_m: backproject(node, node_pos, theta, m.range_m),
                source: node,
                steering_angle_deg: theta,
                range_m: m.range_m,
                power_db: m.power_db,
            })
        })
        .collect()
}

// --- clustering --------------------------------------------------------------

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut at = i;
    while parent[at] != root {
        let next = parent[at];
        parent[at] = root;
        at = next;
    }
    root
}

/// Groups points by transitive proximity: any two points within `eps` of each
/// other share a cluster. Groups smaller than `min_points` are dropped as
/// outliers. Output clusters are labeled `C1, C2, …` in descending order of
/// total member power; the result is independent of input order.
pub fn cluster_scatterers(
    points: &[ScattererPoint],
    eps_m: f64,
    min_points: usize,
) -> Result<Vec<Cluster>> {
    if !(eps_m > 0.0) {
        return Err(Error::invalid("clustering radius must be positive"));
    }
    if min_points == 0 {
        return Err(Error::invalid("minimum cluster size must be at least 1"));
    }
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(points[i].position_m, points[j].position_m) <= eps_m {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    let canonical_key = |p: &ScattererPoint| {
        (
            p.source.index(),
            p.steering_angle_deg,
            p.range_m,
            p.power_db,
            p.position_m,
        )
    };
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .filter(|idx| idx.len() >= min_points)
        .map(|idx| {
            let mut members: Vec<ScattererPoint> =
                idx.into_iter().map(|i| points[i].clone()).collect();
            members.sort_by(|a, b| {
                let (ka, kb) = (canonical_key(a), canonical_key(b));
                ka.0.cmp(&kb.0)
                    .then(ka.1.total_cmp(&kb.1))
                    .then(ka.2.total_cmp(&kb.2))
                    .then(ka.3.total_cmp(&kb.3))
                    .then(ka.4[0].total_cmp(&kb.4[0]))
                    .then(ka.4[1].total_cmp(&kb.4[1]))
            });
            let nm = members.len() as f64;
            let centroid = members.iter().fold([0.0, 0.0], |acc, m| {
                [acc[0] + m.position_m[0] / nm, acc[1] + m.position_m[1] / nm]
            });
            Cluster {
                members,
                centroid_m: centroid,
                label: String::new(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.total_linear_power()
            .total_cmp(&a.total_linear_power())
            .then(a.centroid_m[0].total_cmp(&b.centroid_m[0]))
            .then(a.centroid_m[1].total_cmp(&b.centroid_m[1]))
    });
    for (k, c) in clusters.iter_mut().enumerate() {
        c.label = format!("C{}", k + 1);
    }
    Ok(clusters)
}

// --- excess-delay prediction and association ---------------------------------

/// Excess delay of the one-way link path that bounces at `m`, relative to the
/// direct path between the link ends. Nonnegative by the triangle inequality.
pub fn predict_bistatic_excess_delay(
    m: [f64; 2],
    p_t: [f64; 2],
    p_r: [f64; 2],
    d_los_m: f64,
) -> Result<f64> {
    let actual = dist(p_t, p_r);
    if (actual - d_los_m).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "direct-path length {d_los_m} m does not match the node separation {actual} m"
        )));
    }
    let excess = dist(m, p_t) + dist(m, p_r) - d_los_m;
    Ok(excess.max(0.0) / SPEED_OF_LIGHT)
}

/// One link component matched (or not) against the reflector clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub comm_mpc: Mpc,
    /// Label of the best-matching cluster, when the match beats the tolerance.
    pub cluster_label: Option<String>,
    /// Prediction at the best member point of the matched cluster.
    pub predicted_excess_delay_s: Option<f64>,
    pub measured_excess_delay_s: f64,
    /// measured − predicted at the best member point.
    pub residual_s: Option<f64>,
}

/// Matches each link component to the cluster containing the member point
/// whose predicted excess delay comes closest to the measured one; a match
/// stands only when that best absolute residual is within `tol_s`.
pub fn associate_mpcs(
    comm_mpcs: &[Mpc],
    clusters: &[Cluster],
    p_t: [f64; 2],
    p_r: [f64; 2],
    d_los_m: f64,
    tol_s: f64,
) -> Result<Vec<Association>> {
    if !(tol_s > 0.0) {
        return Err(Error::invalid("association tolerance must be positive"));
    }
    let mut out = Vec::with_capacity(comm_mpcs.len());
    for mpc in comm_mpcs {
        let measured = mpc.excess_delay_s;
        let mut best: Option<(f64, f64, &str)> = None; // |residual|, predicted, label
        for cluster in clusters {
            for member in &cluster.members {
                let predicted =
                    predict_bistatic_excess_delay(member.position_m, p_t, p_r, d_los_m)?;
                let gap = (measured - predicted).abs();
                if best.map_or(true, |(b, _, _)| gap < b) {
                    best = Some((gap, predicted, cluster.label.as_str()));
                }
            }
        }
        match best {
            Some((gap, predicted, label)) if gap <= tol_s => out.push(Association {
                comm_mpc: mpc.clone(),
                cluster_label: Some(label.to_string()),
                predicted_excess_delay_s: Some(predicted),
                measured_excess_delay_s: measured,
                residual_s: Some(measured - predicted),
            }),
            _ => out.push(Association {
                comm_mpc: mpc.clone(),
                cluster_label: None,
                predicted_excess_delay_s: None,
                measured_excess_delay_s: measured,
                residual_s: None,
            }),
        }
    }
    Ok(out)
}

// --- principal axis ----------------------------------------------------------

/// Centroid, dominant direction, and RMS perpendicular deviation of a point
/// set — the line summary used to tell extended reflectors from compact ones.
pub fn principal_axis(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2], f64) {
    let n = points.len();
    if n == 0 {
        return ([0.0, 0.0], [1.0, 0.0], 0.0);
    }
    let nf = n as f64;
    let centroid = points.iter().fold([0.0, 0.0], |acc, p| {
        [acc[0] + p[0] / nf, acc[1] + p[1] / nf]
    });
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let dx = p[0] - centroid[0];
        let dy = p[1] - centroid[1];
        sxx += dx * dx / nf;
        sxy += dx * dy / nf;
        syy += dy * dy / nf;
    }
    let half_tr = 0.5 * (sxx + syy);
    let disc = (half_tr * half_tr - (sxx * syy - sxy * sxy))
        .max(0.0)
        .sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    let mut dir = if sxy.abs() > 1e-300 {
        [l1 - syy, sxy]
    } else if sxx >= syy {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let len = norm(dir);
    if len > 0.0 {
        dir = [dir[0] / len, dir[1] / len];
    } else {
        dir = [1.0, 0.0];
    }
    (centroid, dir, l2.max(0.0).sqrt())
}

// --- curve validation --------------------------------------------------------

/// Geometry the crossing is measured against.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationReference {
    Wall(WallSegment),
    Point([f64; 2]),
}

/// How well the sensing circles and the link ellipse agree on one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// True when every curve pair comes within half a meter of a common point.
    pub intersected: bool,
    /// Largest disagreement: curve-to-curve closest-approach gaps and the
    /// spread of the per-pair crossing points, whichever is worse.
    pub max_pairwise_gap_m: f64,
    /// Mean of the per-pair crossing (or closest-approach) points.
    pub mean_point_m: [f64; 2],
    /// Distance from the mean point to the reference geometry.
    pub reference_distance_m: f64,
}

/// Distance from a point to a segment.
pub fn point_segment_distance(p: [f64; 2], wall: &WallSegment) -> f64 {
    let d = wall.direction();
    let t = dot(sub(p, wall.endpoint_a_m), d).clamp(0.0, wall.length_m());
    let foot = [
        wall.endpoint_a_m[0] + t * d[0],
        wall.endpoint_a_m[1] + t * d[1],
    ];
    dist(p, foot)
}

struct EllipseParam {
    center: [f64; 2],
    u: [f64; 2],
    v: [f64; 2],
    a: f64,
    b: f64,
}

impl EllipseParam {
    fn new(focus_a: [f64; 2], focus_b: [f64; 2], path_sum_m: f64) -> Result<EllipseParam> {
        let f = dist(focus_a, focus_b);
        if !(path_sum_m > f) {
            return Err(Error::invalid(
                "ellipse path sum must exceed the focal separation",
            ));
        }
        let a = path_sum_m / 2.0;
        let cf = f / 2.0;
        let b = (a * a - cf * cf).sqrt();
        let u = if f > 0.0 {
            [(focus_b[0] - focus_a[0]) / f, (focus_b[1] - focus_a[1]) / f]
        } else {
            [1.0, 0.0]
        };
        Ok(EllipseParam {
            center: [
                (focus_a[0] + focus_b[0]) / 2.0,
                (focus_a[1] + focus_b[1]) / 2.0,
            ],
            v: [-u[1], u[0]],
            u,
            a,
            b,
        })
    }

    fn point(&self, t: f64) -> [f64; 2] {
        let (s, c) = t.sin_cos();
        [
            self.center[0] + self.a * c * self.u[0] + self.b * s * self.v[0],
            self.center[1] + self.a * c * self.u[1] + self.b * s * self.v[1],
        ]
    }

    fn sample_count(&self, max_step_m: f64) -> usize {
        // Ramanujan's perimeter approximation, padded.
        let h =
            (3.0 * (self.a + self.b)) - ((3.0 * self.a + self.b) * (self.a + 3.0 * self.b)).sqrt();
        let perimeter = std::f64::consts::PI * h;
        ((1.1 * perimeter / max_step_m).ceil() as usize).clamp(64, 400_000)
    }
}

/// Uniform arc samples of the ellipse with the given foci and path sum, for
/// plotting and inspection.
pub fn sample_ellipse(
    focus_a: [f64; 2],
    focus_b: [f64; 2],
    path_sum_m: f64,
    count: usize,
) -> Result<Vec<[f64; 2]>> {
    if count < 3 {
        return Err(Error::invalid("ellipse sampling needs at least 3 points"));
    }
    let el = EllipseParam::new(focus_a, focus_b, path_sum_m)?;
    Ok((0..count)
        .map(|k| el.point(std::f64::consts::TAU * k as f64 / count as f64))
        .collect())
}

enum PairCrossing {
    /// The curves intersect at these points (1 or more candidates).
    Points(Vec<[f64; 2]>),
    /// Closest approach: representative midpoint and the gap between curves.
    Nearest([f64; 2], f64),
}

fn circle_circle(c1: [f64; 2], r1: f64, c2: [f64; 2], r2: f64) -> PairCrossing {
    let d = dist(c1, c2);
    let u = if d > 0.0 {
        [(c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d]
    } else {
        [1.0, 0.0]
    };
    if d > r1 + r2 {
        let p1 = [c1[0] + r1 * u[0], c1[1] + r1 * u[1]];
        let p2 = [c2[0] - r2 * u[0], c2[1] - r2 * u[1]];
        return PairCrossing::Nearest([(p1[0] + p2[0]) / 2.0, (p1[1] + p2[1]) / 2.0], d - r1 - r2);
    }
    if d < (r1 - r2).abs() {
        let s = if r1 >= r2 { 1.0 } else { -1.0 };
        let p1 = [c1[0] + s * r1 * u[0], c1[1] + s * r1 * u[1]];
        let p2 = [c2[0] + s * r2 * u[0], c2[1] + s * r2 * u[1]];
        return PairCrossing::Nearest(
            [(p1[0] + p2[0]) / 2.0, (p1[1] + p2[1]) / 2.0],
            (r1 - r2).abs() - d,
        );
    }
    // Standard two-circle intersection.
    let along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = (r1 * r1 - along * along).max(0.0);
    let h = h2.sqrt();
    let mid = [c1[0] + along * u[0], c1[1] + along * u[1]];
    let perp = [-u[1], u[0]];
    let p_a = [mid[0] + h * perp[0], mid[1] + h * perp[1]];
    let p_b = [mid[0] - h * perp[0], mid[1] - h * perp[1]];
    if h < 1e-12 {
        PairCrossing::Points(vec![p_a])
    } else {
        PairCrossing::Points(vec![p_a, p_b])
    }
}

fn circle_ellipse(center: [f64; 2], r: f64, el: &EllipseParam) -> PairCrossing {
    let g = |t: f64| dist(el.point(t), center) - r;
    let n = el.sample_count(5e-4);
    let step = std::f64::consts::TAU / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut nearest_t = 0.0;
    let mut nearest_abs = f64::INFINITY;
    let mut prev = g(0.0);
    for k in 0..n {
        let t0 = k as f64 * step;
        let t1 = t0 + step;
        let cur = g(t1);
        if prev.abs() < nearest_abs {
            nearest_abs = prev.abs();
            nearest_t = t0;
        }
        if prev == 0.0 {
            roots.push(t0);
        } else if prev.signum() != cur.signum() && cur != 0.0 {
            // Bisection on the bracket.
            let (mut lo, mut hi, mut glo) = (t0, t1, prev);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo.signum() == gm.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    if roots.is_empty() {
        // Sharpen the closest approach around the best sample.
        let t = golden_section_max(nearest_t - step, nearest_t + step, 60, |t| -g(t).abs());
        let e = el.point(t);
        let gap = g(t).abs();
        let to_e = sub(e, center);
        let len = norm(to_e);
        let on_circle = if len > 0.0 {
            [center[0] + r * to_e[0] / len, center[1] + r * to_e[1] / len]
        } else {
            [center[0] + r, center[1]]
        };
        return PairCrossing::Nearest(
            [(e[0] + on_circle[0]) / 2.0, (e[1] + on_circle[1]) / 2.0],
            gap,
        );
    }
    PairCrossing::Points(roots.into_iter().map(|t| el.point(t)).collect())
}

/// Intersects every sensing circle with every other and with the link ellipse,
/// picks the crossing candidates that agree best, and reports the residual
/// spread plus the distance from the consensus point to the reference.
pub fn validate_geometry(
    circles: &[([f64; 2], f64)],
    ellipse: ([f64; 2], [f64; 2], f64),
    reference: &ValidationReference,
) -> Result<ValidationReport> {
    if circles.is_empty() {
        return Err(Error::invalid("validation needs at least one circle"));
    }
    for &(_, r) in circles {
        if !(r > 0.0) {
            return Err(Error::invalid("circle radii must be positive"));
        }
    }
    let el = EllipseParam::new(ellipse.0, ellipse.1, ellipse.2)?;

    let mut crossings: Vec<PairCrossing> = Vec::new();
    for i in 0..circles.len() {
        for j in (i + 1)..circles.len() {
            crossings.push(circle_circle(
                circles[i].0,
                circles[i].1,
                circles[j].0,
                circles[j].1,
            ));
        }
    }
    for &(c, r) in circles {
        crossings.push(circle_ellipse(c, r, &el));
    }

    // Choose one representative per pair, minimizing the spread of the chosen
    // set; closest-approach pairs contribute their fixed midpoint. The curve
    // set is mirror-symmetric about the node baseline, so two combinations can
    // tie — ties (within 1 µm) break toward the reference geometry, which
    // encodes which side was actually scanned.
    let choices: Vec<Vec<[f64; 2]>> = crossings
        .iter()
        .map(|c| match c {
            PairCrossing::Points(ps) => ps.clone(),
            PairCrossing::Nearest(mid, _) => vec![*mid],
        })
        .collect();
    let ref_distance_of = |p: [f64; 2]| match reference {
        ValidationReference::Wall(w) => point_segment_distance(p, w),
        ValidationReference::Point(q) => dist(p, *q),
    };
    let mut pick = vec![0usize; choices.len()];
    let mut best: Option<(f64, f64, [f64; 2])> = None; // spread, ref dist, mean
    loop {
        let pts: Vec<[f64; 2]> = pick.iter().zip(&choices).map(|(&k, ch)| ch[k]).collect();
        let mut spread = 0.0f64;
        for a in 0..pts.len() {
            for b in (a + 1)..pts.len() {
                spread = spread.max(dist(pts[a], pts[b]));
            }
        }
        let nf = pts.len() as f64;
        let mean = pts.iter().fold([0.0, 0.0], |acc, p| {
            [acc[0] + p[0] / nf, acc[1] + p[1] / nf]
        });
        let rd = ref_distance_of(mean);
        let better = match best {
            None => true,
            Some((bs, brd, _)) => spread < bs - 1e-6 || (spread < bs + 1e-6 && rd < brd),
        };
        if better {
            best = Some((spread, rd, mean));
        }
        // Advance the mixed-radix counter over all combinations.
        let mut i = 0;
        loop {
            if i == pick.len() {
                break;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            break;
        }
    }
    let (best_spread, _, mean_point) = best.expect("at least one combination exists");
    let mut max_gap = best_spread;
    for c in &crossings {
        if let PairCrossing::Nearest(_, gap) = c {
            max_gap = max_gap.max(*gap);
        }
    }
    let reference_distance = ref_distance_of(mean_point);
    Ok(ValidationReport {
        intersected: max_gap <= 0.5,
        max_pairwise_gap_m: max_gap,
        mean_point_m: mean_point,
        reference_distance_m: reference_distance,
    })
}

// --- tests -------------------------------------------------------------------
