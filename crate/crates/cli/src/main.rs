//! Terminal front end for the sensing pipeline: synthesizes angular scans,
//! extracts echo paths, maps and clusters reflectors, associates link paths,
//! estimates cross-sections, and exports every artifact as plain CSV.
//!
//! * each artifact-writing subcommand also writes a `manifest.toml` recording
//!   every effective parameter, so identical manifests reproduce identical bytes
//! * the `ISACMAP_OUT_DIR` environment variable overrides any `--out` flag
//! * exit codes: 0 success, 2 command-line problem, 3 input-data problem

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use isacmap::extract::{
    detect_peaks, refine_delays, spread_statistics, Mpc, PeakGateParams, SpreadStats,
};
use isacmap::geo::{
    cluster_scatterers, project_mpcs, sample_ellipse, validate_geometry, Cluster,
    ValidationReference,
};
use isacmap::golay::{complementary_autocorr_sum, generate_golay_pair};
use isacmap::io;
use isacmap::model::{Cir, NodeId, Scene, SounderConfig};
use isacmap::rcs::{rcs_pipeline, separate_link_echoes, RcsReport};
use isacmap::synth::{render_bistatic, scan_monostatic};

// --- command line -------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "isacmap",
    version,
    about = "Map indoor reflectors and their cross-sections from angular-scan channel soundings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize both angular scans and the link channel for a scene
    Simulate(SimulateArgs),
    /// Check the complementary-pair zero-sidelobe autocorrelation identity
    Golay(GolayArgs),
    /// Detect and refine echo paths in simulated impulse responses
    Extract(ExtractArgs),
    /// Back-project scan paths and cluster them into reflector estimates
    Map(MapArgs),
    /// Match link echoes to mapped reflector clusters by excess delay
    Associate(AssociateArgs),
    /// Cross-check the two sensing circles against the link ellipse
    Validate(ValidateArgs),
    /// Estimate reflector cross-sections from the link channel
    Rcs(RcsArgs),
    /// Delay and angle dispersion statistics of a power map
    Spreads(SpreadsArgs),
    /// Run the whole pipeline on a scene and print a summary
    Report(ReportArgs),
}

#[derive(Args)]
struct OutArgs {
    /// Output directory (ISACMAP_OUT_DIR overrides this flag)
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl OutArgs {
    fn resolve(&self) -> PathBuf {
        std::env::var_os("ISACMAP_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| self.out.clone())
    }
}

#[derive(Args)]
struct GateArgs {
    /// Detection threshold (dB)
    #[arg(long = "pmin", default_value_t = -55.0, allow_negative_numbers = true)]
    pmin: f64,
    /// Minimum delay separation between kept peaks (ns)
    #[arg(long = "dtau-min", default_value_t = 2.2)]
    dtau_min: f64,
    /// Minimum one-way range for scanned echoes (m)
    #[arg(long = "rmin", default_value_t = 0.5)]
    rmin: f64,
    /// Maximum kept peaks per impulse response
    #[arg(long = "kmax", default_value_t = 4)]
    kmax: usize,
    /// Dynamic range below the map maximum kept in dispersion statistics (dB)
    #[arg(long = "floor-db", default_value_t = 30.0)]
    floor_db: f64,
}

impl GateArgs {
    fn gates(&self) -> CliResult<PeakGateParams> {
        let gates = PeakGateParams {
            p_min_db: self.pmin,
            dtau_min_s: self.dtau_min * 1e-9,
            r_min_m: self.rmin,
            k_max: self.kmax,
        };
        gates
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.floor_db > 0.0) {
            return Err(CliError::Usage(
                "--floor-db must be a positive dynamic range".to_string(),
            ));
        }
        Ok(gates)
    }
}

#[derive(Args)]
struct ClusterArgs {
    /// Neighbor radius for clustering scatterer points (m)
    #[arg(long, default_value_t = 0.40)]
    eps: f64,
    /// Minimum members per kept cluster
    #[arg(long = "min-points", default_value_t = 2)]
    min_points: usize,
}

#[derive(Args)]
struct AssocArgs {
    /// Excess-delay tolerance for cluster association (ns)
    #[arg(long = "tol-ns", default_value_t = 5.0)]
    tol_ns: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scene document
    #[arg(long)]
    scene: PathBuf,
    /// Forward-model random seed (phases and noise)
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct GolayArgs {
    /// Sequence length to check (power of two)
    #[arg(long)]
    check: usize,
}

#[derive(Args)]
struct ExtractArgs {
    /// Directory holding simulate outputs (cir_*.csv, padp_*.csv)
    #[arg(long = "in", default_value = "out")]
    input: PathBuf,
    #[command(flatten)]
    gates: GateArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MapArgs {
    /// Scene document (node geometry)
    #[arg(long)]
    scene: PathBuf,
    /// Node-1 path table
    #[arg(long = "mpcs-mono1", default_value = "out/mpcs_mono1.csv")]
    mpcs_mono1: PathBuf,
    /// Node-2 path table (omit to map node 1 alone)
    #[arg(long = "mpcs-mono2")]
    mpcs_mono2: Option<PathBuf>,
    #[command(flatten)]
    cluster: ClusterArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct AssociateArgs {
    /// Scene document (node geometry)
    #[arg(long)]
    scene: PathBuf,
    /// Link path table (excess delays relative to the direct path)
    #[arg(long = "comm-mpcs", default_value = "out/mpcs_bistatic.csv")]
    comm_mpcs: PathBuf,
    /// Clustered point table written by `map`
    #[arg(long, default_value = "out/points.csv")]
    points: PathBuf,
    #[command(flatten)]
    assoc: AssocArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scene document (node geometry and reference wall)
    #[arg(long)]
    scene: PathBuf,
    /// Sensing radius measured from node 1 (m)
    #[arg(long, default_value_t = 3.662)]
    r1: f64,
    /// Sensing radius measured from node 2 (m)
    #[arg(long, default_value_t = 3.407)]
    r2: f64,
    /// Reflected link path length (m)
    #[arg(long = "path-len", default_value_t = 7.066)]
    path_len: f64,
    /// Validate against this point instead of the scene's first wall: "x,y"
    #[arg(long = "ref-point", value_parser = parse_point, allow_hyphen_values = true)]
    ref_point: Option<[f64; 2]>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct RcsArgs {
    /// Scene document (node geometry and link beamwidth)
    #[arg(long)]
    scene: PathBuf,
    /// Link impulse response
    #[arg(long, default_value = "out/cir_bistatic.csv")]
    cir: PathBuf,
    /// Clustered point table written by `map`
    #[arg(long, default_value = "out/points.csv")]
    points: PathBuf,
    #[command(flatten)]
    gates: GateArgs,
    #[command(flatten)]
    assoc: AssocArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SpreadsArgs {
    /// Power map CSV
    #[arg(long, default_value = "out/padp_mono1.csv")]
    padp: PathBuf,
    /// Dynamic range below the map maximum kept in the statistics (dB)
    #[arg(long = "floor-db", default_value_t = 30.0)]
    floor_db: f64,
    /// Basename prefix for the emitted statistics files
    #[arg(long, default_value = "mono1")]
    tag: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Scene document
    #[arg(long)]
    scene: PathBuf,
    /// Forward-model random seed (phases and noise)
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    gates: GateArgs,
    #[command(flatten)]
    cluster: ClusterArgs,
    #[command(flatten)]
    assoc: AssocArgs,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"x,y\"".to_string());
    }
    let x: f64 = parts[0].trim().parse().map_err(|_| "expected \"x,y\"")?;
    let y: f64 = parts[1].trim().parse().map_err(|_| "expected \"x,y\"")?;
    Ok([x, y])
}

// --- error and exit handling --------------------------------------------------

enum CliError {
    /// Problem with flags or their values → exit 2.
    Usage(String),
    /// Problem with input files or their content → exit 3.
    Data(String),
}

impl From<isacmap::Error> for CliError {
    fn from(e: isacmap::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(format!("i/o failure: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Golay(args) => run_golay(&args),
        Command::Extract(args) => run_extract(&args),
        Command::Map(args) => run_map(&args),
        Command::Associate(args) => run_associate(&args),
        Command::Validate(args) => run_validate(&args),
        Command::Rcs(args) => run_rcs(&args),
        Command::Spreads(args) => run_spreads(&args),
        Command::Report(args) => run_report(&args),
    }
}

// --- run manifest -------------------------------------------------------------

const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Complete record of one invocation: inputs, every effective parameter, and
/// the output directory. Identical manifests produce byte-identical artifacts.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct RunManifest {
    schema_version: u32,
    command: String,
    inputs: Vec<String>,
    out_dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    p_min_db: f64,
    dtau_min_ns: f64,
    r_min_m: f64,
    k_max: usize,
    floor_db: f64,
    cluster_eps_m: f64,
    cluster_min_points: usize,
    assoc_tol_ns: f64,
}

impl RunManifest {
    fn new(command: &str, inputs: Vec<String>, out_dir: &Path) -> RunManifest {
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            out_dir: out_dir.display().to_string(),
            seed: None,
            p_min_db: -55.0,
            dtau_min_ns: 2.2,
            r_min_m: 0.5,
            k_max: 4,
            floor_db: 30.0,
            cluster_eps_m: 0.40,
            cluster_min_points: 2,
            assoc_tol_ns: 5.0,
        }
    }

    fn with_gates(mut self, gates: &GateArgs) -> RunManifest {
        self.p_min_db = gates.pmin;
        self.dtau_min_ns = gates.dtau_min;
        self.r_min_m = gates.rmin;
        self.k_max = gates.kmax;
        self.floor_db = gates.floor_db;
        self
    }

    fn with_cluster(mut self, cluster: &ClusterArgs) -> RunManifest {
        self.cluster_eps_m = cluster.eps;
        self.cluster_min_points = cluster.min_points;
        self
    }

    fn with_assoc(mut self, assoc: &AssocArgs) -> RunManifest {
        self.assoc_tol_ns = assoc.tol_ns;
        self
    }

    fn with_seed(mut self, seed: u64) -> RunManifest {
        self.seed = Some(seed);
        self
    }

    fn write(&self, dir: &Path) -> CliResult<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| CliError::Data(format!("manifest serialization: {e}")))?;
        fs::write(dir.join("manifest.toml"), text)?;
        Ok(())
    }
}

fn prepare_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

// --- shared pipeline pieces ---------------------------------------------------

fn load_scene(path: &Path) -> CliResult<(Scene, SounderConfig)> {
    Ok(io::read_scene_doc(path)?)
}

fn extract_from_cirs(cirs: &[Cir], gates: &PeakGateParams) -> CliResult<Vec<Mpc>> {
    let mut all = Vec::new();
    for cir in cirs {
        let mut mpcs = detect_peaks(cir, gates)?;
        refine_delays(cir, &mut mpcs);
        all.extend(mpcs);
    }
    Ok(all)
}

/// Separates link echoes from the direct path; excess delays in the result
/// are relative to the direct arrival.
fn comm_mpcs_from_bistatic(cir: &Cir, gates: &PeakGateParams) -> CliResult<Vec<Mpc>> {
    Ok(separate_link_echoes(cir, gates)?.echoes)
}

fn cluster_points(
    scene: &Scene,
    mpcs1: &[Mpc],
    mpcs2: &[Mpc],
    cluster: &ClusterArgs,
) -> CliResult<(Vec<Cluster>, Vec<isacmap::geo::ScattererPoint>)> {
    let mut points = project_mpcs(mpcs1, NodeId::Mono1, scene.mono1_pos_m)?;
    points.extend(project_mpcs(mpcs2, NodeId::Mono2, scene.mono2_pos_m)?);
    let clusters = cluster_scatterers(&points, cluster.eps, cluster.min_points)?;
    let clustered: Vec<&isacmap::geo::ScattererPoint> =
        clusters.iter().flat_map(|c| c.members.iter()).collect();
    let leftovers = points
        .iter()
        .filter(|p| !clustered.iter().any(|m| *m == *p))
        .cloned()
        .collect();
    Ok((clusters, leftovers))
}

fn write_spread_stats(out: &Path, tag: &str, stats: &SpreadStats) -> CliResult<()> {
    io::write_series_csv(
        &out.join(format!("delay_spreads_{tag}.csv")),
        "angle_deg",
        "delay_spread_ns",
        &stats
            .per_angle_delay_spread
            .iter()
            .map(|&(a, s)| (a, s * 1e9))
            .collect::<Vec<_>>(),
    )?;
    io::write_series_csv(
        &out.join(format!("angle_spreads_{tag}.csv")),
        "delay_ns",
        "angle_spread_deg",
        &stats
            .per_bin_angle_spread
            .iter()
            .map(|&(d, s)| (d * 1e9, s))
            .collect::<Vec<_>>(),
    )?;
    let delay_cdf_ns = isacmap::extract::Cdf {
        samples: stats
            .delay_spread_cdf
            .samples
            .iter()
            .map(|s| s * 1e9)
            .collect(),
        probabilities: stats.delay_spread_cdf.probabilities.clone(),
    };
    io::write_cdf_csv(
        &out.join(format!("delay_spread_cdf_{tag}.csv")),
        &delay_cdf_ns,
    )?;
    io::write_cdf_csv(
        &out.join(format!("angle_spread_cdf_{tag}.csv")),
        &stats.angle_spread_cdf,
    )?;
    let fits = format!(
        "metric,mean,std\ndelay_spread_ns,{},{}\nangle_spread_deg,{},{}\n",
        io::fmt_sig(stats.delay_spread_fit.mean * 1e9),
        io::fmt_sig(stats.delay_spread_fit.std * 1e9),
        io::fmt_sig(stats.angle_spread_fit.mean),
        io::fmt_sig(stats.angle_spread_fit.std)
    );
    fs::write(out.join(format!("spread_fits_{tag}.csv")), fits)?;
    Ok(())
}

// --- subcommands --------------------------------------------------------------

fn run_simulate(args: &SimulateArgs) -> CliResult<()> {
    let (scene, config) = load_scene(&args.scene)?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let mut written = 0usize;
    for node in [NodeId::Mono1, NodeId::Mono2] {
        let (padp, cirs) = scan_monostatic(&scene, node, &config, args.seed)?;
        io::write_padp_csv(&out.join(format!("padp_{}.csv", node.name())), &padp)?;
        for (i, cir) in cirs.iter().enumerate() {
            io::write_cir_csv(&out.join(format!("cir_{}_a{i:03}.csv", node.name())), cir)?;
            written += 1;
        }
    }
    let bi = render_bistatic(&scene, &config, args.seed)?;
    io::write_cir_csv(&out.join("cir_bistatic.csv"), &bi)?;
    written += 1;
    RunManifest::new("simulate", vec![path_str(&args.scene)], &out)
        .with_seed(args.seed)
        .write(&out)?;
    println!(
        "wrote {written} impulse responses and 2 power maps to {}",
        out.display()
    );
    Ok(())
}

fn run_golay(args: &GolayArgs) -> CliResult<()> {
    let pair = generate_golay_pair(args.check).map_err(|e| CliError::Usage(e.to_string()))?;
    let sums = complementary_autocorr_sum(&pair)?;
    let center = pair.len() - 1;
    let peak = sums[center];
    let max_sidelobe = sums
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != center)
        .map(|(_, &v)| v.abs())
        .max()
        .unwrap_or(0);
    println!("peak={peak} max_sidelobe={max_sidelobe}");
    Ok(())
}

fn sorted_cir_paths(dir: &Path, node_name: &str) -> CliResult<Vec<PathBuf>> {
    let prefix = format!("cir_{node_name}_a");
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if name.starts_with(&prefix) && name.ends_with(".csv") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

fn run_extract(args: &ExtractArgs) -> CliResult<()> {
    let gates = args.gates.gates()?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let mut found_any = false;
    for node in [NodeId::Mono1, NodeId::Mono2] {
        let cir_paths = sorted_cir_paths(&args.input, node.name())?;
        if cir_paths.is_empty() {
            continue;
        }
        found_any = true;
        let cirs: Vec<Cir> = cir_paths
            .iter()
            .map(|p| io::read_cir_csv(p))
            .collect::<Result<_, _>>()?;
        let mpcs = extract_from_cirs(&cirs, &gates)?;
        io::write_mpcs_csv(
            &out.join(format!("mpcs_{}.csv", node.name())),
            &mpcs,
            cirs[0].tap_spacing_s,
        )?;
        println!("{}: scan paths kept: {}", node.name(), mpcs.len());
        let padp_path = args.input.join(format!("padp_{}.csv", node.name()));
        if padp_path.exists() {
            let padp = io::read_padp_csv(&padp_path)?;
            let stats = spread_statistics(&padp, args.gates.floor_db)?;
            write_spread_stats(&out, node.name(), &stats)?;
        }
    }
    let bi_path = args.input.join("cir_bistatic.csv");
    if bi_path.exists() {
        found_any = true;
        let bi = io::read_cir_csv(&bi_path)?;
        let comm = comm_mpcs_from_bistatic(&bi, &gates)?;
        io::write_mpcs_csv(&out.join("mpcs_bistatic.csv"), &comm, bi.tap_spacing_s)?;
        println!("bistatic: link echoes kept: {}", comm.len());
    }
    if !found_any {
        return Err(CliError::Data(format!(
            "no cir_*.csv files found in {}",
            args.input.display()
        )));
    }
    RunManifest::new("extract", vec![path_str(&args.input)], &out)
        .with_gates(&args.gates)
        .write(&out)?;
    Ok(())
}

fn print_cluster_table(clusters: &[Cluster]) {
    println!("label  members  centroid_x_m  centroid_y_m  total_power_db");
    for c in clusters {
        println!(
            "{:<5}  {:>7}  {:>12.4}  {:>12.4}  {:>14.2}",
            c.label,
            c.members.len(),
            c.centroid_m[0],
            c.centroid_m[1],
            10.0 * c.total_linear_power().log10()
        );
    }
}

fn run_map(args: &MapArgs) -> CliResult<()> {
    let (scene, _config) = load_scene(&args.scene)?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let mpcs1 = io::read_mpcs_csv(&args.mpcs_mono1)?;
    let mpcs2 = match &args.mpcs_mono2 {
        Some(path) => io::read_mpcs_csv(path)?,
        None => Vec::new(),
    };
    let (clusters, leftovers) = cluster_points(&scene, &mpcs1, &mpcs2, &args.cluster)?;
    io::write_points_csv(&out.join("points.csv"), &clusters, &leftovers)?;
    io::write_clusters_csv(&out.join("clusters.csv"), &clusters)?;
    let mut inputs = vec![path_str(&args.scene), path_str(&args.mpcs_mono1)];
    if let Some(p) = &args.mpcs_mono2 {
        inputs.push(path_str(p));
    }
    RunManifest::new("map", inputs, &out)
        .with_cluster(&args.cluster)
        .write(&out)?;
    print_cluster_table(&clusters);
    Ok(())
}

fn print_association_lines(associations: &[isacmap::geo::Association]) {
    for a in associations {
        match (&a.cluster_label, a.residual_s) {
            (Some(label), Some(residual)) => println!(
                "echo at +{:.3} ns ({:.2} dB) -> {label} (residual {:+.3} ns)",
                a.measured_excess_delay_s * 1e9,
                a.comm_mpc.power_db,
                residual * 1e9
            ),
            _ => println!(
                "echo at +{:.3} ns ({:.2} dB) -> unmatched",
                a.measured_excess_delay_s * 1e9,
                a.comm_mpc.power_db
            ),
        }
    }
}

fn run_associate(args: &AssociateArgs) -> CliResult<()> {
    let (scene, config) = load_scene(&args.scene)?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let comm = io::read_mpcs_csv(&args.comm_mpcs)?;
    let (clusters, _leftovers) = io::read_points_csv(&args.points)?;
    let associations = isacmap::geo::associate_mpcs(
        &comm,
        &clusters,
        scene.mono1_pos_m,
        scene.mono2_pos_m,
        config.d_los_m,
        args.assoc.tol_ns * 1e-9,
    )?;
    io::write_associations_csv(&out.join("associations.csv"), &associations)?;
    RunManifest::new(
        "associate",
        vec![
            path_str(&args.scene),
            path_str(&args.comm_mpcs),
            path_str(&args.points),
        ],
        &out,
    )
    .with_assoc(&args.assoc)
    .write(&out)?;
    print_association_lines(&associations);
    Ok(())
}

fn circle_samples(center: [f64; 2], radius: f64, count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / count as f64;
            let (s, c) = t.sin_cos();
            [center[0] + radius * c, center[1] + radius * s]
        })
        .collect()
}

fn run_validate(args: &ValidateArgs) -> CliResult<()> {
    let (scene, _config) = load_scene(&args.scene)?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let reference = match args.ref_point {
        Some(p) => ValidationReference::Point(p),
        None => match scene.walls.first() {
            Some(wall) => ValidationReference::Wall(wall.clone()),
            None => {
                return Err(CliError::Data(
                    "scene has no wall to validate against; pass --ref-point".to_string(),
                ))
            }
        },
    };
    let circles = [(scene.mono1_pos_m, args.r1), (scene.mono2_pos_m, args.r2)];
    let ellipse = (scene.mono1_pos_m, scene.mono2_pos_m, args.path_len);
    let report = validate_geometry(&circles, ellipse, &reference)?;
    io::write_validation_csv(&out.join("validation.csv"), &report)?;
    let curves = vec![
        (
            "node1-circle".to_string(),
            circle_samples(scene.mono1_pos_m, args.r1, 720),
        ),
        (
            "node2-circle".to_string(),
            circle_samples(scene.mono2_pos_m, args.r2, 720),
        ),
        (
            "link-ellipse".to_string(),
            sample_ellipse(scene.mono1_pos_m, scene.mono2_pos_m, args.path_len, 720)?,
        ),
    ];
    io::write_curves_csv(&out.join("curves.csv"), &curves)?;
    RunManifest::new("validate", vec![path_str(&args.scene)], &out).write(&out)?;
    println!(
        "intersected={} max_gap={:.4} m consensus=({:.4}, {:.4}) reference_distance={:.4} m",
        report.intersected,
        report.max_pairwise_gap_m,
        report.mean_point_m[0],
        report.mean_point_m[1],
        report.reference_distance_m
    );
    Ok(())
}

fn print_rcs_table(report: &RcsReport) {
    println!("label  d_bi_m  r_t_m  r_r_m  delta_p_db  sigma_dbsm");
    for e in &report.estimates {
        println!(
            "{:<5}  {:>6.3}  {:>5.3}  {:>5.3}  {:>10.2}  {:>10.2}",
            e.label, e.d_bi_m, e.r_t_m, e.r_r_m, e.delta_p_db, e.sigma_dbsm
        );
    }
}

fn run_rcs(args: &RcsArgs) -> CliResult<()> {
    let (scene, config) = load_scene(&args.scene)?;
    let gates = args.gates.gates()?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let bi = io::read_cir_csv(&args.cir)?;
    let (clusters, _leftovers) = io::read_points_csv(&args.points)?;
    let report = rcs_pipeline(
        &bi,
        &gates,
        &clusters,
        &config,
        scene.mono1_pos_m,
        scene.mono2_pos_m,
        args.assoc.tol_ns * 1e-9,
    )?;
    io::write_rcs_csv(&out.join("rcs.csv"), &report.estimates)?;
    io::write_associations_csv(&out.join("associations.csv"), &report.associations)?;
    let comm: Vec<Mpc> = report
        .associations
        .iter()
        .map(|a| a.comm_mpc.clone())
        .collect();
    io::write_mpcs_csv(&out.join("mpcs_bistatic.csv"), &comm, bi.tap_spacing_s)?;
    RunManifest::new(
        "rcs",
        vec![
            path_str(&args.scene),
            path_str(&args.cir),
            path_str(&args.points),
        ],
        &out,
    )
    .with_gates(&args.gates)
    .with_assoc(&args.assoc)
    .write(&out)?;
    print_rcs_table(&report);
    Ok(())
}

fn run_spreads(args: &SpreadsArgs) -> CliResult<()> {
    if !(args.floor_db > 0.0) {
        return Err(CliError::Usage(
            "--floor-db must be a positive dynamic range".to_string(),
        ));
    }
    let out = args.out.resolve();
    prepare_out_dir(&out)?;
    let padp = io::read_padp_csv(&args.padp)?;
    let stats = spread_statistics(&padp, args.floor_db)?;
    write_spread_stats(&out, &args.tag, &stats)?;
    let mut manifest = RunManifest::new("spreads", vec![path_str(&args.padp)], &out);
    manifest.floor_db = args.floor_db;
    manifest.write(&out)?;
    println!(
        "delay spread: mean {:.3} ns, std {:.3} ns ({} angles)",
        stats.delay_spread_fit.mean * 1e9,
        stats.delay_spread_fit.std * 1e9,
        stats.per_angle_delay_spread.len()
    );
    println!(
        "angle spread: mean {:.3} deg, std {:.3} deg ({} delay bins)",
        stats.angle_spread_fit.mean,
        stats.angle_spread_fit.std,
        stats.per_bin_angle_spread.len()
    );
    Ok(())
}

fn run_report(args: &ReportArgs) -> CliResult<()> {
    let (scene, config) = load_scene(&args.scene)?;
    let gates = args.gates.gates()?;
    let out = args.out.resolve();
    prepare_out_dir(&out)?;

    // Forward model.
    let (padp1, cirs1) = scan_monostatic(&scene, NodeId::Mono1, &config, args.seed)?;
    let (padp2, cirs2) = scan_monostatic(&scene, NodeId::Mono2, &config, args.seed)?;
    let bi = render_bistatic(&scene, &config, args.seed)?;
    io::write_padp_csv(&out.join("padp_mono1.csv"), &padp1)?;
    io::write_padp_csv(&out.join("padp_mono2.csv"), &padp2)?;
    for (node, cirs) in [(NodeId::Mono1, &cirs1), (NodeId::Mono2, &cirs2)] {
        for (i, cir) in cirs.iter().enumerate() {
            io::write_cir_csv(&out.join(format!("cir_{}_a{i:03}.csv", node.name())), cir)?;
        }
    }
    io::write_cir_csv(&out.join("cir_bistatic.csv"), &bi)?;

    // Echo extraction.
    let mpcs1 = extract_from_cirs(&cirs1, &gates)?;
    let mpcs2 = extract_from_cirs(&cirs2, &gates)?;
    io::write_mpcs_csv(&out.join("mpcs_mono1.csv"), &mpcs1, cirs1[0].tap_spacing_s)?;
    io::write_mpcs_csv(&out.join("mpcs_mono2.csv"), &mpcs2, cirs2[0].tap_spacing_s)?;

    // Reflector map.
    let (clusters, leftovers) = cluster_points(&scene, &mpcs1, &mpcs2, &args.cluster)?;
    io::write_points_csv(&out.join("points.csv"), &clusters, &leftovers)?;
    io::write_clusters_csv(&out.join("clusters.csv"), &clusters)?;

    // Link association and cross-sections.
    let report = rcs_pipeline(
        &bi,
        &gates,
        &clusters,
        &config,
        scene.mono1_pos_m,
        scene.mono2_pos_m,
        args.assoc.tol_ns * 1e-9,
    )?;
    io::write_rcs_csv(&out.join("rcs.csv"), &report.estimates)?;
    io::write_associations_csv(&out.join("associations.csv"), &report.associations)?;
    let comm: Vec<Mpc> = report
        .associations
        .iter()
        .map(|a| a.comm_mpc.clone())
        .collect();
    io::write_mpcs_csv(&out.join("mpcs_bistatic.csv"), &comm, bi.tap_spacing_s)?;

    // Dispersion statistics.
    let stats1 = spread_statistics(&padp1, args.gates.floor_db)?;
    let stats2 = spread_statistics(&padp2, args.gates.floor_db)?;
    write_spread_stats(&out, "mono1", &stats1)?;
    write_spread_stats(&out, "mono2", &stats2)?;

    RunManifest::new("report", vec![path_str(&args.scene)], &out)
        .with_seed(args.seed)
        .with_gates(&args.gates)
        .with_cluster(&args.cluster)
        .with_assoc(&args.assoc)
        .write(&out)?;

    // Summary.
    println!(
        "scan: {} + {} paths from {} steering angles per node",
        mpcs1.len(),
        mpcs2.len(),
        config.angle_grid_deg.len()
    );
    println!();
    println!("reflector map ({} clusters)", clusters.len());
    print_cluster_table(&clusters);
    println!();
    println!("link echoes");
    print_association_lines(&report.associations);
    println!();
    println!("cross-sections");
    print_rcs_table(&report);
    println!();
    println!(
        "dispersion node1: delay {:.3} ns / angle {:.3} deg (means)",
        stats1.delay_spread_fit.mean * 1e9,
        stats1.angle_spread_fit.mean
    );
    println!(
        "dispersion node2: delay {:.3} ns / angle {:.3} deg (means)",
        stats2.delay_spread_fit.mean * 1e9,
        stats2.angle_spread_fit.mean
    );
    println!();
    println!("artifacts in {}", out.display());
    Ok(())
}

// --- tests --------------------------------------------------------------------
