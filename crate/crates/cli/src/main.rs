//! `dmdclust` command-line frontend. Every run writes its artifacts plus a
//! `config.json` echo into the `--out` directory.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dmdclust::clustering::{adjusted_rand_index, cut, ward_constrained, ConnectivityGraph, Dendrogram};
use dmdclust::dmd::{
    decompose_with_svd, recover_coefficients, reconstruction_error, scale_modes, select_rank, sequential_snapshots,
    SpectralDecomposition, TruncationPolicy,
};
use dmdclust::features::{self, embed, extract, FeatureModel, FeatureSet};
use dmdclust::hankel::{build_ensemble_by_series, build_single_series, DelayMatrixPair};
use dmdclust::imaging::{
    away_from_boundaries, best_permutation_agreement, label_map, mode_map, pixel_connectivity, pixel_profiles,
};
use dmdclust::io::{self, ComplexJson, DecompositionReport};
use dmdclust::linalg::{CMat, Svd};
use dmdclust::matrix_pencil::{pencil_decompose_with_svd, verify_adjoint_mode_match, verify_similarity};
use dmdclust::signal_model::{make_lattice_image, make_toy_ensemble_with_sigma, six_region_layout, RegionSpec, SeriesEnsemble};
use dmdclust::{c64, Error, Result};

#[derive(Parser)]
#[command(name = "dmdclust", version, about = "DMD / matrix pencil frequency estimation and series clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Three-group toy ensemble: spectrum, eigenvalues, features and k=3 labels.
    Toy(ToyArgs),
    /// DMD of one series from an ensemble CSV.
    Dmd(DecomposeArgs),
    /// Matrix pencil of one series, checked against DMD.
    Pencil(DecomposeArgs),
    /// Fit (or apply) the feature model on an ensemble CSV, optionally cluster.
    Features(FeatureArgs),
    /// Generate a synthetic lattice image with ground-truth regions.
    SynthLattice(SynthArgs),
    /// Segment a grayscale PGM by the local frequency content of its pixels.
    ClusterImage(ImageArgs),
}

#[derive(Args, Clone, Serialize)]
struct Truncation {
    /// Keep exactly this many singular directions.
    #[arg(long, group = "truncation")]
    rank: Option<usize>,
    /// Smallest rank capturing this fraction of the squared singular values.
    #[arg(long, group = "truncation")]
    energy: Option<f64>,
    /// Largest singular value gap above this relative floor (the default policy).
    #[arg(long, group = "truncation", num_args = 0..=1, default_missing_value = "1e-12")]
    gap: Option<f64>,
}

impl Truncation {
    fn policy(&self) -> Result<TruncationPolicy> {
        let p = match (self.rank, self.energy, self.gap) {
            (Some(r), _, _) => TruncationPolicy::FixedRank(r),
            (_, Some(e), _) => TruncationPolicy::Energy(e),
            (_, _, Some(g)) => TruncationPolicy::Gap(g),
            _ => TruncationPolicy::gap(),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct ToyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 19)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Scale each series' feature block to unit norm before clustering.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    truncation: Truncation,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Ensemble CSV (`series_id,t,dim,re,im`) holding a single series.
    #[arg(long)]
    input: PathBuf,
    /// Delay count; defaults to half the series length.
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    truncation: Truncation,
    /// Also compute the matrix pencil and report the similarity and adjoint residuals.
    #[arg(long, alias = "verify")]
    verify_pencil: bool,
    /// Write the operator and mode matrices as CSV.
    #[arg(long)]
    dump_matrices: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct FeatureArgs {
    /// Ensemble CSV (`series_id,t,dim,re,im`).
    #[arg(long)]
    input: PathBuf,
    /// Delay count; defaults to half the series length. Ignored with `--model`.
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    truncation: Truncation,
    /// Embed the series with a previously fitted `model.json` instead of fitting.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Cut the Ward dendrogram (complete graph) into this many clusters.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Layout {
    /// Six textured regions on a 3 x 2 grid.
    Six,
    /// One hexagonal region covering the whole image.
    Single,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    width: usize,
    #[arg(long, default_value_t = 200)]
    height: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Scan window the image is meant for; region cuts balance the pixels inside `d/2`.
    #[arg(long, default_value_t = 50)]
    d: usize,
    #[arg(long, value_enum, default_value_t = Layout::Six)]
    layout: Layout,
    /// Lattice period of the single-region layout.
    #[arg(long, default_value_t = 18.0)]
    period: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ImageArgs {
    /// 8-bit binary PGM.
    #[arg(long)]
    input: PathBuf,
    /// Scan window length (even).
    #[arg(long, default_value_t = 50)]
    d: usize,
    #[command(flatten)]
    truncation: Truncation,
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Connect diagonal neighbours too.
    #[arg(long)]
    diagonal: bool,
    /// Keep the window means.
    #[arg(long)]
    no_demean: bool,
    #[arg(long)]
    normalize: bool,
    /// Number of eigenvalue pairs to render as mode maps.
    #[arg(long, default_value_t = 3)]
    modes: usize,
    /// Ground-truth label map CSV (`i,j,label`) to score against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Pixels this close to a ground-truth boundary are left out of the score.
    #[arg(long, default_value_t = 5)]
    band: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Resolved run parameters, echoed to `config.json`.
#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    inputs: Vec<PathBuf>,
    d: Option<usize>,
    truncation: Option<TruncationPolicy>,
    seed: Option<u64>,
    sigma: Option<f64>,
    k: Option<usize>,
    out: PathBuf,
    options: BTreeMap<&'static str, Value>,
}

impl RunConfig {
    fn new(command: &'static str, out: &Path) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            d: None,
            truncation: None,
            seed: None,
            sigma: None,
            k: None,
            out: out.to_path_buf(),
            options: BTreeMap::new(),
        }
    }
}

struct Outputs {
    dir: PathBuf,
}

impl Outputs {
    fn create(config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(&config.out)?;
        let out = Self { dir: config.out.clone() };
        out.json("config.json", config)?;
        Ok(out)
    }

    fn file(&self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn text(&self, name: &str, body: &str) -> Result<()> {
        let mut w = self.file(name)?;
        w.write_all(body.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    fn matrix(&self, name: &str, m: &CMat) -> Result<()> {
        io::write_matrix_csv(m, self.file(name)?)
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidArgument(format!("cannot open {}: {e}", path.display())))
}

fn read_ensemble(path: &Path) -> Result<SeriesEnsemble> {
    io::read_ensemble_csv(open(path)?)
}

fn singular_values_csv(s: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in s.iter().enumerate() {
        out += &format!("{},{}\n", i + 1, v);
    }
    out
}

fn eigenvalues_csv(values: &[c64]) -> String {
    let mut out = String::from("index,re,im,modulus,phase\n");
    for (i, z) in values.iter().enumerate() {
        out += &format!("{i},{},{},{},{}\n", z.re, z.im, z.norm(), z.arg());
    }
    out
}

/// Long format `series_id,row,col,value`: row is the eigenvalue index, col the component.
fn features_csv(fs: &FeatureSet) -> String {
    let mut out = String::from("series_id,row,col,value\n");
    for (b, id) in fs.blocks.iter().zip(&fs.series_ids) {
        for j in 0..b.rows {
            for k in 0..b.cols {
                out += &format!("{id},{j},{k},{}\n", b.get(j, k));
            }
        }
    }
    out
}

fn complex_list(values: &[c64]) -> Vec<ComplexJson> {
    values.iter().map(|&z| z.into()).collect()
}

fn cluster(fs: &FeatureSet, graph: &ConnectivityGraph, k: usize) -> Result<(Dendrogram, Vec<usize>)> {
    let dendrogram = ward_constrained(fs, graph)?;
    let labels = cut(&dendrogram, k)?;
    Ok((dendrogram, labels))
}

fn default_d(ens: &SeriesEnsemble, d: Option<usize>) -> usize {
    d.unwrap_or(ens.samples() / 2)
}

fn run_toy(a: ToyArgs) -> Result<()> {
    let policy = a.truncation.policy()?;
    let mut cfg = RunConfig::new("toy", &a.out);
    cfg.d = Some(a.d);
    cfg.truncation = Some(policy);
    cfg.seed = Some(a.seed);
    cfg.sigma = Some(a.sigma);
    cfg.k = Some(a.k);
    cfg.options.insert("normalize", json!(a.normalize));
    if !(a.sigma >= 0.0) {
        return Err(Error::InvalidArgument("sigma must be >= 0".into()));
    }
    let out = Outputs::create(&cfg)?;

    let ens = make_toy_ensemble_with_sigma(a.seed, a.sigma);
    io::write_ensemble_csv(&ens, out.file("ensemble.csv")?)?;
    let pair = build_ensemble_by_series(&ens, a.d)?;
    let fit = features::fit(&pair, policy)?;
    let mut fs = extract(&fit.q, 1, ens.len())?;
    if a.normalize {
        fs = fs.normalized();
    }
    let (dendrogram, labels) = cluster(&fs, &ConnectivityGraph::complete(ens.len()), a.k)?;
    let truth = ens.labels.clone().unwrap_or_default();
    let ari = adjusted_rand_index(&labels, &truth)?;

    out.text("singular_values.csv", &singular_values_csv(&fit.singular_values))?;
    out.text("eigenvalues.csv", &eigenvalues_csv(&fit.model.eigenvalues))?;
    out.text("features.csv", &features_csv(&fs))?;
    io::write_dendrogram_csv(&dendrogram, out.file("dendrogram.csv")?)?;
    io::write_labels_csv(&labels, out.file("labels.csv")?)?;
    io::write_labels_csv(&truth, out.file("truth.csv")?)?;
    out.json(
        "summary.json",
        &json!({ "rank": fit.model.rank, "adjusted_rand_index": ari, "labels": labels }),
    )?;
    println!("rank {} adjusted Rand index {ari:.4}", fit.model.rank);
    Ok(())
}

struct Decomposed {
    pair: DelayMatrixPair,
    svd: Svd,
    rank: usize,
    dmd: SpectralDecomposition,
    report: DecompositionReport,
}

fn decompose_series(a: &DecomposeArgs, command: &'static str) -> Result<(Decomposed, Outputs)> {
    let policy = a.truncation.policy()?;
    let ens = read_ensemble(&a.input)?;
    if ens.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected a single series, got {}; use `features` for ensembles",
            ens.len()
        )));
    }
    let d = default_d(&ens, a.d);
    let mut cfg = RunConfig::new(command, &a.out);
    cfg.inputs.push(a.input.clone());
    cfg.d = Some(d);
    cfg.truncation = Some(policy);
    cfg.options.insert("verify_pencil", json!(a.verify_pencil));
    cfg.options.insert("dump_matrices", json!(a.dump_matrices));
    let out = Outputs::create(&cfg)?;

    let n = ens.dim();
    let pair = build_single_series(&ens.series[0], d)?;
    let svd = Svd::compute(&pair.x)?;
    let rank = select_rank(&svd.s, policy)?;
    let dmd = decompose_with_svd(&pair, &svd, rank)?;
    let snapshots = sequential_snapshots(&pair);
    let mut scaled = scale_modes(&dmd, &snapshots)?;
    scaled.coefficients = recover_coefficients(&dmd, &scaled, n, d)?;
    let report = DecompositionReport {
        rank,
        singular_values: svd.s.clone(),
        eigenvalues: complex_list(&dmd.eigenvalues),
        reconstruction_error: reconstruction_error(&dmd, &scaled, &snapshots),
        coefficients: Some(scaled.coefficients.iter().map(|v| complex_list(v)).collect()),
        similarity_residual: None,
        adjoint_match_residual: None,
    };
    Ok((Decomposed { pair, svd, rank, dmd, report }, out))
}

/// Adjoint-mode matching is undefined for colliding eigenvalues; that case
/// is reported as absent rather than failing the run.
fn adjoint_residual(dmd: &SpectralDecomposition, pencil: &dmdclust::matrix_pencil::PencilDecomposition) -> Result<Option<f64>> {
    match verify_adjoint_mode_match(dmd, pencil) {
        Ok(r) => Ok(Some(r)),
        Err(Error::DegenerateSpectrum) => {
            eprintln!("warning: eigenvalues collide, adjoint-mode match skipped");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn run_dmd(a: DecomposeArgs) -> Result<()> {
    let (mut dec, out) = decompose_series(&a, "dmd")?;
    if a.verify_pencil {
        let pencil = pencil_decompose_with_svd(&dec.pair, &dec.svd, dec.rank)?;
        dec.report.similarity_residual = Some(verify_similarity(&dec.dmd, &pencil)?);
        dec.report.adjoint_match_residual = adjoint_residual(&dec.dmd, &pencil)?;
    }
    if a.dump_matrices {
        out.matrix("reduced_operator.csv", &dec.dmd.reduced_operator)?;
        out.matrix("modes.csv", &dec.dmd.modes)?;
        out.matrix("adjoint_modes.csv", &dec.dmd.adjoint_modes)?;
    }
    out.json("decomposition.json", &dec.report)?;
    println!(
        "rank {} reconstruction error {:.3e}",
        dec.report.rank, dec.report.reconstruction_error
    );
    Ok(())
}

fn run_pencil(a: DecomposeArgs) -> Result<()> {
    let (mut dec, out) = decompose_series(&a, "pencil")?;
    let pencil = pencil_decompose_with_svd(&dec.pair, &dec.svd, dec.rank)?;
    dec.report.eigenvalues = complex_list(&pencil.eigenvalues);
    dec.report.similarity_residual = Some(verify_similarity(&dec.dmd, &pencil)?);
    dec.report.adjoint_match_residual = adjoint_residual(&dec.dmd, &pencil)?;
    if a.dump_matrices {
        out.matrix("pencil_operator.csv", &pencil.pencil_operator)?;
        out.matrix("right_generalized_eigenvectors.csv", &pencil.right_gen_eigs)?;
        out.matrix("left_generalized_eigenvectors.csv", &pencil.left_gen_eigs)?;
    }
    out.json("decomposition.json", &dec.report)?;
    println!(
        "rank {} similarity residual {:.3e}",
        dec.report.rank,
        dec.report.similarity_residual.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn run_features(a: FeatureArgs) -> Result<()> {
    let ens = read_ensemble(&a.input)?;
    let mut cfg = RunConfig::new("features", &a.out);
    cfg.inputs.push(a.input.clone());
    cfg.k = a.k;
    cfg.options.insert("normalize", json!(a.normalize));
    let out;
    let mut fs = if let Some(path) = &a.model {
        let model: FeatureModel =
            serde_json::from_reader(open(path)?).map_err(|e| Error::InvalidArgument(format!("bad model file: {e}")))?;
        cfg.inputs.push(path.clone());
        cfg.d = Some(model.d);
        out = Outputs::create(&cfg)?;
        // the model reads y(0..d-1) of each series
        let blocks = ens
            .series
            .iter()
            .map(|s| embed(&model, &s[..model.d.min(s.len())]))
            .collect::<Result<Vec<_>>>()?;
        out.text("eigenvalues.csv", &eigenvalues_csv(&model.eigenvalues))?;
        FeatureSet {
            series_ids: (0..blocks.len()).collect(),
            blocks,
        }
    } else {
        let policy = a.truncation.policy()?;
        let d = default_d(&ens, a.d);
        cfg.d = Some(d);
        cfg.truncation = Some(policy);
        out = Outputs::create(&cfg)?;
        let pair = build_ensemble_by_series(&ens, d)?;
        let fit = features::fit(&pair, policy)?;
        out.text("singular_values.csv", &singular_values_csv(&fit.singular_values))?;
        out.text("eigenvalues.csv", &eigenvalues_csv(&fit.model.eigenvalues))?;
        out.json("model.json", &fit.model)?;
        println!("rank {}", fit.model.rank);
        extract(&fit.q, ens.dim(), ens.len())?
    };
    if a.normalize {
        fs = fs.normalized();
    }
    out.text("features.csv", &features_csv(&fs))?;
    if let Some(k) = a.k {
        let (dendrogram, labels) = cluster(&fs, &ConnectivityGraph::complete(fs.len()), k)?;
        io::write_dendrogram_csv(&dendrogram, out.file("dendrogram.csv")?)?;
        io::write_labels_csv(&labels, out.file("labels.csv")?)?;
        if let Some(truth) = &ens.labels {
            println!("adjusted Rand index {:.4}", adjusted_rand_index(&labels, truth)?);
        }
    }
    Ok(())
}

fn run_synth(a: SynthArgs) -> Result<()> {
    let mut cfg = RunConfig::new("synth-lattice", &a.out);
    cfg.d = Some(a.d);
    cfg.seed = Some(a.seed);
    cfg.sigma = Some(a.sigma);
    cfg.options.insert("width", json!(a.width));
    cfg.options.insert("height", json!(a.height));
    cfg.options.insert("layout", json!(a.layout));
    if matches!(a.layout, Layout::Single) {
        cfg.options.insert("period", json!(a.period));
    }
    let regions = match a.layout {
        Layout::Six => six_region_layout(a.width, a.height, a.d / 2),
        Layout::Single => {
            let (w, h) = (a.width as f64, a.height as f64);
            vec![RegionSpec::hexagonal(vec![(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)], 0.0, a.period, 0.8)]
        }
    };
    let img = make_lattice_image(a.width, a.height, &regions, a.sigma, a.seed)?;
    let out = Outputs::create(&cfg)?;
    io::write_pgm(img.width, img.height, &img.pixels, out.file("image.pgm")?)?;
    let truth = img.region_labels.as_deref().unwrap_or_default();
    io::write_label_map_csv(truth, img.width, out.file("regions.csv")?)?;
    out.json("regions.json", &regions)?;
    Ok(())
}

/// One eigenvalue per conjugate pair, in the fitted order, skipping real ones.
fn mode_pairs(eigenvalues: &[c64], count: usize) -> Vec<usize> {
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| z.arg() > 1e-9 && z.arg() < PI - 1e-9)
        .map(|(i, _)| i)
        .take(count)
        .collect()
}

fn run_cluster_image(a: ImageArgs) -> Result<()> {
    let policy = a.truncation.policy()?;
    let mut cfg = RunConfig::new("cluster-image", &a.out);
    cfg.inputs.push(a.input.clone());
    cfg.inputs.extend(a.truth.clone());
    cfg.d = Some(a.d);
    cfg.truncation = Some(policy);
    cfg.k = Some(a.k);
    cfg.options.insert("diagonal", json!(a.diagonal));
    cfg.options.insert("demean", json!(!a.no_demean));
    cfg.options.insert("normalize", json!(a.normalize));
    cfg.options.insert("modes", json!(a.modes));
    cfg.options.insert("band", json!(a.band));
    let img = io::read_pgm(open(&a.input)?)?;
    let truth = match &a.truth {
        Some(p) => Some(io::read_label_map_csv(open(p)?, img.width, img.height)?),
        None => None,
    };
    let out = Outputs::create(&cfg)?;

    let pixels = pixel_profiles(&img, a.d, !a.no_demean)?;
    let pair = build_ensemble_by_series(&pixels.ensemble, a.d)?;
    let fit = features::fit(&pair, policy)?;
    let mut fs = extract(&fit.q, 2, pixels.ensemble.len())?;
    if a.normalize {
        fs = fs.normalized();
    }
    let (_, labels) = cluster(&fs, &pixel_connectivity(&pixels, a.diagonal), a.k)?;
    let map = label_map(&labels, &pixels)?;

    io::write_label_map_csv(&map, img.width, out.file("labels.csv")?)?;
    let shade: Vec<f64> = map.iter().map(|&l| l as f64 / a.k as f64).collect();
    io::write_pgm(img.width, img.height, &shade, out.file("labels.pgm")?)?;
    out.text("singular_values.csv", &singular_values_csv(&fit.singular_values))?;
    out.text("eigenvalues.csv", &eigenvalues_csv(&fit.model.eigenvalues))?;

    let chosen = mode_pairs(&fit.model.eigenvalues, a.modes);
    for &j in &chosen {
        let maps = mode_map(&fit.q, &pixels, j)?;
        io::write_pgm(maps.width, maps.height, &maps.x_map, out.file(&format!("mode_{j}_x.pgm"))?)?;
        io::write_pgm(maps.width, maps.height, &maps.y_map, out.file(&format!("mode_{j}_y.pgm"))?)?;
        let mut body = String::from("i,j,x_map,y_map\n");
        for (p, (x, y)) in maps.x_map.iter().zip(&maps.y_map).enumerate() {
            body += &format!("{},{},{x},{y}\n", p % maps.width, p / maps.width);
        }
        out.text(&format!("mode_{j}.csv"), &body)?;
    }

    let mut sizes = vec![0usize; a.k];
    for &l in &labels {
        sizes[l - 1] += 1;
    }
    let mut summary = json!({
        "rank": fit.model.rank,
        "interior_pixels": labels.len(),
        "cluster_sizes": sizes,
        "mode_eigenvalues": chosen.iter().map(|&j| json!({
            "index": j,
            "eigenvalue": ComplexJson::from(fit.model.eigenvalues[j]),
        })).collect::<Vec<_>>(),
    });
    println!("rank {} cluster sizes {:?}", fit.model.rank, sizes);
    if let Some(truth) = truth {
        let keep = away_from_boundaries(&truth, img.width, img.height, a.band);
        let mask: Vec<bool> = keep.iter().zip(&map).map(|(&k, &l)| k && l > 0).collect();
        let agreement = best_permutation_agreement(&map, &truth, &mask)?;
        summary["agreement"] = json!(agreement);
        println!("agreement {:.2}%", 100.0 * agreement);
    }
    out.json("summary.json", &summary)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Toy(a) => run_toy(a),
        Command::Dmd(a) => run_dmd(a),
        Command::Pencil(a) => run_pencil(a),
        Command::Features(a) => run_features(a),
        Command::SynthLattice(a) => run_synth(a),
        Command::ClusterImage(a) => run_cluster_image(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
