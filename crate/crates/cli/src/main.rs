use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clusterval::calibration::{build_panel, calibrate, CalibrationMode, IndexPanel, WeightProfile};
use clusterval::cluster::{fit_range, Method};
use clusterval::indexes::IndexId;
use clusterval::mds::classical_mds;
use clusterval::pipeline::{
    load_or_build_dissimilarity, read_clustering_labels, run_pipeline, run_survey, write_calibrated_csv,
    write_clusterings_csv, write_ids, write_json, write_mds, write_rankings, RunConfig, SurveyOptions,
};
use clusterval::seed::derive_seed;
use clusterval::Error;

/// Dissimilarity-based clustering with calibrated composite validity indexes.
#[derive(Parser, Debug)]
#[command(name = "clusterval", version, about)]
struct Cli {
    /// Run configuration (TOML, or JSON for a `.json` file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Inputs {
    /// Variable metadata CSV.
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Players CSV.
    #[arg(long)]
    players: Option<PathBuf>,
    /// Previous-season players CSV for fitted log shifts.
    #[arg(long)]
    previous: Option<PathBuf>,
    /// Precomputed dissimilarity matrix (binary).
    #[arg(long)]
    dissimilarity: Option<PathBuf>,
    /// Ids of the precomputed matrix, one per line.
    #[arg(long)]
    ids: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct Grid {
    /// Comma-separated clustering methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Smallest number of clusters.
    #[arg(long)]
    k_min: Option<usize>,
    /// Largest number of clusters.
    #[arg(long)]
    k_max: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct IndexOpts {
    /// Comma-separated validity indexes.
    #[arg(long, value_delimiter = ',')]
    indexes: Option<Vec<String>>,
    /// Random clusterings per scheme and K.
    #[arg(long)]
    b_calibration: Option<usize>,
    /// Bootstrap iterations for the stability index.
    #[arg(long)]
    b_bootstab: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct RankOpts {
    /// Calibration mode: c1 or c2.
    #[arg(long)]
    mode: Option<String>,
    /// Weight profile `name=w1,w2,w3,w4,w5` (repeatable).
    #[arg(long = "profile")]
    profiles: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the player dissimilarity matrix.
    Dissim {
        #[command(flatten)]
        inputs: Inputs,
        /// Position distance at which the position dissimilarity saturates.
        #[arg(long)]
        geco_cutoff: Option<f64>,
    },
    /// Run the clustering methods over the K range.
    Cluster {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: Grid,
    },
    /// Evaluate validity indexes on the candidates and the random pool.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        index: IndexOpts,
    },
    /// Calibrate an index panel.
    Calibrate {
        /// Index panel CSV written by `validate`.
        #[arg(long)]
        panel: PathBuf,
        /// Calibration mode: c1 or c2.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Rank candidates by composite and raw indexes.
    Rank {
        /// Index panel CSV written by `validate`.
        #[arg(long)]
        panel: PathBuf,
        #[command(flatten)]
        rank: RankOpts,
    },
    /// Evaluate an expert survey; the published study is used by default.
    Survey {
        /// Survey design (JSON).
        #[arg(long)]
        design: Option<PathBuf>,
        /// Score matrix or response set (JSON).
        #[arg(long)]
        responses: Option<PathBuf>,
        /// Index panel CSV for the weight search.
        #[arg(long)]
        panel: Option<PathBuf>,
        /// Calibration mode: c1 or c2.
        #[arg(long)]
        mode: Option<String>,
        /// Monte Carlo simulations.
        #[arg(long)]
        n_sim: Option<usize>,
        /// Weight vector `w1,w2,w3,w4,w5` to search over (repeatable).
        #[arg(long = "weights")]
        weights: Vec<String>,
    },
    /// Two-dimensional classical MDS coordinates.
    Mds {
        #[command(flatten)]
        inputs: Inputs,
        /// Clusterings CSV with the labels to attach.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Method of the clustering to attach.
        #[arg(long, requires = "labels")]
        method: Option<String>,
        /// Number of clusters of the clustering to attach.
        #[arg(long, requires = "labels")]
        k: Option<usize>,
    },
    /// Full pipeline: every artifact plus a run manifest.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        index: IndexOpts,
        #[command(flatten)]
        rank: RankOpts,
    },
}

/// Failure with its exit code: 1 usage, 2 data, 3 numeric.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    let base = path.parent().unwrap_or(Path::new("."));
    for p in [&mut cfg.metadata, &mut cfg.players, &mut cfg.previous_players, &mut cfg.dissimilarity, &mut cfg.ids]
        .into_iter()
        .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(cfg)
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>, Failure> {
    items.iter().map(|s| s.parse().map_err(|e: Error| usage(e.to_string()))).collect()
}

fn parse_weights(s: &str) -> Result<[f64; 5], Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad weight `{x}` in `{s}`"))))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| usage(format!("`{s}` needs exactly five weights")))
}

fn parse_profile(s: &str) -> Result<WeightProfile, Failure> {
    let (name, w) = s.split_once('=').ok_or_else(|| usage(format!("profile `{s}` must look like name=w1,..,w5")))?;
    WeightProfile::new(name.trim(), parse_weights(w)?).map_err(|e| usage(e.to_string()))
}

fn parse_mode(s: &Option<String>, fallback: CalibrationMode) -> Result<CalibrationMode, Failure> {
    s.as_deref().map_or(Ok(fallback), |m| m.parse().map_err(|e: Error| usage(e.to_string())))
}

impl Inputs {
    fn apply(&self, cfg: &mut RunConfig) {
        let set = |dst: &mut Option<PathBuf>, src: &Option<PathBuf>| {
            if src.is_some() {
                dst.clone_from(src);
            }
        };
        set(&mut cfg.metadata, &self.metadata);
        set(&mut cfg.players, &self.players);
        set(&mut cfg.previous_players, &self.previous);
        set(&mut cfg.ids, &self.ids);
        if self.dissimilarity.is_some() {
            cfg.dissimilarity.clone_from(&self.dissimilarity);
        } else if self.metadata.is_some() || self.players.is_some() {
            cfg.dissimilarity = None;
        }
    }
}

impl Grid {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Failure> {
        if let Some(m) = &self.methods {
            cfg.methods = parse_list::<Method>(m)?;
        }
        cfg.k_min = self.k_min.unwrap_or(cfg.k_min);
        cfg.k_max = self.k_max.unwrap_or(cfg.k_max);
        Ok(())
    }
}

impl IndexOpts {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Failure> {
        if let Some(i) = &self.indexes {
            cfg.indexes = parse_list::<IndexId>(i)?;
        }
        cfg.b_calibration = self.b_calibration.unwrap_or(cfg.b_calibration);
        cfg.b_bootstab = self.b_bootstab.unwrap_or(cfg.b_bootstab);
        Ok(())
    }
}

impl RankOpts {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Failure> {
        cfg.calibration = parse_mode(&self.mode, cfg.calibration)?;
        if !self.profiles.is_empty() {
            cfg.profiles = self.profiles.iter().map(|p| parse_profile(p)).collect::<Result<_, _>>()?;
        }
        Ok(())
    }
}

fn out_dir(cfg: &RunConfig) -> Result<&Path, Failure> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Failure::from(Error::Io { path: cfg.out_dir.clone(), source: e }))?;
    Ok(&cfg.out_dir)
}

fn csv_file(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, Failure> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Failure::from(Error::Io { path: path.into(), source: e }))
}

fn csv_done(path: &Path, r: csv::Result<()>) -> Result<(), Failure> {
    r.map_err(|source| Failure::from(Error::Csv { path: path.into(), source }))
}

fn require_seed(cfg: &RunConfig) -> Result<u64, Failure> {
    cfg.seed().map_err(|e| usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("cannot configure {t} threads: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir.clone_from(o);
    }

    match cli.command {
        Command::Dissim { inputs, geco_cutoff } => {
            inputs.apply(&mut cfg);
            cfg.dissimilarity = None;
            cfg.geco_cutoff = geco_cutoff.unwrap_or(cfg.geco_cutoff);
            if cfg.metadata.is_none() || cfg.players.is_none() {
                return Err(usage("dissim needs --metadata and --players"));
            }
            let d = load_or_build_dissimilarity(&cfg)?;
            let out = out_dir(&cfg)?;
            d.matrix.save_binary(&out.join("dissimilarity.bin"))?;
            write_ids(&out.join("ids.txt"), &d.ids)?;
            if let Some(fm) = &d.features {
                write_json(&out.join("features.json"), fm)?;
            }
            println!("wrote {} ({} points)", out.join("dissimilarity.bin").display(), d.matrix.n());
        }
        Command::Cluster { inputs, grid } => {
            inputs.apply(&mut cfg);
            grid.apply(&mut cfg)?;
            let seed = require_seed(&cfg)?;
            let d = load_or_build_dissimilarity(&cfg)?;
            let ks: Vec<usize> = (cfg.k_min..=cfg.k_max).collect();
            let mut all = Vec::new();
            for &m in &cfg.methods {
                all.extend(fit_range(&d.matrix, m, &ks, |k| derive_seed(seed, "fit", &[m as u64, k as u64]))?);
            }
            let out = out_dir(&cfg)?;
            let path = out.join("clusterings.csv");
            csv_done(&path, write_clusterings_csv(csv_file(&path)?, &d.ids, &all.iter().collect::<Vec<_>>()))?;
            println!("wrote {} ({} clusterings)", path.display(), all.len());
        }
        Command::Validate { inputs, grid, index } => {
            inputs.apply(&mut cfg);
            grid.apply(&mut cfg)?;
            index.apply(&mut cfg)?;
            require_seed(&cfg)?;
            let d = load_or_build_dissimilarity(&cfg)?;
            let built = build_panel(&d.matrix, &cfg.panel_config()?)?;
            let out = out_dir(&cfg)?;
            let path = out.join("index_panel.csv");
            built.panel.save_csv(&path)?;
            println!("wrote {} ({} clusterings)", path.display(), built.panel.rows.len());
        }
        Command::Calibrate { panel, mode } => {
            let mode = parse_mode(&mode, cfg.calibration)?;
            let p = IndexPanel::<f64>::load_csv(&panel)?;
            let cal = calibrate(&p, mode)?;
            let out = out_dir(&cfg)?;
            let path = out.join("calibrated_panel.csv");
            csv_done(&path, write_calibrated_csv(csv_file(&path)?, &p, &cal))?;
            println!("wrote {}", path.display());
        }
        Command::Rank { panel, rank } => {
            rank.apply(&mut cfg)?;
            let p = IndexPanel::<f64>::load_csv(&panel)?;
            let cal = calibrate(&p, cfg.calibration)?;
            let out = out_dir(&cfg)?;
            let ranked = write_rankings(out, &p, &cal, &cfg.profiles)?;
            for (name, list) in &ranked {
                if let Some(best) = list.first() {
                    println!("{name}: {} ({})", best.label(), best.value);
                }
            }
        }
        Command::Survey { design, responses, panel, mode, n_sim, weights } => {
            let grid = if weights.is_empty() {
                None
            } else {
                Some(weights.iter().map(|w| parse_weights(w)).collect::<Result<Vec<_>, _>>()?)
            };
            let opts = SurveyOptions {
                design,
                responses,
                panel,
                calibration: parse_mode(&mode, cfg.calibration)?,
                grid,
                n_sim,
                seed: require_seed(&cfg)?,
            };
            let report = run_survey(&opts)?;
            let out = out_dir(&cfg)?;
            let path = out.join("survey_report.json");
            write_json(&path, &report)?;
            println!("totals {:?}, p = {}", report.tested_totals, report.monte_carlo.p_value);
            if let Some(ws) = &report.weight_search {
                println!("best weights {:?}, spearman {}", ws.best_weights, ws.correlation);
            }
        }
        Command::Mds { inputs, labels, method, k } => {
            inputs.apply(&mut cfg);
            let d = load_or_build_dissimilarity(&cfg)?;
            let e = classical_mds(&d.matrix, 2)?;
            let labels = match (labels, method, k) {
                (Some(path), Some(m), Some(k)) => {
                    let m: Method = m.parse().map_err(|e: Error| usage(e.to_string()))?;
                    Some(read_clustering_labels(&path, &d.ids, m, k)?)
                }
                (Some(_), _, _) => return Err(usage("--labels needs --method and --k")),
                _ => None,
            };
            let out = out_dir(&cfg)?;
            let path = out.join("mds.csv");
            write_mds(&path, &d.ids, &e, labels.as_deref())?;
            println!("wrote {} (clamped eigenvalue mass {:.3e})", path.display(), e.clamped_mass);
        }
        Command::Run { inputs, grid, index, rank } => {
            inputs.apply(&mut cfg);
            grid.apply(&mut cfg)?;
            index.apply(&mut cfg)?;
            rank.apply(&mut cfg)?;
            require_seed(&cfg)?;
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let m = run_pipeline(&cfg)?;
            for (name, best) in &m.best {
                println!("{name}: best {best}");
            }
            println!("manifest {}", cfg.out_dir.join("manifest.json").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
