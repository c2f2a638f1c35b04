//! End-to-end runs: features, dissimilarity, clusterings, index panel,
//! calibration, rankings, MDS coordinates and a run manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calibration::{
    build_panel, calibrate, rank_candidates, rank_raw, write_ranking_csv, write_ranking_table, CalibratedPanel,
    CalibrationMode, IndexPanel, PanelConfig, Ranked, WeightProfile,
};
use crate::cluster::{Clustering, Method};
use crate::dissim::{final_dissimilarity, DissimConfig, DissimilarityMatrix, GroupWeights};
use crate::error::{Error, Result};
use crate::features::{read_metadata, read_players, run_feature_pipeline, FeatureManifest, PipelineConfig};
use crate::indexes::{IndexId, DEFAULT_BOOTSTAB_B, DEFAULT_CVNN_KAPPA, DEFAULT_SEPARATION_P};
use crate::mds::{classical_mds, write_coordinates_csv, EmbeddingResult};
use crate::survey::{
    candidates, default_weight_grid, mc_randomness_test, selection_scores, weight_search, GridPoint, McResult,
    ResponseSet, ScoreMatrix, SurveyDesign, DEFAULT_N_SIM,
};

pub const RANKING_TOP: usize = 5;

/// Everything a run needs. Unset input paths are simply not used; a run needs
/// either `dissimilarity` or both `metadata` and `players`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub metadata: Option<PathBuf>,
    pub players: Option<PathBuf>,
    /// Earlier season of the same players, used by `fit` transforms.
    pub previous_players: Option<PathBuf>,
    /// Precomputed dissimilarity matrix (binary format).
    pub dissimilarity: Option<PathBuf>,
    /// Player ids for a precomputed matrix, one per line.
    pub ids: Option<PathBuf>,
    pub geco_cutoff: f64,
    /// Defaults to the number of quantitative variables.
    pub quantitative_weight: Option<f64>,
    pub position_weight: f64,
    pub league_team_weight: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub methods: Vec<Method>,
    pub indexes: Vec<IndexId>,
    pub profiles: Vec<WeightProfile>,
    pub calibration: CalibrationMode,
    pub b_calibration: usize,
    pub b_bootstab: usize,
    pub separation_p: f64,
    pub cvnn_kappa: usize,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let panel = PanelConfig::default();
        Self {
            metadata: None,
            players: None,
            previous_players: None,
            dissimilarity: None,
            ids: None,
            geco_cutoff: 4.0,
            quantitative_weight: None,
            position_weight: 11.0,
            league_team_weight: 2.0,
            k_min: panel.k_min,
            k_max: panel.k_max,
            methods: panel.methods,
            indexes: panel.indexes,
            profiles: vec![WeightProfile::w2(), WeightProfile::w1()],
            calibration: CalibrationMode::C2,
            b_calibration: panel.b_calibration,
            b_bootstab: DEFAULT_BOOTSTAB_B,
            separation_p: DEFAULT_SEPARATION_P,
            cvnn_kappa: DEFAULT_CVNN_KAPPA,
            seed: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::invalid("a master seed is required (set `seed` or pass --seed)"))
    }

    pub fn panel_config(&self) -> Result<PanelConfig> {
        Ok(PanelConfig {
            methods: self.methods.clone(),
            k_min: self.k_min,
            k_max: self.k_max,
            indexes: self.indexes.clone(),
            b_calibration: self.b_calibration,
            b_bootstab: self.b_bootstab,
            separation_p: self.separation_p,
            cvnn_kappa: self.cvnn_kappa,
            seed: self.seed()?,
        })
    }

    pub fn dissim_config(&self) -> DissimConfig<f64> {
        DissimConfig {
            geco_cutoff: self.geco_cutoff,
            weights: GroupWeights {
                quantitative: self.quantitative_weight,
                position: self.position_weight,
                league_team: self.league_team_weight,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        if self.k_max < 2 {
            return Err(Error::invalid("k_max must be at least 2"));
        }
        if self.profiles.is_empty() {
            return Err(Error::invalid("at least one weight profile is required"));
        }
        for p in &self.profiles {
            WeightProfile::new(p.name.clone(), p.weights)?;
        }
        if self.dissimilarity.is_none() && (self.metadata.is_none() || self.players.is_none()) {
            return Err(Error::invalid("either `dissimilarity` or both `metadata` and `players` must be given"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (output directory excluded).
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serialises")))
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn create_writer(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path).map(std::io::BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_result(path: &Path, r: csv::Result<()>) -> Result<()> {
    r.map_err(|source| Error::Csv { path: path.into(), source })
}

/// A dissimilarity matrix with the ids of its rows.
#[derive(Debug, Clone)]
pub struct Dissimilarities {
    pub ids: Vec<String>,
    pub matrix: DissimilarityMatrix<f64>,
    pub features: Option<FeatureManifest>,
}

/// Builds the dissimilarity from the feature files, or loads a precomputed one.
pub fn load_or_build_dissimilarity(cfg: &RunConfig) -> Result<Dissimilarities> {
    if let Some(path) = &cfg.dissimilarity {
        let matrix = DissimilarityMatrix::load_binary(path)?;
        let ids = match &cfg.ids {
            Some(p) => read_ids(p, matrix.n())?,
            None => (1..=matrix.n()).map(|i| i.to_string()).collect(),
        };
        return Ok(Dissimilarities { ids, matrix, features: None });
    }
    let (Some(meta), Some(players)) = (&cfg.metadata, &cfg.players) else {
        return Err(Error::invalid("either `dissimilarity` or both `metadata` and `players` must be given"));
    };
    let specs = read_metadata(meta)?;
    let records = read_players::<f64>(players, &specs)?;
    let previous = cfg.previous_players.as_deref().map(|p| read_players::<f64>(p, &specs)).transpose()?;
    let table = run_feature_pipeline(&records, &specs, &PipelineConfig::default(), previous.as_deref())?;
    let matrix = final_dissimilarity(&table, &cfg.dissim_config())?;
    Ok(Dissimilarities { ids: table.ids.clone(), matrix, features: Some(table.manifest()) })
}

pub fn read_ids(path: &Path, n: usize) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ids: Vec<String> = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
    if ids.len() != n {
        return Err(Error::schema(path, format!("{} ids for a matrix of {n} points", ids.len())));
    }
    Ok(ids)
}

pub fn write_ids(path: &Path, ids: &[String]) -> Result<()> {
    let mut w = create_writer(path)?;
    for id in ids {
        writeln!(w, "{id}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `id,method,k,label,seed`, one line per point and clustering.
pub fn write_clusterings_csv<W: Write>(w: W, ids: &[String], clusterings: &[&Clustering]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["id", "method", "k", "label", "seed"])?;
    for c in clusterings {
        for (id, label) in ids.iter().zip(c.labels()) {
            out.write_record([id.clone(), c.method.name().into(), c.k().to_string(), label.to_string(), c.seed.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads the labels of one clustering from a clusterings CSV.
pub fn read_clustering_labels(path: &Path, ids: &[String], method: Method, k: usize) -> Result<Vec<usize>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|source| Error::Csv { path: path.into(), source })?;
    let mut found: BTreeMap<String, usize> = BTreeMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|source| Error::Csv { path: path.into(), source })?;
        let field = |i: usize, name: &str| {
            rec.get(i).ok_or_else(|| Error::schema(path, format!("row {}: missing column `{name}`", line + 2)))
        };
        if field(1, "method")? != method.name() || field(2, "k")?.parse::<usize>().ok() != Some(k) {
            continue;
        }
        let label = field(3, "label")?
            .parse()
            .map_err(|_| Error::schema(path, format!("row {}, column `label`: not an integer", line + 2)))?;
        found.insert(field(0, "id")?.to_string(), label);
    }
    ids.iter()
        .map(|id| {
            found.get(id).copied().ok_or_else(|| Error::schema(path, format!("no {method}({k}) label for id `{id}`")))
        })
        .collect()
}

/// Long format: `method,k,replicate,index,calibrated`.
pub fn write_calibrated_csv<W: Write>(w: W, panel: &IndexPanel<f64>, cal: &CalibratedPanel<f64>) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "k", "replicate", "index", "calibrated"])?;
    for (r, row) in panel.rows.iter().enumerate() {
        for (id, v) in cal.indexes.iter().zip(&cal.values[r]) {
            out.write_record([
                row.method.name().to_string(),
                row.k.to_string(),
                row.replicate.to_string(),
                id.name().to_string(),
                v.map_or_else(|| "NA".to_string(), |v| v.to_string()),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Named rankings: one list per weight profile or raw index.
pub type Rankings = Vec<(String, Vec<Ranked<f64>>)>;

/// Composite rankings for every profile followed by raw rankings for every index.
pub fn rankings(
    panel: &IndexPanel<f64>,
    cal: &CalibratedPanel<f64>,
    profiles: &[WeightProfile],
) -> (Rankings, Rankings) {
    let composite: Vec<_> = profiles.iter().map(|p| (p.name.clone(), rank_candidates(panel, cal, p))).collect();
    let raw: Vec<_> = panel.indexes.iter().map(|&id| (id.name().to_string(), rank_raw(panel, id))).collect();
    (composite, raw)
}

/// Writes `ranking.csv` (full composite rankings) and `ranking_table.csv`
/// (best five per composite and per raw index).
pub fn write_rankings(
    out_dir: &Path,
    panel: &IndexPanel<f64>,
    cal: &CalibratedPanel<f64>,
    profiles: &[WeightProfile],
) -> Result<Rankings> {
    let (composite, raw) = rankings(panel, cal, profiles);
    let path = out_dir.join("ranking.csv");
    csv_result(&path, write_ranking_csv(create_writer(&path)?, &composite))?;
    let path = out_dir.join("ranking_table.csv");
    let table: Vec<_> = composite.iter().cloned().chain(raw).collect();
    csv_result(&path, write_ranking_table(create_writer(&path)?, &table, RANKING_TOP))?;
    Ok(composite)
}

pub fn write_mds(path: &Path, ids: &[String], e: &EmbeddingResult<f64>, labels: Option<&[usize]>) -> Result<()> {
    csv_result(path, write_coordinates_csv(create_writer(path)?, ids, e, labels))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: RunConfig,
    pub n_points: usize,
    pub candidates: usize,
    pub pool_size: usize,
    /// The top candidate of every weight profile.
    pub best: BTreeMap<String, String>,
    pub mds_labels: Option<String>,
    pub mds_clamped_mass: f64,
    /// File name to SHA-256.
    pub artifacts: BTreeMap<String, String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Runs everything and writes all artifacts into `cfg.out_dir`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let seed = cfg.seed()?;
    let diss = load_or_build_dissimilarity(cfg)?;
    let mut files: Vec<&str> = Vec::new();

    diss.matrix.save_binary(&out.join("dissimilarity.bin"))?;
    write_ids(&out.join("ids.txt"), &diss.ids)?;
    files.extend(["dissimilarity.bin", "ids.txt"]);
    if let Some(fm) = &diss.features {
        let path = out.join("features.json");
        let json = serde_json::to_string_pretty(fm).map_err(|source| Error::Json { path: path.clone(), source })?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        files.push("features.json");
    }

    let built = build_panel(&diss.matrix, &cfg.panel_config()?)?;
    let panel = &built.panel;
    let regular: Vec<&Clustering> =
        panel.rows.iter().zip(&built.clusterings).filter(|(r, _)| !r.method.is_random()).map(|(_, c)| c).collect();
    let path = out.join("clusterings.csv");
    csv_result(&path, write_clusterings_csv(create_writer(&path)?, &diss.ids, &regular))?;
    panel.save_csv(&out.join("index_panel.csv"))?;
    let cal = calibrate(panel, cfg.calibration)?;
    let path = out.join("calibrated_panel.csv");
    csv_result(&path, write_calibrated_csv(create_writer(&path)?, panel, &cal))?;
    let composite = write_rankings(out, panel, &cal, &cfg.profiles)?;
    files.extend(["clusterings.csv", "index_panel.csv", "calibrated_panel.csv", "ranking.csv", "ranking_table.csv"]);

    let top = composite.first().and_then(|(_, list)| list.first()).copied();
    let labels = top.and_then(|t| regular.iter().find(|c| c.method == t.method && c.k() == t.k)).map(|c| c.labels());
    let embedding = classical_mds(&diss.matrix, 2)?;
    write_mds(&out.join("mds.csv"), &diss.ids, &embedding, labels)?;
    files.push("mds.csv");

    let mut artifacts = BTreeMap::new();
    for f in files {
        artifacts.insert(f.to_string(), sha256_file(&out.join(f))?);
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: cfg.hash(),
        seed,
        config: cfg.clone(),
        n_points: diss.matrix.n(),
        candidates: regular.len(),
        pool_size: panel.rows.len(),
        best: composite
            .iter()
            .filter_map(|(name, list)| list.first().map(|r| (name.clone(), r.label())))
            .collect(),
        mds_labels: top.map(|t| t.label()),
        mds_clamped_mass: embedding.clamped_mass,
        artifacts,
    };
    let path = out.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|source| Error::Json { path: path.clone(), source })?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Inputs of a survey evaluation.
#[derive(Debug, Clone, Default)]
pub struct SurveyOptions {
    pub design: Option<PathBuf>,
    /// Either a score matrix or a response set (JSON).
    pub responses: Option<PathBuf>,
    /// Raw index panel CSV for the weight search.
    pub panel: Option<PathBuf>,
    pub calibration: CalibrationMode,
    pub grid: Option<Vec<[f64; 5]>>,
    pub n_sim: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightSearchReport {
    pub best_weights: [f64; 5],
    pub correlation: f64,
    pub grid: Vec<GridPoint<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyReport {
    pub selections: Vec<String>,
    pub totals: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub published_totals: Option<Vec<u32>>,
    /// Totals the test was run on (published ones when available).
    pub tested_totals: Vec<u32>,
    pub monte_carlo: McResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_search: Option<WeightSearchReport>,
}

fn load_scores(path: &Path, design: &SurveyDesign) -> Result<ScoreMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if let Ok(m) = serde_json::from_str::<ScoreMatrix>(&text) {
        m.validate().map_err(|e| Error::schema(path, e.to_string()))?;
        if m.selections.len() != design.selections.len() {
            return Err(Error::schema(path, "score matrix and design have different selections"));
        }
        return Ok(m);
    }
    let r: ResponseSet = serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })?;
    selection_scores(design, &r).map_err(|e| Error::schema(path, e.to_string()))
}

/// Totals, Monte Carlo test and (given a panel) the weight search. Without
/// paths the bundled published design and scores are used.
pub fn run_survey(opts: &SurveyOptions) -> Result<SurveyReport> {
    let design = match &opts.design {
        Some(p) => SurveyDesign::load(p)?,
        None => crate::survey::appendix_design(),
    };
    let scores = match &opts.responses {
        Some(p) => load_scores(p, &design)?,
        None => crate::survey::published_scores(),
    };
    let totals = scores.totals();
    let tested = scores.published_totals.clone().unwrap_or_else(|| totals.clone());
    let observed: Vec<f64> = tested.iter().map(|&t| f64::from(t)).collect();
    let n_sim = opts.n_sim.unwrap_or(DEFAULT_N_SIM);
    let monte_carlo = mc_randomness_test(&design, scores.experts.len(), &observed, n_sim, opts.seed)?;
    let weight_search = match &opts.panel {
        None => None,
        Some(p) => {
            let panel = IndexPanel::<f64>::load_csv(p)?;
            let cal = calibrate(&panel, opts.calibration)?;
            let grid = opts.grid.clone().unwrap_or_else(default_weight_grid);
            let ws = weight_search(&candidates(&panel, &cal), &design.selections, &observed, &grid)?;
            Some(WeightSearchReport { best_weights: ws.best, correlation: ws.correlation, grid: ws.evaluated })
        }
    };
    Ok(SurveyReport {
        selections: scores.selections.clone(),
        totals,
        published_totals: scores.published_totals.clone(),
        tested_totals: tested,
        monte_carlo,
        weight_search,
    })
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.into(), source })?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}
