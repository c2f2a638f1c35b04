//! Raw index values over the candidate clusterings and the random pool.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{fit_range, random_clustering, Clustering, Method, RandomScheme};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::indexes::{
    ave_within, asw, bootstab, ch, cvnn, cvnn_components, dunn, entropy, pearson_gamma, separation_index,
    BootstabConfig, IndexId, IndexValue, NeighbourTable, DEFAULT_BOOTSTAB_B, DEFAULT_CVNN_KAPPA,
    DEFAULT_SEPARATION_P,
};
use crate::scalar::Scalar;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PanelConfig {
    pub methods: Vec<Method>,
    pub k_min: usize,
    pub k_max: usize,
    pub indexes: Vec<IndexId>,
    /// Random clusterings per scheme and K.
    pub b_calibration: usize,
    pub b_bootstab: usize,
    pub separation_p: f64,
    pub cvnn_kappa: usize,
    pub seed: u64,
}

impl Default for PanelConfig {
    fn default() -> Self {
        Self {
            methods: Method::REGULAR.to_vec(),
            k_min: 2,
            k_max: 10,
            indexes: IndexId::ASPECTS.iter().chain(IndexId::LITERATURE.iter()).copied().collect(),
            b_calibration: 100,
            b_bootstab: DEFAULT_BOOTSTAB_B,
            separation_p: DEFAULT_SEPARATION_P,
            cvnn_kappa: DEFAULT_CVNN_KAPPA,
            seed: 0,
        }
    }
}

impl PanelConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_min < 2 || self.k_max < self.k_min {
            return Err(Error::invalid(format!("K range must satisfy 2 <= k_min <= k_max, got {}..={}", self.k_min, self.k_max)));
        }
        if self.k_max >= n {
            return Err(Error::invalid(format!("k_max = {} must be below the number of points ({n})", self.k_max)));
        }
        if self.methods.is_empty() || self.methods.iter().any(|m| m.is_random()) {
            return Err(Error::invalid("methods must be a nonempty list of regular clustering methods"));
        }
        if self.indexes.is_empty() {
            return Err(Error::invalid("index list is empty"));
        }
        if self.indexes.contains(&IndexId::Bootstab) && self.b_bootstab == 0 {
            return Err(Error::invalid("b_bootstab must be positive"));
        }
        if !(self.separation_p > 0.0 && self.separation_p <= 1.0) {
            return Err(Error::invalid("separation_p must be in (0, 1]"));
        }
        Ok(())
    }

    pub fn ks(&self) -> Vec<usize> {
        (self.k_min..=self.k_max).collect()
    }

    /// Size of the random part of the pool, `4 * B * (number of K values)`.
    pub fn random_pool_size(&self) -> usize {
        Method::RANDOM.len() * self.b_calibration * self.ks().len()
    }
}

/// Raw index values of one clustering; `None` where the index is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow<T> {
    pub method: Method,
    pub k: usize,
    /// Replicate number of a random clustering, 0 for regular methods.
    pub replicate: usize,
    pub values: Vec<Option<T>>,
}

/// Raw values for the regular candidates followed by the random pool.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPanel<T> {
    pub indexes: Vec<IndexId>,
    pub rows: Vec<PanelRow<T>>,
}

#[derive(Debug, Clone)]
pub struct PanelBuild<T> {
    pub panel: IndexPanel<T>,
    /// Parallel to `panel.rows`.
    pub clusterings: Vec<Clustering>,
}

fn method_tag(m: Method) -> u64 {
    m as u64
}

fn undefined_as_none<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedIndex(..)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Clusters `d` with every configured method and random scheme over the K
/// range and evaluates the configured indexes on every clustering.
pub fn build_panel<T: Scalar>(d: &DissimilarityMatrix<T>, cfg: &PanelConfig) -> Result<PanelBuild<T>> {
    cfg.validate(d.n())?;
    let ks = cfg.ks();
    let regular: Vec<Vec<Clustering>> = cfg
        .methods
        .par_iter()
        .map(|&m| fit_range(d, m, &ks, |k| derive_seed(cfg.seed, "fit", &[method_tag(m), k as u64])))
        .collect::<Result<_>>()?;
    let mut tasks: Vec<(Method, usize, usize)> = Vec::new();
    for &m in &cfg.methods {
        tasks.extend(ks.iter().map(|&k| (m, k, 0)));
    }
    for m in Method::RANDOM {
        for &k in &ks {
            tasks.extend((0..cfg.b_calibration).map(|r| (m, k, r)));
        }
    }
    let mut clusterings: Vec<Clustering> = regular.into_iter().flatten().collect();
    let random: Vec<Clustering> = tasks[clusterings.len()..]
        .par_iter()
        .map(|&(m, k, r)| {
            let scheme = RandomScheme::from_method(m).expect("random method");
            random_clustering(d, k, scheme, derive_seed(cfg.seed, "random", &[method_tag(m), k as u64, r as u64]))
        })
        .collect::<Result<_>>()?;
    clusterings.extend(random);

    let nn = cfg.indexes.contains(&IndexId::Cvnn).then(|| NeighbourTable::new(d, cfg.cvnn_kappa));
    let p = T::lit(cfg.separation_p);
    let mut rows: Vec<PanelRow<T>> = tasks
        .par_iter()
        .zip(clusterings.par_iter())
        .map(|(&(method, k, replicate), c)| {
            let mut values = Vec::with_capacity(cfg.indexes.len());
            for &id in &cfg.indexes {
                let literature = IndexId::LITERATURE.contains(&id);
                if literature && method.is_random() {
                    values.push(None);
                    continue;
                }
                let v = match id {
                    IndexId::AveWithin => undefined_as_none(ave_within(d, c))?,
                    IndexId::Separation => undefined_as_none(separation_index(d, c, p))?,
                    IndexId::PearsonGamma => undefined_as_none(pearson_gamma(d, c))?,
                    IndexId::Entropy => Some(entropy(c)),
                    IndexId::Bootstab => {
                        let bc = BootstabConfig {
                            b: cfg.b_bootstab,
                            seed: derive_seed(
                                cfg.seed,
                                "bootstab",
                                &[method_tag(method), k as u64, replicate as u64],
                            ),
                            classifier: None,
                        };
                        Some(bootstab(d, method, k, &bc)?)
                    }
                    IndexId::Asw => undefined_as_none(asw(d, c))?,
                    IndexId::Ch => undefined_as_none(ch(d, c))?,
                    IndexId::Dunn => undefined_as_none(dunn(d, c))?,
                    // Filled in below, once all components are known.
                    IndexId::Cvnn => None,
                };
                values.push(v.map(|v: IndexValue<T>| v.raw));
            }
            Ok(PanelRow { method, k, replicate, values })
        })
        .collect::<Result<_>>()?;

    if let (Some(nn), Some(col)) = (nn, cfg.indexes.iter().position(|&i| i == IndexId::Cvnn)) {
        let mut which = Vec::new();
        let mut comps = Vec::new();
        for (r, c) in clusterings.iter().enumerate() {
            if rows[r].method.is_random() {
                continue;
            }
            if let Some(cc) = undefined_as_none(cvnn_components(d, c, &nn))? {
                which.push(r);
                comps.push(cc);
            }
        }
        for (r, v) in which.into_iter().zip(cvnn(&comps)) {
            rows[r].values[col] = Some(v.raw);
        }
    }
    Ok(PanelBuild { panel: IndexPanel { indexes: cfg.indexes.clone(), rows }, clusterings })
}

#[derive(Serialize, Deserialize)]
struct PanelCsvRow {
    method: String,
    k: usize,
    replicate: usize,
    index: String,
    raw: String,
    orientation: String,
}

impl<T: Scalar> IndexPanel<T> {
    pub fn column(&self, index: IndexId) -> Option<usize> {
        self.indexes.iter().position(|&i| i == index)
    }

    pub fn value(&self, row: usize, index: IndexId) -> Option<T> {
        self.column(index).and_then(|c| self.rows[row].values[c])
    }

    /// Rows of the regular methods (the ranking candidates).
    pub fn candidates(&self) -> impl Iterator<Item = (usize, &PanelRow<T>)> {
        self.rows.iter().enumerate().filter(|(_, r)| !r.method.is_random())
    }

    /// Long format: `method,k,replicate,index,raw,orientation`; undefined values are `NA`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            for (id, v) in self.indexes.iter().zip(&row.values) {
                out.serialize(PanelCsvRow {
                    method: row.method.name().into(),
                    k: row.k,
                    replicate: row.replicate,
                    index: id.name().into(),
                    raw: v.map_or_else(|| "NA".into(), |v| v.to_string()),
                    orientation: id.orientation().name().into(),
                })?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f)).map_err(|source| Error::Csv { path: path.into(), source })
    }

    /// Reads the format written by [`IndexPanel::write_csv`]; `origin` names the
    /// source in error messages.
    pub fn read_csv<R: Read>(r: R, origin: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut indexes: Vec<IndexId> = Vec::new();
        let mut order: Vec<(Method, usize, usize)> = Vec::new();
        let mut cells: BTreeMap<(Method, usize, usize), BTreeMap<IndexId, Option<T>>> = BTreeMap::new();
        for (line, rec) in rdr.deserialize::<PanelCsvRow>().enumerate() {
            let rec = rec.map_err(|source| Error::Csv { path: origin.into(), source })?;
            let at = |col: &str, msg: String| Error::schema(origin, format!("row {}, column `{col}`: {msg}", line + 2));
            let method: Method = rec.method.parse().map_err(|e: Error| at("method", e.to_string()))?;
            let id: IndexId = rec.index.parse().map_err(|e: Error| at("index", e.to_string()))?;
            let raw = match rec.raw.trim() {
                "NA" | "" => None,
                s => {
                    let v: f64 = s.parse().map_err(|_| at("raw", format!("`{s}` is not a number")))?;
                    if !v.is_finite() {
                        return Err(at("raw", "value is not finite".into()));
                    }
                    Some(T::lit(v))
                }
            };
            if !indexes.contains(&id) {
                indexes.push(id);
            }
            let key = (method, rec.k, rec.replicate);
            let entry = cells.entry(key).or_insert_with(|| {
                order.push(key);
                BTreeMap::new()
            });
            if entry.insert(id, raw).is_some() {
                return Err(at("index", format!("duplicate value for {} K={} index {id}", method, rec.k)));
            }
        }
        let rows = order
            .into_iter()
            .map(|key| {
                let m = &cells[&key];
                PanelRow {
                    method: key.0,
                    k: key.1,
                    replicate: key.2,
                    values: indexes.iter().map(|id| m.get(id).copied().flatten()).collect(),
                }
            })
            .collect();
        Ok(Self { indexes, rows })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(f), path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_groups() -> DissimilarityMatrix<f64> {
        let x: Vec<f64> = (0..12).map(|i| if i < 6 { i as f64 * 0.02 } else { 10.0 + i as f64 * 0.02 }).collect();
        DissimilarityMatrix::from_fn(12, |i, j| Ok((x[i] - x[j]).abs())).unwrap()
    }

    fn small_cfg() -> PanelConfig {
        PanelConfig { k_max: 4, b_calibration: 3, b_bootstab: 4, seed: 11, ..Default::default() }
    }

    #[test]
    fn pool_shape_and_csv_round_trip() {
        let d = two_groups();
        let cfg = small_cfg();
        let b = build_panel(&d, &cfg).unwrap();
        assert_eq!(b.panel.rows.len(), 6 * 3 + cfg.random_pool_size());
        assert_eq!(cfg.random_pool_size(), 4 * 3 * 3);
        assert_eq!(b.panel.candidates().count(), 18);
        let r0 = &b.panel.rows[0];
        assert_eq!((r0.method, r0.k), (Method::Pam, 2));
        assert!(b.panel.rows.iter().filter(|r| r.method.is_random()).all(|r| r.values[5..].iter().all(Option::is_none)));
        assert!(b.panel.candidates().all(|(_, r)| r.values.iter().all(Option::is_some)));
        let mut buf = Vec::new();
        b.panel.write_csv(&mut buf).unwrap();
        let back = IndexPanel::<f64>::read_csv(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, b.panel);
        let again = build_panel(&d, &cfg).unwrap();
        assert_eq!(again.panel, b.panel);
    }

    #[test]
    fn schema_errors_name_row_and_column() {
        let text = "method,k,replicate,index,raw,orientation\npam,2,0,asw,0.5,larger_better\nkmeans,2,0,asw,0.5,x\n";
        let e = IndexPanel::<f64>::read_csv(text.as_bytes(), Path::new("panel.csv")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("panel.csv") && msg.contains("row 3") && msg.contains("method"), "{msg}");
    }

    #[test]
    fn rejects_bad_ranges() {
        let d = two_groups();
        assert!(build_panel(&d, &PanelConfig { k_min: 1, ..small_cfg() }).is_err());
        assert!(build_panel(&d, &PanelConfig { k_max: 12, ..small_cfg() }).is_err());
        assert!(build_panel(&d, &PanelConfig { methods: vec![Method::RandomNn], ..small_cfg() }).is_err());
    }
}
