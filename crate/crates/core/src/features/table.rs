use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::represent::{derive_composition, per90, success_rate};
use super::standardize::{standardize_mad_median, standardize_pooled};
use super::transform::{fit_shift_constant, SeasonPair, ShiftChoice, DEFAULT_SHIFT_GRID};
use crate::dissim::position::{parse_position_set, Position};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    TopCount,
    Composition,
    SuccessRate,
    Characteristic,
    Appearance,
    Position,
    LeagueTeam,
}

impl VariableKind {
    pub fn parse(s: &str) -> Option<Self> {
        use VariableKind::*;
        Some(match s.trim() {
            "top_count" => TopCount,
            "composition" => Composition,
            "success_rate" => SuccessRate,
            "characteristic" => Characteristic,
            "appearance" => Appearance,
            "position" => Position,
            "league_team" => LeagueTeam,
            _ => return None,
        })
    }

    pub fn is_quantitative(self) -> bool {
        !matches!(self, VariableKind::Position | VariableKind::LeagueTeam)
    }
}

/// How a column is transformed before standardisation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformSpec {
    #[default]
    None,
    Log(f64),
    /// Choose the shift constant from a previous season.
    Fit,
}

impl TransformSpec {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s {
            "" | "none" => Some(TransformSpec::None),
            "fit" => Some(TransformSpec::Fit),
            _ => {
                let c: f64 = s.strip_prefix("log:")?.parse().ok()?;
                (c > 0.0).then_some(TransformSpec::Log(c))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableGroupSpec {
    pub name: String,
    pub kind: VariableKind,
    /// Top-level count for compositions, attempt count for success rates.
    pub parent: Option<String>,
    pub composition_id: Option<String>,
    /// For composition members this is the weight of the whole composition.
    pub weight: f64,
    #[serde(default)]
    pub transform: TransformSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerRecord<T> {
    pub id: String,
    pub minutes_played: T,
    pub raw_values: BTreeMap<String, Option<T>>,
    pub positions: Vec<Position>,
    pub league_score: T,
    pub team_points: T,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFlags {
    pub represented: bool,
    pub transformed: bool,
    pub standardized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn<T> {
    pub spec: VariableGroupSpec,
    pub values: Vec<Option<T>>,
    /// Weight this column carries in the quantitative L1 distance.
    pub weight: T,
    pub shift: ShiftChoice,
    pub center: Option<T>,
    pub scale: Option<T>,
}

/// Members of one composition and the top-level column they split.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionBlock<T> {
    pub id: String,
    pub parent: usize,
    pub members: Vec<usize>,
    pub weight: T,
    /// Per player: the top-level count was zero, so the proportions are undefined.
    pub zero_top: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable<T> {
    pub ids: Vec<String>,
    pub minutes: Vec<T>,
    pub columns: Vec<FeatureColumn<T>>,
    pub compositions: Vec<CompositionBlock<T>>,
    pub positions: Vec<Vec<Position>>,
    /// Standardised league score and team points.
    pub league_team: [Vec<T>; 2],
    pub stages: StageFlags,
    /// Variables dropped at standardisation because they were constant.
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig<T> {
    pub shift_grid: Vec<T>,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        Self { shift_grid: DEFAULT_SHIFT_GRID.iter().map(|&c| T::lit(c)).collect() }
    }
}

fn validate_specs(specs: &[VariableGroupSpec]) -> Result<()> {
    let by_name: HashMap<&str, &VariableGroupSpec> = specs.iter().map(|s| (s.name.as_str(), s)).collect();
    if by_name.len() != specs.len() {
        return Err(Error::invalid("duplicate variable names in metadata"));
    }
    let mut comp_parent: HashMap<&str, (&str, f64)> = HashMap::new();
    for s in specs {
        if !(s.weight > 0.0) || !s.weight.is_finite() {
            return Err(Error::invalid(format!("variable `{}` needs a positive weight", s.name)));
        }
        match s.kind {
            VariableKind::Composition => {
                let parent = s.parent.as_deref().ok_or_else(|| {
                    Error::invalid(format!("composition member `{}` lacks a parent", s.name))
                })?;
                let cid = s.composition_id.as_deref().ok_or_else(|| {
                    Error::invalid(format!("composition member `{}` lacks a composition_id", s.name))
                })?;
                match by_name.get(parent) {
                    Some(p) if p.kind == VariableKind::TopCount => {}
                    _ => {
                        return Err(Error::invalid(format!(
                            "parent `{parent}` of `{}` is not a top_count variable",
                            s.name
                        )))
                    }
                }
                if let Some(&(p, w)) = comp_parent.get(cid) {
                    if p != parent || w != s.weight {
                        return Err(Error::invalid(format!(
                            "members of composition `{cid}` disagree on parent or weight"
                        )));
                    }
                } else {
                    comp_parent.insert(cid, (parent, s.weight));
                }
                if s.transform != TransformSpec::None {
                    return Err(Error::invalid(format!("composition member `{}` cannot be transformed", s.name)));
                }
            }
            VariableKind::SuccessRate => {
                let parent = s.parent.as_deref().ok_or_else(|| {
                    Error::invalid(format!("success rate `{}` lacks its attempt variable", s.name))
                })?;
                if parent == s.name {
                    return Err(Error::invalid(format!("success rate `{}` is its own parent", s.name)));
                }
                if s.transform != TransformSpec::None {
                    return Err(Error::invalid(format!("success rate `{}` cannot be transformed", s.name)));
                }
            }
            _ => {}
        }
    }
    let n_pos = specs.iter().filter(|s| s.kind == VariableKind::Position).count();
    let n_lt = specs.iter().filter(|s| s.kind == VariableKind::LeagueTeam).count();
    if n_pos != 1 || n_lt != 2 {
        return Err(Error::invalid(
            "metadata needs exactly one position variable and two league_team variables",
        ));
    }
    Ok(())
}

fn raw<T: Scalar>(r: &PlayerRecord<T>, name: &str) -> Result<Option<T>> {
    r.raw_values
        .get(name)
        .copied()
        .ok_or_else(|| Error::invalid(format!("player `{}` has no value for `{name}`", r.id)))
}

/// Representation of a single quantitative variable for one player.
fn represent_value<T: Scalar>(r: &PlayerRecord<T>, spec: &VariableGroupSpec) -> Result<Option<T>> {
    let x = raw(r, &spec.name)?;
    Ok(match spec.kind {
        VariableKind::TopCount => x.map(|v| per90(v, r.minutes_played)).transpose()?,
        VariableKind::SuccessRate => {
            let attempts = raw(r, spec.parent.as_deref().expect("validated"))?;
            match (x, attempts) {
                (Some(s), Some(a)) => success_rate(s, a)
                    .map_err(|e| Error::invalid(format!("player `{}`, `{}`: {e}", r.id, spec.name)))?,
                _ => None,
            }
        }
        _ => x,
    })
}

impl<T: Scalar> FeatureTable<T> {
    /// Stage 1: per-90 counts, composition proportions, success rates.
    pub fn represent(records: &[PlayerRecord<T>], specs: &[VariableGroupSpec]) -> Result<Self> {
        validate_specs(specs)?;
        for r in records {
            if !(r.minutes_played > T::zero()) {
                return Err(Error::invalid(format!("player `{}` has no minutes played", r.id)));
            }
            if r.positions.is_empty() {
                return Err(Error::invalid(format!("player `{}` has no positions", r.id)));
            }
        }
        let quant: Vec<&VariableGroupSpec> = specs.iter().filter(|s| s.kind.is_quantitative()).collect();
        let col_index: HashMap<&str, usize> =
            quant.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();

        let mut comp_order: Vec<&str> = Vec::new();
        let mut comp_members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, s) in quant.iter().enumerate() {
            if s.kind == VariableKind::Composition {
                let cid = s.composition_id.as_deref().expect("validated");
                if !comp_members.contains_key(cid) {
                    comp_order.push(cid);
                }
                comp_members.entry(cid).or_default().push(i);
            }
        }

        let mut values: Vec<Vec<Option<T>>> = quant
            .iter()
            .map(|s| {
                if s.kind == VariableKind::Composition {
                    Ok(vec![None; records.len()])
                } else {
                    records.iter().map(|r| represent_value(r, s)).collect()
                }
            })
            .collect::<Result<_>>()?;

        let mut compositions = Vec::new();
        for cid in comp_order {
            let members = comp_members[cid].clone();
            let parent_name = quant[members[0]].parent.as_deref().expect("validated");
            let parent = col_index[parent_name];
            let group_weight = T::lit(quant[members[0]].weight);
            let mut zero_top = vec![false; records.len()];
            for (p, r) in records.iter().enumerate() {
                let top = raw(r, parent_name)?;
                let subs: Option<Vec<T>> =
                    members.iter().map(|&m| raw(r, &quant[m].name)).collect::<Result<Vec<_>>>()?.into_iter().collect();
                let (Some(top), Some(subs)) = (top, subs) else { continue };
                let props = derive_composition(top, &subs)
                    .map_err(|e| Error::invalid(format!("player `{}`, composition `{cid}`: {e}", r.id)))?;
                match props {
                    Some(props) => {
                        for (&m, v) in members.iter().zip(props) {
                            values[m][p] = Some(v);
                        }
                    }
                    None => zero_top[p] = true,
                }
            }
            compositions.push(CompositionBlock {
                id: cid.to_string(),
                parent,
                members,
                weight: group_weight,
                zero_top,
            });
        }

        let columns = quant
            .iter()
            .zip(values)
            .map(|(s, v)| {
                let weight = if s.kind == VariableKind::Composition {
                    let cid = s.composition_id.as_deref().expect("validated");
                    T::lit(s.weight) / T::from_len(comp_members[cid].len())
                } else {
                    T::lit(s.weight)
                };
                FeatureColumn {
                    spec: (*s).clone(),
                    values: v,
                    weight,
                    shift: ShiftChoice::Identity,
                    center: None,
                    scale: None,
                }
            })
            .collect();

        Ok(Self {
            ids: records.iter().map(|r| r.id.clone()).collect(),
            minutes: records.iter().map(|r| r.minutes_played).collect(),
            columns,
            compositions,
            positions: records.iter().map(|r| r.positions.clone()).collect(),
            league_team: [
                records.iter().map(|r| r.league_score).collect(),
                records.iter().map(|r| r.team_points).collect(),
            ],
            stages: StageFlags { represented: true, ..StageFlags::default() },
            dropped: Vec::new(),
        })
    }

    /// Stage 2: log-shift transforms. `previous` is last season's table, needed
    /// only for columns whose transform is `fit`.
    pub fn transform(mut self, cfg: &PipelineConfig<T>, previous: Option<&FeatureTable<T>>) -> Result<Self> {
        if !self.stages.represented || self.stages.transformed {
            return Err(Error::invalid("transform expects a represented, untransformed table"));
        }
        let prev_rows: HashMap<&str, usize> = previous
            .map(|p| p.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect())
            .unwrap_or_default();
        for col in &mut self.columns {
            let choice = match col.spec.transform {
                TransformSpec::None => ShiftChoice::Identity,
                TransformSpec::Log(c) => ShiftChoice::Log(c),
                TransformSpec::Fit => {
                    let prev = previous.ok_or_else(|| {
                        Error::invalid(format!("`{}` is fitted but no previous season was given", col.spec.name))
                    })?;
                    let prev_col = prev
                        .columns
                        .iter()
                        .find(|c| c.spec.name == col.spec.name)
                        .ok_or_else(|| {
                            Error::invalid(format!("previous season lacks `{}`", col.spec.name))
                        })?;
                    let pairs: Vec<SeasonPair<T>> = self
                        .ids
                        .iter()
                        .enumerate()
                        .filter_map(|(i, id)| {
                            let j = *prev_rows.get(id.as_str())?;
                            Some(SeasonPair {
                                x1: prev_col.values[j]?,
                                x2: col.values[i]?,
                                minutes1: prev.minutes[j],
                                minutes2: self.minutes[i],
                            })
                        })
                        .collect();
                    fit_shift_constant(&pairs, &cfg.shift_grid)
                        .map_err(|e| Error::invalid(format!("fitting `{}`: {e}", col.spec.name)))?
                }
            };
            col.values = col
                .values
                .iter()
                .map(|v| v.map(|x| choice.apply(x)).transpose())
                .collect::<Result<_>>()?;
            col.shift = choice;
        }
        self.stages.transformed = true;
        Ok(self)
    }

    /// Stage 3: median / mean-absolute-deviation standardisation, pooled per composition.
    pub fn standardize(mut self) -> Result<Self> {
        if !self.stages.transformed || self.stages.standardized {
            return Err(Error::invalid("standardize expects a transformed, unstandardized table"));
        }
        for block in &self.compositions {
            let cols: Vec<Vec<Option<T>>> =
                block.members.iter().map(|&m| self.columns[m].values.clone()).collect();
            let out = standardize_pooled(&block.id, &cols)?;
            for (&m, s) in block.members.iter().zip(out) {
                let c = &mut self.columns[m];
                c.values = s.values;
                c.center = Some(s.center);
                c.scale = Some(s.scale);
            }
        }
        let parents: Vec<usize> = self.compositions.iter().map(|b| b.parent).collect();
        let mut constant = Vec::new();
        for (i, c) in self.columns.iter_mut().enumerate() {
            if c.spec.kind == VariableKind::Composition {
                continue;
            }
            match standardize_mad_median(&c.spec.name, &c.values) {
                Ok(s) => {
                    c.values = s.values;
                    c.center = Some(s.center);
                    c.scale = Some(s.scale);
                }
                // A constant variable carries no information; drop it unless a composition hangs off it.
                Err(Error::ConstantColumn(_)) if !parents.contains(&i) => constant.push(i),
                Err(e) => return Err(e),
            }
        }
        self.drop_columns(&constant);
        for (k, name) in ["league_score", "team_points"].iter().enumerate() {
            let col: Vec<Option<T>> = self.league_team[k].iter().copied().map(Some).collect();
            let s = standardize_mad_median(name, &col)?;
            self.league_team[k] = s.values.into_iter().map(|v| v.expect("complete")).collect();
        }
        self.stages.standardized = true;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    fn drop_columns(&mut self, drop: &[usize]) {
        if drop.is_empty() {
            return;
        }
        let mut remap = vec![usize::MAX; self.columns.len()];
        let mut kept = Vec::with_capacity(self.columns.len() - drop.len());
        for (i, c) in std::mem::take(&mut self.columns).into_iter().enumerate() {
            if drop.contains(&i) {
                self.dropped.push(c.spec.name);
            } else {
                remap[i] = kept.len();
                kept.push(c);
            }
        }
        self.columns = kept;
        for b in &mut self.compositions {
            b.parent = remap[b.parent];
            for m in &mut b.members {
                *m = remap[*m];
            }
        }
    }

    /// Number of quantitative variables; the default weight of the L1 group.
    pub fn quantitative_count(&self) -> usize {
        self.columns.len()
    }
}

/// Representation, transformation and standardisation in one call.
pub fn run_feature_pipeline<T: Scalar>(
    records: &[PlayerRecord<T>],
    specs: &[VariableGroupSpec],
    cfg: &PipelineConfig<T>,
    previous: Option<&[PlayerRecord<T>]>,
) -> Result<FeatureTable<T>> {
    let prev = previous.map(|p| FeatureTable::represent(p, specs)).transpose()?;
    FeatureTable::represent(records, specs)?.transform(cfg, prev.as_ref())?.standardize()
}

// ---------------------------------------------------------------------------
// CSV input / output

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Csv { path: path.to_path_buf(), source: e }
}

/// Reads the variable metadata CSV: `name,kind,parent,composition_id,weight[,transform]`.
pub fn read_metadata(path: &Path) -> Result<Vec<VariableGroupSpec>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::schema(path, format!("cannot read metadata file: {e}")),
            _ => csv_err(path)(e),
        })?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let req = |name: &str| col(name).ok_or_else(|| Error::schema(path, format!("missing column `{name}`")));
    let (i_name, i_kind) = (req("name")?, req("kind")?);
    let (i_parent, i_comp, i_weight, i_tr) = (col("parent"), col("composition_id"), col("weight"), col("transform"));
    let opt = |rec: &csv::StringRecord, i: Option<usize>| {
        i.and_then(|i| rec.get(i)).filter(|s| !s.is_empty()).map(str::to_string)
    };
    let mut specs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let row = line + 2;
        let name = rec.get(i_name).unwrap_or_default().to_string();
        let kind_s = rec.get(i_kind).unwrap_or_default();
        let kind = VariableKind::parse(kind_s)
            .ok_or_else(|| Error::schema(path, format!("row {row}, column `kind`: unknown kind `{kind_s}`")))?;
        let weight = match opt(&rec, i_weight) {
            None => 1.0,
            Some(w) => w
                .parse()
                .map_err(|_| Error::schema(path, format!("row {row}, column `weight`: not a number `{w}`")))?,
        };
        let transform = match opt(&rec, i_tr) {
            None => TransformSpec::None,
            Some(t) => TransformSpec::parse(&t)
                .ok_or_else(|| Error::schema(path, format!("row {row}, column `transform`: bad value `{t}`")))?,
        };
        specs.push(VariableGroupSpec {
            name,
            kind,
            parent: opt(&rec, i_parent),
            composition_id: opt(&rec, i_comp),
            weight,
            transform,
        });
    }
    validate_specs(&specs).map_err(|e| Error::schema(path, e.to_string()))?;
    Ok(specs)
}

/// Reads the players CSV. Required columns: `id`, `minutes` and every variable
/// named in the metadata. Empty cells are missing values.
pub fn read_players<T: Scalar>(path: &Path, specs: &[VariableGroupSpec]) -> Result<Vec<PlayerRecord<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::schema(path, format!("cannot read players file: {e}")),
            _ => csv_err(path)(e),
        })?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::schema(path, format!("missing column `{name}`")))
    };
    let i_id = find("id")?;
    let i_min = find("minutes")?;
    let quant: Vec<(String, usize)> = specs
        .iter()
        .filter(|s| s.kind.is_quantitative())
        .map(|s| Ok((s.name.clone(), find(&s.name)?)))
        .collect::<Result<_>>()?;
    let pos_name = &specs.iter().find(|s| s.kind == VariableKind::Position).expect("validated").name;
    let i_pos = find(pos_name)?;
    let lt: Vec<(&str, usize)> = specs
        .iter()
        .filter(|s| s.kind == VariableKind::LeagueTeam)
        .map(|s| Ok((s.name.as_str(), find(&s.name)?)))
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let row = line + 2;
        let number = |col: &str, i: usize| -> Result<Option<T>> {
            let cell = rec.get(i).unwrap_or_default();
            if cell.is_empty() {
                return Ok(None);
            }
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|v| Some(T::lit(v)))
                .ok_or_else(|| Error::schema(path, format!("row {row}, column `{col}`: not a number `{cell}`")))
        };
        let required = |col: &str, i: usize| -> Result<T> {
            number(col, i)?.ok_or_else(|| Error::schema(path, format!("row {row}, column `{col}`: missing value")))
        };
        let mut raw_values = BTreeMap::new();
        for (name, i) in &quant {
            raw_values.insert(name.clone(), number(name, *i)?);
        }
        let positions = parse_position_set(rec.get(i_pos).unwrap_or_default())
            .map_err(|e| Error::schema(path, format!("row {row}, column `{pos_name}`: {e}")))?;
        out.push(PlayerRecord {
            id: rec.get(i_id).unwrap_or_default().to_string(),
            minutes_played: required("minutes", i_min)?,
            raw_values,
            positions,
            league_score: required(lt[0].0, lt[0].1)?,
            team_points: required(lt[1].0, lt[1].1)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureManifest {
    pub stages: StageFlags,
    pub n_players: usize,
    pub columns: Vec<ColumnManifest>,
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnManifest {
    pub name: String,
    pub kind: VariableKind,
    pub weight: f64,
    pub shift: ShiftChoice,
    pub center: Option<f64>,
    pub scale: Option<f64>,
}

impl<T: Scalar> FeatureTable<T> {
    pub fn manifest(&self) -> FeatureManifest {
        FeatureManifest {
            stages: self.stages,
            n_players: self.n(),
            columns: self
                .columns
                .iter()
                .map(|c| ColumnManifest {
                    name: c.spec.name.clone(),
                    kind: c.spec.kind,
                    weight: c.weight.as_f64(),
                    shift: c.shift,
                    center: c.center.map(Scalar::as_f64),
                    scale: c.scale.map(Scalar::as_f64),
                })
                .collect(),
            dropped: self.dropped.clone(),
        }
    }

    /// Writes the staged table as CSV plus a `<name>.manifest.json` sidecar.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path).map_err(csv_err(csv_path))?;
        let mut header = vec!["id".to_string()];
        header.extend(self.columns.iter().map(|c| c.spec.name.clone()));
        header.extend(["positions", "league_score", "team_points"].map(String::from));
        w.write_record(&header).map_err(csv_err(csv_path))?;
        for i in 0..self.n() {
            let mut row = vec![self.ids[i].clone()];
            row.extend(self.columns.iter().map(|c| c.values[i].map_or(String::new(), |v| v.as_f64().to_string())));
            row.push(self.positions[i].iter().map(|p| p.code()).collect::<Vec<_>>().join(";"));
            row.push(self.league_team[0][i].as_f64().to_string());
            row.push(self.league_team[1][i].as_f64().to_string());
            w.write_record(&row).map_err(csv_err(csv_path))?;
        }
        w.flush().map_err(|e| Error::io(csv_path, e))?;
        let side = csv_path.with_extension("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest())
            .map_err(|e| Error::Json { path: side.clone(), source: e })?;
        std::fs::write(&side, json).map_err(|e| Error::io(&side, e))
    }
}
