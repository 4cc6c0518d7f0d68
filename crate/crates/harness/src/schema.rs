//! JSON file formats. Matrices are dense row-major arrays; set-function
//! tables are maps from subset bitmask (bit `j` = element `j`) to value.
//! Unbounded domain entries are written as `null`.

use std::collections::BTreeMap;
use std::path::Path;

use drsub_core::engine::{DualPoint, OvershootPolicy, RunTrace};
use drsub_core::error::Error;
use drsub_core::{
    BoundReport, DrObjective, FeasibleSet, LinearObjective, Matrix, Multilinear, OnlineInstance, PenaltyModel,
    QuadraticDr, Regime, Result, SetFunctionTable, TraceEvaluation,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::generate::GeneratorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Box { bounds: Vec<f64>, radius: f64 },
    Simplex { dim: usize, scale: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Quadratic {
        hessian: Vec<f64>,
        linear: Vec<f64>,
        domain: Vec<Option<f64>>,
    },
    Multilinear {
        ground: usize,
        #[serde(deserialize_with = "mask_keys")]
        table: BTreeMap<u32, f64>,
    },
    Linear {
        coefficients: Vec<f64>,
    },
}

fn mask_keys<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u32, f64>, D::Error> {
    let raw = BTreeMap::<String, f64>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.parse().map(|mask| (mask, v)).map_err(|_| serde::de::Error::custom(format!("bad subset mask {k:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    /// `n × m`, row `i` is `ĉ_i`.
    pub costs: Vec<f64>,
    pub sets: Vec<SetSpec>,
    pub objectives: Vec<ObjectiveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeName {
    Single,
    Multi,
    Absent,
}

impl From<Regime> for RegimeName {
    fn from(r: Regime) -> Self {
        match r {
            Regime::SingleConstraint => RegimeName::Single,
            Regime::MultiConstraint => RegimeName::Multi,
            Regime::Absent => RegimeName::Absent,
        }
    }
}

impl From<RegimeName> for Regime {
    fn from(r: RegimeName) -> Self {
        match r {
            RegimeName::Single => Regime::SingleConstraint,
            RegimeName::Multi => Regime::MultiConstraint,
            RegimeName::Absent => Regime::Absent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub regime: RegimeName,
    pub upper: f64,
    pub lower: f64,
    #[serde(default)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyFile {
    pub penalties: Vec<PenaltySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OvershootName {
    CapFinalMicrostep,
    AllowRaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFile {
    /// `n × m`, row `i` is `ŷ_i`.
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub overshoot: OvershootName,
    pub penalties: Vec<PenaltySpec>,
    /// `n × m`, column `t` is `x̃_t`.
    pub allocations: Vec<f64>,
    /// `n × m`, load of row `i` after step `t`.
    pub step_loads: Vec<f64>,
    pub loads: Vec<f64>,
    pub alg: f64,
    pub p_gseq: f64,
    pub dual: DualFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFile {
    pub regime: RegimeName,
    pub theoretical_cr: f64,
    pub per_row_terms: Vec<f64>,
    pub alpha_used: Vec<f64>,
    pub epsilon: f64,
    pub finite_k_slack: Option<f64>,
    pub empirical_cr: Option<f64>,
}

impl From<&BoundReport> for BoundFile {
    fn from(r: &BoundReport) -> Self {
        Self {
            regime: r.regime.into(),
            theoretical_cr: r.theoretical_cr,
            per_row_terms: r.per_row_terms.clone(),
            alpha_used: r.alpha_used.clone(),
            epsilon: r.epsilon,
            finite_k_slack: r.finite_k_slack,
            empirical_cr: r.empirical_cr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationFile {
    pub alg: f64,
    pub p_gseq: f64,
    pub loads: Vec<f64>,
    pub overloaded_rows: Vec<usize>,
    pub infeasible_steps: Vec<usize>,
}

impl From<&TraceEvaluation> for EvaluationFile {
    fn from(e: &TraceEvaluation) -> Self {
        Self {
            alg: e.alg,
            p_gseq: e.p_gseq,
            loads: e.loads.clone(),
            overloaded_rows: e.overloaded_rows.clone(),
            infeasible_steps: e.infeasible_steps.clone(),
        }
    }
}

/// Output of the `bounds` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub evaluation: EvaluationFile,
    pub opt_fw: f64,
    pub uppers: Vec<f64>,
    pub lowers: Vec<f64>,
    /// `None` when no row carries a budget.
    pub bound: Option<BoundFile>,
    pub margin: f64,
    pub satisfied: Option<bool>,
    pub feasible: bool,
}

impl From<&FeasibleSet> for SetSpec {
    fn from(s: &FeasibleSet) -> Self {
        match s {
            FeasibleSet::Box { bounds, radius } => SetSpec::Box { bounds: bounds.clone(), radius: *radius },
            FeasibleSet::Simplex { dim, scale, radius } => {
                SetSpec::Simplex { dim: *dim, scale: *scale, radius: *radius }
            }
        }
    }
}

impl SetSpec {
    pub fn to_set(&self) -> Result<FeasibleSet> {
        let set = match self {
            SetSpec::Box { bounds, radius } => FeasibleSet::Box { bounds: bounds.clone(), radius: *radius },
            SetSpec::Simplex { dim, scale, radius } => {
                FeasibleSet::Simplex { dim: *dim, scale: *scale, radius: *radius }
            }
        };
        set.validate()?;
        Ok(set)
    }
}

impl From<&DrObjective> for ObjectiveSpec {
    fn from(o: &DrObjective) -> Self {
        match o {
            DrObjective::Quadratic(q) => ObjectiveSpec::Quadratic {
                hessian: q.hessian().as_slice().to_vec(),
                linear: q.linear().to_vec(),
                domain: q.domain().iter().map(|&b| b.is_finite().then_some(b)).collect(),
            },
            DrObjective::Multilinear(ml) => {
                let t = ml.table();
                ObjectiveSpec::Multilinear {
                    ground: t.ground_size(),
                    table: t.values().iter().enumerate().map(|(s, &v)| (s as u32, v)).collect(),
                }
            }
            DrObjective::Linear(l) => ObjectiveSpec::Linear { coefficients: l.coefficients().to_vec() },
        }
    }
}

impl ObjectiveSpec {
    pub fn to_objective(&self) -> Result<DrObjective> {
        Ok(match self {
            ObjectiveSpec::Quadratic { hessian, linear, domain } => {
                let m = linear.len();
                let h = Matrix::from_row_major(m, m, hessian.clone())?;
                let domain = domain.iter().map(|b| b.unwrap_or(f64::INFINITY)).collect();
                QuadraticDr::new(h, linear.clone())?.with_domain(domain)?.into()
            }
            ObjectiveSpec::Multilinear { ground, table } => {
                let size = 1usize
                    .checked_shl(*ground as u32)
                    .filter(|_| *ground <= 20)
                    .ok_or(Error::GroundSetTooLarge(*ground))?;
                let mut values = vec![f64::NAN; size];
                for (&mask, &v) in table {
                    let slot = values
                        .get_mut(mask as usize)
                        .ok_or_else(|| Error::InvalidInput(format!("mask {mask} outside a ground set of {ground}")))?;
                    *slot = v;
                }
                if let Some(missing) = values.iter().position(|v| v.is_nan()) {
                    return Err(Error::InvalidInput(format!("set-function table has no entry for mask {missing}")));
                }
                Multilinear::new(SetFunctionTable::new(*ground, values)?).into()
            }
            ObjectiveSpec::Linear { coefficients } => LinearObjective::new(coefficients.clone())?.into(),
        })
    }
}

impl InstanceFile {
    pub fn from_instance(inst: &OnlineInstance, generator: Option<GeneratorSpec>) -> Self {
        Self {
            n: inst.rows(),
            m: inst.steps(),
            costs: inst.costs().as_slice().to_vec(),
            sets: inst.sets().iter().map(SetSpec::from).collect(),
            objectives: inst.objectives().iter().map(ObjectiveSpec::from).collect(),
            generator,
        }
    }

    pub fn to_instance(&self) -> Result<OnlineInstance> {
        let costs = Matrix::from_row_major(self.n, self.m, self.costs.clone())?;
        let sets = self.sets.iter().map(SetSpec::to_set).collect::<Result<_>>()?;
        let objectives = self.objectives.iter().map(ObjectiveSpec::to_objective).collect::<Result<_>>()?;
        OnlineInstance::new(costs, sets, objectives)
    }
}

impl From<&PenaltyModel> for PenaltySpec {
    fn from(p: &PenaltyModel) -> Self {
        Self { regime: p.regime().into(), upper: p.upper(), lower: p.lower(), epsilon: p.epsilon() }
    }
}

impl PenaltySpec {
    pub fn to_model(&self) -> Result<PenaltyModel> {
        match self.regime {
            RegimeName::Absent => Ok(PenaltyModel::absent()),
            r => PenaltyModel::new(r.into(), self.upper, self.lower, self.epsilon),
        }
    }
}

pub fn to_models(specs: &[PenaltySpec]) -> Result<Vec<PenaltyModel>> {
    specs.iter().map(PenaltySpec::to_model).collect()
}

impl TraceFile {
    pub fn from_trace(trace: &RunTrace, penalties: &[PenaltyModel]) -> Self {
        Self {
            n: trace.allocations.rows(),
            m: trace.allocations.cols(),
            k: trace.k,
            overshoot: match trace.overshoot {
                OvershootPolicy::CapFinalMicrostep => OvershootName::CapFinalMicrostep,
                OvershootPolicy::AllowRaw => OvershootName::AllowRaw,
            },
            penalties: penalties.iter().map(PenaltySpec::from).collect(),
            allocations: trace.allocations.as_slice().to_vec(),
            step_loads: trace.step_loads.as_slice().to_vec(),
            loads: trace.loads.clone(),
            alg: trace.alg,
            p_gseq: trace.p_gseq,
            dual: DualFile { y: trace.dual.y.as_slice().to_vec(), z: trace.dual.z.clone() },
        }
    }

    pub fn allocations(&self) -> Result<Matrix> {
        Matrix::from_row_major(self.n, self.m, self.allocations.clone())
    }

    pub fn dual(&self) -> Result<DualPoint> {
        Ok(DualPoint { y: Matrix::from_row_major(self.n, self.m, self.dual.y.clone())?, z: self.dual.z.clone() })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, FileError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io { path: display.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| FileError::Json { path: display, source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), FileError> {
    let display = path.display().to_string();
    let text =
        serde_json::to_string_pretty(value).map_err(|source| FileError::Json { path: display.clone(), source })?;
    std::fs::write(path, text + "\n").map_err(|source| FileError::Io { path: display, source })
}
