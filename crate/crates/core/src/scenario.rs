//! JSON scenario files: parsing, validation, execution and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::euclid::{EuclideanDomain, Integers, PolyFp};
use crate::fpmod::{hom, FpModule, Ideal, LocModule, Morphism};
use crate::functors::{CoherentFunctor, ComplexFunctor, EndPart, FunctorSpec, MiddleFiniteComplex, OscillatingFunctor};
use crate::invariants::{self, CmcSet, ExponentSet};
use crate::matnf::{self, DMat, Mat};
use crate::stabilab::{self, Family, KwComplex, Shift, StabilizationReport, Status};

pub const DEFAULT_HORIZON: u32 = 50;
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Backend {
    Integers,
    Poly { p: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsDef {
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentedDef {
    pub ambient: usize,
    /// Each relation is a vector in ambient coordinates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleDef {
    Presented(PresentedDef),
    Invariants(InvariantsDef),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmoduleDef {
    pub module: String,
    pub generators: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDef {
    pub source: String,
    pub target: String,
    /// Image of each source generator, in target ambient coordinates.
    pub images: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftDef {
    pub l1: Value,
    pub l2: Value,
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyDef {
    QuotientPowers {
        module: String,
        ideal: Value,
    },
    Layers {
        module: String,
        ideal: Value,
    },
    GradedLayers {
        module: String,
        sub: Value,
        ideal: Value,
    },
    Subquotient {
        module: String,
        u: Value,
        v: Value,
        w: Value,
        ideal: Value,
    },
    KwHomology {
        alpha: String,
        beta: String,
        lp: Value,
        mp: Value,
        np: Value,
        ideal: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<ShiftDef>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub listed: Vec<u32>,
    /// `[start, step]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub progressions: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowersDef {
    pub base: Value,
    pub exponents: ExponentDef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetDef {
    Finite(Vec<Value>),
    Closure(Vec<Value>),
    Powers(PowersDef),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartDef {
    pub module: String,
    /// Present for a localized part `module[1/invert]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invert: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSetDef {
    pub prime: Value,
    pub set: ExponentDef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctorDef {
    Identity,
    HomFrom {
        module: String,
    },
    Tor1 {
        module: String,
    },
    Ext1 {
        module: String,
    },
    Coherent {
        morphism: String,
    },
    Gamma {
        ideal: Value,
    },
    ModGamma {
        ideal: Value,
    },
    Tau {
        set: SetDef,
    },
    ModTau {
        set: SetDef,
    },
    Complex {
        d2: String,
        d1: String,
        index: usize,
    },
    MiddleFinite {
        /// Shorthand for `0 -> R -> R[1/g]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        local_cohomology: Option<Value>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        a: Vec<PartDef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        c: Vec<PartDef>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        da: Vec<Vec<Value>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        db: Vec<Vec<Value>>,
    },
    Oscillating {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prime: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        set: Option<ExponentDef>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        sets: Vec<PrimeSetDef>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqExpect {
    /// `stable`, `not-stable-within-horizon` or `oscillating`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0_max: Option<u32>,
    /// Values from the first index on; repeated cyclically when
    /// `pattern_repeats`, otherwise the last entry continues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub pattern_repeats: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ass: Option<SeqExpect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<SeqExpect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artin_rees_max: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ideals: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub submodules: BTreeMap<String, SubmoduleDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismDef>,
    pub family: FamilyDef,
    pub functor: FunctorDef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_ideal: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Outputs>,
}

fn is_zero_usize(v: &usize) -> bool {
    *v == 0
}

fn is_false(v: &bool) -> bool {
    !*v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioError {
    Parse(String),
    Validation(String),
    Domain(String),
    Runtime(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Domain(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(m) => write!(f, "parse error: {m}"),
            ScenarioError::Validation(m) => write!(f, "invalid scenario: {m}"),
            ScenarioError::Domain(m) => write!(f, "domain violation: {m}"),
            ScenarioError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("scenario serializes")
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Where `needle` first appears as a JSON string in `text`, for messages.
fn anchor(text: &str, needle: &str) -> String {
    let quoted = format!("\"{needle}\"");
    match text.find(&quoted) {
        Some(pos) => format!("line {}", text[..pos].matches('\n').count() + 1),
        None => "scenario".to_string(),
    }
}

/// One scan sequence in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqReport<T> {
    #[serde(flatten)]
    pub status: Status,
    pub n0: Option<u32>,
    pub values: Vec<T>,
}

impl<T> SeqReport<T> {
    pub fn status_name(&self) -> String {
        match self.status {
            Status::OscillatingWithPeriod { .. } => "oscillating".into(),
            s => s.to_string(),
        }
    }

    pub fn period(&self) -> Option<u32> {
        match self.status {
            Status::OscillatingWithPeriod { period } => Some(period),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub matched: bool,
    pub failures: Vec<String>,
}

/// The JSON report of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub backend: String,
    pub family: String,
    pub functor: String,
    pub start: u32,
    pub horizon: u32,
    pub window: usize,
    pub ass: SeqReport<Vec<String>>,
    pub depth_ideal: Option<String>,
    pub depth: Option<SeqReport<String>>,
    pub artin_rees: Option<u32>,
    pub ann_monotone: bool,
    pub expectation: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub n: u32,
    pub invariant_factors: String,
    pub ass: String,
    pub depth: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub rows: Vec<CsvRow>,
}

impl RunOutput {
    /// 3 when an expectation block is present and not met, else 0.
    pub fn exit_code(&self) -> i32 {
        match &self.summary.expectation {
            Some(v) if !v.matched => 3,
            _ => 0,
        }
    }

    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("csv rows serialize");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Write the CSV and JSON reports into `dir`; returns the paths written.
    pub fn write(&self, sc: &Scenario, dir: &Path) -> std::io::Result<(std::path::PathBuf, std::path::PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let outs = sc.outputs.clone().unwrap_or_default();
        let csv_path = dir.join(outs.csv.unwrap_or_else(|| format!("{}.csv", sc.name)));
        let json_path = dir.join(outs.json.unwrap_or_else(|| format!("{}.json", sc.name)));
        std::fs::write(&csv_path, self.csv())?;
        std::fs::write(&json_path, self.json())?;
        Ok((csv_path, json_path))
    }
}

/// Command-line overrides.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub horizon: Option<u32>,
    pub window: Option<usize>,
}

pub fn run_text(text: &str, ov: Overrides) -> Result<(Scenario, RunOutput), ScenarioError> {
    let sc = Scenario::parse(text)?;
    let out = run(&sc, text, ov)?;
    Ok((sc, out))
}

pub fn run(sc: &Scenario, text: &str, ov: Overrides) -> Result<RunOutput, ScenarioError> {
    match &sc.backend {
        Backend::Integers => run_in(Integers, sc, text, ov),
        Backend::Poly { p } => {
            let d = PolyFp::new(*p).map_err(|e| ScenarioError::Validation(format!("{}: {e}", anchor(text, "p"))))?;
            run_in(d, sc, text, ov)
        }
    }
}

/// A compiled scenario.
pub struct Compiled<D: EuclideanDomain> {
    pub family: Family<D>,
    pub functor: FunctorSpec<D>,
    pub depth_ideal: Option<Ideal<D::Elem>>,
    pub horizon: u32,
    pub window: usize,
}

struct Ctx<'a, D: EuclideanDomain> {
    d: D,
    sc: &'a Scenario,
    text: &'a str,
    modules: BTreeMap<String, FpModule<D>>,
    morphisms: BTreeMap<String, Morphism<D>>,
}

fn lift(e: Error) -> ScenarioError {
    if e.is_domain_violation() {
        ScenarioError::Domain(e.to_string())
    } else {
        ScenarioError::Runtime(e.to_string())
    }
}

impl<'a, D: EuclideanDomain> Ctx<'a, D> {
    fn invalid(&self, near: &str, msg: impl fmt::Display) -> ScenarioError {
        ScenarioError::Validation(format!("{}: {msg}", anchor(self.text, near)))
    }

    fn elem(&self, v: &Value, near: &str) -> Result<D::Elem, ScenarioError> {
        self.d.elem_from_json(v).map_err(|e| self.invalid(near, e))
    }

    fn ideal(&self, v: &Value, near: &str) -> Result<Ideal<D::Elem>, ScenarioError> {
        if let Value::String(s) = v {
            if let Some(def) = self.sc.ideals.get(s) {
                return Ok(Ideal::new(&self.d, &self.elem(def, s)?));
            }
        }
        Ok(Ideal::new(&self.d, &self.elem(v, near)?))
    }

    fn module(&self, name: &str) -> Result<&FpModule<D>, ScenarioError> {
        self.modules.get(name).ok_or_else(|| self.invalid(name, format!("unknown module `{name}`")))
    }

    fn morphism(&self, name: &str) -> Result<&Morphism<D>, ScenarioError> {
        self.morphisms.get(name).ok_or_else(|| self.invalid(name, format!("unknown morphism `{name}`")))
    }

    fn columns(&self, rows: usize, vecs: &[Vec<Value>], near: &str) -> Result<DMat<D>, ScenarioError> {
        let mut cols = Vec::with_capacity(vecs.len());
        for v in vecs {
            if v.len() != rows {
                return Err(self.invalid(near, format!("vector of length {} where {rows} entries are needed", v.len())));
            }
            cols.push(v.iter().map(|x| self.elem(x, near)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(Mat::from_columns(rows, &cols))
    }

    /// Generators given by submodule name or inline vectors, inside `module`.
    fn gens(&self, v: &Value, module: &str, near: &str) -> Result<DMat<D>, ScenarioError> {
        let m = self.module(module)?;
        match v {
            Value::String(name) => {
                let def = self
                    .sc
                    .submodules
                    .get(name)
                    .ok_or_else(|| self.invalid(name, format!("unknown submodule `{name}`")))?;
                if def.module != module {
                    return Err(
                        self.invalid(name, format!("submodule `{name}` lives in `{}`, not `{module}`", def.module))
                    );
                }
                self.columns(m.ambient_rank(), &def.generators, name)
            }
            Value::Array(items) => {
                let vecs = items
                    .iter()
                    .map(|x| x.as_array().cloned().ok_or_else(|| self.invalid(near, "generators must be vectors")))
                    .collect::<Result<Vec<_>, _>>()?;
                self.columns(m.ambient_rank(), &vecs, near)
            }
            _ => Err(self.invalid(near, "expected a submodule name or a list of vectors")),
        }
    }

    fn exponents(&self, e: &ExponentDef, near: &str) -> Result<ExponentSet, ScenarioError> {
        let mut s = ExponentSet::finite(e.listed.iter().copied());
        match e.parity.as_deref() {
            None => {}
            Some("even") => s = s.union(ExponentSet::even()),
            Some("odd") => s = s.union(ExponentSet::odd()),
            Some(other) => return Err(self.invalid(near, format!("parity must be even or odd, got {other:?}"))),
        }
        for &(a, b) in &e.progressions {
            if b == 0 {
                return Err(self.invalid(near, "progression step must be positive"));
            }
            s = s.union(ExponentSet::progression(a, b));
        }
        Ok(s)
    }

    fn cmc(&self, s: &SetDef) -> Result<CmcSet<D::Elem>, ScenarioError> {
        let list = |xs: &[Value]| xs.iter().map(|x| self.elem(x, "set")).collect::<Result<Vec<_>, _>>();
        Ok(match s {
            SetDef::Finite(xs) => CmcSet::Finite(list(xs)?),
            SetDef::Closure(xs) => CmcSet::Closure(list(xs)?),
            SetDef::Powers(p) => CmcSet::Powers {
                base: self.elem(&p.base, "base")?,
                exponents: self.exponents(&p.exponents, "exponents")?,
            },
        })
    }

    fn part(&self, p: &PartDef) -> Result<EndPart<D>, ScenarioError> {
        let m = self.module(&p.module)?.clone();
        match &p.invert {
            None => Ok(EndPart::Finite(m)),
            Some(x) => {
                let x = self.elem(x, "invert")?;
                LocModule::new(m, x).map(EndPart::Local).map_err(|e| self.invalid("invert", e))
            }
        }
    }

    fn family(&self, f: &FamilyDef) -> Result<Family<D>, ScenarioError> {
        let fam = match f {
            FamilyDef::QuotientPowers { module, ideal } => {
                Family::QuotientPowers { m: self.module(module)?.clone(), ideal: self.ideal(ideal, "ideal")? }
            }
            FamilyDef::Layers { module, ideal } => {
                Family::Layers { m: self.module(module)?.clone(), ideal: self.ideal(ideal, "ideal")? }
            }
            FamilyDef::GradedLayers { module, sub, ideal } => Family::GradedLayers {
                m: self.module(module)?.clone(),
                sub: self.gens(sub, module, "sub")?,
                ideal: self.ideal(ideal, "ideal")?,
            },
            FamilyDef::Subquotient { module, u, v, w, ideal } => Family::Subquotient {
                t: self.module(module)?.clone(),
                u: self.gens(u, module, "u")?,
                v: self.gens(v, module, "v")?,
                w: self.gens(w, module, "w")?,
                ideal: self.ideal(ideal, "ideal")?,
            },
            FamilyDef::KwHomology { alpha, beta, lp, mp, np, ideal, shift } => {
                let a = self.morphism(alpha)?.clone();
                let b = self.morphism(beta)?.clone();
                let name_of = |m: &FpModule<D>| {
                    self.modules.iter().find(|(_, v)| v.is_same_presentation(m)).map(|(k, _)| k.clone())
                };
                let l = name_of(a.source()).ok_or_else(|| self.invalid(alpha, "unknown source"))?;
                let m = self.sc.morphisms[alpha].target.clone();
                let n = self.sc.morphisms[beta].target.clone();
                let shift = match shift {
                    None => None,
                    Some(s) => Some(Shift { l1: self.gens(&s.l1, &l, "l1")?, l2: self.gens(&s.l2, &l, "l2")?, c: s.c }),
                };
                let kw = KwComplex::new(
                    a,
                    b,
                    self.gens(lp, &self.sc.morphisms[alpha].source, "lp")?,
                    self.gens(mp, &m, "mp")?,
                    self.gens(np, &n, "np")?,
                    self.ideal(ideal, "ideal")?,
                    shift,
                )
                .map_err(|e| self.invalid("kw_homology", e))?;
                Family::KwHomology(Box::new(kw))
            }
        };
        fam.validate().map_err(|e| self.invalid("family", e))?;
        Ok(fam)
    }

    fn functor(&self, f: &FunctorDef) -> Result<FunctorSpec<D>, ScenarioError> {
        let d = &self.d;
        Ok(match f {
            FunctorDef::Identity => FunctorSpec::Identity,
            FunctorDef::HomFrom { module } => FunctorSpec::HomFrom(self.module(module)?.clone()),
            FunctorDef::Tor1 { module } => FunctorSpec::Tor1(self.module(module)?.clone()),
            FunctorDef::Ext1 { module } => FunctorSpec::Ext1(self.module(module)?.clone()),
            FunctorDef::Coherent { morphism } => {
                FunctorSpec::Coherent(CoherentFunctor::new(self.morphism(morphism)?.clone()))
            }
            FunctorDef::Gamma { ideal } => FunctorSpec::Gamma(self.ideal(ideal, "ideal")?),
            FunctorDef::ModGamma { ideal } => FunctorSpec::ModGamma(self.ideal(ideal, "ideal")?),
            FunctorDef::Tau { set } | FunctorDef::ModTau { set } => {
                let s = self.cmc(set)?;
                if !invariants::is_cmc(d, &s) {
                    return Err(self.invalid("set", Error::NotCmc));
                }
                if matches!(f, FunctorDef::Tau { .. }) {
                    FunctorSpec::Tau(s)
                } else {
                    FunctorSpec::ModTau(s)
                }
            }
            FunctorDef::Complex { d2, d1, index } => FunctorSpec::Complex(
                ComplexFunctor::new(self.morphism(d2)?.clone(), self.morphism(d1)?.clone(), *index)
                    .map_err(|e| self.invalid("complex", e))?,
            ),
            FunctorDef::MiddleFinite { local_cohomology, a, b, c, da, db } => {
                let sigma = match (local_cohomology, b) {
                    (Some(g), None) => MiddleFiniteComplex::local_cohomology(d, &self.elem(g, "local_cohomology")?),
                    (None, Some(b)) => {
                        let bm = self.module(b)?.clone();
                        let a = a.iter().map(|p| self.part(p)).collect::<Result<Vec<_>, _>>()?;
                        let c = c.iter().map(|p| self.part(p)).collect::<Result<Vec<_>, _>>()?;
                        let c_rows: usize = self.sc_parts_ambient(f, false)?;
                        let da = self.columns(bm.ambient_rank(), da, "da")?;
                        let db = self.columns(c_rows, db, "db")?;
                        let da = if da.cols() == 0 {
                            matnf::zeros(d, bm.ambient_rank(), self.sc_parts_ambient(f, true)?)
                        } else {
                            da
                        };
                        let db = if db.cols() == 0 { matnf::zeros(d, c_rows, bm.ambient_rank()) } else { db };
                        MiddleFiniteComplex::new(a, bm, c, da, db)
                    }
                    _ => {
                        return Err(self
                            .invalid("middle_finite", "give either local_cohomology or the complex a, b, c, da, db"))
                    }
                };
                FunctorSpec::MiddleFinite(sigma.map_err(|e| self.invalid("middle_finite", e))?)
            }
            FunctorDef::Oscillating { prime, set, sets } => {
                let mut pairs = Vec::new();
                match (prime, set) {
                    (Some(p), Some(s)) => pairs.push((self.elem(p, "prime")?, self.exponents(s, "set")?)),
                    (None, None) => {}
                    _ => return Err(self.invalid("oscillating", "prime and set go together")),
                }
                for ps in sets {
                    pairs.push((self.elem(&ps.prime, "prime")?, self.exponents(&ps.set, "set")?));
                }
                FunctorSpec::Oscillating(OscillatingFunctor::new(d, pairs).map_err(|e| self.invalid("oscillating", e))?)
            }
        })
    }

    /// Total base ambient rank of the `a` (or `c`) end of a middle-finite definition.
    fn sc_parts_ambient(&self, f: &FunctorDef, source: bool) -> Result<usize, ScenarioError> {
        let FunctorDef::MiddleFinite { a, c, .. } = f else { unreachable!() };
        let parts = if source { a } else { c };
        parts.iter().map(|p| self.module(&p.module).map(|m| m.ambient_rank())).sum()
    }
}

/// Validate and build the typed objects of a scenario.
pub fn compile<D: EuclideanDomain>(
    d: D,
    sc: &Scenario,
    text: &str,
    ov: Overrides,
) -> Result<Compiled<D>, ScenarioError> {
    let mut ctx = Ctx { d: d.clone(), sc, text, modules: BTreeMap::new(), morphisms: BTreeMap::new() };
    for (name, def) in &sc.modules {
        let m = match def {
            ModuleDef::Invariants(inv) => {
                let f = inv.factors.iter().map(|x| ctx.elem(x, name)).collect::<Result<Vec<_>, _>>()?;
                FpModule::from_invariants(&d, inv.rank, &f)
            }
            ModuleDef::Presented(p) => {
                let rel = ctx.columns(p.ambient, &p.relations, name)?;
                FpModule::new(&d, p.ambient, rel).map_err(|e| ctx.invalid(name, e))?
            }
        };
        ctx.modules.insert(name.clone(), m);
    }
    for (name, def) in &sc.submodules {
        ctx.gens(&Value::String(name.clone()), &def.module, name)?;
    }
    for (name, def) in &sc.morphisms {
        let src = ctx.module(&def.source)?.clone();
        let dst = ctx.module(&def.target)?.clone();
        if def.images.len() != src.ambient_rank() {
            return Err(
                ctx.invalid(name, format!("{} images for {} source generators", def.images.len(), src.ambient_rank()))
            );
        }
        let mat = ctx.columns(dst.ambient_rank(), &def.images, name)?;
        let f = Morphism::new(&src, &dst, mat).map_err(|e| ctx.invalid(name, e))?;
        ctx.morphisms.insert(name.clone(), f);
    }
    let family = ctx.family(&sc.family)?;
    let functor = ctx.functor(&sc.functor)?;
    let depth_ideal = sc.depth_ideal.as_ref().map(|v| ctx.ideal(v, "depth_ideal")).transpose()?;
    let horizon = ov.horizon.or(sc.horizon).unwrap_or(DEFAULT_HORIZON);
    let window = ov.window.or(sc.window).unwrap_or(DEFAULT_WINDOW);
    if window < 2 || (horizon as usize) < window {
        return Err(ctx.invalid("horizon", format!("need horizon >= window >= 2, got {horizon} and {window}")));
    }
    Ok(Compiled { family, functor, depth_ideal, horizon, window })
}

fn seq_report<V, T>(r: &StabilizationReport<V>, f: impl Fn(&V) -> T) -> SeqReport<T> {
    SeqReport { status: r.status, n0: r.n0, values: r.values.iter().map(f).collect() }
}

fn check_seq<T: Serialize>(what: &str, e: &SeqExpect, r: &SeqReport<T>, start: u32, failures: &mut Vec<String>) {
    if e.status != r.status_name() {
        failures.push(format!("{what}: expected status {}, got {}", e.status, r.status));
    }
    if let Some(p) = e.period {
        if r.period() != Some(p) {
            failures.push(format!("{what}: expected period {p}, got {}", r.status));
        }
    }
    if let Some(n0) = e.n0 {
        if r.n0 != Some(n0) {
            failures.push(format!("{what}: expected n0 = {n0}, got {:?}", r.n0));
        }
    }
    if let Some(max) = e.n0_max {
        if r.n0.is_none_or(|n| n > max) {
            failures.push(format!("{what}: expected n0 <= {max}, got {:?}", r.n0));
        }
    }
    if let Some(pat) = &e.pattern {
        if pat.is_empty() {
            failures.push(format!("{what}: empty pattern"));
            return;
        }
        for (i, v) in r.values.iter().enumerate() {
            let want = if e.pattern_repeats { &pat[i % pat.len()] } else { &pat[i.min(pat.len() - 1)] };
            let got = serde_json::to_value(v).expect("values serialize");
            if &got != want {
                failures.push(format!("{what}: at n = {} expected {want}, got {got}", start + i as u32));
                break;
            }
        }
    }
}

fn run_in<D: EuclideanDomain>(d: D, sc: &Scenario, text: &str, ov: Overrides) -> Result<RunOutput, ScenarioError> {
    let c = compile(d.clone(), sc, text, ov)?;
    let scan = stabilab::scan(&c.family, &c.functor, c.depth_ideal.as_ref(), c.horizon, c.window).map_err(lift)?;
    let (beta, nprime) = c.family.artin_rees_instance().map_err(lift)?;
    let artin_rees = stabilab::artin_rees_probe(&beta, &nprime, c.family.ideal(), c.horizon).map_err(lift)?;

    let ass = seq_report(&scan.ass, |a| a.render(&d));
    let depth = scan.depth.as_ref().map(|r| seq_report(r, |v| v.to_string()));
    let mut summary = RunSummary {
        scenario: sc.name.clone(),
        backend: d.descriptor().to_string(),
        family: c.family.kind().to_string(),
        functor: c.functor.kind().to_string(),
        start: scan.ass.start,
        horizon: c.horizon,
        window: c.window,
        ass,
        depth_ideal: c.depth_ideal.as_ref().map(|j| format!("({})", d.format_elem(j.generator()))),
        depth,
        artin_rees,
        ann_monotone: scan.ann_monotone(),
        expectation: None,
    };
    if let Some(e) = &sc.expect {
        let mut failures = Vec::new();
        if let Some(a) = &e.ass {
            check_seq("ass", a, &summary.ass, summary.start, &mut failures);
        }
        if let Some(de) = &e.depth {
            match &summary.depth {
                Some(r) => check_seq("depth", de, r, summary.start, &mut failures),
                None => failures.push("depth: expectation given but no depth_ideal".into()),
            }
        }
        if let Some(max) = e.artin_rees_max {
            if artin_rees.is_none_or(|v| v > max) {
                failures.push(format!("artin_rees: expected d <= {max}, got {artin_rees:?}"));
            }
        }
        summary.expectation = Some(Verdict { matched: failures.is_empty(), failures });
    }
    let rows = scan
        .rows
        .iter()
        .map(|r| {
            let mut inv: Vec<String> = r.value.factors().iter().map(|f| d.format_elem(f)).collect();
            inv.extend(std::iter::repeat_n("0".to_string(), r.value.free_rank()));
            CsvRow {
                n: r.n,
                invariant_factors: inv.join(";"),
                ass: r.ass.render(&d).join(";"),
                depth: r.depth.map(|v| v.to_string()).unwrap_or_default(),
            }
        })
        .collect();
    Ok(RunOutput { summary, rows })
}

/// Arguments of one-shot computations.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComputeArgs {
    #[serde(default)]
    backend: Option<Backend>,
    #[serde(default)]
    matrix: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    module: Option<ModuleDef>,
    #[serde(default)]
    source: Option<ModuleDef>,
    #[serde(default)]
    target: Option<ModuleDef>,
    #[serde(default)]
    ideal: Option<Value>,
    #[serde(default)]
    functor: Option<FunctorDef>,
    #[serde(default)]
    modules: BTreeMap<String, ModuleDef>,
    #[serde(default)]
    ideals: BTreeMap<String, Value>,
    #[serde(default)]
    morphisms: BTreeMap<String, MorphismDef>,
}

/// `snf`, `hnf`, `ass`, `depth`, `hom` or `eval` on inline JSON arguments.
///
/// A bare matrix is accepted for `snf`/`hnf` and a bare module for `ass`.
pub fn compute(sub: &str, args: &str) -> Result<Value, ScenarioError> {
    let raw: Value = serde_json::from_str(args).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let raw = match (sub, &raw) {
        ("snf" | "hnf", Value::Array(_)) => serde_json::json!({ "matrix": raw }),
        ("ass", Value::Object(o)) if !o.contains_key("module") => serde_json::json!({ "module": raw }),
        _ => raw,
    };
    let a: ComputeArgs = serde_json::from_value(raw).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    match a.backend.clone().unwrap_or(Backend::Integers) {
        Backend::Integers => compute_in(Integers, sub, &a),
        Backend::Poly { p } => {
            compute_in(PolyFp::new(p).map_err(|e| ScenarioError::Validation(e.to_string()))?, sub, &a)
        }
    }
}

fn mat_json<D: EuclideanDomain>(d: &D, m: &DMat<D>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| d.elem_to_json(x)).collect())).collect())
}

fn module_json<D: EuclideanDomain>(d: &D, m: &FpModule<D>) -> Value {
    serde_json::json!({
        "rank": m.free_rank(),
        "factors": m.factors().iter().map(|f| d.elem_to_json(f)).collect::<Vec<_>>(),
    })
}

fn compute_in<D: EuclideanDomain>(d: D, sub: &str, a: &ComputeArgs) -> Result<Value, ScenarioError> {
    let missing = |what: &str| ScenarioError::Validation(format!("`{sub}` needs `{what}`"));
    let family = FamilyDef::QuotientPowers { module: String::new(), ideal: Value::Null };
    let sc = Scenario {
        name: "compute".into(),
        description: None,
        backend: Backend::Integers,
        modules: a.modules.clone(),
        ideals: a.ideals.clone(),
        submodules: BTreeMap::new(),
        morphisms: a.morphisms.clone(),
        family,
        functor: FunctorDef::Identity,
        depth_ideal: None,
        horizon: None,
        window: None,
        expect: None,
        outputs: None,
    };
    let text = "";
    let mut ctx = Ctx { d: d.clone(), sc: &sc, text, modules: BTreeMap::new(), morphisms: BTreeMap::new() };
    let build = |ctx: &Ctx<D>, def: &ModuleDef, near: &str| -> Result<FpModule<D>, ScenarioError> {
        match def {
            ModuleDef::Invariants(inv) => {
                let f = inv.factors.iter().map(|x| ctx.elem(x, near)).collect::<Result<Vec<_>, _>>()?;
                Ok(FpModule::from_invariants(&ctx.d, inv.rank, &f))
            }
            ModuleDef::Presented(p) => {
                let rel = ctx.columns(p.ambient, &p.relations, near)?;
                FpModule::new(&ctx.d, p.ambient, rel).map_err(|e| ctx.invalid(near, e))
            }
        }
    };
    for (name, def) in &a.modules {
        let m = build(&ctx, def, name)?;
        ctx.modules.insert(name.clone(), m);
    }
    for (name, def) in &a.morphisms {
        let src = ctx.module(&def.source)?.clone();
        let dst = ctx.module(&def.target)?.clone();
        let mat = ctx.columns(dst.ambient_rank(), &def.images, name)?;
        let f = Morphism::new(&src, &dst, mat).map_err(|e| ctx.invalid(name, e))?;
        ctx.morphisms.insert(name.clone(), f);
    }
    let matrix = || -> Result<DMat<D>, ScenarioError> {
        let rows = a.matrix.as_ref().ok_or_else(|| missing("matrix"))?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(ScenarioError::Validation("matrix rows differ in length".into()));
        }
        let cols: Vec<Vec<Value>> = (0..ncols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
        let m = ctx.columns(rows.len(), &cols, "matrix")?;
        Ok(m)
    };
    let module_arg = |def: &Option<ModuleDef>, what: &str| -> Result<FpModule<D>, ScenarioError> {
        build(&ctx, def.as_ref().ok_or_else(|| missing(what))?, what)
    };
    Ok(match sub {
        "snf" => {
            let s = matnf::snf(&d, &matrix()?);
            serde_json::json!({
                "diagonal": s.invariant_factors().iter().map(|x| d.elem_to_json(x)).collect::<Vec<_>>(),
                "rank": s.rank,
                "u": mat_json(&d, &s.u),
                "v": mat_json(&d, &s.v),
            })
        }
        "hnf" => {
            let (h, u) = matnf::hnf(&d, &matrix()?);
            serde_json::json!({ "h": mat_json(&d, &h), "u": mat_json(&d, &u) })
        }
        "ass" => serde_json::json!(invariants::ass(&module_arg(&a.module, "module")?).render(&d)),
        "depth" => {
            let m = module_arg(&a.module, "module")?;
            let j = ctx.ideal(a.ideal.as_ref().ok_or_else(|| missing("ideal"))?, "ideal")?;
            Value::String(invariants::depth(&j, &m).to_string())
        }
        "hom" => {
            let h = hom(&module_arg(&a.source, "source")?, &module_arg(&a.target, "target")?).map_err(lift)?;
            module_json(&d, h.module())
        }
        "eval" => {
            let f = ctx.functor(a.functor.as_ref().ok_or_else(|| missing("functor"))?)?;
            let m = module_arg(&a.module, "module")?;
            module_json(&d, &crate::functors::eval(&f, &m).map_err(lift)?)
        }
        other => return Err(ScenarioError::Validation(format!("unknown computation `{other}`"))),
    })
}
