//! The curated scenario corpus and the functor battery run over it.

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::euclid::{EuclideanDomain, Integers, PolyFp};
use crate::fpmod::{self, FpModule, Ideal, Morphism};
use crate::functors::{self, CoherentFunctor, FunctorSpec, MiddleFiniteComplex, OscillatingFunctor};
use crate::invariants::{CmcSet, ExponentSet};
use crate::matnf;
use crate::scenario::{
    self, Backend, FunctorDef, ModuleDef, MorphismDef, Overrides, RunSummary, Scenario, ScenarioError, SetDef,
};
use crate::Result;

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name, ".json")))),*]
    };
}

/// `(name, file contents)` for every embedded scenario.
pub const CORPUS: &[(&str, &str)] = corpus!(
    "brodmann_identity",
    "brodmann_mixed_primes",
    "brodmann_layers",
    "brodmann_layers_coprime_depth",
    "brodmann_graded_layers",
    "brodmann_graded_layers_free",
    "brodmann_subquotient",
    "brodmann_kw_homology",
    "brodmann_kw_homology_shift",
    "brodmann_f2_quotient_powers",
    "brodmann_f2_layers",
    "brodmann_f2_graded_layers",
    "brodmann_f2_kw_homology",
    "brodmann_f3_quotient_powers",
    "brodmann_f3_subquotient",
    "oscillating_even",
    "oscillating_period3",
    "oscillating_finite",
    "oscillating_two_primes",
    "middle_finite_gamma",
    "middle_finite_complex",
    "middle_finite_mixed_end",
);

pub fn text(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn with_prefix(prefix: &str) -> Vec<(&'static str, Scenario)> {
    CORPUS
        .iter()
        .filter(|(n, _)| n.starts_with(prefix))
        .map(|(n, t)| (*n, Scenario::parse(t).expect("embedded scenarios parse")))
        .collect()
}

pub fn brodmann() -> Vec<(&'static str, Scenario)> {
    with_prefix("brodmann_")
}

pub fn oscillating() -> Vec<(&'static str, Scenario)> {
    with_prefix("oscillating_")
}

pub fn middle_finite() -> Vec<(&'static str, Scenario)> {
    with_prefix("middle_finite_")
}

/// Functor variants the battery applies to every Brodmann family.
pub const COHERENT_KINDS: &[&str] = &["tor1", "ext1", "hom_from", "coherent_mult", "coherent_shift", "coherent_pair"];
pub const TORSION_KINDS: &[&str] = &["gamma", "mod_gamma", "tau", "mod_tau", "middle_finite"];

fn elem_json<D: EuclideanDomain>(d: &D, sc: &Scenario, key: &str) -> D::Elem {
    d.elem_from_json(&sc.ideals[key]).expect("battery ideals parse")
}

fn module(v: Value) -> ModuleDef {
    serde_json::from_value(v).expect("module definition")
}

fn morphism(source: &str, target: &str, images: Value) -> MorphismDef {
    MorphismDef {
        source: source.into(),
        target: target.into(),
        images: serde_json::from_value(images).expect("images"),
    }
}

fn battery_in<D: EuclideanDomain>(d: D, sc: &Scenario, kind: &str) -> Option<Scenario> {
    let p = elem_json(&d, sc, "p");
    let q = elem_json(&d, sc, "q");
    let j = |e: &D::Elem| d.elem_to_json(e);
    let (p2, p3, pq) = (d.mul(&p, &p), d.pow(&p, 3), d.mul(&p, &q));
    let one = d.one();
    let zero = d.zero();
    let mut out = sc.clone();
    let mut add_module = |name: &str, v: Value| {
        out.modules.insert(name.into(), module(v));
    };
    let functor = match kind {
        "tor1" => {
            add_module("_K", json!({"factors": [j(&p2)]}));
            FunctorDef::Tor1 { module: "_K".into() }
        }
        "ext1" => {
            add_module("_K", json!({"factors": [j(&p), j(&pq)]}));
            FunctorDef::Ext1 { module: "_K".into() }
        }
        "hom_from" => {
            add_module("_K", json!({"rank": 1, "factors": [j(&pq)]}));
            FunctorDef::HomFrom { module: "_K".into() }
        }
        "coherent_mult" => {
            add_module("_R", json!({"rank": 1}));
            out.morphisms.insert("_f".into(), morphism("_R", "_R", json!([[j(&p)]])));
            FunctorDef::Coherent { morphism: "_f".into() }
        }
        "coherent_shift" => {
            add_module("_A", json!({"factors": [j(&p2)]}));
            add_module("_B", json!({"factors": [j(&p3)]}));
            out.morphisms.insert("_f".into(), morphism("_A", "_B", json!([[j(&p)]])));
            FunctorDef::Coherent { morphism: "_f".into() }
        }
        "coherent_pair" => {
            add_module("_S", json!({"rank": 2}));
            add_module("_T", json!({"ambient": 2, "relations": [[j(&q), j(&zero)]]}));
            out.morphisms.insert("_f".into(), morphism("_S", "_T", json!([[j(&one), j(&p)], [j(&zero), j(&q)]])));
            FunctorDef::Coherent { morphism: "_f".into() }
        }
        "gamma" => FunctorDef::Gamma { ideal: j(&p) },
        "mod_gamma" => FunctorDef::ModGamma { ideal: j(&p) },
        "tau" => FunctorDef::Tau { set: SetDef::Finite(vec![j(&p), j(&p2)]) },
        "mod_tau" => FunctorDef::ModTau { set: SetDef::Closure(vec![j(&q)]) },
        "middle_finite" => {
            // localized ends need torsion values
            if !matches!(sc.family, scenario::FamilyDef::QuotientPowers { .. } | scenario::FamilyDef::Layers { .. }) {
                return None;
            }
            FunctorDef::MiddleFinite {
                local_cohomology: Some(j(&p)),
                a: Vec::new(),
                b: None,
                c: Vec::new(),
                da: Vec::new(),
                db: Vec::new(),
            }
        }
        _ => return None,
    };
    out.functor = functor;
    out.name = format!("{}__{kind}", sc.name);
    if let Some(e) = out.expect.as_mut() {
        if let Some(a) = e.ass.as_mut() {
            a.n0 = None;
        }
    }
    Some(out)
}

/// `sc` with its functor replaced by the battery functor `kind`, built from
/// the scenario's ideals `p` and `q`. `None` when the variant does not apply.
pub fn battery(sc: &Scenario, kind: &str) -> Option<Scenario> {
    match &sc.backend {
        Backend::Integers => battery_in(Integers, sc, kind),
        Backend::Poly { p } => battery_in(PolyFp::new(*p).ok()?, sc, kind),
    }
}

#[derive(Debug)]
pub struct SuiteResult {
    pub label: String,
    pub outcome: Result<RunSummary, ScenarioError>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(s) if s.expectation.as_ref().is_none_or(|v| v.matched) && s.ann_monotone)
    }
}

pub fn run_one(label: String, sc: &Scenario, ov: Overrides) -> SuiteResult {
    let text = serde_json::to_string_pretty(sc).expect("scenario serializes");
    SuiteResult { label, outcome: scenario::run(sc, &text, ov).map(|o| o.summary) }
}

/// Every embedded scenario, then every Brodmann family under the battery.
pub fn run_all(ov: Overrides) -> Vec<SuiteResult> {
    let mut jobs: Vec<(String, Scenario)> =
        CORPUS.iter().map(|(n, t)| (n.to_string(), Scenario::parse(t).expect("embedded scenarios parse"))).collect();
    for (name, sc) in brodmann() {
        for kind in COHERENT_KINDS.iter().chain(TORSION_KINDS) {
            if let Some(b) = battery(&sc, kind) {
                jobs.push((format!("{name} x {kind}"), b));
            }
        }
    }
    jobs.into_iter().map(|(label, sc)| run_one(label, &sc, ov)).collect()
}

/// Outcome of [`law_checks`].
#[derive(Debug, Default)]
pub struct LawReport {
    pub trials: usize,
    pub evaluations: usize,
    pub failures: Vec<String>,
}

fn random_module(d: &Integers, rng: &mut StdRng, torsion: bool) -> FpModule<Integers> {
    let mut acc = BigInt::from(1);
    let factors: Vec<BigInt> = (0..rng.gen_range(0..=2))
        .map(|_| {
            acc *= rng.gen_range(2..=6);
            acc.clone()
        })
        .collect();
    let free = if torsion { 0 } else { rng.gen_range(0..=1) };
    FpModule::from_invariants(d, free, &factors)
}

fn random_morphism(rng: &mut StdRng, m: &FpModule<Integers>, n: &FpModule<Integers>) -> Result<Morphism<Integers>> {
    let h = fpmod::hom(m, n)?;
    let coords: Vec<BigInt> = (0..h.pairs().len()).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect();
    Ok(h.realize(&coords))
}

fn law_specs(torsion: bool) -> Result<Vec<FunctorSpec<Integers>>> {
    let d = Integers;
    let n = |v: i64| BigInt::from(v);
    let r = FpModule::free(&d, 1);
    let mut out = vec![
        FunctorSpec::Identity,
        FunctorSpec::HomFrom(FpModule::from_invariants(&d, 1, &[n(6)])),
        FunctorSpec::Tor1(FpModule::cyclic(&d, &n(4))),
        FunctorSpec::Ext1(FpModule::from_invariants(&d, 1, &[n(2), n(6)])),
        FunctorSpec::Coherent(CoherentFunctor::new(Morphism::new(&r, &r, matnf::from_i64(&d, &[vec![3]]))?)),
        FunctorSpec::Gamma(Ideal::new(&d, &n(2))),
        FunctorSpec::ModGamma(Ideal::new(&d, &n(6))),
        FunctorSpec::Tau(CmcSet::Finite(vec![n(2), n(4)])),
        FunctorSpec::ModTau(CmcSet::Closure(vec![n(3)])),
    ];
    if torsion {
        out.push(FunctorSpec::MiddleFinite(MiddleFiniteComplex::local_cohomology(&d, &n(2))?));
        out.push(FunctorSpec::Oscillating(OscillatingFunctor::new(
            &d,
            [(n(2), ExponentSet::even()), (n(3), ExponentSet::finite([1]))],
        )?));
    }
    Ok(out)
}

/// Identity, composition and annihilator monotonicity for the built-in
/// functors on random integer modules and morphisms.
pub fn law_checks(seed: u64, trials: usize) -> Result<LawReport> {
    let d = Integers;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rep = LawReport { trials, ..LawReport::default() };
    for t in 0..trials {
        let torsion = rng.gen_bool(0.5);
        let l = random_module(&d, &mut rng, torsion);
        let m = random_module(&d, &mut rng, torsion);
        let n = random_module(&d, &mut rng, torsion);
        let g = random_morphism(&mut rng, &l, &m)?;
        let h = random_morphism(&mut rng, &m, &n)?;
        let hg = h.compose(&g)?;
        for spec in law_specs(torsion)? {
            let k = spec.kind();
            let fid = functors::eval_mor(&spec, &Morphism::identity(&m))?;
            if !fid.same_as(&Morphism::identity(fid.source())) {
                rep.failures.push(format!("trial {t}: {k} does not preserve the identity"));
            }
            let fhg = functors::eval_mor(&spec, &hg)?;
            let comp = functors::eval_mor(&spec, &h)?.compose(&functors::eval_mor(&spec, &g)?)?;
            if !comp.same_as(&fhg) {
                rep.failures.push(format!("trial {t}: {k} does not preserve composition"));
            }
            for x in [&l, &m, &n] {
                if !functors::ann_is_monotone(x, &functors::eval(&spec, x)?) {
                    rep.failures.push(format!("trial {t}: {k} shrinks the annihilator"));
                }
            }
            rep.evaluations += 6;
        }
    }
    Ok(rep)
}
