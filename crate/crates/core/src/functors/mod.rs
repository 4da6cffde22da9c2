//! Covariant functors on finitely presented modules.
//!
//! Apart from the oscillating functor, every value `F(N)` is presented as a
//! subquotient `(⟨num⟩ + ⟨den⟩) / ⟨den⟩` of a carrier module, and `F(g)` is
//! induced by a matrix between carriers.

mod middle;
mod oscillating;

pub use middle::{middle_finite_eval, EndPart, MiddleFiniteComplex};
pub use oscillating::{osc_eval_mor, osc_eval_obj, skeletonize, OscillatingFunctor, Skeleton, SkeletonObject};

use crate::error::{Error, Result};
use crate::euclid::{ensure_same, EuclideanDomain};
use crate::fpmod::{hom, hom_induced, hom_postcompose, FpModule, Ideal, Morphism};
use crate::invariants::{self, CmcSet};
use crate::matnf::{self, DMat, LinearSolver};

/// `F = coker(h_L -> h_K)` for a presenting morphism `f: K -> L`.
#[derive(Clone, Debug)]
pub struct CoherentFunctor<D: EuclideanDomain> {
    f: Morphism<D>,
}

impl<D: EuclideanDomain> CoherentFunctor<D> {
    /// `f` was checked for well-definedness when it was built.
    pub fn new(f: Morphism<D>) -> CoherentFunctor<D> {
        CoherentFunctor { f }
    }

    pub fn presenting(&self) -> &Morphism<D> {
        &self.f
    }
}

/// `H_i(P• ⊗ −)` for a complex `P2 -> P1 -> P0`.
#[derive(Clone, Debug)]
pub struct ComplexFunctor<D: EuclideanDomain> {
    d2: Morphism<D>,
    d1: Morphism<D>,
    index: usize,
}

impl<D: EuclideanDomain> ComplexFunctor<D> {
    pub fn new(d2: Morphism<D>, d1: Morphism<D>, index: usize) -> Result<ComplexFunctor<D>> {
        if index > 2 {
            return Err(Error::Invalid(format!("homology index {index} outside 0..=2")));
        }
        if !d2.target().is_same_presentation(d1.source()) {
            return Err(Error::Shape("complex maps are not composable".into()));
        }
        if !d1.compose(&d2)?.is_zero() {
            return Err(Error::Invalid("complex composite is not zero".into()));
        }
        Ok(ComplexFunctor { d2, d1, index })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    fn term(&self) -> &FpModule<D> {
        match self.index {
            0 => self.d1.target(),
            1 => self.d1.source(),
            _ => self.d2.source(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum FunctorSpec<D: EuclideanDomain> {
    Identity,
    HomFrom(FpModule<D>),
    Tor1(FpModule<D>),
    Ext1(FpModule<D>),
    Coherent(CoherentFunctor<D>),
    Gamma(Ideal<D::Elem>),
    ModGamma(Ideal<D::Elem>),
    Tau(CmcSet<D::Elem>),
    ModTau(CmcSet<D::Elem>),
    Complex(ComplexFunctor<D>),
    MiddleFinite(MiddleFiniteComplex<D>),
    Oscillating(OscillatingFunctor<D>),
}

impl<D: EuclideanDomain> FunctorSpec<D> {
    pub fn kind(&self) -> &'static str {
        match self {
            FunctorSpec::Identity => "identity",
            FunctorSpec::HomFrom(_) => "hom_from",
            FunctorSpec::Tor1(_) => "tor1",
            FunctorSpec::Ext1(_) => "ext1",
            FunctorSpec::Coherent(_) => "coherent",
            FunctorSpec::Gamma(_) => "gamma",
            FunctorSpec::ModGamma(_) => "mod_gamma",
            FunctorSpec::Tau(_) => "tau",
            FunctorSpec::ModTau(_) => "mod_tau",
            FunctorSpec::Complex(_) => "complex",
            FunctorSpec::MiddleFinite(_) => "middle_finite",
            FunctorSpec::Oscillating(_) => "oscillating",
        }
    }
}

/// `Tor_i(M, −)` or `Ext^i(M, −)` in a form that can be evaluated.
#[derive(Clone, Debug)]
pub enum Resolved<D: EuclideanDomain> {
    Coherent(CoherentFunctor<D>),
    Complex(ComplexFunctor<D>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorExt {
    Tor,
    Ext,
}

/// Read `Tor_i(M, −)` / `Ext^i(M, −)` off the presentation
/// `0 -> R^m -> R^k -> M -> 0`.
pub fn tor_ext_as_coherent<D: EuclideanDomain>(m: &FpModule<D>, which: TorExt, i: u32) -> Result<Resolved<D>> {
    if i > 1 {
        return Err(Error::Invalid(format!("index {i} exceeds the projective dimension bound 1")));
    }
    let d = m.domain();
    let rel = matnf::nonzero_columns(d, m.relations());
    let p1 = FpModule::free(d, rel.cols());
    let p0 = FpModule::free(d, m.ambient_rank());
    let d1 = Morphism::new(&p1, &p0, rel)?;
    match which {
        TorExt::Tor => {
            let p2 = FpModule::zero(d);
            let d2 = Morphism::zero(&p2, &p1);
            Ok(Resolved::Complex(ComplexFunctor::new(d2, d1, i as usize)?))
        }
        TorExt::Ext if i == 0 => Ok(Resolved::Coherent(CoherentFunctor::new(Morphism::zero(m, &FpModule::zero(d))))),
        TorExt::Ext => Ok(Resolved::Coherent(CoherentFunctor::new(d1))),
    }
}

/// A functor value presented inside a carrier module.
#[derive(Clone, Debug)]
struct Value<D: EuclideanDomain> {
    carrier: FpModule<D>,
    num: DMat<D>,
    den: DMat<D>,
    module: FpModule<D>,
}

impl<D: EuclideanDomain> Value<D> {
    fn new(carrier: FpModule<D>, num: DMat<D>, den: DMat<D>) -> Result<Value<D>> {
        let module = carrier.subquotient_on(&num, &den)?;
        Ok(Value { carrier, num, den, module })
    }

    fn whole(carrier: FpModule<D>) -> Result<Value<D>> {
        let d = carrier.domain().clone();
        let k = carrier.ambient_rank();
        Value::new(carrier, matnf::identity(&d, k), matnf::zeros(&d, k, 0))
    }
}

/// The map `src -> dst` induced by the carrier matrix `amb`.
fn induced<D: EuclideanDomain>(src: &Value<D>, dst: &Value<D>, amb: &DMat<D>) -> Result<Morphism<D>> {
    let d = src.carrier.domain();
    let big = dst.num.hcat(&dst.den).hcat(dst.carrier.relations());
    let solver = LinearSolver::new(d, &big);
    let images = matnf::mul(d, amb, &src.num);
    let mut cols = Vec::with_capacity(images.cols());
    for c in images.columns() {
        let y = solver.solve(&c).ok_or_else(|| Error::IllDefined("induced map leaves the target value".into()))?;
        cols.push(y[..dst.num.cols()].to_vec());
    }
    Morphism::new(&src.module, &dst.module, matnf::Mat::from_columns(dst.num.cols(), &cols))
}

fn coherent_value<D: EuclideanDomain>(f: &Morphism<D>, n: &FpModule<D>) -> Result<Value<D>> {
    let (_, to, map) = hom_induced(f, n)?;
    let carrier = to.module().clone();
    let k = carrier.ambient_rank();
    Value::new(carrier, matnf::identity(n.domain(), k), map.matrix().clone())
}

fn complex_value<D: EuclideanDomain>(c: &ComplexFunctor<D>, n: &FpModule<D>) -> Result<Value<D>> {
    let d = n.domain();
    let id = Morphism::identity(n);
    let carrier = c.term().tensor(n)?;
    let k = carrier.ambient_rank();
    let num = match c.index {
        0 => matnf::identity(d, k),
        1 => c.d1.tensor(&id)?.kernel_generators(),
        _ => c.d2.tensor(&id)?.kernel_generators(),
    };
    let den = match c.index {
        0 => c.d1.tensor(&id)?.matrix().clone(),
        1 => c.d2.tensor(&id)?.matrix().clone(),
        _ => matnf::zeros(d, k, 0),
    };
    Value::new(carrier, num, den)
}

fn value<D: EuclideanDomain>(spec: &FunctorSpec<D>, n: &FpModule<D>) -> Result<Value<D>> {
    let d = n.domain();
    let none = || matnf::zeros(d, n.ambient_rank(), 0);
    match spec {
        FunctorSpec::Identity => Value::whole(n.clone()),
        FunctorSpec::HomFrom(m) => {
            ensure_same(m.domain(), d)?;
            let h = hom(m, n)?;
            Value::whole(h.module().clone())
        }
        FunctorSpec::Tor1(m) => match tor_ext_as_coherent(m, TorExt::Tor, 1)? {
            Resolved::Complex(c) => complex_value(&c, n),
            Resolved::Coherent(c) => coherent_value(&c.f, n),
        },
        FunctorSpec::Ext1(m) => match tor_ext_as_coherent(m, TorExt::Ext, 1)? {
            Resolved::Coherent(c) => coherent_value(&c.f, n),
            Resolved::Complex(c) => complex_value(&c, n),
        },
        FunctorSpec::Coherent(c) => coherent_value(&c.f, n),
        FunctorSpec::Gamma(i) => Value::new(n.clone(), n.gamma_generators(i.generator()), none()),
        FunctorSpec::ModGamma(i) => Value::new(n.clone(), n.generators(), n.gamma_generators(i.generator())),
        FunctorSpec::Tau(s) => Value::new(n.clone(), invariants::tau(s, n)?.generators, none()),
        FunctorSpec::ModTau(s) => Value::new(n.clone(), n.generators(), invariants::tau(s, n)?.generators),
        FunctorSpec::Complex(c) => complex_value(c, n),
        FunctorSpec::MiddleFinite(s) => s.value_parts(n).and_then(|(c, num, den)| Value::new(c, num, den)),
        FunctorSpec::Oscillating(_) => unreachable!("oscillating values are not subquotients"),
    }
}

fn ambient_map<D: EuclideanDomain>(spec: &FunctorSpec<D>, g: &Morphism<D>) -> Result<DMat<D>> {
    let d = g.source().domain();
    let tensor_side = |p: &FpModule<D>| matnf::kron(d, &matnf::identity(d, p.ambient_rank()), g.matrix());
    match spec {
        FunctorSpec::Identity
        | FunctorSpec::Gamma(_)
        | FunctorSpec::ModGamma(_)
        | FunctorSpec::Tau(_)
        | FunctorSpec::ModTau(_) => Ok(g.matrix().clone()),
        FunctorSpec::HomFrom(m) => Ok(hom_postcompose(m, g)?.2.matrix().clone()),
        FunctorSpec::Coherent(c) => Ok(hom_postcompose(c.f.source(), g)?.2.matrix().clone()),
        FunctorSpec::Ext1(m) => match tor_ext_as_coherent(m, TorExt::Ext, 1)? {
            Resolved::Coherent(c) => Ok(hom_postcompose(c.f.source(), g)?.2.matrix().clone()),
            Resolved::Complex(c) => Ok(tensor_side(c.term())),
        },
        FunctorSpec::Tor1(m) => match tor_ext_as_coherent(m, TorExt::Tor, 1)? {
            Resolved::Complex(c) => Ok(tensor_side(c.term())),
            Resolved::Coherent(c) => Ok(hom_postcompose(c.f.source(), g)?.2.matrix().clone()),
        },
        FunctorSpec::Complex(c) => Ok(tensor_side(c.term())),
        FunctorSpec::MiddleFinite(s) => Ok(tensor_side(s.middle())),
        FunctorSpec::Oscillating(_) => unreachable!("oscillating maps are handled blockwise"),
    }
}

/// `F(N)`.
pub fn eval<D: EuclideanDomain>(spec: &FunctorSpec<D>, n: &FpModule<D>) -> Result<FpModule<D>> {
    match spec {
        FunctorSpec::Oscillating(f) => {
            ensure_same(f.domain(), n.domain())?;
            let sk = skeletonize(n)?;
            Ok(osc_eval_obj(f, &sk.object))
        }
        _ => Ok(value(spec, n)?.module),
    }
}

/// `F(g)`, between `eval(F, source)` and `eval(F, target)`.
pub fn eval_mor<D: EuclideanDomain>(spec: &FunctorSpec<D>, g: &Morphism<D>) -> Result<Morphism<D>> {
    match spec {
        FunctorSpec::Oscillating(f) => oscillating::eval_normalized(f, g),
        _ => {
            let src = value(spec, g.source())?;
            let dst = value(spec, g.target())?;
            induced(&src, &dst, &ambient_map(spec, g)?)
        }
    }
}

/// Whether `ann(N) ⊆ ann(F(N))`.
pub fn ann_is_monotone<D: EuclideanDomain>(n: &FpModule<D>, fnv: &FpModule<D>) -> bool {
    let d = n.domain();
    d.divides(invariants::ann(fnv).generator(), invariants::ann(n).generator())
}
