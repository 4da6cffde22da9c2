use crate::error::{Error, Result};
use crate::euclid::{ensure_same, EuclideanDomain};
use crate::fpmod::{loc_tensor, FpModule, LocModule, Morphism};
use crate::matnf::{self, DMat};

/// One summand of an end of a middle-finite complex.
#[derive(Clone, Debug)]
pub enum EndPart<D: EuclideanDomain> {
    Finite(FpModule<D>),
    Local(LocModule<D>),
}

impl<D: EuclideanDomain> EndPart<D> {
    fn base(&self) -> &FpModule<D> {
        match self {
            EndPart::Finite(m) => m,
            EndPart::Local(l) => l.base(),
        }
    }

    /// A finitely presented stand-in used only to check maps: a localized
    /// part is replaced by its base modulo the `x`-primary torsion.
    fn shadow(&self) -> FpModule<D> {
        match self {
            EndPart::Finite(m) => m.clone(),
            EndPart::Local(l) => {
                let b = l.base();
                b.quotient_by(&b.gamma_generators(l.inverted())).expect("shapes agree")
            }
        }
    }

    fn tensor(&self, n: &FpModule<D>) -> Result<FpModule<D>> {
        match self {
            EndPart::Finite(m) => m.tensor(n),
            EndPart::Local(l) => loc_tensor(l, n),
        }
    }
}

/// `A -> B -> C` with `B` finitely presented and ends built from finitely
/// presented and localized parts. Maps are given on base generators.
#[derive(Clone, Debug)]
pub struct MiddleFiniteComplex<D: EuclideanDomain> {
    domain: D,
    a: Vec<EndPart<D>>,
    b: FpModule<D>,
    c: Vec<EndPart<D>>,
    da: DMat<D>,
    db: DMat<D>,
}

fn direct_sum<D: EuclideanDomain>(d: &D, parts: impl IntoIterator<Item = FpModule<D>>) -> Result<FpModule<D>> {
    parts.into_iter().try_fold(FpModule::zero(d), |acc, m| acc.direct_sum(&m))
}

impl<D: EuclideanDomain> MiddleFiniteComplex<D> {
    pub fn new(
        a: Vec<EndPart<D>>,
        b: FpModule<D>,
        c: Vec<EndPart<D>>,
        da: DMat<D>,
        db: DMat<D>,
    ) -> Result<MiddleFiniteComplex<D>> {
        let d = b.domain().clone();
        for p in a.iter().chain(&c) {
            ensure_same(&d, p.base().domain())?;
        }
        let a_shadow = direct_sum(&d, a.iter().map(|p| p.base().clone()))?;
        let c_shadow = direct_sum(&d, c.iter().map(EndPart::shadow))?;
        let fa = Morphism::new(&a_shadow, &b, da.clone())
            .map_err(|e| Error::IllDefined(format!("first map of the complex: {e}")))?;
        let fb = Morphism::new(&b, &c_shadow, db.clone())
            .map_err(|e| Error::IllDefined(format!("second map of the complex: {e}")))?;
        if !fb.compose(&fa)?.is_zero() {
            return Err(Error::Invalid("complex composite is not zero".into()));
        }
        Ok(MiddleFiniteComplex { domain: d, a, b, c, da, db })
    }

    /// `0 -> R -> R[1/g]`, whose homology functor is `Γ_(g)`.
    pub fn local_cohomology(d: &D, g: &D::Elem) -> Result<MiddleFiniteComplex<D>> {
        let r = FpModule::free(d, 1);
        let loc = LocModule::new(r.clone(), g.clone())?;
        MiddleFiniteComplex::new(Vec::new(), r, vec![EndPart::Local(loc)], matnf::zeros(d, 1, 0), matnf::identity(d, 1))
    }

    pub fn middle(&self) -> &FpModule<D> {
        &self.b
    }

    pub fn has_local_parts(&self) -> bool {
        self.a.iter().chain(&self.c).any(|p| matches!(p, EndPart::Local(_)))
    }

    /// Carrier `B ⊗ N`, kernel generators of `∂_B ⊗ N`, image of `∂_A ⊗ N`.
    ///
    /// A localized end tensored with torsion `N` is generated by its base
    /// generators, so denominators never enter the kernel or the image.
    pub(super) fn value_parts(&self, n: &FpModule<D>) -> Result<(FpModule<D>, DMat<D>, DMat<D>)> {
        let d = &self.domain;
        ensure_same(d, n.domain())?;
        if self.has_local_parts() && !n.is_torsion() {
            return Err(Error::Domain("middle-finite complex with localized ends needs a torsion module".into()));
        }
        let id_n = matnf::identity(d, n.ambient_rank());
        let carrier = self.b.tensor(n)?;
        let c_n = direct_sum(d, self.c.iter().map(|p| p.tensor(n)).collect::<Result<Vec<_>>>()?)?;
        let out = Morphism::new(&carrier, &c_n, matnf::kron(d, &self.db, &id_n))?;
        let num = out.kernel_generators();
        let den = matnf::kron(d, &self.da, &id_n);
        Ok((carrier, num, den))
    }
}

/// `H(σ ⊗ N)` at the middle.
pub fn middle_finite_eval<D: EuclideanDomain>(s: &MiddleFiniteComplex<D>, n: &FpModule<D>) -> Result<FpModule<D>> {
    let (carrier, num, den) = s.value_parts(n)?;
    carrier.subquotient_on(&num, &den)
}
