use super::FpModule;
use crate::error::{Error, Result};
use crate::euclid::EuclideanDomain;

/// The localization `base[1/x]` of a finitely presented module.
///
/// Only its tensor products with torsion modules are ever materialized;
/// those are finitely presented again.
#[derive(Clone, Debug)]
pub struct LocModule<D: EuclideanDomain> {
    base: FpModule<D>,
    inverted: D::Elem,
}

impl<D: EuclideanDomain> LocModule<D> {
    pub fn new(base: FpModule<D>, inverted: D::Elem) -> Result<LocModule<D>> {
        if base.domain().is_zero(&inverted) {
            return Err(Error::ZeroInput("localization at zero"));
        }
        Ok(LocModule { base, inverted })
    }

    pub fn base(&self) -> &FpModule<D> {
        &self.base
    }

    pub fn inverted(&self) -> &D::Elem {
        &self.inverted
    }
}

/// `base[1/x] ⊗ N` for torsion `N`, presented as a quotient of `base ⊗ N`.
///
/// Inverting `x` kills exactly the `x`-primary part, so the result is
/// `(base ⊗ N) / Γ_(x)(base ⊗ N)` on the generators of `base ⊗ N`.
pub fn loc_tensor<D: EuclideanDomain>(lx: &LocModule<D>, n: &FpModule<D>) -> Result<FpModule<D>> {
    if !n.is_torsion() {
        return Err(Error::Domain("localized tensor needs a torsion module".into()));
    }
    let t = lx.base.tensor(n)?;
    let killed = t.gamma_generators(&lx.inverted);
    t.quotient_by(&killed)
}
