use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::euclid::{ensure_same, gcd_ext, EuclideanDomain};
use crate::fpmod::{FpModule, Morphism};
use crate::invariants::ExponentSet;
use crate::matnf::{self, DMat, Mat};

/// `F(R/P^e) = R/P` if `e ∈ S_P`, and `0` otherwise.
#[derive(Clone, Debug)]
pub struct OscillatingFunctor<D: EuclideanDomain> {
    domain: D,
    sets: BTreeMap<D::Elem, ExponentSet>,
}

fn is_canonical_prime<D: EuclideanDomain>(d: &D, p: &D::Elem) -> bool {
    if d.is_zero(p) || !d.is_canonical(p) {
        return false;
    }
    let f = d.factor_nonzero(p);
    f.len() == 1 && f[0].multiplicity == 1 && f[0].elem == *p
}

impl<D: EuclideanDomain> OscillatingFunctor<D> {
    pub fn new(d: &D, sets: impl IntoIterator<Item = (D::Elem, ExponentSet)>) -> Result<OscillatingFunctor<D>> {
        let mut out = BTreeMap::new();
        for (p, s) in sets {
            if !is_canonical_prime(d, &p) {
                return Err(Error::Invalid(format!("{} is not a canonical prime", d.format_elem(&p))));
            }
            if s.listed.contains(&0) {
                return Err(Error::Invalid("exponent sets hold positive integers".into()));
            }
            out.insert(p, s);
        }
        Ok(OscillatingFunctor { domain: d.clone(), sets: out })
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn set_for(&self, p: &D::Elem) -> Option<&ExponentSet> {
        self.sets.get(p)
    }

    fn keeps(&self, p: &D::Elem, e: u32) -> bool {
        e >= 1 && self.sets.get(p).is_some_and(|s| s.contains(e))
    }
}

/// `⊕ R/p_i^{e_i}` with primes non-decreasing and, for equal primes,
/// exponents non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonObject<E> {
    parts: Vec<(E, u32)>,
}

impl<E: Clone + Ord> SkeletonObject<E> {
    pub fn new<D: EuclideanDomain<Elem = E>>(d: &D, parts: Vec<(E, u32)>) -> Result<SkeletonObject<E>> {
        for (p, e) in &parts {
            if *e == 0 || !is_canonical_prime(d, p) {
                return Err(Error::NotSkeleton(format!("summand ({})^{e} is not a prime power", d.format_elem(p))));
            }
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotSkeleton("summands are not in canonical order".into()));
        }
        Ok(SkeletonObject { parts })
    }

    pub fn parts(&self) -> &[(E, u32)] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn module<D: EuclideanDomain<Elem = E>>(&self, d: &D) -> FpModule<D> {
        let orders: Vec<E> = self.parts.iter().map(|(p, e)| d.pow(p, *e)).collect();
        let k = orders.len();
        FpModule::new(d, k, matnf::diagonal(d, k, k, &orders)).expect("diagonal presentation")
    }
}

/// A torsion module rewritten over its skeleton object.
#[derive(Clone, Debug)]
pub struct Skeleton<D: EuclideanDomain> {
    pub object: SkeletonObject<D::Elem>,
    /// Ambient coordinates to skeleton coordinates.
    pub to_skel: DMat<D>,
    /// Skeleton generators in ambient coordinates.
    pub from_skel: DMat<D>,
}

/// Split each invariant factor into prime powers and sort the summands.
pub fn skeletonize<D: EuclideanDomain>(n: &FpModule<D>) -> Result<Skeleton<D>> {
    if !n.is_torsion() {
        return Err(Error::Domain("oscillating functor is defined on torsion modules".into()));
    }
    let d = n.domain();
    let k = n.ambient_rank();
    let coords: Vec<Vec<D::Elem>> = (0..k)
        .map(|j| {
            let mut e = vec![d.zero(); k];
            e[j] = d.one();
            n.coords(&e)
        })
        .collect();
    let gens = n.canonical_generators();
    let mut parts = Vec::new();
    for (i, f) in n.factors().iter().enumerate() {
        for pe in d.factor_nonzero(f) {
            let q = d.pow(&pe.elem, pe.multiplicity);
            let cof = d.exact_div(f, &q).expect("prime power divides its factor");
            // cof is invertible mod q
            let (_, w, _) = gcd_ext(d, &cof, &q);
            let row: Vec<D::Elem> = coords.iter().map(|c| d.rem(&d.mul(&w, &c[i]), &q)).collect();
            let col: Vec<D::Elem> = gens.column(i).iter().map(|x| d.mul(&cof, x)).collect();
            parts.push(((pe.elem, pe.multiplicity), row, col));
        }
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let rows: Vec<D::Elem> = parts.iter().flat_map(|p| p.1.clone()).collect();
    let to_skel = Mat::from_rows(parts.len(), k, rows)?;
    let from_skel = Mat::from_columns(k, &parts.iter().map(|p| p.2.clone()).collect::<Vec<_>>());
    let object = SkeletonObject { parts: parts.into_iter().map(|p| p.0).collect() };
    Ok(Skeleton { object, to_skel, from_skel })
}

fn kept<D: EuclideanDomain>(f: &OscillatingFunctor<D>, obj: &SkeletonObject<D::Elem>) -> Vec<usize> {
    (0..obj.len()).filter(|&i| f.keeps(&obj.parts[i].0, obj.parts[i].1)).collect()
}

/// `F(obj)`: one copy of `R/P` per summand `R/P^e` with `e ∈ S_P`.
pub fn osc_eval_obj<D: EuclideanDomain>(f: &OscillatingFunctor<D>, obj: &SkeletonObject<D::Elem>) -> FpModule<D> {
    let d = &f.domain;
    let primes: Vec<D::Elem> = kept(f, obj).into_iter().map(|i| obj.parts[i].0.clone()).collect();
    let k = primes.len();
    FpModule::new(d, k, matnf::diagonal(d, k, k, &primes)).expect("diagonal presentation")
}

/// `F(g)` for `g` given by a matrix of multiplication maps between skeleton
/// summands. Diagonal blocks of equal prime and exponent are kept and
/// reduced mod the prime; everything else is dropped.
pub fn osc_eval_mor<D: EuclideanDomain>(
    f: &OscillatingFunctor<D>,
    src: &SkeletonObject<D::Elem>,
    dst: &SkeletonObject<D::Elem>,
    matrix: &DMat<D>,
) -> Result<Morphism<D>> {
    let d = &f.domain;
    if matrix.rows() != dst.len() || matrix.cols() != src.len() {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, skeleton objects need {}x{}",
            matrix.rows(),
            matrix.cols(),
            dst.len(),
            src.len()
        )));
    }
    for (a, (pa, ea)) in dst.parts.iter().enumerate() {
        let qa = d.pow(pa, *ea);
        for (b, (pb, eb)) in src.parts.iter().enumerate() {
            let qb = d.pow(pb, *eb);
            if !d.divides(&qa, &d.mul(matrix.get(a, b), &qb)) {
                return Err(Error::NotSkeleton(format!(
                    "entry ({a}, {b}) is not a map R/{} -> R/{}",
                    d.format_elem(&qb),
                    d.format_elem(&qa)
                )));
            }
        }
    }
    let rows = kept(f, dst);
    let cols = kept(f, src);
    let m = Mat::from_fn(rows.len(), cols.len(), |i, j| {
        let (pa, ea) = &dst.parts[rows[i]];
        let (pb, eb) = &src.parts[cols[j]];
        if pa == pb && ea == eb {
            d.rem(matrix.get(rows[i], cols[j]), pa)
        } else {
            d.zero()
        }
    });
    Morphism::new(&osc_eval_obj(f, src), &osc_eval_obj(f, dst), m)
}

/// `F(g)` for an arbitrary morphism of torsion modules, through skeletons.
pub(super) fn eval_normalized<D: EuclideanDomain>(f: &OscillatingFunctor<D>, g: &Morphism<D>) -> Result<Morphism<D>> {
    let d = &f.domain;
    ensure_same(d, g.source().domain())?;
    let s = skeletonize(g.source())?;
    let t = skeletonize(g.target())?;
    let mut m = matnf::mul(d, &t.to_skel, &matnf::mul(d, g.matrix(), &s.from_skel));
    for a in 0..m.rows() {
        let (p, e) = &t.object.parts[a];
        let q = d.pow(p, *e);
        for b in 0..m.cols() {
            let v = d.rem(m.get(a, b), &q);
            m.set(a, b, v);
        }
    }
    osc_eval_mor(f, &s.object, &t.object, &m)
}
