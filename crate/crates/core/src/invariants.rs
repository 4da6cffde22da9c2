//! Associated primes, annihilators, depth, `Γ_I`, `τ_S` and the common
//! multiplicatively closed set predicates.
//!
//! Over a principal ideal domain all of these are read off the
//! invariant-factor decomposition.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::euclid::EuclideanDomain;
use crate::fpmod::{FpModule, Ideal, Morphism};
use crate::matnf;

/// A prime ideal: `(0)` or `(p)` with `p` a canonical prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeIdeal<E> {
    Zero,
    Prime(E),
}

impl<E> PrimeIdeal<E> {
    /// `V(I)` membership: `P ⊇ I`.
    pub fn contains_ideal<D: EuclideanDomain<Elem = E>>(&self, d: &D, ideal: &Ideal<E>) -> bool
    where
        E: Clone,
    {
        match self {
            PrimeIdeal::Zero => d.is_zero(ideal.generator()),
            PrimeIdeal::Prime(p) => d.divides(p, ideal.generator()),
        }
    }

    pub fn contains<D: EuclideanDomain<Elem = E>>(&self, d: &D, x: &E) -> bool {
        match self {
            PrimeIdeal::Zero => d.is_zero(x),
            PrimeIdeal::Prime(p) => d.divides(p, x),
        }
    }

    pub fn render<D: EuclideanDomain<Elem = E>>(&self, d: &D) -> String {
        match self {
            PrimeIdeal::Zero => "(0)".to_string(),
            PrimeIdeal::Prime(p) => format!("({})", d.format_elem(p)),
        }
    }
}

/// A finite set of primes in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssSet<E: Ord>(pub BTreeSet<PrimeIdeal<E>>);

impl<E: Ord + Clone> AssSet<E> {
    pub fn empty() -> Self {
        AssSet(BTreeSet::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PrimeIdeal<E>> {
        self.0.iter()
    }

    pub fn contains(&self, p: &PrimeIdeal<E>) -> bool {
        self.0.contains(p)
    }

    pub fn filter(&self, keep: impl Fn(&PrimeIdeal<E>) -> bool) -> Self {
        AssSet(self.0.iter().filter(|p| keep(p)).cloned().collect())
    }

    pub fn render<D: EuclideanDomain<Elem = E>>(&self, d: &D) -> Vec<String> {
        self.0.iter().map(|p| p.render(d)).collect()
    }
}

impl<E: Ord> FromIterator<PrimeIdeal<E>> for AssSet<E> {
    fn from_iter<T: IntoIterator<Item = PrimeIdeal<E>>>(iter: T) -> Self {
        AssSet(iter.into_iter().collect())
    }
}

/// Depth over a domain of dimension at most one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DepthValue {
    Zero,
    One,
    Infinite,
}

impl fmt::Display for DepthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthValue::Zero => write!(f, "0"),
            DepthValue::One => write!(f, "1"),
            DepthValue::Infinite => write!(f, "inf"),
        }
    }
}

pub fn ass<D: EuclideanDomain>(m: &FpModule<D>) -> AssSet<D::Elem> {
    let d = m.domain();
    let mut out = BTreeSet::new();
    if m.free_rank() > 0 {
        out.insert(PrimeIdeal::Zero);
    }
    for f in m.factors() {
        for pe in d.factor_nonzero(f) {
            out.insert(PrimeIdeal::Prime(pe.elem));
        }
    }
    AssSet(out)
}

pub fn ann<D: EuclideanDomain>(m: &FpModule<D>) -> Ideal<D::Elem> {
    let d = m.domain();
    if m.free_rank() > 0 {
        Ideal::new(d, &d.zero())
    } else {
        Ideal::new(d, m.factors().last().unwrap_or(&d.one()))
    }
}

/// Whether `JM = M`.
pub fn ideal_absorbs<D: EuclideanDomain>(j: &Ideal<D::Elem>, m: &FpModule<D>) -> bool {
    let d = m.domain();
    let g = j.generator();
    if d.is_unit(g) || m.is_zero() {
        return true;
    }
    if m.free_rank() > 0 {
        return false;
    }
    m.factors().iter().all(|f| d.is_unit(&d.gcd(f, g)))
}

/// `dep_J(M)`, with the convention that it is infinite when `JM = M`.
pub fn depth<D: EuclideanDomain>(j: &Ideal<D::Elem>, m: &FpModule<D>) -> DepthValue {
    if ideal_absorbs(j, m) {
        return DepthValue::Infinite;
    }
    let d = m.domain();
    if ass(m).iter().any(|p| p.contains(d, j.generator())) {
        DepthValue::Zero
    } else {
        DepthValue::One
    }
}

/// A torsion-style submodule with its inclusion and the quotient.
#[derive(Clone, Debug)]
pub struct SubmoduleSplit<D: EuclideanDomain> {
    pub sub: FpModule<D>,
    pub inclusion: Morphism<D>,
    pub quotient: FpModule<D>,
    /// Generators of the submodule in the ambient coordinates of `M`.
    pub generators: matnf::DMat<D>,
}

fn split_by<D: EuclideanDomain>(m: &FpModule<D>, gens: matnf::DMat<D>) -> SubmoduleSplit<D> {
    let d = m.domain();
    let sub = m.subquotient_on(&gens, &matnf::zeros(d, m.ambient_rank(), 0)).expect("generators live in the ambient");
    let inclusion = Morphism::new(&sub, m, gens.clone()).expect("inclusion is well defined");
    let quotient = m.quotient_by(&gens).expect("generators live in the ambient");
    SubmoduleSplit { sub, inclusion, quotient, generators: gens }
}

/// `Γ_I(M)`, the elements killed by some power of `I`.
pub fn gamma<D: EuclideanDomain>(ideal: &Ideal<D::Elem>, m: &FpModule<D>) -> SubmoduleSplit<D> {
    split_by(m, m.gamma_generators(ideal.generator()))
}

/// Exponent sets `F ∪ {a + b·k : k >= 0}` of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExponentSet {
    pub listed: BTreeSet<u32>,
    /// `(start, step)` with `step >= 1`.
    pub progressions: Vec<(u32, u32)>,
}

impl ExponentSet {
    pub fn finite(items: impl IntoIterator<Item = u32>) -> Self {
        ExponentSet { listed: items.into_iter().collect(), progressions: Vec::new() }
    }

    pub fn progression(start: u32, step: u32) -> Self {
        ExponentSet { listed: BTreeSet::new(), progressions: vec![(start, step.max(1))] }
    }

    pub fn even() -> Self {
        Self::progression(2, 2)
    }

    pub fn odd() -> Self {
        Self::progression(1, 2)
    }

    pub fn union(mut self, other: ExponentSet) -> Self {
        self.listed.extend(other.listed);
        self.progressions.extend(other.progressions);
        self
    }

    pub fn contains(&self, e: u32) -> bool {
        self.listed.contains(&e) || self.progressions.iter().any(|&(a, b)| e >= a && (e - a) % b.max(1) == 0)
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.listed.is_empty() && self.progressions.is_empty()
    }

    pub fn max(&self) -> Option<u32> {
        if self.is_finite() {
            self.listed.iter().next_back().copied()
        } else {
            None
        }
    }

    /// Past this point membership depends only on the residue mod `period`.
    fn threshold(&self) -> u32 {
        let a = self.listed.iter().next_back().copied().unwrap_or(0);
        let b = self.progressions.iter().map(|p| p.0).max().unwrap_or(0);
        a.max(b) + 1
    }

    fn period(&self) -> u32 {
        self.progressions.iter().fold(1u32, |acc, &(_, step)| lcm_u32(acc, step.max(1)))
    }

    /// Whether `e + f ∈ E` for all `e, f ∈ E`.
    ///
    /// Every tail residue class of `E` has a representative below
    /// `threshold + period`, and the sum of such representatives already lies
    /// in the periodic tail, so checking those pairs decides the question.
    pub fn is_additively_closed(&self) -> bool {
        let bound = self.threshold() + self.period();
        let small: Vec<u32> = (0..bound).filter(|&e| self.contains(e)).collect();
        small.iter().all(|&e| small.iter().all(|&f| self.contains(e + f)))
    }

    /// Members up to and including `limit`.
    pub fn members_up_to(&self, limit: u32) -> Vec<u32> {
        (0..=limit).filter(|&e| self.contains(e)).collect()
    }
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// A subset `S` of the domain used for `τ_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmcSet<E> {
    /// An explicit finite list.
    Finite(Vec<E>),
    /// The multiplicative closure of finitely many generators (contains 1).
    Closure(Vec<E>),
    /// `{ base^e : e ∈ exponents }`.
    Powers { base: E, exponents: ExponentSet },
}

/// Whether `S` is common multiplicatively closed: every pair `r, s` has some
/// element of `S` inside `Rr ∩ Rs = (lcm(r, s))`.
pub fn is_cmc<D: EuclideanDomain>(d: &D, s: &CmcSet<D::Elem>) -> bool {
    match s {
        CmcSet::Finite(items) => {
            !items.is_empty()
                && items.iter().all(|r| {
                    items.iter().all(|t| {
                        let l = d.lcm(r, t);
                        items.iter().any(|x| d.divides(&l, x))
                    })
                })
        }
        CmcSet::Closure(_) => true,
        // powers of one element are totally ordered by divisibility
        CmcSet::Powers { exponents, .. } => !exponents.is_empty(),
    }
}

/// Some element of `S` divisible by every element of `S`.
pub fn cogenerator<D: EuclideanDomain>(d: &D, s: &CmcSet<D::Elem>) -> Option<D::Elem> {
    match s {
        CmcSet::Finite(items) => items.iter().find(|x| items.iter().all(|r| d.divides(r, x))).cloned(),
        CmcSet::Closure(gens) => {
            // 1 is in the closure; nothing else is divisible by all powers of a
            // non-unit unless that non-unit generator is zero
            if gens.iter().any(|g| d.is_zero(g)) {
                Some(d.zero())
            } else if gens.iter().all(|g| d.is_unit(g)) {
                Some(d.one())
            } else {
                None
            }
        }
        CmcSet::Powers { base, exponents } => {
            if d.is_unit(base) {
                exponents.listed.iter().next().or(exponents.progressions.first().map(|p| &p.0)).map(|&e| d.pow(base, e))
            } else if d.is_zero(base) {
                exponents
                    .contains(0)
                    .then(|| d.one())
                    .filter(|_| exponents.listed.len() == 1 && exponents.is_finite())
                    .or_else(|| (!exponents.is_empty()).then(|| d.zero()))
            } else {
                exponents.max().map(|e| d.pow(base, e))
            }
        }
    }
}

pub fn is_coprincipal<D: EuclideanDomain>(d: &D, s: &CmcSet<D::Elem>) -> bool {
    cogenerator(d, s).is_some()
}

/// Whether `S` is closed under multiplication.
pub fn is_multiplicatively_closed<D: EuclideanDomain>(d: &D, s: &CmcSet<D::Elem>) -> bool {
    match s {
        CmcSet::Finite(items) => items.iter().all(|r| {
            items.iter().all(|t| {
                let p = d.mul(r, t);
                items.iter().any(|x| *x == p)
            })
        }),
        CmcSet::Closure(_) => true,
        CmcSet::Powers { base, exponents } => {
            if d.is_unit(base) || d.is_zero(base) {
                // collapse to a finite set of values
                let vals: Vec<D::Elem> = exponents
                    .members_up_to(exponents.threshold() + 2 * exponents.period())
                    .into_iter()
                    .map(|e| d.pow(base, e))
                    .collect();
                is_multiplicatively_closed(d, &CmcSet::Finite(vals))
            } else {
                exponents.is_additively_closed()
            }
        }
    }
}

/// `τ_S(M) = { m : rm = 0 for some r ∈ S }`.
pub fn tau<D: EuclideanDomain>(s: &CmcSet<D::Elem>, m: &FpModule<D>) -> Result<SubmoduleSplit<D>> {
    let d = m.domain();
    if !is_cmc(d, s) {
        return Err(Error::NotCmc);
    }
    let gens = match s {
        CmcSet::Finite(_) => {
            let c = cogenerator(d, s).expect("finite cmc sets are coprincipal");
            m.colon_generators(&c)
        }
        CmcSet::Closure(g) => {
            let prod = g.iter().fold(d.one(), |acc, x| d.mul(&acc, x));
            m.gamma_generators(&prod)
        }
        CmcSet::Powers { base, exponents } => match cogenerator(d, s) {
            Some(c) => m.colon_generators(&c),
            None => {
                if exponents.contains(0) || !d.is_zero(base) {
                    m.gamma_generators(base)
                } else {
                    m.colon_generators(&d.zero())
                }
            }
        },
    };
    Ok(split_by(m, gens))
}
