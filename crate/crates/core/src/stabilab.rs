//! Module families indexed by `n`, scans of `Ass` and depth along them, and
//! detection of eventual constancy.

use std::fmt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::EuclideanDomain;
use crate::fpmod::{FpModule, Ideal, Morphism};
use crate::functors::{ann_is_monotone, eval, FunctorSpec};
use crate::invariants::{ass, depth, AssSet, DepthValue};
use crate::matnf::{self, DMat};

/// Shift data `(L1, L2, c)`: the source of `H(n)` becomes
/// `(L1 + I^{n-c} L2) / I^n L'`.
#[derive(Clone, Debug)]
pub struct Shift<D: EuclideanDomain> {
    pub l1: DMat<D>,
    pub l2: DMat<D>,
    pub c: u32,
}

/// `L -> M -> N` with submodules `L', M', N'`; `H(n)` is the homology of
/// `L/I^n L' -> M/I^n M' -> N/I^n N'`.
#[derive(Clone, Debug)]
pub struct KwComplex<D: EuclideanDomain> {
    pub alpha: Morphism<D>,
    pub beta: Morphism<D>,
    pub lp: DMat<D>,
    pub mp: DMat<D>,
    pub np: DMat<D>,
    pub ideal: Ideal<D::Elem>,
    pub shift: Option<Shift<D>>,
}

#[derive(Clone, Debug)]
pub enum Family<D: EuclideanDomain> {
    /// `M / I^n M`.
    QuotientPowers {
        m: FpModule<D>,
        ideal: Ideal<D::Elem>,
    },
    /// `I^{n-1} M / I^n M`.
    Layers {
        m: FpModule<D>,
        ideal: Ideal<D::Elem>,
    },
    /// `I^n M / I^n M'`.
    GradedLayers {
        m: FpModule<D>,
        sub: DMat<D>,
        ideal: Ideal<D::Elem>,
    },
    /// `(U + I^n V) / I^n W` inside `T`.
    Subquotient {
        t: FpModule<D>,
        u: DMat<D>,
        v: DMat<D>,
        w: DMat<D>,
        ideal: Ideal<D::Elem>,
    },
    KwHomology(Box<KwComplex<D>>),
}

impl<D: EuclideanDomain> KwComplex<D> {
    pub fn new(
        alpha: Morphism<D>,
        beta: Morphism<D>,
        lp: DMat<D>,
        mp: DMat<D>,
        np: DMat<D>,
        ideal: Ideal<D::Elem>,
        shift: Option<Shift<D>>,
    ) -> Result<KwComplex<D>> {
        let (l, m, n) = (alpha.source(), alpha.target(), beta.target());
        if !m.is_same_presentation(beta.source()) {
            return Err(Error::Shape("complex maps are not composable".into()));
        }
        l.check_columns(&lp, "L'")?;
        m.check_columns(&mp, "M'")?;
        n.check_columns(&np, "N'")?;
        if !beta.compose(&alpha)?.is_zero() {
            return Err(Error::Invalid("complex composite is not zero".into()));
        }
        let d = l.domain();
        if !m.span_contains(&mp, &matnf::mul(d, alpha.matrix(), &lp)) {
            return Err(Error::NotContained("alpha(L') is not contained in M'".into()));
        }
        if !n.span_contains(&np, &matnf::mul(d, beta.matrix(), &mp)) {
            return Err(Error::NotContained("beta(M') is not contained in N'".into()));
        }
        if let Some(s) = &shift {
            l.check_columns(&s.l1, "L1")?;
            l.check_columns(&s.l2, "L2")?;
            let scaled = matnf::scale(d, &ideal.power(d, s.c), &lp);
            if !l.span_contains(&s.l2, &scaled) {
                return Err(Error::NotContained("I^c L' is not contained in L2".into()));
            }
        }
        Ok(KwComplex { alpha, beta, lp, mp, np, ideal, shift })
    }

    fn homology(&self, n: u32) -> Result<FpModule<D>> {
        let d = self.alpha.source().domain();
        let g = self.ideal.power(d, n);
        let quot = |m: &FpModule<D>, sub: &DMat<D>| m.quotient_by(&matnf::scale(d, &g, sub));
        let mn = quot(self.alpha.target(), &self.mp)?;
        let nn = quot(self.beta.target(), &self.np)?;
        let beta_n = Morphism::new(&mn, &nn, self.beta.matrix().clone())?;
        let source = match &self.shift {
            None => self.alpha.source().generators(),
            Some(s) => s.l1.hcat(&matnf::scale(d, &self.ideal.power(d, n - s.c), &s.l2)),
        };
        let den = matnf::mul(d, self.alpha.matrix(), &source);
        mn.subquotient_on(&beta_n.kernel_generators(), &den)
    }
}

impl<D: EuclideanDomain> Family<D> {
    pub fn kind(&self) -> &'static str {
        match self {
            Family::QuotientPowers { .. } => "quotient_powers",
            Family::Layers { .. } => "layers",
            Family::GradedLayers { .. } => "graded_layers",
            Family::Subquotient { .. } => "subquotient",
            Family::KwHomology(_) => "kw_homology",
        }
    }

    pub fn ideal(&self) -> &Ideal<D::Elem> {
        match self {
            Family::QuotientPowers { ideal, .. }
            | Family::Layers { ideal, .. }
            | Family::GradedLayers { ideal, .. }
            | Family::Subquotient { ideal, .. } => ideal,
            Family::KwHomology(k) => &k.ideal,
        }
    }

    /// Smallest index at which the family is defined.
    pub fn n_min(&self) -> u32 {
        match self {
            Family::Layers { .. } => 1,
            Family::KwHomology(k) => k.shift.as_ref().map_or(0, |s| s.c),
            _ => 0,
        }
    }

    /// Parameter checks that do not depend on `n`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::GradedLayers { m, sub, .. } => m.check_columns(sub, "M'"),
            Family::Subquotient { t, u, v, w, .. } => {
                t.check_columns(u, "U")?;
                t.check_columns(v, "V")?;
                t.check_columns(w, "W")?;
                if !t.span_contains(v, w) {
                    return Err(Error::NotContained("W is not contained in V".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, n: u32) -> Result<FpModule<D>> {
        if n < self.n_min() {
            return Err(Error::Invalid(format!("{} is defined from n = {}", self.kind(), self.n_min())));
        }
        match self {
            Family::QuotientPowers { m, ideal } => Ok(m.power_quotient(ideal, n)),
            Family::Layers { m, ideal } => m.power_layer(ideal, n),
            Family::GradedLayers { m, sub, ideal } => {
                let d = m.domain();
                m.subquotient(&matnf::zeros(d, m.ambient_rank(), 0), &m.generators(), sub, ideal, n)
            }
            Family::Subquotient { t, u, v, w, ideal } => t.subquotient(u, v, w, ideal, n),
            Family::KwHomology(k) => k.homology(n),
        }
    }

    /// The Artin–Rees instance attached to the family: a map `β` and
    /// generators of `N'` in its target.
    pub fn artin_rees_instance(&self) -> Result<(Morphism<D>, DMat<D>)> {
        let inclusion = |t: &FpModule<D>, sub: &DMat<D>| -> Result<Morphism<D>> {
            let d = t.domain();
            let s = t.subquotient_on(sub, &matnf::zeros(d, t.ambient_rank(), 0))?;
            Morphism::new(&s, t, sub.clone())
        };
        match self {
            Family::QuotientPowers { m, .. } | Family::Layers { m, .. } => Ok((Morphism::identity(m), m.generators())),
            Family::GradedLayers { m, sub, .. } => Ok((inclusion(m, sub)?, m.generators())),
            Family::Subquotient { t, u, v, .. } => Ok((inclusion(t, u)?, v.clone())),
            Family::KwHomology(k) => Ok((k.beta.clone(), k.np.clone())),
        }
    }
}

/// Least `d` with `β(M) ∩ I^n N' = I^{n-d} (β(M) ∩ I^d N')` for all
/// `n` in `[d, horizon]`.
pub fn artin_rees_probe<D: EuclideanDomain>(
    beta: &Morphism<D>,
    nprime: &DMat<D>,
    ideal: &Ideal<D::Elem>,
    horizon: u32,
) -> Result<Option<u32>> {
    let target = beta.target();
    target.check_columns(nprime, "N'")?;
    let d = target.domain();
    let g = ideal.generator();
    let image = beta.matrix();
    let mut meet = Vec::with_capacity(horizon as usize + 1);
    let mut scaled = nprime.clone();
    for _ in 0..=horizon {
        meet.push(target.intersect(image, &scaled));
        scaled = matnf::scale(d, g, &scaled);
    }
    let equal = |a: &DMat<D>, b: &DMat<D>| target.span_contains(a, b) && target.span_contains(b, a);
    'outer: for dd in 0..=horizon {
        let mut shifted = meet[dd as usize].clone();
        for n in dd..=horizon {
            if !equal(&meet[n as usize], &shifted) {
                continue 'outer;
            }
            shifted = matnf::scale(d, g, &shifted);
        }
        return Ok(Some(dd));
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Stable,
    NotStableWithinHorizon,
    OscillatingWithPeriod { period: u32 },
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Stable => write!(f, "stable"),
            Status::NotStableWithinHorizon => write!(f, "not-stable-within-horizon"),
            Status::OscillatingWithPeriod { period } => write!(f, "oscillating-with-period-{period}"),
        }
    }
}

/// Stable when the last `window` values agree; `n0` is where the constant
/// tail starts. Otherwise the least period `k >= 2` that holds over the last
/// `max(window, 2k)` values, if any.
pub fn detect<V: PartialEq>(values: &[V], start: u32, window: usize) -> (Status, Option<u32>) {
    let len = values.len();
    if window == 0 || len < window {
        return (Status::NotStableWithinHorizon, None);
    }
    let last = &values[len - 1];
    if values[len - window..].iter().all(|v| v == last) {
        let tail = values.iter().rev().take_while(|v| *v == last).count();
        return (Status::Stable, Some(start + (len - tail) as u32));
    }
    for k in 2..=len / 2 {
        let span = window.max(2 * k);
        if span > len {
            break;
        }
        if (len - span + k..len).all(|i| values[i] == values[i - k]) {
            return (Status::OscillatingWithPeriod { period: k as u32 }, None);
        }
    }
    (Status::NotStableWithinHorizon, None)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizationReport<V> {
    pub start: u32,
    pub horizon: u32,
    pub window: usize,
    pub values: Vec<V>,
    pub status: Status,
    pub n0: Option<u32>,
}

impl<V: PartialEq> StabilizationReport<V> {
    fn build(start: u32, horizon: u32, window: usize, values: Vec<V>) -> Self {
        let (status, n0) = detect(&values, start, window);
        StabilizationReport { start, horizon, window, values, status, n0 }
    }

    pub fn value_at(&self, n: u32) -> Option<&V> {
        n.checked_sub(self.start).and_then(|i| self.values.get(i as usize))
    }
}

/// One evaluated index of a scan.
#[derive(Clone, Debug)]
pub struct ScanRow<D: EuclideanDomain> {
    pub n: u32,
    pub value: FpModule<D>,
    pub ass: AssSet<D::Elem>,
    pub depth: Option<DepthValue>,
    pub ann_monotone: bool,
}

#[derive(Clone, Debug)]
pub struct Scan<D: EuclideanDomain> {
    pub rows: Vec<ScanRow<D>>,
    pub ass: StabilizationReport<AssSet<D::Elem>>,
    pub depth: Option<StabilizationReport<DepthValue>>,
}

impl<D: EuclideanDomain> Scan<D> {
    /// `ann(N) ⊆ ann(F(N))` held at every index.
    pub fn ann_monotone(&self) -> bool {
        self.rows.iter().all(|r| r.ann_monotone)
    }
}

fn check_bounds(horizon: u32, window: usize) -> Result<()> {
    if window < 2 || (horizon as usize) < window {
        return Err(Error::Invalid(format!("need horizon >= window >= 2, got horizon {horizon}, window {window}")));
    }
    Ok(())
}

fn eval_row<D: EuclideanDomain>(
    fam: &Family<D>,
    f: &FunctorSpec<D>,
    j: Option<&Ideal<D::Elem>>,
    n: u32,
) -> Result<ScanRow<D>> {
    let m = fam.generate(n)?;
    let value = eval(f, &m)?;
    Ok(ScanRow {
        n,
        ass: ass(&value),
        depth: j.map(|j| depth(j, &value)),
        ann_monotone: ann_is_monotone(&m, &value),
        value,
    })
}

/// Evaluate `F` along the family for `n` from `max(1, n_min)` to `horizon`.
///
/// Indices are evaluated independently (in parallel with the `parallel`
/// feature) and assembled in index order.
pub fn scan<D: EuclideanDomain>(
    fam: &Family<D>,
    f: &FunctorSpec<D>,
    j: Option<&Ideal<D::Elem>>,
    horizon: u32,
    window: usize,
) -> Result<Scan<D>> {
    check_bounds(horizon, window)?;
    fam.validate()?;
    let start = fam.n_min().max(1);
    let indices: Vec<u32> = (start..=horizon).collect();
    #[cfg(feature = "parallel")]
    let results: Vec<Result<ScanRow<D>>> = indices.par_iter().map(|&n| eval_row(fam, f, j, n)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<ScanRow<D>>> = indices.iter().map(|&n| eval_row(fam, f, j, n)).collect();
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let ass_values = rows.iter().map(|r| r.ass.clone()).collect();
    let ass = StabilizationReport::build(start, horizon, window, ass_values);
    let depth = j.map(|_| {
        let vals = rows.iter().map(|r| r.depth.expect("depth requested")).collect();
        StabilizationReport::build(start, horizon, window, vals)
    });
    Ok(Scan { rows, ass, depth })
}

pub fn scan_ass<D: EuclideanDomain>(
    fam: &Family<D>,
    f: &FunctorSpec<D>,
    horizon: u32,
    window: usize,
) -> Result<StabilizationReport<AssSet<D::Elem>>> {
    Ok(scan(fam, f, None, horizon, window)?.ass)
}

pub fn scan_depth<D: EuclideanDomain>(
    j: &Ideal<D::Elem>,
    fam: &Family<D>,
    f: &FunctorSpec<D>,
    horizon: u32,
    window: usize,
) -> Result<StabilizationReport<DepthValue>> {
    Ok(scan(fam, f, Some(j), horizon, window)?.depth.expect("depth requested"))
}
