use super::{FpModule, Morphism};
use crate::error::Result;
use crate::euclid::{ensure_same, EuclideanDomain};
use crate::matnf::{self, DMat, Mat};

/// One cyclic summand of `Hom(M, N)`: canonical generator `source_index`
/// of `M` goes to `multiplier` times canonical generator `target_index` of
/// `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomPair<E> {
    pub source_index: usize,
    pub target_index: usize,
    pub multiplier: E,
    pub order: E,
}

/// `Hom(M, N)` as a module, with the morphism attached to each generator.
#[derive(Clone, Debug)]
pub struct HomModule<D: EuclideanDomain> {
    source: FpModule<D>,
    target: FpModule<D>,
    pairs: Vec<HomPair<D::Elem>>,
    module: FpModule<D>,
}

impl<D: EuclideanDomain> HomModule<D> {
    pub fn module(&self) -> &FpModule<D> {
        &self.module
    }

    pub fn pairs(&self) -> &[HomPair<D::Elem>] {
        &self.pairs
    }

    pub fn source(&self) -> &FpModule<D> {
        &self.source
    }

    pub fn target(&self) -> &FpModule<D> {
        &self.target
    }

    fn pair_matrix(&self, p: usize) -> DMat<D> {
        let d = self.source.domain();
        let pair = &self.pairs[p];
        let col: Vec<D::Elem> = self
            .target
            .canonical_generators()
            .column(pair.target_index)
            .iter()
            .map(|x| d.mul(&pair.multiplier, x))
            .collect();
        let row = self.source.decomp.to_canon.row(pair.source_index);
        Mat::from_fn(col.len(), row.len(), |i, j| d.mul(&col[i], &row[j]))
    }

    /// The morphism `M -> N` with the given coordinates in `Hom(M, N)`.
    pub fn realize(&self, coords: &[D::Elem]) -> Morphism<D> {
        let d = self.source.domain();
        assert_eq!(coords.len(), self.pairs.len(), "hom coordinate length");
        let mut acc = matnf::zeros(d, self.target.ambient_rank(), self.source.ambient_rank());
        for (p, c) in coords.iter().enumerate() {
            if !d.is_zero(c) {
                acc = matnf::add(d, &acc, &matnf::scale(d, c, &self.pair_matrix(p)));
            }
        }
        Morphism::new(&self.source, &self.target, acc).expect("hom generators are well defined")
    }

    /// Coordinates of a morphism `M -> N` in this module's generators.
    pub fn coords_of(&self, matrix: &DMat<D>) -> Vec<D::Elem> {
        let d = self.source.domain();
        let gens = self.source.canonical_generators();
        let images: Vec<Vec<D::Elem>> =
            (0..gens.cols()).map(|i| self.target.coords(&matnf::mul_vec(d, matrix, &gens.column(i)))).collect();
        self.pairs
            .iter()
            .map(|pair| {
                let z = &images[pair.source_index][pair.target_index];
                let t = d.exact_div(z, &pair.multiplier).expect("image coordinate is a multiple of the hom multiplier");
                if d.is_zero(&pair.order) {
                    t
                } else {
                    d.rem(&t, &pair.order)
                }
            })
            .collect()
    }
}

/// `Hom(M, N)` built from the invariant-factor decompositions.
pub fn hom<D: EuclideanDomain>(m: &FpModule<D>, n: &FpModule<D>) -> Result<HomModule<D>> {
    ensure_same(m.domain(), n.domain())?;
    let d = m.domain();
    let mut pairs = Vec::new();
    for i in 0..m.canonical_count() {
        let a = m.canonical_order(i);
        for j in 0..n.canonical_count() {
            let b = n.canonical_order(j);
            if !d.is_zero(&a) && d.is_zero(&b) {
                continue;
            }
            let g = d.gcd(&a, &b);
            if d.is_unit(&g) {
                continue;
            }
            let multiplier = if d.is_zero(&b) { d.one() } else { d.exact_div(&b, &g).expect("gcd divides") };
            pairs.push(HomPair { source_index: i, target_index: j, multiplier, order: g });
        }
    }
    let orders: Vec<D::Elem> = pairs.iter().map(|p| p.order.clone()).collect();
    let rel = matnf::diagonal(d, pairs.len(), pairs.len(), &orders);
    let module = FpModule::new(d, pairs.len(), rel)?;
    Ok(HomModule { source: m.clone(), target: n.clone(), pairs, module })
}

/// Precomposition `Hom(L, N) -> Hom(K, N)` with `f: K -> L`.
pub fn hom_induced<D: EuclideanDomain>(
    f: &Morphism<D>,
    n: &FpModule<D>,
) -> Result<(HomModule<D>, HomModule<D>, Morphism<D>)> {
    let d = n.domain();
    let from = hom(f.target(), n)?;
    let to = hom(f.source(), n)?;
    let cols: Vec<Vec<D::Elem>> =
        (0..from.pairs.len()).map(|p| to.coords_of(&matnf::mul(d, &from.pair_matrix(p), f.matrix()))).collect();
    let m = Mat::from_columns(to.pairs.len(), &cols);
    let map = Morphism::new(from.module(), to.module(), m)?;
    Ok((from, to, map))
}

/// Postcomposition `Hom(M, N) -> Hom(M, N')` with `g: N -> N'`.
pub fn hom_postcompose<D: EuclideanDomain>(
    m: &FpModule<D>,
    g: &Morphism<D>,
) -> Result<(HomModule<D>, HomModule<D>, Morphism<D>)> {
    let d = m.domain();
    let from = hom(m, g.source())?;
    let to = hom(m, g.target())?;
    let cols: Vec<Vec<D::Elem>> =
        (0..from.pairs.len()).map(|p| to.coords_of(&matnf::mul(d, g.matrix(), &from.pair_matrix(p)))).collect();
    let mat = Mat::from_columns(to.pairs.len(), &cols);
    let map = Morphism::new(from.module(), to.module(), mat)?;
    Ok((from, to, map))
}
