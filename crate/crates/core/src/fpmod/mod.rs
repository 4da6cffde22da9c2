//! Finitely presented modules over a Euclidean domain.
//!
//! A module is `R^k / span(relations)` with relations stored as columns in
//! canonical Hermite form. Submodules and quotients are always described by
//! generator matrices in some ambient presentation; every membership and
//! equality question goes through the Smith data cached at construction.

mod hom;
mod loc;

use crate::error::{Error, Result};
use crate::euclid::{ensure_same, saturate_part, EuclideanDomain};
use crate::matnf::{self, kernel, DMat, Mat};

pub use hom::{hom, hom_induced, hom_postcompose, HomModule};
pub use loc::{loc_tensor, LocModule};

/// A principal ideal `(g)` with canonical generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal<E> {
    generator: E,
}

impl<E: Clone> Ideal<E> {
    pub fn new<D: EuclideanDomain<Elem = E>>(d: &D, g: &E) -> Ideal<E> {
        Ideal { generator: d.canonical(g) }
    }

    pub fn generator(&self) -> &E {
        &self.generator
    }

    /// Generator of `I^n`.
    pub fn power<D: EuclideanDomain<Elem = E>>(&self, d: &D, n: u32) -> E {
        d.pow(&self.generator, n)
    }

    pub fn contains<D: EuclideanDomain<Elem = E>>(&self, d: &D, x: &E) -> bool {
        d.divides(&self.generator, x)
    }

    /// `self ⊆ other`.
    pub fn is_subset_of<D: EuclideanDomain<Elem = E>>(&self, d: &D, other: &Ideal<E>) -> bool {
        d.divides(&other.generator, &self.generator)
    }
}

/// Invariant-factor data cached on every module.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Decomposition<E> {
    free_rank: usize,
    /// Non-unit invariant factors, ascending by divisibility.
    factors: Vec<E>,
    /// Rows map ambient vectors to canonical coordinates (torsion first).
    to_canon: Mat<E>,
    /// Columns are the canonical generators in ambient coordinates.
    from_canon: Mat<E>,
}

#[derive(Clone, Debug)]
pub struct FpModule<D: EuclideanDomain> {
    domain: D,
    ambient: usize,
    relations: DMat<D>,
    decomp: Decomposition<D::Elem>,
}

impl<D: EuclideanDomain> FpModule<D> {
    /// `R^ambient / span(relations)`.
    pub fn new(d: &D, ambient: usize, relations: DMat<D>) -> Result<FpModule<D>> {
        if relations.rows() != ambient {
            return Err(Error::Shape(format!(
                "relation matrix has {} rows, ambient rank is {ambient}",
                relations.rows()
            )));
        }
        let relations = matnf::span_normal_form(d, &relations);
        let smith = matnf::snf(d, &relations);
        let mut keep = Vec::new();
        let mut factors = Vec::new();
        for i in 0..smith.rank {
            let f = smith.diag.get(i, i);
            if !d.is_unit(f) {
                keep.push(i);
                factors.push(f.clone());
            }
        }
        keep.extend(smith.rank..ambient);
        let decomp = Decomposition {
            free_rank: ambient - smith.rank,
            factors,
            to_canon: smith.u.select_rows(&keep),
            from_canon: smith.u_inv.select_columns(&keep),
        };
        Ok(FpModule { domain: d.clone(), ambient, relations, decomp })
    }

    /// `R^free_rank ⊕ R/(f1) ⊕ ...`, torsion summands first.
    pub fn from_invariants(d: &D, free_rank: usize, factors: &[D::Elem]) -> FpModule<D> {
        let k = factors.len() + free_rank;
        let rel = matnf::diagonal(d, k, factors.len(), factors);
        FpModule::new(d, k, rel).expect("diagonal presentation")
    }

    pub fn cyclic(d: &D, a: &D::Elem) -> FpModule<D> {
        FpModule::from_invariants(d, 0, std::slice::from_ref(a))
    }

    pub fn free(d: &D, rank: usize) -> FpModule<D> {
        FpModule::from_invariants(d, rank, &[])
    }

    pub fn zero(d: &D) -> FpModule<D> {
        FpModule::free(d, 0)
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn relations(&self) -> &DMat<D> {
        &self.relations
    }

    pub fn free_rank(&self) -> usize {
        self.decomp.free_rank
    }

    pub fn factors(&self) -> &[D::Elem] {
        &self.decomp.factors
    }

    /// `(free rank, invariant factors)`.
    pub fn decompose(&self) -> (usize, Vec<D::Elem>) {
        (self.decomp.free_rank, self.decomp.factors.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.decomp.free_rank == 0 && self.decomp.factors.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.decomp.free_rank == 0
    }

    /// Isomorphism test via invariants.
    pub fn is_isomorphic(&self, other: &FpModule<D>) -> bool {
        self.domain == other.domain
            && self.decomp.free_rank == other.decomp.free_rank
            && self.decomp.factors == other.decomp.factors
    }

    /// Number of canonical generators (torsion then free).
    pub fn canonical_count(&self) -> usize {
        self.decomp.factors.len() + self.decomp.free_rank
    }

    /// Canonical generators as ambient columns.
    pub fn canonical_generators(&self) -> &DMat<D> {
        &self.decomp.from_canon
    }

    /// The order ideal of canonical generator `i`; zero for free ones.
    pub fn canonical_order(&self, i: usize) -> D::Elem {
        self.decomp.factors.get(i).cloned().unwrap_or_else(|| self.domain.zero())
    }

    /// Reduced canonical coordinates of an ambient vector.
    pub fn coords(&self, x: &[D::Elem]) -> Vec<D::Elem> {
        let d = &self.domain;
        let mut y = matnf::mul_vec(d, &self.decomp.to_canon, x);
        for (yi, f) in y.iter_mut().zip(&self.decomp.factors) {
            *yi = d.rem(yi, f);
        }
        y
    }

    /// Canonical coordinates of each column, as a matrix.
    pub fn coords_matrix(&self, x: &DMat<D>) -> DMat<D> {
        Mat::from_columns(self.canonical_count(), &x.columns().iter().map(|c| self.coords(c)).collect::<Vec<_>>())
    }

    /// Ambient vector for canonical coordinates.
    pub fn from_coords(&self, y: &[D::Elem]) -> Vec<D::Elem> {
        matnf::mul_vec(&self.domain, &self.decomp.from_canon, y)
    }

    /// Whether an ambient vector represents zero.
    pub fn is_zero_element(&self, x: &[D::Elem]) -> bool {
        self.coords(x).iter().all(|c| self.domain.is_zero(c))
    }

    /// Whether every column of `x` represents zero.
    pub fn kills(&self, x: &DMat<D>) -> bool {
        x.columns().iter().all(|c| self.is_zero_element(c))
    }

    /// Ambient identity matrix (all generators).
    pub fn generators(&self) -> DMat<D> {
        matnf::identity(&self.domain, self.ambient)
    }

    /// `(⟨num⟩ + ⟨den⟩) / ⟨den⟩`, presented on the columns of `num`.
    ///
    /// Relations are the `y` with `num * y ∈ ⟨den⟩ + relations`.
    pub fn subquotient_on(&self, num: &DMat<D>, den: &DMat<D>) -> Result<FpModule<D>> {
        self.check_columns(num, "numerator")?;
        self.check_columns(den, "denominator")?;
        let d = &self.domain;
        let big = num.hcat(den).hcat(&self.relations);
        let k = kernel(d, &big);
        let rel = k.row_range(0, num.cols());
        FpModule::new(d, num.cols(), rel)
    }

    /// `self / ⟨gens⟩`, on the same generators.
    pub fn quotient_by(&self, gens: &DMat<D>) -> Result<FpModule<D>> {
        self.check_columns(gens, "quotient generators")?;
        FpModule::new(&self.domain, self.ambient, self.relations.hcat(gens))
    }

    /// Whether every column of `a` lies in `⟨b⟩` modulo relations.
    pub fn span_contains(&self, b: &DMat<D>, a: &DMat<D>) -> bool {
        let solver = matnf::LinearSolver::new(&self.domain, &b.hcat(&self.relations));
        a.columns().iter().all(|c| solver.solve(c).is_some())
    }

    /// Generators of `⟨a⟩ ∩ ⟨b⟩` modulo relations, in ambient coordinates.
    pub fn intersect(&self, a: &DMat<D>, b: &DMat<D>) -> DMat<D> {
        let d = &self.domain;
        let big = a.hcat(b).hcat(&self.relations);
        let k = kernel(d, &big);
        matnf::mul(d, a, &k.row_range(0, a.cols()))
    }

    pub(crate) fn check_columns(&self, m: &DMat<D>, what: &str) -> Result<()> {
        if m.rows() != self.ambient {
            return Err(Error::Shape(format!("{what} has {} rows, ambient rank is {}", m.rows(), self.ambient)));
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &FpModule<D>) -> Result<FpModule<D>> {
        ensure_same(&self.domain, &other.domain)?;
        let d = &self.domain;
        FpModule::new(d, self.ambient + other.ambient, matnf::block_diag(d, &self.relations, &other.relations))
    }

    /// `M ⊗ N` on generators `e_i ⊗ f_j` (index `i * k_N + j`).
    pub fn tensor(&self, other: &FpModule<D>) -> Result<FpModule<D>> {
        ensure_same(&self.domain, &other.domain)?;
        let d = &self.domain;
        let left = matnf::kron(d, &self.relations, &matnf::identity(d, other.ambient));
        let right = matnf::kron(d, &matnf::identity(d, self.ambient), &other.relations);
        FpModule::new(d, self.ambient * other.ambient, left.hcat(&right))
    }

    /// `M / I^n M`.
    pub fn power_quotient(&self, ideal: &Ideal<D::Elem>, n: u32) -> FpModule<D> {
        let d = &self.domain;
        let g = ideal.power(d, n);
        let extra = matnf::scale(d, &g, &self.generators());
        self.quotient_by(&extra).expect("shapes agree")
    }

    /// `I^{n-1} M / I^n M` for `n >= 1`.
    pub fn power_layer(&self, ideal: &Ideal<D::Elem>, n: u32) -> Result<FpModule<D>> {
        if n == 0 {
            return Err(Error::Invalid("power_layer needs n >= 1".into()));
        }
        let d = &self.domain;
        let gens = self.generators();
        let w = matnf::scale(d, ideal.generator(), &gens);
        let zero = matnf::zeros(d, self.ambient, 0);
        self.subquotient(&zero, &gens, &w, ideal, n - 1)
    }

    /// `(U + I^n V) / I^n W` for submodules `W ⊆ V` given by generators.
    pub fn subquotient(
        &self,
        u: &DMat<D>,
        v: &DMat<D>,
        w: &DMat<D>,
        ideal: &Ideal<D::Elem>,
        n: u32,
    ) -> Result<FpModule<D>> {
        self.check_columns(u, "U")?;
        self.check_columns(v, "V")?;
        self.check_columns(w, "W")?;
        if !self.span_contains(v, w) {
            return Err(Error::NotContained("W is not contained in V".into()));
        }
        let d = &self.domain;
        let g = ideal.power(d, n);
        let num = u.hcat(&matnf::scale(d, &g, v));
        let den = matnf::scale(d, &g, w);
        self.subquotient_on(&num, &den)
    }

    /// Generators of `Γ_(g)(M)`: elements killed by a power of `g`.
    pub fn gamma_generators(&self, g: &D::Elem) -> DMat<D> {
        let d = &self.domain;
        let gens = &self.decomp.from_canon;
        let mut cols = Vec::new();
        for (i, f) in self.decomp.factors.iter().enumerate() {
            let s = saturate_part(d, f, g).expect("factors are nonzero");
            if d.is_unit(&s) {
                continue;
            }
            let mult = d.exact_div(f, &s).expect("saturated part divides");
            cols.push(gens.column(i).iter().map(|x| d.mul(&mult, x)).collect());
        }
        if d.is_zero(g) {
            for j in self.decomp.factors.len()..self.canonical_count() {
                cols.push(gens.column(j));
            }
        }
        Mat::from_columns(self.ambient, &cols)
    }

    /// Generators of `(0 :_M s)`.
    pub fn colon_generators(&self, s: &D::Elem) -> DMat<D> {
        let d = &self.domain;
        let gens = &self.decomp.from_canon;
        let mut cols = Vec::new();
        for (i, f) in self.decomp.factors.iter().enumerate() {
            let g = d.gcd(f, s);
            if d.is_unit(&g) {
                continue;
            }
            let mult = d.exact_div(f, &g).expect("gcd divides");
            cols.push(gens.column(i).iter().map(|x| d.mul(&mult, x)).collect());
        }
        if d.is_zero(s) {
            for j in self.decomp.factors.len()..self.canonical_count() {
                cols.push(gens.column(j));
            }
        }
        Mat::from_columns(self.ambient, &cols)
    }
}

/// A module map given by generator images (`target ambient × source ambient`).
#[derive(Clone, Debug)]
pub struct Morphism<D: EuclideanDomain> {
    source: FpModule<D>,
    target: FpModule<D>,
    matrix: DMat<D>,
    /// `matrix * source.relations = target.relations * witness`.
    witness: DMat<D>,
}

impl<D: EuclideanDomain> Morphism<D> {
    pub fn new(source: &FpModule<D>, target: &FpModule<D>, matrix: DMat<D>) -> Result<Morphism<D>> {
        ensure_same(&source.domain, &target.domain)?;
        if matrix.rows() != target.ambient || matrix.cols() != source.ambient {
            return Err(Error::Shape(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.ambient,
                source.ambient
            )));
        }
        let d = &source.domain;
        let images = matnf::mul(d, &matrix, &source.relations);
        let solver = matnf::LinearSolver::new(d, &target.relations);
        let witness = solver
            .solve_matrix(&images)
            .ok_or_else(|| Error::IllDefined("a relation of the source maps outside the target relations".into()))?;
        Ok(Morphism { source: source.clone(), target: target.clone(), matrix, witness })
    }

    pub fn identity(m: &FpModule<D>) -> Morphism<D> {
        Morphism::new(m, m, m.generators()).expect("identity is well defined")
    }

    pub fn zero(source: &FpModule<D>, target: &FpModule<D>) -> Morphism<D> {
        let d = &source.domain;
        Morphism::new(source, target, matnf::zeros(d, target.ambient, source.ambient))
            .expect("zero map is well defined")
    }

    pub fn source(&self) -> &FpModule<D> {
        &self.source
    }

    pub fn target(&self) -> &FpModule<D> {
        &self.target
    }

    pub fn matrix(&self) -> &DMat<D> {
        &self.matrix
    }

    pub fn witness(&self) -> &DMat<D> {
        &self.witness
    }

    /// Re-checks the stored witness.
    pub fn verify_witness(&self) -> bool {
        let d = &self.source.domain;
        matnf::mul(d, &self.matrix, &self.source.relations) == matnf::mul(d, &self.target.relations, &self.witness)
    }

    pub fn apply(&self, x: &[D::Elem]) -> Vec<D::Elem> {
        matnf::mul_vec(&self.source.domain, &self.matrix, x)
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &Morphism<D>) -> Result<Morphism<D>> {
        if !self.source.is_same_presentation(&f.target) {
            return Err(Error::Shape("composition of non-composable morphisms".into()));
        }
        let d = &self.source.domain;
        Morphism::new(&f.source, &self.target, matnf::mul(d, &self.matrix, &f.matrix))
    }

    pub fn add(&self, other: &Morphism<D>) -> Result<Morphism<D>> {
        self.check_parallel(other)?;
        let d = &self.source.domain;
        Morphism::new(&self.source, &self.target, matnf::add(d, &self.matrix, &other.matrix))
    }

    pub fn scale(&self, c: &D::Elem) -> Morphism<D> {
        let d = &self.source.domain;
        Morphism::new(&self.source, &self.target, matnf::scale(d, c, &self.matrix))
            .expect("multiples of a morphism are well defined")
    }

    /// Equality modulo the target relations.
    pub fn same_as(&self, other: &Morphism<D>) -> bool {
        if self.check_parallel(other).is_err() {
            return false;
        }
        let d = &self.source.domain;
        self.target.kills(&matnf::sub(d, &self.matrix, &other.matrix))
    }

    pub fn is_zero(&self) -> bool {
        self.target.kills(&self.matrix)
    }

    fn check_parallel(&self, other: &Morphism<D>) -> Result<()> {
        if self.source.is_same_presentation(&other.source) && self.target.is_same_presentation(&other.target) {
            Ok(())
        } else {
            Err(Error::Shape("morphisms have different endpoints".into()))
        }
    }

    /// Generators of the kernel as source ambient columns.
    pub fn kernel_generators(&self) -> DMat<D> {
        let d = &self.source.domain;
        let big = self.matrix.hcat(&self.target.relations);
        kernel(d, &big).row_range(0, self.source.ambient)
    }

    /// Kernel with its inclusion into the source.
    pub fn kernel(&self) -> (FpModule<D>, Morphism<D>) {
        let k = self.kernel_generators();
        let module = self
            .source
            .subquotient_on(&k, &matnf::zeros(&self.source.domain, self.source.ambient, 0))
            .expect("shapes agree");
        let incl = Morphism::new(&module, &self.source, k).expect("inclusion is well defined");
        (module, incl)
    }

    /// Cokernel with the projection from the target.
    pub fn cokernel(&self) -> (FpModule<D>, Morphism<D>) {
        let module = self.target.quotient_by(&self.matrix).expect("shapes agree");
        let proj = Morphism::new(&self.target, &module, self.target.generators()).expect("projection is well defined");
        (module, proj)
    }

    /// Image (as source / kernel) with its inclusion into the target.
    pub fn image(&self) -> (FpModule<D>, Morphism<D>) {
        let module = self.source.quotient_by(&self.kernel_generators()).expect("shapes agree");
        let incl = Morphism::new(&module, &self.target, self.matrix.clone()).expect("image inclusion is well defined");
        (module, incl)
    }

    /// `self ⊗ g` on tensor presentations.
    pub fn tensor(&self, g: &Morphism<D>) -> Result<Morphism<D>> {
        let d = &self.source.domain;
        let src = self.source.tensor(&g.source)?;
        let dst = self.target.tensor(&g.target)?;
        Morphism::new(&src, &dst, matnf::kron(d, &self.matrix, &g.matrix))
    }
}

impl<D: EuclideanDomain> FpModule<D> {
    /// Same generators and same relation span.
    pub fn is_same_presentation(&self, other: &FpModule<D>) -> bool {
        self.domain == other.domain && self.ambient == other.ambient && self.relations == other.relations
    }
}
