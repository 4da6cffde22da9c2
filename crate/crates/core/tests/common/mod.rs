#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use stab_core::euclid::{EuclideanDomain, Integers, PolyFp};
use stab_core::fpmod::FpModule;
use stab_core::matnf::{self, DMat};

pub fn int(v: i64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(v)
}

/// A product of random elementary operations, with multipliers drawn by `pick`.
pub fn unimodular<D: EuclideanDomain>(
    d: &D,
    n: usize,
    rng: &mut StdRng,
    mut pick: impl FnMut(&mut StdRng) -> D::Elem,
) -> DMat<D> {
    let mut m = matnf::identity(d, n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            m.set(0, 0, d.neg(&d.one()));
        }
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            0 => m.swap_rows(i, j),
            1 => {
                for c in 0..n {
                    let v = d.neg(m.get(i, c));
                    m.set(i, c, v);
                }
            }
            _ => {
                let k = pick(rng);
                for c in 0..n {
                    let v = d.add(m.get(i, c), &d.mul(&k, m.get(j, c)));
                    m.set(i, c, v);
                }
            }
        }
    }
    m
}

pub fn small_int(rng: &mut StdRng) -> num_bigint::BigInt {
    int(rng.gen_range(-3..=3))
}

pub fn small_poly(d: &PolyFp) -> impl FnMut(&mut StdRng) -> stab_core::euclid::Poly + '_ {
    move |rng| {
        let p = d.characteristic();
        d.poly(&[rng.gen_range(0..p), rng.gen_range(0..p)])
    }
}

/// The module with the given invariants, presented through `U * diag * V`.
pub fn scrambled<D: EuclideanDomain>(
    d: &D,
    free_rank: usize,
    factors: &[D::Elem],
    rng: &mut StdRng,
    mut pick: impl FnMut(&mut StdRng) -> D::Elem,
) -> FpModule<D> {
    let k = factors.len() + free_rank;
    let c = factors.len();
    let diag = matnf::diagonal(d, k, c, factors);
    let u = unimodular(d, k, rng, &mut pick);
    let v = unimodular(d, c, rng, &mut pick);
    FpModule::new(d, k, matnf::mul(d, &matnf::mul(d, &u, &diag), &v)).expect("presentation")
}

/// Monic polynomials over `F_p` of degree `1..=max_deg`.
pub fn monic_polys(d: &PolyFp, max_deg: usize) -> Vec<stab_core::euclid::Poly> {
    let p = d.characteristic();
    let mut out = Vec::new();
    for deg in 1..=max_deg {
        let count = p.pow(deg as u32);
        for code in 0..count {
            let mut c = Vec::with_capacity(deg + 1);
            let mut x = code;
            for _ in 0..deg {
                c.push(x % p);
                x /= p;
            }
            c.push(1);
            out.push(d.poly(&c));
        }
    }
    out
}

/// All residues of `R/(f)`: every polynomial of degree below `deg f`.
pub fn poly_residues(d: &PolyFp, f: &stab_core::euclid::Poly) -> Vec<stab_core::euclid::Poly> {
    let p = d.characteristic();
    let deg = f.degree().unwrap_or(0) as u32;
    (0..p.pow(deg))
        .map(|code| {
            let mut x = code;
            let c: Vec<u64> = (0..deg)
                .map(|_| {
                    let r = x % p;
                    x /= p;
                    r
                })
                .collect();
            d.poly(&c)
        })
        .collect()
}

/// Invariant chains `f1 | f2 | ...` of non-units whose product has `size <= bound`.
pub fn chains<D: EuclideanDomain>(
    d: &D,
    cands: &[D::Elem],
    size: &dyn Fn(&D::Elem) -> u64,
    bound: u64,
) -> Vec<Vec<D::Elem>> {
    fn go<D: EuclideanDomain>(
        d: &D,
        cands: &[D::Elem],
        size: &dyn Fn(&D::Elem) -> u64,
        bound: u64,
        prefix: &mut Vec<D::Elem>,
        used: u64,
        out: &mut Vec<Vec<D::Elem>>,
    ) {
        for c in cands {
            if let Some(last) = prefix.last() {
                if !d.divides(last, c) {
                    continue;
                }
            }
            let s = size(c);
            if used * s > bound {
                continue;
            }
            prefix.push(c.clone());
            out.push(prefix.clone());
            go(d, cands, size, bound, prefix, used * s, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, cands, size, bound, &mut Vec::new(), 1, &mut out);
    out
}

pub fn int_chains(bound: u64) -> Vec<Vec<num_bigint::BigInt>> {
    let cands: Vec<_> = (2..=bound as i64).map(int).collect();
    let size = |e: &num_bigint::BigInt| u64::try_from(e).unwrap();
    chains(&Integers, &cands, &size, bound)
}

pub fn poly_chains(d: &PolyFp, bound: u64) -> Vec<Vec<stab_core::euclid::Poly>> {
    let p = d.characteristic();
    let mut max_deg = 0;
    while p.pow(max_deg as u32 + 1) <= bound {
        max_deg += 1;
    }
    let cands = monic_polys(d, max_deg);
    let size = move |e: &stab_core::euclid::Poly| p.pow(e.degree().unwrap() as u32);
    chains(d, &cands, &size, bound)
}

/// Cartesian product of residue lists.
pub fn elements<E: Clone>(residues: &[Vec<E>]) -> Vec<Vec<E>> {
    let mut out = vec![Vec::new()];
    for r in residues {
        let mut next = Vec::with_capacity(out.len() * r.len());
        for prefix in &out {
            for x in r {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Prime `π` is associated iff some nonzero element is killed by `π`.
pub fn ass_by_enumeration<D: EuclideanDomain>(
    d: &D,
    factors: &[D::Elem],
    residues: &[Vec<D::Elem>],
    primes: &[D::Elem],
) -> Vec<D::Elem> {
    let elems = elements(residues);
    primes
        .iter()
        .filter(|pi| {
            elems.iter().any(|x| {
                x.iter().any(|c| !d.is_zero(c))
                    && x.iter().zip(factors).all(|(c, f)| d.is_zero(&d.rem(&d.mul(pi, c), f)))
            })
        })
        .cloned()
        .collect()
}

pub fn int_primes(bound: i64) -> Vec<num_bigint::BigInt> {
    (2..=bound).filter(|&n| (2..n).all(|k| n % k != 0)).map(int).collect()
}

pub fn poly_primes(d: &PolyFp, max_deg: usize) -> Vec<stab_core::euclid::Poly> {
    let all = monic_polys(d, max_deg);
    all.iter()
        .filter(|f| {
            let deg = f.degree().unwrap();
            !all.iter().any(|g| {
                let gd = g.degree().unwrap();
                gd >= 1 && gd < deg && d.divides(g, f)
            })
        })
        .cloned()
        .collect()
}

/// Invariant factors of a finite abelian group from the sizes `|G[k]|`.
pub fn factors_from_torsion_counts(order: u64, count: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    let mut n = order;
    let mut p = 2;
    while n > 1 {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            // parts of size >= j
            let mut at_least = Vec::new();
            let mut prev = 1;
            let mut pj = p;
            loop {
                let c = count(pj);
                if c == prev {
                    break;
                }
                let mut ratio = c / prev;
                let mut k = 0;
                while ratio > 1 {
                    ratio /= p;
                    k += 1;
                }
                at_least.push(k);
                prev = c;
                pj *= p;
            }
            per_prime.push((p, at_least));
        }
        p += 1;
    }
    let len = per_prime.iter().map(|(_, a)| a.first().copied().unwrap_or(0)).max().unwrap_or(0) as usize;
    let mut out = vec![1u64; len];
    for (p, at_least) in &per_prime {
        for &k in at_least {
            // the k largest factors carry one more power of p
            for slot in out.iter_mut().rev().take(k as usize) {
                *slot *= p;
            }
        }
    }
    out
}
