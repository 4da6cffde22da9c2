//! Euclidean-domain backends.
//!
//! Every algorithm above this module is generic over [`EuclideanDomain`].
//! A domain is a small value (the integer ring is a unit struct, `F_p[x]`
//! carries its characteristic) and elements are plain values that only make
//! sense together with their domain.

mod integers;
mod polyfp;

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

use serde_json::Value;

use crate::error::{Error, Result};

pub use integers::Integers;
pub use polyfp::{Poly, PolyFp};

/// Which backend a domain object is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainDescriptor {
    Integers,
    PolyOverPrimeField { characteristic: u64 },
}

impl fmt::Display for DomainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainDescriptor::Integers => write!(f, "Z"),
            DomainDescriptor::PolyOverPrimeField { characteristic } => {
                write!(f, "F_{characteristic}[x]")
            }
        }
    }
}

/// A prime element in canonical form together with a multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeElem<E> {
    pub elem: E,
    pub multiplicity: u32,
}

/// A Euclidean domain with canonical associates and factorization.
///
/// Canonical associates are positive integers and monic polynomials; zero is
/// its own canonical associate. `div_rem` must return the canonical residue
/// (nonnegative remainder for integers, lower degree for polynomials), which
/// is what makes Hermite forms unique.
pub trait EuclideanDomain: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Ord + Send + Sync + 'static;

    fn descriptor(&self) -> DomainDescriptor;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    /// Euclidean division; panics when `b` is zero.
    fn div_rem(&self, a: &Self::Elem, b: &Self::Elem) -> (Self::Elem, Self::Elem);

    /// Compares Euclidean sizes (absolute value, polynomial degree).
    fn size_cmp(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering;

    /// The unit `u` with `a = u * canonical(a)`; one for zero.
    fn unit_part(&self, a: &Self::Elem) -> Self::Elem;

    /// Inverse of a unit; panics on non-units.
    fn unit_inverse(&self, u: &Self::Elem) -> Self::Elem;

    /// Canonical prime factorization of a nonzero element, sorted by prime.
    fn factor_nonzero(&self, a: &Self::Elem) -> Vec<PrimeElem<Self::Elem>>;

    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem>;
    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    fn format_elem(&self, a: &Self::Elem) -> String;

    fn canonical(&self, a: &Self::Elem) -> Self::Elem {
        let u = self.unit_part(a);
        self.mul(&self.unit_inverse(&u), a)
    }

    fn is_canonical(&self, a: &Self::Elem) -> bool {
        self.canonical(a) == *a
    }

    fn pow(&self, a: &Self::Elem, mut n: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn rem(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.div_rem(a, b).1
    }

    /// Whether `a` divides `b`; zero divides only zero.
    fn divides(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        if self.is_zero(a) {
            return self.is_zero(b);
        }
        self.is_zero(&self.rem(b, a))
    }

    fn exact_div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(b) {
            return if self.is_zero(a) { Some(self.zero()) } else { None };
        }
        let (q, r) = self.div_rem(a, b);
        self.is_zero(&r).then_some(q)
    }

    fn gcd(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !self.is_zero(&y) {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.canonical(&x)
    }

    fn lcm(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        let g = self.gcd(a, b);
        let q = self.exact_div(a, &g).expect("gcd divides");
        self.canonical(&self.mul(&q, b))
    }

    fn are_associate(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.canonical(a) == self.canonical(b)
    }
}

/// Extended gcd: `g = u*a + v*b` with `g` canonical.
pub fn gcd_ext<D: EuclideanDomain>(d: &D, a: &D::Elem, b: &D::Elem) -> (D::Elem, D::Elem, D::Elem) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (d.one(), d.zero());
    let (mut t0, mut t1) = (d.zero(), d.one());
    while !d.is_zero(&r1) {
        let (q, r) = d.div_rem(&r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
        let s = d.sub(&s0, &d.mul(&q, &s1));
        s0 = std::mem::replace(&mut s1, s);
        let t = d.sub(&t0, &d.mul(&q, &t1));
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = d.unit_inverse(&d.unit_part(&r0));
    (d.mul(&inv, &r0), d.mul(&inv, &s0), d.mul(&inv, &t0))
}

/// Canonical factorization; fails on zero.
pub fn factor<D: EuclideanDomain>(d: &D, a: &D::Elem) -> Result<Vec<PrimeElem<D::Elem>>> {
    if d.is_zero(a) {
        return Err(Error::ZeroInput("factor"));
    }
    Ok(d.factor_nonzero(a))
}

/// The part of `n` supported on primes dividing `g`.
///
/// Returns the canonical `s | n` such that every prime of `s` divides `g` and
/// `n / s` is coprime to `g`.
pub fn saturate_part<D: EuclideanDomain>(d: &D, n: &D::Elem, g: &D::Elem) -> Result<D::Elem> {
    if d.is_zero(n) {
        return Err(Error::ZeroInput("saturate_part"));
    }
    let mut rest = n.clone();
    let mut part = d.one();
    loop {
        let h = d.gcd(&rest, g);
        if d.is_unit(&h) {
            break;
        }
        rest = d.exact_div(&rest, &h).expect("gcd divides");
        part = d.mul(&part, &h);
    }
    Ok(part)
}

/// Checks two domain objects describe the same backend.
pub fn ensure_same<D: EuclideanDomain>(a: &D, b: &D) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BackendMismatch(a.descriptor().to_string(), b.descriptor().to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn z(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn gcd_ext_integers() {
        let (g, u, v) = gcd_ext(&Integers, &z(12), &z(8));
        assert_eq!(g, z(4));
        assert_eq!(u * z(12) + v * z(8), z(4));
        assert_eq!(z(12) % &g, z(0));
        assert_eq!(z(8) % &g, z(0));
    }

    #[test]
    fn gcd_ext_with_zero() {
        let (g, u, v) = gcd_ext(&Integers, &z(-7), &z(0));
        assert_eq!(g, z(7));
        assert!(Integers.is_unit(&u));
        assert_eq!(v, z(0));
    }

    #[test]
    fn gcd_ext_poly_f2() {
        let d = PolyFp::new(2).unwrap();
        let a = Poly::from_coeffs(2, &[0, 1, 1]);
        let b = Poly::from_coeffs(2, &[0, 1]);
        let (g, u, v) = gcd_ext(&d, &a, &b);
        assert_eq!(g, Poly::from_coeffs(2, &[0, 1]));
        assert_eq!(d.add(&d.mul(&u, &a), &d.mul(&v, &b)), g);
    }

    #[test]
    fn factor_small_cases() {
        let f = factor(&Integers, &z(12)).unwrap();
        assert_eq!(f, vec![PrimeElem { elem: z(2), multiplicity: 2 }, PrimeElem { elem: z(3), multiplicity: 1 }]);
        assert!(factor(&Integers, &z(-1)).unwrap().is_empty());
        assert!(matches!(factor(&Integers, &z(0)), Err(Error::ZeroInput(_))));

        let d = PolyFp::new(2).unwrap();
        let f = factor(&d, &Poly::from_coeffs(2, &[0, 1, 1])).unwrap();
        assert_eq!(
            f,
            vec![
                PrimeElem { elem: Poly::from_coeffs(2, &[0, 1]), multiplicity: 1 },
                PrimeElem { elem: Poly::from_coeffs(2, &[1, 1]), multiplicity: 1 }
            ]
        );
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate_part(&Integers, &z(12), &z(2)).unwrap(), z(4));
        assert_eq!(saturate_part(&Integers, &z(12), &z(6)).unwrap(), z(12));
        assert_eq!(saturate_part(&Integers, &z(12), &z(-1)).unwrap(), z(1));
        assert_eq!(saturate_part(&Integers, &z(12), &z(0)).unwrap(), z(12));
        assert!(saturate_part(&Integers, &z(0), &z(2)).is_err());
    }

    #[test]
    fn backend_mismatch_is_reported() {
        let a = PolyFp::new(2).unwrap();
        let b = PolyFp::new(3).unwrap();
        assert!(matches!(ensure_same(&a, &b), Err(Error::BackendMismatch(..))));
        assert!(ensure_same(&a, &a.clone()).is_ok());
    }
}
