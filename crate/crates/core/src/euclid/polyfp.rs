use std::cmp::Ordering;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use super::{DomainDescriptor, EuclideanDomain, PrimeElem};
use crate::error::{Error, Result};

/// Univariate polynomial over `F_p`, coefficients low to high degree.
///
/// The coefficient vector never ends in a zero; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    /// Builds a polynomial from (possibly unreduced) coefficients.
    pub fn from_coeffs(p: u64, coeffs: &[u64]) -> Poly {
        Poly::trimmed(coeffs.iter().map(|c| c % p).collect())
    }

    fn trimmed(mut coeffs: Vec<u64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    fn constant(c: u64) -> Poly {
        Poly::trimmed(vec![c])
    }

    fn x() -> Poly {
        Poly { coeffs: vec![0, 1] }
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// The ring `F_p[x]` for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PolyFp {
    p: u64,
}

impl PolyFp {
    pub fn new(p: u64) -> Result<PolyFp> {
        if p >= 1 << 31 {
            return Err(Error::Invalid(format!("characteristic {p} exceeds 2^31")));
        }
        if !is_prime_u64(p) {
            return Err(Error::Invalid(format!("characteristic {p} is not prime")));
        }
        Ok(PolyFp { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Shorthand for tests and examples.
    pub fn poly(&self, coeffs: &[u64]) -> Poly {
        Poly::from_coeffs(self.p, coeffs)
    }

    fn inv_mod(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        pow_mod(a, self.p - 2, self.p)
    }

    fn scale(&self, a: &Poly, c: u64) -> Poly {
        let p = self.p;
        Poly::trimmed(a.coeffs.iter().map(|&x| mul_mod(x, c, p)).collect())
    }

    fn make_monic(&self, a: &Poly) -> Poly {
        if a.coeffs.is_empty() {
            return a.clone();
        }
        self.scale(a, self.inv_mod(a.lead()))
    }

    fn mul_mod_poly(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m)
    }

    fn pow_mod_poly(&self, a: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&self.one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_mod_poly(&acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_mod_poly(&base, &base, m);
            }
        }
        acc
    }

    fn derivative(&self, a: &Poly) -> Poly {
        let p = self.p;
        Poly::trimmed(a.coeffs.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
    }

    /// `a` must be a polynomial in `x^p`; returns its p-th root.
    fn pth_root(&self, a: &Poly) -> Poly {
        let p = self.p as usize;
        Poly::trimmed(a.coeffs.iter().step_by(p).copied().collect())
    }

    fn squarefree(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        let df = self.derivative(f);
        if df.coeffs.is_empty() {
            for (g, e) in self.squarefree(&self.pth_root(f)) {
                out.push((g, e * self.p as u32));
            }
            return out;
        }
        let mut c = self.gcd(f, &df);
        let mut w = self.exact_div(f, &c).expect("gcd divides");
        let mut i = 1;
        while w.degree() != Some(0) {
            let y = self.gcd(&w, &c);
            let z = self.exact_div(&w, &y).expect("gcd divides");
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            c = self.exact_div(&c, &y).expect("gcd divides");
            w = y;
        }
        if c.degree().unwrap_or(0) > 0 {
            for (g, e) in self.squarefree(&self.pth_root(&c)) {
                out.push((g, e * self.p as u32));
            }
        }
        out
    }

    fn distinct_degree(&self, f: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let mut h = self.rem(&Poly::x(), &rest);
        let mut i = 1;
        while rest.degree().unwrap_or(0) >= 2 * i {
            h = self.pow_mod_poly(&h, self.p, &rest);
            let g = self.gcd(&self.sub(&h, &Poly::x()), &rest);
            if g.degree().unwrap_or(0) > 0 {
                rest = self.exact_div(&rest, &g).expect("gcd divides");
                h = self.rem(&h, &rest);
                out.push((g, i));
            }
            i += 1;
        }
        if let Some(dr) = rest.degree().filter(|&d| d > 0) {
            out.push((rest, dr));
        }
        out
    }

    fn equal_degree(&self, f: &Poly, d: usize, rng: &mut StdRng) -> Vec<Poly> {
        let n = f.degree().expect("nonzero");
        if n == d {
            return vec![f.clone()];
        }
        loop {
            let a = Poly::trimmed((0..n).map(|_| rng.gen_range(0..self.p)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let g = self.gcd(&a, f);
            let splitter = if g.degree().unwrap_or(0) > 0 {
                g
            } else {
                let b = if self.p == 2 {
                    // trace map to F_2
                    let mut t = a.clone();
                    let mut acc = a.clone();
                    for _ in 1..d {
                        t = self.mul_mod_poly(&t, &t, f);
                        acc = self.add(&acc, &t);
                    }
                    acc
                } else {
                    let mut t = self.rem(&a, f);
                    let mut acc = t.clone();
                    for _ in 1..d {
                        t = self.pow_mod_poly(&t, self.p, f);
                        acc = self.mul_mod_poly(&acc, &t, f);
                    }
                    let b = self.pow_mod_poly(&acc, (self.p - 1) / 2, f);
                    self.sub(&b, &self.one())
                };
                self.gcd(&b, f)
            };
            let k = splitter.degree().unwrap_or(0);
            if k > 0 && k < n {
                let other = self.exact_div(f, &splitter).expect("gcd divides");
                let mut out = self.equal_degree(&splitter, d, rng);
                out.extend(self.equal_degree(&other, d, rng));
                return out;
            }
        }
    }
}

impl EuclideanDomain for PolyFp {
    type Elem = Poly;

    fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor::PolyOverPrimeField { characteristic: self.p }
    }

    fn zero(&self) -> Poly {
        Poly { coeffs: Vec::new() }
    }

    fn one(&self) -> Poly {
        Poly { coeffs: vec![1] }
    }

    fn from_i64(&self, v: i64) -> Poly {
        Poly::constant(v.rem_euclid(self.p as i64) as u64)
    }

    fn is_zero(&self, a: &Poly) -> bool {
        a.coeffs.is_empty()
    }

    fn is_unit(&self, a: &Poly) -> bool {
        a.coeffs.len() == 1
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let p = self.p;
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::trimmed(
            (0..n)
                .map(|i| {
                    let x = a.coeffs.get(i).copied().unwrap_or(0);
                    let y = b.coeffs.get(i).copied().unwrap_or(0);
                    (x + y) % p
                })
                .collect(),
        )
    }

    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return self.zero();
        }
        let p = self.p;
        let mut out = vec![0u64; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        Poly::trimmed(out)
    }

    fn neg(&self, a: &Poly) -> Poly {
        let p = self.p;
        Poly::trimmed(a.coeffs.iter().map(|&c| (p - c) % p).collect())
    }

    fn div_rem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.degree().expect("division by zero polynomial");
        let p = self.p;
        let inv = self.inv_mod(b.lead());
        let mut r = a.coeffs.clone();
        if r.len() <= db {
            return (self.zero(), a.clone());
        }
        let mut q = vec![0u64; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + db], inv, p);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul_mod(c, bj, p)) % p;
            }
        }
        r.truncate(db);
        (Poly::trimmed(q), Poly::trimmed(r))
    }

    fn size_cmp(&self, a: &Poly, b: &Poly) -> Ordering {
        a.coeffs.len().cmp(&b.coeffs.len())
    }

    fn unit_part(&self, a: &Poly) -> Poly {
        if a.coeffs.is_empty() {
            self.one()
        } else {
            Poly::constant(a.lead())
        }
    }

    fn unit_inverse(&self, u: &Poly) -> Poly {
        assert!(self.is_unit(u), "not a unit: {u:?}");
        Poly::constant(self.inv_mod(u.coeffs[0]))
    }

    fn factor_nonzero(&self, a: &Poly) -> Vec<PrimeElem<Poly>> {
        let f = self.make_monic(a);
        if f.degree() == Some(0) {
            return Vec::new();
        }
        let mut rng = StdRng::seed_from_u64(0x5eed_0f_f1e1d5);
        let mut out: Vec<PrimeElem<Poly>> = Vec::new();
        for (sqf, mult) in self.squarefree(&f) {
            for (block, d) in self.distinct_degree(&sqf) {
                for g in self.equal_degree(&block, d, &mut rng) {
                    out.push(PrimeElem { elem: self.make_monic(&g), multiplicity: mult });
                }
            }
        }
        out.sort();
        // merge repeated primes (possible across squarefree layers only if the
        // input was not canonical; kept for safety of the contract)
        let mut merged: Vec<PrimeElem<Poly>> = Vec::new();
        for pe in out {
            match merged.last_mut() {
                Some(last) if last.elem == pe.elem => last.multiplicity += pe.multiplicity,
                _ => merged.push(pe),
            }
        }
        merged
    }

    fn elem_from_json(&self, v: &Value) -> Result<Poly> {
        let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected coefficient array, got {v}")))?;
        let p = self.p as i64;
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            let x = match c {
                Value::Number(n) => n.as_i64(),
                Value::String(s) => s.trim().parse::<i64>().ok(),
                _ => None,
            }
            .ok_or_else(|| Error::Parse(format!("bad coefficient {c}")))?;
            coeffs.push(x.rem_euclid(p) as u64);
        }
        Ok(Poly::trimmed(coeffs))
    }

    fn elem_to_json(&self, a: &Poly) -> Value {
        Value::Array(a.coeffs.iter().map(|&c| Value::from(c)).collect())
    }

    fn format_elem(&self, a: &Poly) -> String {
        if a.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in a.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        terms.join("+")
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}
