use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use super::{DomainDescriptor, EuclideanDomain, PrimeElem};
use crate::error::{Error, Result};

/// The ring of integers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Integers;

impl EuclideanDomain for Integers {
    type Elem = BigInt;

    fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor::Integers
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn is_unit(&self, a: &BigInt) -> bool {
        a.magnitude().is_one()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn div_rem(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        assert!(!b.is_zero(), "division by zero");
        let m = b.abs();
        let r = a.mod_floor(&m);
        let q = (a - &r) / b;
        (q, r)
    }

    fn size_cmp(&self, a: &BigInt, b: &BigInt) -> Ordering {
        a.magnitude().cmp(b.magnitude())
    }

    fn unit_part(&self, a: &BigInt) -> BigInt {
        if a.sign() == Sign::Minus {
            BigInt::from(-1)
        } else {
            BigInt::one()
        }
    }

    fn unit_inverse(&self, u: &BigInt) -> BigInt {
        assert!(self.is_unit(u), "not a unit: {u}");
        u.clone()
    }

    fn factor_nonzero(&self, a: &BigInt) -> Vec<PrimeElem<BigInt>> {
        factor_integer(&a.abs())
    }

    fn elem_from_json(&self, v: &Value) -> Result<BigInt> {
        match v {
            Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
            Value::Number(n) => {
                n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("not an integer: {n}")))
            }
            other => Err(Error::Parse(format!("expected integer, got {other}"))),
        }
    }

    fn elem_to_json(&self, a: &BigInt) -> Value {
        match i64::try_from(a) {
            Ok(v) => Value::from(v),
            Err(_) => Value::String(a.to_string()),
        }
    }

    fn format_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

const SMALL_PRIME_BOUND: u32 = 1 << 12;

fn small_primes() -> Vec<u32> {
    let n = SMALL_PRIME_BOUND as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
}

/// Trial division by small primes, then Pollard rho (Brent) on the cofactor.
///
/// Primality uses Miller-Rabin with the first twelve prime bases, which is
/// deterministic below 3.3e24; larger cofactors are handled probabilistically.
fn factor_integer(n: &BigInt) -> Vec<PrimeElem<BigInt>> {
    let mut rest = n.clone();
    let mut found: Vec<BigInt> = Vec::new();
    for p in small_primes() {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            found.push(bp.clone());
        }
    }
    if !rest.is_one() {
        split_large(&rest, &mut found);
    }
    found.sort();
    let mut out: Vec<PrimeElem<BigInt>> = Vec::new();
    for p in found {
        match out.last_mut() {
            Some(last) if last.elem == p => last.multiplicity += 1,
            _ => out.push(PrimeElem { elem: p, multiplicity: 1 }),
        }
    }
    out
}

fn split_large(n: &BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return;
    }
    let d = pollard_brent(n);
    split_large(&d, out);
    split_large(&(n / &d), out);
}

fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        let bb = BigInt::from(b);
        if n == &bb {
            return true;
        }
        if (n % &bb).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for b in BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m: u64 = 64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1;
        if c.to_u64().is_some_and(|v| v > 1000) {
            panic!("pollard rho failed on {n}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_remainders() {
        let d = Integers;
        assert_eq!(d.div_rem(&BigInt::from(-7), &BigInt::from(3)), (BigInt::from(-3), BigInt::from(2)));
        assert_eq!(d.div_rem(&BigInt::from(7), &BigInt::from(-3)), (BigInt::from(-2), BigInt::from(1)));
        assert_eq!(d.canonical(&BigInt::from(-12)), BigInt::from(12));
    }

    #[test]
    fn factors_semiprime_beyond_trial_division() {
        // 1000003 * 1000033
        let n = BigInt::from(1_000_003u64) * BigInt::from(1_000_033u64);
        let f = factor_integer(&n);
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].elem, BigInt::from(1_000_003u64));
        assert_eq!(f[1].elem, BigInt::from(1_000_033u64));
    }

    #[test]
    fn factors_prime_power() {
        let n = BigInt::from(2).pow(50u32) * BigInt::from(9);
        let f = factor_integer(&n);
        assert_eq!(
            f,
            vec![
                PrimeElem { elem: BigInt::from(2), multiplicity: 50 },
                PrimeElem { elem: BigInt::from(3), multiplicity: 2 },
            ]
        );
    }

    #[test]
    fn json_forms() {
        let d = Integers;
        assert_eq!(d.elem_from_json(&Value::from("-12")).unwrap(), BigInt::from(-12));
        assert_eq!(d.elem_from_json(&Value::from(5)).unwrap(), BigInt::from(5));
        assert!(d.elem_from_json(&Value::from("x")).is_err());
    }
}
