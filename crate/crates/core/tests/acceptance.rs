//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::cell::RefCell;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stab_core::euclid::{EuclideanDomain, Integers, PolyFp};
use stab_core::fpmod::{hom, FpModule, Ideal, Morphism};
use stab_core::functors::{
    ann_is_monotone, eval, middle_finite_eval, osc_eval_mor, osc_eval_obj, FunctorSpec, MiddleFiniteComplex,
    OscillatingFunctor, SkeletonObject,
};
use stab_core::invariants::{self, ass, CmcSet, ExponentSet, PrimeIdeal};
use stab_core::matnf::{self, DMat};
use stab_core::scenario::{Backend, FunctorDef, Overrides, RunSummary};
use stab_core::stabilab::{artin_rees_probe, Status};
use stab_core::suite::{self, SuiteResult};

/// Annihilator monotonicity, collected while criteria 4 to 8 run.
#[derive(Default)]
struct AnnLog {
    checked: usize,
    failures: Vec<String>,
}

thread_local! {
    static ANN: RefCell<AnnLog> = RefCell::default();
}

fn note_ann(ok: bool, what: impl FnOnce() -> String) {
    ANN.with(|a| {
        let mut a = a.borrow_mut();
        a.checked += 1;
        if !ok {
            a.failures.push(what());
        }
    });
}

fn note_module<D: EuclideanDomain>(n: &FpModule<D>, fnv: &FpModule<D>, what: &str) {
    note_ann(ann_is_monotone(n, fnv), || what.to_string());
}

fn note_runs(results: &[SuiteResult]) {
    for r in results {
        if let Ok(s) = &r.outcome {
            note_ann(s.ann_monotone, || r.label.clone());
        }
    }
}

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 50 {
            self.failures.push(what());
        }
    }
}

fn report(id: u32, name: &str, elapsed: Duration, out: Outcome) -> bool {
    let pass = out.failures.is_empty();
    println!(
        "criterion {id:>2} {name:<28} {} ({:.2}s){}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if out.detail.is_empty() { String::new() } else { format!(" {}", out.detail) }
    );
    for f in out.failures.iter().take(10) {
        println!("    {f}");
    }
    pass
}

fn is_diag_chain<D: EuclideanDomain>(d: &D, m: &DMat<D>, rank: usize) -> bool {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let e = m.get(i, j);
            if i != j && !d.is_zero(e) {
                return false;
            }
            if i == j && (i < rank) == d.is_zero(e) {
                return false;
            }
        }
    }
    (0..rank).all(|i| d.is_canonical(m.get(i, i))) && (1..rank).all(|i| d.divides(m.get(i - 1, i - 1), m.get(i, i)))
}

fn criterion_1() -> Outcome {
    let d = Integers;
    let mut rng = StdRng::seed_from_u64(1);
    let mut out = Outcome::new();
    for t in 0..1000 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = DMat::<Integers>::from_fn(r, c, |_, _| int(rng.gen_range(-100..=100)));
        let s = matnf::snf(&d, &a);
        let uav = matnf::mul(&d, &matnf::mul(&d, &s.u, &a), &s.v);
        out.check(uav == s.diag, || format!("trial {t}: U A V != D"));
        out.check(is_diag_chain(&d, &s.diag, s.rank), || format!("trial {t}: not a divisibility chain"));
        out.check(matnf::mul(&d, &s.u, &s.u_inv) == matnf::identity(&d, r), || format!("trial {t}: U not invertible"));
        out.check(matnf::mul(&d, &s.v, &s.v_inv) == matnf::identity(&d, c), || format!("trial {t}: V not invertible"));
        let p = unimodular(&d, r, &mut rng, small_int);
        let q = unimodular(&d, c, &mut rng, small_int);
        let moved = matnf::snf(&d, &matnf::mul(&d, &matnf::mul(&d, &p, &a), &q));
        out.check(moved.diag == s.diag, || format!("trial {t}: SNF changed under unimodular change"));
    }
    out
}

fn as_u64(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|x| u64::try_from(x).unwrap()).collect()
}

fn finite_factors(m: &FpModule<Integers>) -> Option<Vec<u64>> {
    (m.free_rank() == 0).then(|| as_u64(m.factors()))
}

/// Invariant factors of `sub / den` for subgroups of `Z/b` given as element lists.
fn subquotient_factors(b: u64, sub: &[u64], den: &[u64]) -> Vec<u64> {
    let order = (sub.len() / den.len()) as u64;
    factors_from_torsion_counts(order, |k| {
        (sub.iter().filter(|&&x| den.contains(&(k * x % b))).count() / den.len()) as u64
    })
}

fn criterion_2() -> Outcome {
    let d = Integers;
    let mut out = Outcome::new();
    for a in 1..=30u64 {
        for b in 1..=30u64 {
            let ma = FpModule::cyclic(&d, &int(a as i64));
            let mb = FpModule::cyclic(&d, &int(b as i64));
            // maps Z/a -> Z/b are x -> x*y with y = f(1) well defined
            let maps: Vec<u64> = (0..b)
                .filter(|&y| (1 % a) * y % b == y)
                .filter(|&y| (0..a).all(|x1| (0..a).all(|x2| ((x1 + x2) % a) * y % b == (x1 * y + x2 * y) % b)))
                .collect();
            let ker: Vec<u64> = (0..b).filter(|&x| a * x % b == 0).collect();
            let img: Vec<u64> = {
                let mut v: Vec<u64> = (0..b).map(|x| a * x % b).collect();
                v.sort();
                v.dedup();
                v
            };
            let all: Vec<u64> = (0..b).collect();
            let hom_oracle = subquotient_factors(b, &maps, &[0]);
            let tor_oracle = subquotient_factors(b, &ker, &[0]);
            let ext_oracle = subquotient_factors(b, &all, &img);

            let h = hom(&ma, &mb).map(|h| finite_factors(h.module()));
            out.check(h.as_ref().ok() == Some(&Some(hom_oracle.clone())), || {
                format!("Hom(Z/{a}, Z/{b}) = {h:?}, expected {hom_oracle:?}")
            });
            let t = eval(&FunctorSpec::Tor1(ma.clone()), &mb).map(|m| finite_factors(&m));
            out.check(t.as_ref().ok() == Some(&Some(tor_oracle.clone())), || {
                format!("Tor1(Z/{a}, Z/{b}) = {t:?}, expected {tor_oracle:?}")
            });
            let e = eval(&FunctorSpec::Ext1(ma.clone()), &mb).map(|m| finite_factors(&m));
            out.check(e.as_ref().ok() == Some(&Some(ext_oracle.clone())), || {
                format!("Ext1(Z/{a}, Z/{b}) = {e:?}, expected {ext_oracle:?}")
            });
        }
    }
    out.detail = "900 pairs".into();
    out
}

fn ass_primes<D: EuclideanDomain>(m: &FpModule<D>) -> Vec<D::Elem> {
    ass(m)
        .iter()
        .filter_map(|p| match p {
            PrimeIdeal::Prime(e) => Some(e.clone()),
            PrimeIdeal::Zero => None,
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(3);
    let mut count = 0;

    let d = Integers;
    let primes = int_primes(200);
    for chain in int_chains(200) {
        let residues: Vec<Vec<BigInt>> =
            chain.iter().map(|f| (0..i64::try_from(f).unwrap()).map(int).collect()).collect();
        let oracle = ass_by_enumeration(&d, &chain, &residues, &primes);
        let m = scrambled(&d, 0, &chain, &mut rng, small_int);
        let got = ass_primes(&m);
        out.check(got == oracle, || format!("Z-module {chain:?}: ass {got:?}, oracle {oracle:?}"));
        count += 1;
    }

    for p in [2u64, 3] {
        let d = PolyFp::new(p).unwrap();
        let mut max_deg = 0;
        while p.pow(max_deg + 1) <= 200 {
            max_deg += 1;
        }
        let primes = poly_primes(&d, max_deg as usize);
        for chain in poly_chains(&d, 200) {
            let residues: Vec<_> = chain.iter().map(|f| poly_residues(&d, f)).collect();
            let oracle = ass_by_enumeration(&d, &chain, &residues, &primes);
            let m = scrambled(&d, 0, &chain, &mut rng, small_poly(&d));
            let got = ass_primes(&m);
            out.check(got == oracle, || {
                format!(
                    "F_{p}[x]-module {:?}: ass differs from oracle",
                    chain.iter().map(|f| d.format_elem(f)).collect::<Vec<_>>()
                )
            });
            count += 1;
        }
    }
    out.detail = format!("{count} modules");
    out
}

fn check_stable(out: &mut Outcome, label: &str, s: &RunSummary, want_depth: bool) {
    out.check(s.ass.status == Status::Stable && s.ass.n0.is_some_and(|n| n <= 30), || {
        format!("{label}: ass {} n0 {:?}", s.ass.status, s.ass.n0)
    });
    if want_depth {
        match &s.depth {
            Some(dp) => out.check(dp.status == Status::Stable && dp.n0.is_some_and(|n| n <= 30), || {
                format!("{label}: depth {} n0 {:?}", dp.status, dp.n0)
            }),
            None => out.check(false, || format!("{label}: no depth scan")),
        }
    }
    out.check(s.horizon == 50 && s.window == 10, || format!("{label}: horizon {} window {}", s.horizon, s.window));
}

fn check_results(out: &mut Outcome, results: &[SuiteResult], want_depth: bool) {
    for r in results {
        match &r.outcome {
            Ok(s) => check_stable(out, &r.label, s, want_depth),
            Err(e) => out.check(false, || format!("{}: {e}", r.label)),
        }
    }
}

fn criterion_4(all: &mut Vec<SuiteResult>) -> Outcome {
    let mut out = Outcome::new();
    let scenarios = suite::brodmann();
    let backends: std::collections::BTreeSet<String> =
        scenarios.iter().map(|(_, s)| format!("{:?}", s.backend)).collect();
    out.check(scenarios.len() >= 12, || format!("only {} Brodmann scenarios", scenarios.len()));
    out.check(backends.len() >= 2, || "one backend only".into());
    let results: Vec<SuiteResult> = scenarios
        .iter()
        .map(|(n, sc)| {
            let ok = matches!(sc.functor, FunctorDef::Identity);
            let r = suite::run_one(n.to_string(), sc, Overrides::default());
            if !ok {
                return SuiteResult { label: format!("{n} (functor is not identity)"), outcome: r.outcome };
            }
            r
        })
        .collect();
    for r in &results {
        out.check(!r.label.contains("not identity"), || r.label.clone());
    }
    check_results(&mut out, &results, true);
    note_runs(&results);
    out.detail = format!("{} scenarios over {} backends", results.len(), backends.len());
    all.extend(results);
    out
}

fn criterion_5(all: &mut Vec<SuiteResult>) -> Outcome {
    let mut out = Outcome::new();
    let mut results = Vec::new();
    for (name, sc) in suite::brodmann() {
        for kind in suite::COHERENT_KINDS {
            let b = suite::battery(&sc, kind).expect("coherent battery applies everywhere");
            results.push(suite::run_one(format!("{name} x {kind}"), &b, Overrides::default()));
        }
    }
    check_results(&mut out, &results, true);
    note_runs(&results);
    out.detail = format!("{} runs", results.len());
    all.extend(results);
    out
}

/// `P ∩ S ≠ ∅` for the listed elements, or generators of a closure.
fn meets<D: EuclideanDomain>(d: &D, p: &PrimeIdeal<D::Elem>, s: &CmcSet<D::Elem>) -> bool {
    match s {
        CmcSet::Finite(items) | CmcSet::Closure(items) => items.iter().any(|x| p.contains(d, x)),
        CmcSet::Powers { .. } => unreachable!(),
    }
}

fn formulas_once<D: EuclideanDomain>(
    d: &D,
    out: &mut Outcome,
    t: usize,
    m: &FpModule<D>,
    i: &D::Elem,
    s: &CmcSet<D::Elem>,
) {
    let ideal = Ideal::new(d, i);
    let am = ass(m);
    let g = invariants::gamma(&ideal, m);
    note_module(m, &g.sub, "gamma");
    note_module(m, &g.quotient, "mod gamma");
    let ag = ass(&g.sub);
    let want = am.filter(|p| p.contains_ideal(d, &ideal));
    out.check(ag == want, || format!("triple {t}: ass(Γ_I M) = {:?}, want {:?}", ag.render(d), want.render(d)));
    let aq = ass(&g.quotient);
    let want = am.filter(|p| !p.contains_ideal(d, &ideal));
    out.check(aq == want, || format!("triple {t}: ass(M/Γ_I M) = {:?}, want {:?}", aq.render(d), want.render(d)));

    let tau = match invariants::tau(s, m) {
        Ok(x) => x,
        Err(e) => return out.check(false, || format!("triple {t}: τ_S failed: {e}")),
    };
    note_module(m, &tau.sub, "tau");
    note_module(m, &tau.quotient, "mod tau");
    let at = ass(&tau.sub);
    let want = am.filter(|p| meets(d, p, s));
    out.check(at == want, || format!("triple {t}: ass(τ_S M) = {:?}, want {:?}", at.render(d), want.render(d)));
    if invariants::is_multiplicatively_closed(d, s) {
        let aq = ass(&tau.quotient);
        let want = am.filter(|p| !meets(d, p, s));
        out.check(aq == want, || format!("triple {t}: ass(M/τ_S M) = {:?}, want {:?}", aq.render(d), want.render(d)));
    }
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(6);
    let mut closed = 0;
    for t in 0..300 {
        let free = rng.gen_range(0..=1);
        let k = rng.gen_range(0..=3);
        if t % 3 == 2 {
            let d = PolyFp::new(if t % 2 == 0 { 2 } else { 3 }).unwrap();
            let mut pick = small_poly(&d);
            let mut nonunit = |rng: &mut StdRng| loop {
                let a = pick(rng);
                let b = pick(rng);
                let x = d.canonical(&d.mul(&a, &b));
                if !d.is_zero(&x) && !d.is_unit(&x) {
                    return x;
                }
            };
            let mut chain = Vec::new();
            let mut acc = d.one();
            for _ in 0..k {
                acc = d.mul(&acc, &nonunit(&mut rng));
                chain.push(acc.clone());
            }
            let m = scrambled(&d, free, &chain, &mut rng, small_poly(&d));
            let i = nonunit(&mut rng);
            let s = if rng.gen_bool(0.5) {
                CmcSet::Closure(vec![nonunit(&mut rng)])
            } else {
                let a = nonunit(&mut rng);
                CmcSet::Finite(vec![a.clone(), d.mul(&a, &nonunit(&mut rng))])
            };
            closed += invariants::is_multiplicatively_closed(&d, &s) as usize;
            formulas_once(&d, &mut out, t, &m, &i, &s);
        } else {
            let d = Integers;
            let mut chain = Vec::new();
            let mut acc = int(1);
            for _ in 0..k {
                acc *= int(rng.gen_range(2..=6));
                chain.push(acc.clone());
            }
            let m = scrambled(&d, free, &chain, &mut rng, small_int);
            let i = int(rng.gen_range(0..=40));
            let s = if rng.gen_bool(0.5) {
                let n = rng.gen_range(1..=2);
                CmcSet::Closure((0..n).map(|_| int(rng.gen_range(2..=12))).collect())
            } else {
                let a = int(rng.gen_range(1..=12));
                let b = int(rng.gen_range(1..=4));
                CmcSet::Finite(vec![a.clone(), a * b])
            };
            closed += invariants::is_multiplicatively_closed(&d, &s) as usize;
            formulas_once(&d, &mut out, t, &m, &i, &s);
        }
    }

    // S = {2} is cmc but not multiplicatively closed
    let d = Integers;
    let s = CmcSet::Finite(vec![int(2)]);
    let m = FpModule::cyclic(&d, &int(4));
    let q = invariants::tau(&s, &m).map(|t| ass(&t.quotient).render(&d));
    out.check(q.as_ref().ok() == Some(&vec!["(2)".to_string()]), || format!("S = {{2}}, M = Z/4: ass(M/τ) = {q:?}"));
    out.check(!invariants::is_multiplicatively_closed(&d, &s), || "{2} reported multiplicatively closed".into());
    out.detail = format!("300 triples, {closed} with S multiplicatively closed");
    out
}

fn random_exponents(rng: &mut StdRng) -> ExponentSet {
    let listed = ExponentSet::finite((1..=6).filter(|_| rng.gen_bool(0.4)));
    if rng.gen_bool(0.5) {
        listed.union(ExponentSet::progression(rng.gen_range(1..=4), rng.gen_range(1..=3)))
    } else {
        listed
    }
}

fn random_skeleton<D: EuclideanDomain>(d: &D, primes: &[D::Elem], rng: &mut StdRng) -> SkeletonObject<D::Elem> {
    let n = rng.gen_range(1..=4);
    let mut parts: Vec<(D::Elem, u32)> =
        (0..n).map(|_| (primes[rng.gen_range(0..primes.len())].clone(), rng.gen_range(1..=4))).collect();
    parts.sort();
    SkeletonObject::new(d, parts).expect("sorted prime powers")
}

/// A random map between skeleton objects: entry `(a, b)` is a multiple of
/// `q_a / gcd(q_a, q_b)`, and zero across distinct primes.
fn random_skeleton_map<D: EuclideanDomain>(
    d: &D,
    src: &SkeletonObject<D::Elem>,
    dst: &SkeletonObject<D::Elem>,
    rng: &mut StdRng,
    mut pick: impl FnMut(&mut StdRng) -> D::Elem,
) -> DMat<D> {
    DMat::<D>::from_fn(dst.len(), src.len(), |a, b| {
        let (pa, ea) = &dst.parts()[a];
        let (pb, eb) = &src.parts()[b];
        if pa != pb {
            return d.zero();
        }
        let qa = d.pow(pa, *ea);
        let qb = d.pow(pb, *eb);
        let step = d.exact_div(&qa, &d.gcd(&qa, &qb)).unwrap();
        d.mul(&step, &pick(rng))
    })
}

fn osc_laws<D: EuclideanDomain>(
    d: &D,
    out: &mut Outcome,
    primes: &[D::Elem],
    rng: &mut StdRng,
    mut pick: impl FnMut(&mut StdRng) -> D::Elem,
) -> usize {
    let mut pairs = 0;
    for p in primes {
        for _ in 0..200 {
            let f = OscillatingFunctor::new(d, [(p.clone(), random_exponents(rng))]).unwrap();
            let only = std::slice::from_ref(p);
            let (a, b, c) =
                (random_skeleton(d, only, rng), random_skeleton(d, only, rng), random_skeleton(d, only, rng));
            let g = random_skeleton_map(d, &a, &b, rng, &mut pick);
            let h = random_skeleton_map(d, &b, &c, rng, &mut pick);
            let hg = matnf::mul(d, &h, &g);
            let fg = osc_eval_mor(&f, &a, &b, &g);
            let fh = osc_eval_mor(&f, &b, &c, &h);
            let fhg = osc_eval_mor(&f, &a, &c, &hg);
            let label = || {
                format!(
                    "prime {}: {:?} -> {:?} -> {:?}",
                    d.format_elem(p),
                    a.parts().len(),
                    b.parts().len(),
                    c.parts().len()
                )
            };
            match (fg, fh, fhg) {
                (Ok(fg), Ok(fh), Ok(fhg)) => {
                    let comp = fh.compose(&fg).unwrap();
                    out.check(comp.same_as(&fhg), || format!("composition fails for {}", label()));
                }
                other => out.check(false, || format!("{}: {:?}", label(), other.0.err())),
            }
            let id = matnf::identity(d, a.len());
            let fid = osc_eval_mor(&f, &a, &a, &id).unwrap();
            out.check(fid.same_as(&Morphism::identity(fid.source())), || format!("identity fails for {}", label()));
            let fa = osc_eval_obj(&f, &a);
            note_module(&a.module(d), &fa, "oscillating");
            pairs += 1;
        }
    }
    pairs
}

fn criterion_7(all: &mut Vec<SuiteResult>) -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(7);
    let d = Integers;
    let mut pairs = osc_laws(&d, &mut out, &[int(2), int(3), int(5)], &mut rng, small_int);
    let f2 = PolyFp::new(2).unwrap();
    pairs +=
        osc_laws(&f2, &mut out, &[f2.poly(&[0, 1]), f2.poly(&[1, 1]), f2.poly(&[1, 1, 1])], &mut rng, small_poly(&f2));

    // the block rule: Z/2 + Z/4 -> itself by [[1, 1], [2, 1]] keeps only the diagonal
    let f = OscillatingFunctor::new(&d, [(int(2), ExponentSet::finite([1, 2]))]).unwrap();
    let obj = SkeletonObject::new(&d, vec![(int(2), 1), (int(2), 2)]).unwrap();
    let g = matnf::from_i64(&d, &[vec![1, 1], vec![2, 1]]);
    let fg = osc_eval_mor(&f, &obj, &obj, &g).unwrap();
    out.check(fg.same_as(&Morphism::identity(fg.source())), || "block rule instance".into());

    for (name, prime, set, status) in [
        ("oscillating_even", 2, ExponentSet::even(), Status::OscillatingWithPeriod { period: 2 }),
        ("oscillating_period3", 3, ExponentSet::progression(3, 3), Status::OscillatingWithPeriod { period: 3 }),
        ("oscillating_finite", 2, ExponentSet::finite([1, 2, 3]), Status::Stable),
    ] {
        let sc = stab_core::scenario::Scenario::parse(suite::text(name).unwrap()).unwrap();
        let r = suite::run_one(name.to_string(), &sc, Overrides::default());
        let s = match &r.outcome {
            Ok(s) => s,
            Err(e) => {
                out.check(false, || format!("{name}: {e}"));
                continue;
            }
        };
        out.check(s.horizon == 40, || format!("{name}: horizon {}", s.horizon));
        out.check(s.ass.status == status, || format!("{name}: status {}", s.ass.status));
        for (i, v) in s.ass.values.iter().enumerate() {
            let n = s.start + i as u32;
            let want: Vec<String> = if set.contains(n) { vec![format!("({prime})")] } else { vec![] };
            out.check(*v == want, || format!("{name}: n = {n} gives {v:?}, prescribed {want:?}"));
        }
        out.check(s.start + s.ass.values.len() as u32 - 1 == 40, || format!("{name}: scan stops early"));
        note_ann(s.ann_monotone, || name.to_string());
        all.push(r);
    }
    out.detail = format!("{pairs} morphism pairs");
    out
}

fn gamma_agreement<D: EuclideanDomain>(d: &D, out: &mut Outcome, chains: &[Vec<D::Elem>], gs: &[D::Elem]) -> usize {
    let mut n = 0;
    for g in gs {
        let sigma = MiddleFiniteComplex::local_cohomology(d, g).unwrap();
        let ideal = Ideal::new(d, g);
        for chain in chains {
            let m = FpModule::from_invariants(d, 0, chain);
            let got = middle_finite_eval(&sigma, &m);
            let want = invariants::gamma(&ideal, &m).sub;
            match got {
                Ok(v) => {
                    note_module(&m, &v, "middle finite");
                    out.check(v.is_isomorphic(&want), || {
                        format!(
                            "g = {}, M = {:?}",
                            d.format_elem(g),
                            chain.iter().map(|c| d.format_elem(c)).collect::<Vec<_>>()
                        )
                    })
                }
                Err(e) => out.check(false, || format!("g = {}: {e}", d.format_elem(g))),
            }
            n += 1;
        }
    }
    n
}

fn criterion_8(all: &mut Vec<SuiteResult>) -> Outcome {
    let mut out = Outcome::new();
    let d = Integers;
    let gs: Vec<BigInt> = [2, 3, 4, 5, 6, 10, 12, 30].into_iter().map(int).collect();
    let mut n = gamma_agreement(&d, &mut out, &int_chains(200), &gs);
    for p in [2u64, 3] {
        let f = PolyFp::new(p).unwrap();
        let gs = [f.poly(&[0, 1]), f.poly(&[1, 1]), f.poly(&[0, 1, 1])];
        n += gamma_agreement(&f, &mut out, &poly_chains(&f, 200), &gs);
    }
    let results: Vec<SuiteResult> = suite::middle_finite()
        .iter()
        .map(|(name, sc)| {
            out.check(sc.backend == Backend::Integers, || format!("{name}: not over the integers"));
            suite::run_one(name.to_string(), sc, Overrides::default())
        })
        .collect();
    out.check(!results.is_empty(), || "no middle-finite scenarios".into());
    for r in &results {
        match &r.outcome {
            Ok(s) => check_stable(&mut out, &r.label, s, false),
            Err(e) => out.check(false, || format!("{}: {e}", r.label)),
        }
    }
    note_runs(&results);
    out.detail = format!("{n} evaluations, {} scenarios", results.len());
    all.extend(results);
    out
}

fn criterion_9(all: &[SuiteResult]) -> Outcome {
    let mut out = Outcome::new();
    let d = Integers;
    let r = FpModule::free(&d, 1);
    let beta = Morphism::new(&r, &r, matnf::from_i64(&d, &[vec![4]])).unwrap();
    let got = artin_rees_probe(&beta, &matnf::identity(&d, 1), &Ideal::new(&d, &int(2)), 50);
    out.check(matches!(got, Ok(Some(2))), || format!("(·4, I = (2)) gives {got:?}"));
    let mut worst = 0;
    for r in all {
        match &r.outcome {
            Ok(s) => match s.artin_rees {
                Some(dd) => {
                    worst = worst.max(dd);
                    out.check(dd <= 10, || format!("{}: d = {dd}", r.label));
                }
                None => out.check(false, || format!("{}: no exponent within horizon", r.label)),
            },
            Err(e) => out.check(false, || format!("{}: {e}", r.label)),
        }
    }
    out.detail = format!("{} scenarios, largest d = {worst}", all.len());
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new();
    ANN.with(|a| {
        let a = a.borrow();
        out.check(a.checked > 0, || "nothing was checked".into());
        for f in &a.failures {
            out.check(false, || f.clone());
        }
        out.detail = format!("{} checks", a.checked);
    });
    out
}

fn timed(f: impl FnOnce() -> Outcome) -> (Duration, Outcome) {
    let t = Instant::now();
    let o = f();
    (t.elapsed(), o)
}

fn main() {
    let mut all = Vec::new();
    let mut pass = true;

    let (t, mut o) = timed(criterion_1);
    o.check(t < Duration::from_secs(30), || format!("took {t:?}"));
    pass &= report(1, "normal forms", t, o);
    let (t, o) = timed(criterion_2);
    pass &= report(2, "hom/tor/ext oracle", t, o);
    let (t, o) = timed(criterion_3);
    pass &= report(3, "ass oracle", t, o);
    let (t, mut o) = timed(|| criterion_4(&mut all));
    o.check(t < Duration::from_secs(60), || format!("took {t:?}"));
    pass &= report(4, "brodmann suite", t, o);
    let (t, o) = timed(|| criterion_5(&mut all));
    pass &= report(5, "coherent functor suite", t, o);
    let (t, o) = timed(criterion_6);
    pass &= report(6, "torsion formulas", t, o);
    let (t, o) = timed(|| criterion_7(&mut all));
    pass &= report(7, "oscillating functor", t, o);
    let (t, o) = timed(|| criterion_8(&mut all));
    pass &= report(8, "middle-finite agreement", t, o);
    let (t, o) = timed(|| criterion_9(&all));
    pass &= report(9, "artin-rees probe", t, o);
    let (t, o) = timed(criterion_10);
    pass &= report(10, "annihilator monotonicity", t, o);

    if !pass {
        std::process::exit(1);
    }
}
