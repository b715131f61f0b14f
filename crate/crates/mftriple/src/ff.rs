//! Exact arithmetic in F_p, F_{p^2} and F_{p^4} towers, plus multiplicative
//! and additive characters.
//!
//! Elements are encoded as polynomial coefficients over F_p packed base-p
//! into a single integer (index 0 is the zero element). Each extension step
//! is quadratic: F_{q^2} = F_q[X]/(X^2 - eta) where eta is the chosen
//! generator of F_q^* (a non-square since q is odd), so for an element
//! `z = a + b*i` the index is `a + q*b` and the embedded base field occupies
//! exactly the indices below q.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    NotOddPrime(u32),
    BadDegree(u32),
    Oversize(u64),
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldError::NotOddPrime(p) => write!(f, "p = {p} is not an odd prime"),
            FieldError::BadDegree(d) => write!(f, "degree {d} not in {{1, 2, 4}}"),
            FieldError::Oversize(q) => write!(f, "field order {q} exceeds 10^5"),
        }
    }
}

impl std::error::Error for FieldError {}

fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// JSON descriptor for a field.
#[derive(Debug, Clone, Serialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub d: u32,
    pub gen: u32,
}

/// An exact model of F_{p^d} with exp/log tables and a deterministic
/// generator (the smallest canonical index whose multiplicative order is
/// exactly q-1).
#[derive(Debug, Clone)]
pub struct FieldTable {
    pub p: u32,
    pub d: u32,
    pub q: u32,
    pub gen: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    base: Option<Box<FieldTable>>,
}

impl FieldTable {
    pub fn build(p: u32, d: u32) -> Result<FieldTable, FieldError> {
        if !is_odd_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if !matches!(d, 1 | 2 | 4) {
            return Err(FieldError::BadDegree(d));
        }
        let q = (p as u64).pow(d);
        if q > 100_000 {
            return Err(FieldError::Oversize(q));
        }
        let base = match d {
            1 => None,
            2 => Some(Box::new(FieldTable::build(p, 1)?)),
            4 => Some(Box::new(FieldTable::build(p, 2)?)),
            _ => unreachable!(),
        };
        let q = q as u32;
        let mut table = FieldTable { p, d, q, gen: 0, exp: Vec::new(), log: Vec::new(), base };
        // Deterministic generator: smallest index of multiplicative order q-1.
        let mut gen = 0;
        'search: for x in 1..q {
            let mut y = x;
            let mut ord = 1u32;
            while y != 1 {
                y = table.tower_mul(y, x);
                ord += 1;
                if ord > q - 1 {
                    break;
                }
            }
            if ord == q - 1 {
                gen = x;
                break 'search;
            }
        }
        assert!(gen != 0, "no generator found (field construction is broken)");
        table.gen = gen;
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut y = 1u32;
        for (m, e) in exp.iter_mut().enumerate() {
            *e = y;
            log[y as usize] = m as u32;
            y = table.tower_mul(y, gen);
        }
        assert_eq!(y, 1, "generator order mismatch");
        table.exp = exp;
        table.log = log;
        Ok(table)
    }

    pub fn base(&self) -> Option<&FieldTable> {
        self.base.as_deref()
    }

    /// Slow structural multiplication used while tables are under
    /// construction (and by nothing else).
    fn tower_mul(&self, x: u32, y: u32) -> u32 {
        match &self.base {
            None => (x as u64 * y as u64 % self.p as u64) as u32,
            Some(b) => {
                let qb = b.q;
                let (a, bb) = (x % qb, x / qb);
                let (c, dd) = (y % qb, y / qb);
                let eta = b.gen;
                let lo = b.add(b.mul(a, c), b.mul(eta, b.mul(bb, dd)));
                let hi = b.add(b.mul(a, dd), b.mul(bb, c));
                lo + qb * hi
            }
        }
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        match &self.base {
            None => {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            }
            Some(b) => {
                let qb = b.q;
                b.add(x % qb, y % qb) + qb * b.add(x / qb, y / qb)
            }
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        match &self.base {
            None => {
                if x == 0 {
                    0
                } else {
                    self.p - x
                }
            }
            Some(b) => {
                let qb = b.q;
                b.neg(x % qb) + qb * b.neg(x / qb)
            }
        }
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let m = self.log[x as usize] as u64 + self.log[y as usize] as u64;
        self.exp[(m % (self.q as u64 - 1)) as usize]
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        assert!(x != 0, "inverse of zero");
        let m = self.log[x as usize];
        self.exp[((self.q - 1 - m) % (self.q - 1)) as usize]
    }

    pub fn pow(&self, x: u32, e: i64) -> u32 {
        if x == 0 {
            assert!(e > 0, "0 raised to a non-positive power");
            return 0;
        }
        let n = (self.q - 1) as i64;
        let m = (self.log[x as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        self.exp[m as usize]
    }

    /// g^m for the chosen generator g.
    #[inline]
    pub fn exp_gen(&self, m: u32) -> u32 {
        self.exp[(m % (self.q - 1)) as usize]
    }

    /// Discrete log with respect to the chosen generator; x must be nonzero.
    #[inline]
    pub fn log_gen(&self, x: u32) -> u32 {
        assert!(x != 0, "log of zero");
        self.log[x as usize]
    }

    pub fn frobenius_p(&self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.pow(x, self.p as i64)
        }
    }

    /// Absolute trace down to the prime field; the result is the canonical
    /// index of an element of F_p (all of which sit below p).
    pub fn abs_trace(&self, x: u32) -> u32 {
        let mut acc = 0u32;
        let mut y = x;
        for _ in 0..self.d {
            acc = self.add(acc, y);
            y = self.frobenius_p(y);
        }
        debug_assert!(acc < self.p, "trace landed outside the prime subfield");
        acc
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q
    }

    pub fn units(&self) -> std::ops::Range<u32> {
        1..self.q
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { p: self.p, d: self.d, gen: self.gen }
    }
}

/// Convenience wrapper for `FieldTable::build`.
pub fn build_field(p: u32, d: u32) -> Result<FieldTable, FieldError> {
    FieldTable::build(p, d)
}

/// Splits a supported odd prime power q = p^d (d in {1, 2}).
pub fn split_prime_power(q: u32) -> Result<(u32, u32), FieldError> {
    for p in [3u32, 5, 7, 11, 13, 17] {
        if q == p {
            return Ok((p, 1));
        }
        if q == p * p {
            return Ok((p, 2));
        }
    }
    Err(FieldError::NotOddPrime(q))
}

/// Quadratic extension of an already-built field (construction is
/// deterministic, so the embedded base coincides with the argument).
pub fn quadratic_extension(base: &FieldTable) -> Result<ExtensionTable, FieldError> {
    let ext = ExtensionTable::build(base.p, base.d)?;
    debug_assert_eq!(ext.base().gen, base.gen);
    debug_assert_eq!(ext.base().q, base.q);
    Ok(ext)
}

/// A quadratic extension F_{q^2} = F_q[X]/(X^2 - eta) together with the
/// conjugation z -> z^q, the norm and the relative trace.
#[derive(Debug, Clone)]
pub struct ExtensionTable {
    ext: FieldTable,
}

impl ExtensionTable {
    /// Builds the quadratic extension of F_{p^d_base}, d_base in {1, 2}.
    pub fn build(p: u32, d_base: u32) -> Result<ExtensionTable, FieldError> {
        if !matches!(d_base, 1 | 2) {
            return Err(FieldError::BadDegree(d_base));
        }
        let ext = FieldTable::build(p, 2 * d_base)?;
        let t = ExtensionTable { ext };
        // eta is a generator of a group of even order, hence a non-square.
        let eta = t.base().gen;
        assert_eq!(t.mul_ext(t.i_elem(), t.i_elem()), t.embed(eta), "i^2 != eta");
        Ok(t)
    }

    /// Wraps an already-built field of even degree.
    pub fn from_ext(ext: FieldTable) -> ExtensionTable {
        assert!(ext.base().is_some(), "extension requires a tower field");
        ExtensionTable { ext }
    }

    pub fn ext(&self) -> &FieldTable {
        &self.ext
    }

    pub fn base(&self) -> &FieldTable {
        self.ext.base().expect("tower field")
    }

    /// The adjoined square root of eta; its index equals q (the element
    /// 0 + 1*X).
    pub fn i_elem(&self) -> u32 {
        self.base().q
    }

    /// The injection F_q -> F_{q^2} is the identity on indices.
    #[inline]
    pub fn embed(&self, x: u32) -> u32 {
        debug_assert!(x < self.base().q);
        x
    }

    #[inline]
    pub fn in_base(&self, z: u32) -> bool {
        z < self.base().q
    }

    /// Coordinates (a, b) of z = a + b*i.
    #[inline]
    pub fn coords(&self, z: u32) -> (u32, u32) {
        let qb = self.base().q;
        (z % qb, z / qb)
    }

    #[inline]
    pub fn from_coords(&self, a: u32, b: u32) -> u32 {
        a + self.base().q * b
    }

    /// Conjugation z -> z^q; on coordinates (a, b) -> (a, -b).
    #[inline]
    pub fn conj(&self, z: u32) -> u32 {
        let (a, b) = self.coords(z);
        self.from_coords(a, self.base().neg(b))
    }

    #[inline]
    pub fn mul_ext(&self, x: u32, y: u32) -> u32 {
        self.ext.mul(x, y)
    }

    /// Norm z * conj(z), landing in the embedded base field.
    pub fn norm(&self, z: u32) -> u32 {
        let n = self.ext.mul(z, self.conj(z));
        debug_assert!(self.in_base(n));
        n
    }

    /// Relative trace z + conj(z), landing in the embedded base field.
    pub fn rel_trace(&self, z: u32) -> u32 {
        let t = self.ext.add(z, self.conj(z));
        debug_assert!(self.in_base(t));
        t
    }
}

/// JSON descriptor for a character.
#[derive(Debug, Clone, Serialize)]
pub struct CharDescriptor {
    pub p: u32,
    pub d: u32,
    pub gen: u32,
    pub char_kind: &'static str,
    pub index: u32,
}

/// A multiplicative character nu_k of F_q^*, with
/// `nu_k(g^m) = exp(2 pi i k m / (q-1))` for the chosen generator g.
#[derive(Debug, Clone)]
pub struct MultChar {
    pub p: u32,
    pub d: u32,
    pub q: u32,
    pub k: u32,
    values: Vec<Complex64>,
}

impl MultChar {
    pub fn new(field: &FieldTable, k: u32) -> MultChar {
        assert!(k < field.q - 1, "character index {} out of range", k);
        let q = field.q;
        let n = (q - 1) as u64;
        let mut values = vec![Complex64::new(f64::NAN, f64::NAN); q as usize];
        for m in 0..n {
            let angle = TAU * ((k as u64 * m) % n) as f64 / n as f64;
            values[field.exp_gen(m as u32) as usize] = Complex64::from_polar(1.0, angle);
        }
        MultChar { p: field.p, d: field.d, q, k, values }
    }

    #[inline]
    pub fn eval(&self, x: u32) -> Complex64 {
        assert!(x != 0, "multiplicative character evaluated at zero");
        self.values[x as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0
    }

    /// The conjugate character `bar(nu)(z) = nu(conj z)`; for a quadratic
    /// extension of F_q this is nu_{k*q mod (q^2-1)}.
    pub fn bar(&self, ext: &ExtensionTable) -> MultChar {
        assert_eq!(self.q, ext.ext().q);
        let n = (self.q - 1) as u64;
        let kbar = ((self.k as u64 * ext.base().q as u64) % n) as u32;
        MultChar::new(ext.ext(), kbar)
    }

    /// Restriction to the embedded base field.
    pub fn sharp(&self, ext: &ExtensionTable) -> MultChar {
        assert_eq!(self.q, ext.ext().q);
        let base = ext.base();
        let big_n = (self.q - 1) as u64;
        let small_n = (base.q - 1) as u64;
        let m = ext.ext().log_gen(ext.embed(base.gen)) as u64;
        let prod = (self.k as u64 * m) % big_n;
        debug_assert_eq!(prod * small_n % big_n, 0);
        let k_sharp = (prod * small_n / big_n % small_n) as u32;
        MultChar::new(base, k_sharp)
    }

    /// A character of F_{q^2}^* is indecomposable when it differs from its
    /// conjugate, i.e. it is not a norm pullback.
    pub fn indecomposable(&self, ext: &ExtensionTable) -> bool {
        self.k != self.bar(ext).k
    }

    pub fn descriptor(&self) -> CharDescriptor {
        CharDescriptor { p: self.p, d: self.d, gen: 0, char_kind: "mult", index: self.k }
    }
}

/// Predicates and companions of a character of a quadratic extension.
pub struct CharPredicates {
    pub indecomposable: bool,
    pub sharp: MultChar,
    pub bar: MultChar,
}

pub fn char_predicates(nu: &MultChar, ext: &ExtensionTable) -> CharPredicates {
    CharPredicates {
        indecomposable: nu.indecomposable(ext),
        sharp: nu.sharp(ext),
        bar: nu.bar(ext),
    }
}

/// An additive character. The trace form is
/// `chi_a(x) = exp(2 pi i Tr(a x) / p)`; the lift of chi from F_q to
/// F_{q^2} evaluates chi on the first coordinate.
#[derive(Debug, Clone)]
pub struct AddChar {
    pub p: u32,
    pub d: u32,
    pub q: u32,
    pub a: u32,
    values: Vec<Complex64>,
}

impl AddChar {
    pub fn new(field: &FieldTable, a: u32) -> AddChar {
        let mut values = vec![Complex64::new(0.0, 0.0); field.q as usize];
        for x in field.elements() {
            let t = field.abs_trace(field.mul(a, x));
            let angle = TAU * t as f64 / field.p as f64;
            values[x as usize] = Complex64::from_polar(1.0, angle);
        }
        AddChar { p: field.p, d: field.d, q: field.q, a, values }
    }

    /// chi~(x + i y) = chi(x) on the quadratic extension.
    pub fn lift(chi: &AddChar, ext: &ExtensionTable) -> AddChar {
        assert_eq!(chi.q, ext.base().q);
        let extf = ext.ext();
        let mut values = vec![Complex64::new(0.0, 0.0); extf.q as usize];
        for z in extf.elements() {
            let (x, _) = ext.coords(z);
            values[z as usize] = chi.values[x as usize];
        }
        AddChar { p: extf.p, d: extf.d, q: extf.q, a: chi.a, values }
    }

    #[inline]
    pub fn eval(&self, x: u32) -> Complex64 {
        self.values[x as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.a == 0
    }

    pub fn descriptor(&self) -> CharDescriptor {
        CharDescriptor { p: self.p, d: self.d, gen: 0, char_kind: "add", index: self.a }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    /// Brute-force multiplicative order, independent of the exp/log tables.
    fn naive_order(f: &FieldTable, x: u32) -> u32 {
        let mut y = x;
        let mut ord = 1;
        while y != 1 {
            y = f.tower_mul(y, x);
            ord += 1;
        }
        ord
    }

    #[test]
    fn prime_field_f3() {
        let f = build_field(3, 1).unwrap();
        assert_eq!(f.q, 3);
        assert_eq!(f.elements().collect::<Vec<_>>(), vec![0, 1, 2]);
        // Brute-force order check over both candidates.
        assert_eq!(naive_order(&f, 1), 1);
        assert_eq!(naive_order(&f, 2), 2);
        assert_eq!(f.gen, 2);
    }

    #[test]
    fn f9_generator_order() {
        let f = build_field(3, 2).unwrap();
        assert_eq!(f.q, 9);
        assert_eq!(naive_order(&f, f.gen), 8);
        // Every smaller index has smaller order.
        for x in 1..f.gen {
            assert!(naive_order(&f, x) < 8);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_field(2, 1), Err(FieldError::NotOddPrime(2))));
        assert!(matches!(build_field(9, 1), Err(FieldError::NotOddPrime(9))));
        assert!(matches!(build_field(3, 3), Err(FieldError::BadDegree(3))));
        assert!(matches!(build_field(23, 4), Err(FieldError::Oversize(_))));
    }

    fn check_axioms_exhaustive(f: &FieldTable) {
        let q = f.q;
        for x in 0..q {
            assert_eq!(f.add(x, 0), x);
            assert_eq!(f.mul(x, 1), x);
            assert_eq!(f.add(x, f.neg(x)), 0);
            if x != 0 {
                assert_eq!(f.mul(x, f.inv(x)), 1);
            }
            for y in 0..q {
                assert_eq!(f.add(x, y), f.add(y, x));
                assert_eq!(f.mul(x, y), f.mul(y, x));
                for z in 0..q {
                    assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                    assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                    assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        for (p, d) in [(3, 1), (3, 2), (5, 2), (7, 2), (3, 4)] {
            let f = build_field(p, d).unwrap();
            assert!(f.q <= 81);
            check_axioms_exhaustive(&f);
        }
    }

    #[test]
    fn conj_is_involutive_and_fixes_base() {
        for (p, d) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let ext = ExtensionTable::build(p, d).unwrap();
            assert!(ext.ext().q <= 81 * 81);
            for z in ext.ext().elements() {
                assert_eq!(ext.conj(ext.conj(z)), z);
                assert_eq!(ext.conj(z) == z, ext.in_base(z));
            }
        }
    }

    #[test]
    fn conj_of_i_is_minus_i() {
        let ext = ExtensionTable::build(3, 1).unwrap();
        let i = ext.i_elem();
        assert_eq!(ext.conj(i), ext.ext().neg(i));
    }

    #[test]
    fn norm_and_trace_formulas() {
        for p in [3, 5, 7] {
            let ext = ExtensionTable::build(p, 1).unwrap();
            let base = ext.base().clone();
            let eta = base.gen;
            for a in base.elements() {
                for b in base.elements() {
                    let z = ext.from_coords(a, b);
                    if z == 0 {
                        continue;
                    }
                    // norm(a + ib) = a^2 - eta b^2
                    let expect =
                        base.sub(base.mul(a, a), base.mul(eta, base.mul(b, b)));
                    assert_eq!(ext.norm(z), ext.embed(expect));
                    // trace(a + ib) = 2a
                    assert_eq!(ext.rel_trace(z), ext.embed(base.add(a, a)));
                }
            }
        }
    }

    #[test]
    fn norm_is_surjective_with_even_fibers() {
        for (p, d) in [(3, 1), (3, 2)] {
            let ext = ExtensionTable::build(p, d).unwrap();
            let qb = ext.base().q;
            let mut fiber = vec![0u32; qb as usize];
            for z in ext.ext().units() {
                fiber[ext.norm(z) as usize] += 1;
            }
            assert_eq!(fiber[0], 0);
            for x in 1..qb {
                assert_eq!(fiber[x as usize], qb + 1);
            }
        }
    }

    #[test]
    fn mult_char_basics() {
        let f = build_field(9 / 3, 2).unwrap();
        // k = 0 is trivial.
        let triv = MultChar::new(&f, 0);
        for x in f.units() {
            assert!(tol::close(triv.eval(x), Complex64::new(1.0, 0.0), 1e-12));
        }
        // nu_k(x) nu_k(x^-1) = 1.
        for k in 0..f.q - 1 {
            let nu = MultChar::new(&f, k);
            for x in f.units() {
                assert!(tol::close(nu.eval(x) * nu.eval(f.inv(x)), Complex64::new(1.0, 0.0), 1e-12));
            }
        }
        // q = 9, k = 1: nu(gen^4) = -1.
        let nu = MultChar::new(&f, 1);
        assert!(tol::close(nu.eval(f.exp_gen(4)), Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn mult_char_orthogonality() {
        for (p, d) in [(3, 1), (3, 2), (5, 1), (7, 1)] {
            let f = build_field(p, d).unwrap();
            for k in 0..f.q - 1 {
                for l in 0..f.q - 1 {
                    let nk = MultChar::new(&f, k);
                    let nl = MultChar::new(&f, l);
                    let s: Complex64 =
                        f.units().map(|x| nk.eval(x) * nl.eval(x).conj()).sum();
                    let expect = if k == l { (f.q - 1) as f64 } else { 0.0 };
                    assert!(
                        tol::close(s / (f.q - 1) as f64, Complex64::new(expect / (f.q - 1) as f64, 0.0), 1e-10),
                        "orthogonality failed at q={} k={} l={}",
                        f.q,
                        k,
                        l
                    );
                }
            }
        }
    }

    #[test]
    fn add_char_basics() {
        let f = build_field(3, 1).unwrap();
        let chi = AddChar::new(&f, 1);
        assert!(tol::close(chi.eval(0), Complex64::new(1.0, 0.0), 1e-12));
        let s: Complex64 = f.elements().map(|x| chi.eval(x)).sum();
        assert!(s.norm() < 1e-12, "character sum over F_3 must vanish");
        // Homomorphism chi(x + y) = chi(x) chi(y) on every field we build.
        for (p, d) in [(3, 2), (5, 1), (3, 4)] {
            let g = build_field(p, d).unwrap();
            for a in [1u32, 2u32] {
                let ch = AddChar::new(&g, a);
                for x in g.elements() {
                    for y in g.elements() {
                        assert!(tol::close(ch.eval(g.add(x, y)), ch.eval(x) * ch.eval(y), 1e-10));
                    }
                }
            }
        }
    }

    #[test]
    fn lifted_char_kills_the_i_axis() {
        let ext = ExtensionTable::build(3, 1).unwrap();
        let chi = AddChar::new(ext.base(), 1);
        let lifted = AddChar::lift(&chi, &ext);
        for y in ext.base().elements() {
            let iy = ext.from_coords(0, y);
            assert!(tol::close(lifted.eval(iy), Complex64::new(1.0, 0.0), 1e-12));
        }
        // Nontrivial overall.
        assert!((0..ext.ext().q).any(|z| (lifted.eval(z) - Complex64::new(1.0, 0.0)).norm() > 0.1));
    }

    #[test]
    fn predicates_and_indecomposable_count() {
        let ext = ExtensionTable::build(3, 1).unwrap();
        let f9 = ext.ext();
        let triv = MultChar::new(f9, 0);
        assert!(!char_predicates(&triv, &ext).indecomposable);
        let mut count = 0;
        let i = ext.i_elem();
        let mi = f9.neg(i);
        for k in 0..8 {
            let nu = MultChar::new(f9, k);
            let preds = char_predicates(&nu, &ext);
            if preds.indecomposable {
                count += 1;
            }
            // Witness at i: nu(i) != nu(-i) forces indecomposability.
            if (nu.eval(i) - nu.eval(mi)).norm() > 1e-9 {
                assert!(preds.indecomposable);
            }
            // bar acts by conjugating the argument.
            for z in f9.units() {
                assert!(tol::close(preds.bar.eval(z), nu.eval(ext.conj(z)), 1e-12));
            }
            // sharp is the restriction.
            for x in ext.base().units() {
                assert!(tol::close(preds.sharp.eval(x), nu.eval(ext.embed(x)), 1e-12));
            }
        }
        assert_eq!(count, 6, "exactly q^2 - 1 - (q - 1) = 6 indecomposable characters at q = 3");
    }

    #[test]
    fn tower_f81_over_f9() {
        let f81 = build_field(3, 4).unwrap();
        let ext = ExtensionTable::from_ext(f81);
        assert_eq!(ext.base().q, 9);
        assert_eq!(ext.ext().q, 81);
        // i^2 = eta (the F_9 generator).
        let i = ext.i_elem();
        assert_eq!(ext.mul_ext(i, i), ext.embed(ext.base().gen));
    }

    mod prop {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn f625_axioms_sampled(x in 0u32..625, y in 0u32..625, z in 0u32..625) {
                let f = build_field(5, 4).unwrap();
                prop_assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                prop_assert_eq!(f.mul(x, y), f.mul(y, x));
            }

            #[test]
            fn mult_char_homomorphism_sampled(k in 0u32..24, x in 1u32..25, y in 1u32..25) {
                let f = build_field(5, 2).unwrap();
                let nu = MultChar::new(&f, k);
                let lhs = nu.eval(f.mul(x, y));
                let rhs = nu.eval(x) * nu.eval(y);
                prop_assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }
}
