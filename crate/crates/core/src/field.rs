//! Arithmetic in `F_q = F_{p^l}`.
//!
//! Elements are integer indices in `[0, q)`: the base-`p` digits of the index
//! are the coefficients of the residue polynomial, lowest degree first. The
//! prime subfield `F_p` is therefore the indices `0..p`.
//!
//! Multiplication uses log/antilog tables when `q <= 2^16` and schoolbook
//! reduction modulo the defining polynomial otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A field element, encoded as its index in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const TABLE_LIMIT: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u32 = 256;

/// The field `F_{p^l}` with an explicit monic irreducible modulus.
#[derive(Clone, Debug)]
pub struct Field {
    p: u32,
    l: u32,
    q: u32,
    /// Monic modulus, lowest-degree coefficient first, length `l + 1`.
    modulus: Vec<u32>,
    add_table: Option<Vec<u32>>,
    /// `log[a]` for `a != 0`; `exp` has length `2(q-1)` so sums of logs need no reduction.
    log: Vec<u32>,
    exp: Vec<u32>,
    trace_table: Vec<u32>,
    roots: Vec<Complex64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.l == other.l && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Dense polynomials over `F_p`, lowest degree first, used for the modulus checks.
mod fp_poly {
    use super::pow_mod;
    use alloc::vec::Vec;

    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo the nonzero polynomial `b`.
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let p64 = p as u64;
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = pow_mod(b[db] as u64, p64 - 2, p64);
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let c = r[r.len() - 1] as u64 * lead_inv % p64;
            for (i, &bi) in b.iter().enumerate() {
                let t = (r[shift + i] as u64 + p64 - c * bi as u64 % p64) % p64;
                r[shift + i] = t as u32;
            }
            trim(&mut r);
        }
        r
    }
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// `F_{p^l}` with the given modulus (coefficients lowest degree first).
    ///
    /// The prime field needs no modulus; extension fields require one of
    /// degree exactly `l`, which is normalised to be monic and rejected if it
    /// factors over `F_p`.
    pub fn new(p: u32, l: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if l == 0 {
            return Err(Error::InvalidArgument("extension degree must be at least 1".into()));
        }
        let q64 = (p as u64).checked_pow(l).filter(|&q| q <= u32::MAX as u64);
        let q = q64.ok_or_else(|| Error::InvalidArgument("field too large".into()))? as u32;
        let modulus = match (l, modulus) {
            (1, None) => vec![0, 1],
            (_, None) => return Err(Error::MissingModulus),
            (_, Some(m)) => {
                if m.len() != l as usize + 1 || m[l as usize] % p == 0 {
                    return Err(Error::ModulusDegree { expected: l, found: m.len() });
                }
                let p64 = p as u64;
                let inv = pow_mod(m[l as usize] as u64, p64 - 2, p64);
                let monic: Vec<u32> = m.iter().map(|&c| ((c as u64 % p64) * inv % p64) as u32).collect();
                if !Self::irreducible(&monic, p) {
                    return Err(Error::ReducibleModulus);
                }
                monic
            }
        };
        let mut field = Field {
            p,
            l,
            q,
            modulus,
            add_table: None,
            log: Vec::new(),
            exp: Vec::new(),
            trace_table: Vec::new(),
            roots: Vec::new(),
        };
        field.roots = (0..p)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / p as f64;
                Complex64::new(libm::cos(t), libm::sin(t))
            })
            .collect();
        if l > 1 && p != 2 && q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = field.add_digits(a, b);
                }
            }
            field.add_table = Some(t);
        }
        if (q as u64) <= TABLE_LIMIT {
            field.build_log_tables();
            field.trace_table = (0..q).map(|a| field.trace_slow(Elem(a)).0).collect();
        }
        Ok(field)
    }

    /// The lexicographically first monic irreducible polynomial of degree `l`.
    pub fn first_irreducible(p: u32, l: u32) -> Result<Vec<u32>> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let count = (p as u64).pow(l);
        for idx in 0..count {
            let mut m = Vec::with_capacity(l as usize + 1);
            let mut x = idx;
            for _ in 0..l {
                m.push((x % p as u64) as u32);
                x /= p as u64;
            }
            m.push(1);
            if Self::irreducible(&m, p) {
                return Ok(m);
            }
        }
        Err(Error::Unreachable("no irreducible polynomial found".into()))
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    fn irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        if deg <= 1 {
            return true;
        }
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d as u32);
            for idx in 0..count {
                let mut f = Vec::with_capacity(d + 1);
                let mut x = idx;
                for _ in 0..d {
                    f.push((x % p as u64) as u32);
                    x /= p as u64;
                }
                f.push(1);
                if fp_poly::rem(m, &f, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.l
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Monic modulus, lowest-degree coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.l == 1
    }

    pub fn elem(&self, index: u64) -> Result<Elem> {
        if index < self.q as u64 {
            Ok(Elem(index as u32))
        } else {
            Err(Error::ElemOutOfRange(index))
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, x: i64) -> Elem {
        Elem(x.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q).map(Elem)
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.l as usize);
        for _ in 0..self.l {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.l {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.l == 1 {
            let s = a.0 as u64 + b.0 as u64;
            Elem((s % self.p as u64) as u32)
        } else if self.p == 2 {
            Elem(a.0 ^ b.0)
        } else if let Some(t) = &self.add_table {
            Elem(t[(a.0 * self.q + b.0) as usize])
        } else {
            Elem(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.l == 1 {
            Elem(if a.0 == 0 { 0 } else { self.p - a.0 })
        } else if self.p == 2 {
            a
        } else {
            let d: Vec<u32> = self.digits(a.0).iter().map(|&c| (self.p - c) % self.p).collect();
            Elem(self.undigits(&d))
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.l == 1 {
            return Elem((a.0 as u64 * b.0 as u64 % self.p as u64) as u32);
        }
        if !self.log.is_empty() {
            let s = self.log[a.0 as usize] + self.log[b.0 as usize];
            return Elem(self.exp[s as usize]);
        }
        self.mul_schoolbook(a, b)
    }

    fn mul_schoolbook(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p as u64;
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let mut prod = vec![0u64; da.len() + db.len() - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let l = self.l as usize;
        for k in (l..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..l {
                let t = c * self.modulus[i] as u64 % p;
                prod[k - l + i] = (prod[k - l + i] + p - t) % p;
            }
        }
        let d: Vec<u32> = prod[..l].iter().map(|&c| c as u32).collect();
        Elem(self.undigits(&d))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        if !self.log.is_empty() {
            let qm1 = self.q - 1;
            let e = (qm1 - self.log[a.0 as usize]) % qm1;
            return Some(Elem(self.exp[e as usize]));
        }
        Some(self.pow(a, self.q as u64 - 2))
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.log = vec![0, 0];
            self.exp = vec![1, 1];
            return;
        }
        let qm1 = (q - 1) as u64;
        let factors = prime_factors(qm1);
        let gen = (2..q)
            .map(Elem)
            .find(|&g| factors.iter().all(|&r| self.mul_schoolbook_pow(g, qm1 / r) != Elem::ONE))
            .expect("multiplicative group of a finite field is cyclic");
        let mut log = vec![0u32; q as usize];
        let mut exp = vec![0u32; 2 * (q as usize - 1)];
        let mut x = Elem::ONE;
        for i in 0..(q - 1) {
            exp[i as usize] = x.0;
            exp[(i + q - 1) as usize] = x.0;
            log[x.0 as usize] = i;
            x = self.mul_schoolbook(x, gen);
        }
        self.log = log;
        self.exp = exp;
    }

    fn mul_schoolbook_pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            e >>= 1;
        }
        acc
    }

    fn trace_slow(&self, a: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        let mut x = a;
        for _ in 0..self.l {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as u64);
        }
        acc
    }

    /// Absolute trace `a + a^p + ... + a^{p^{l-1}}`, an element of `F_p`.
    pub fn trace(&self, a: Elem) -> Elem {
        if self.l == 1 {
            a
        } else if !self.trace_table.is_empty() {
            Elem(self.trace_table[a.0 as usize])
        } else {
            self.trace_slow(a)
        }
    }

    /// `e_q(a) = exp(2 pi i tr(a) / p)`.
    pub fn char_value(&self, a: Elem) -> Complex64 {
        self.roots[self.trace(a).0 as usize]
    }

    /// `exp(2 pi i k / p)` for `k` in `F_p`.
    pub fn root_of_unity(&self, k: u32) -> Complex64 {
        self.roots[(k % self.p) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        Field::new(2, 2, Some(&[1, 1, 1])).unwrap()
    }

    fn small_fields() -> Vec<Field> {
        vec![
            Field::prime(2).unwrap(),
            Field::prime(3).unwrap(),
            Field::prime(5).unwrap(),
            Field::prime(7).unwrap(),
            f4(),
            Field::new(2, 3, Some(&[1, 1, 0, 1])).unwrap(),
            Field::new(3, 2, Some(&[1, 0, 1])).unwrap(),
            Field::new(2, 6, Some(&Field::first_irreducible(2, 6).unwrap())).unwrap(),
            Field::new(7, 2, Some(&Field::first_irreducible(7, 2).unwrap())).unwrap(),
        ]
    }

    #[test]
    fn create_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.q(), 3);
        assert_eq!(f3.mul(Elem(2), Elem(2)), Elem(1));
        assert_eq!(f4().q(), 4);
        assert_eq!(Field::new(2, 2, Some(&[1, 0, 1])), Err(Error::ReducibleModulus));
        assert_eq!(Field::prime(4), Err(Error::NotPrime(4)));
        assert_eq!(Field::new(2, 2, None), Err(Error::MissingModulus));
        assert!(matches!(Field::new(2, 2, Some(&[1, 1])), Err(Error::ModulusDegree { .. })));
    }

    #[test]
    fn trace_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.trace(Elem(2)), Elem(2));
        let f = f4();
        assert_eq!(f.trace(Elem(0)), Elem(0));
        // omega is the class of x, index 2; omega^2 = omega + 1
        assert_eq!(f.mul(Elem(2), Elem(2)), Elem(3));
        assert_eq!(f.trace(Elem(2)), Elem(1));
    }

    #[test]
    fn char_examples() {
        let f3 = Field::prime(3).unwrap();
        assert!((f3.char_value(Elem(0)) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let w = Complex64::new(libm::cos(2.0 * PI / 3.0), libm::sin(2.0 * PI / 3.0));
        assert!((f3.char_value(Elem(1)) - w).norm() < 1e-12);
        assert!((f4().char_value(Elem(2)) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            if f.q() > 64 {
                continue;
            }
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.mul(a, b), f.mul_schoolbook(a, b));
                    assert_eq!(f.trace(f.add(a, b)), f.add(f.trace(a), f.trace(b)));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_lands_in_prime_field_and_characters_sum_to_zero() {
        for f in small_fields() {
            let mut s = Complex64::new(0.0, 0.0);
            for a in f.elements() {
                assert!(f.trace(a).0 < f.p());
                s += f.char_value(a);
            }
            assert!(s.norm() < 1e-9, "q={} sum={s}", f.q());
        }
    }

    #[test]
    fn character_is_additive() {
        for f in small_fields().into_iter().filter(|f| f.q() <= 64) {
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.char_value(f.add(a, b));
                    let rhs = f.char_value(a) * f.char_value(b);
                    assert!((lhs - rhs).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn large_field_uses_schoolbook() {
        let m = Field::first_irreducible(2, 17).unwrap();
        let f = Field::new(2, 17, Some(&m)).unwrap();
        assert!(f.log.is_empty());
        let a = Elem(12345);
        let b = f.inv(a).unwrap();
        assert_eq!(f.mul(a, b), Elem::ONE);
        assert!(f.trace(a).0 < 2);
    }
}
