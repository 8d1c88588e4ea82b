//! Points of `V = F_q^n` encoded as integers in `[0, q^n)`.
//!
//! Coordinate `i` of a point is its `i`-th base-`q` digit (least significant
//! first), so `x1` is `index % q`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point(pub u64);

#[derive(Clone, Debug)]
pub struct Space {
    field: Arc<Field>,
    n: u32,
    size: u64,
    powers: Vec<u64>,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for Space {}

impl Space {
    pub fn new(field: Arc<Field>, n: u32) -> Result<Space> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let q = field.q() as u64;
        let size = q
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidArgument("space too large for 64-bit point indices".into()))?;
        let powers = (0..n).map(|i| q.pow(i)).collect();
        Ok(Space { field, n, size, powers })
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// `q^n`.
    #[inline]
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + Clone {
        (0..self.size).map(Point)
    }

    pub fn point(&self, index: u64) -> Result<Point> {
        if index < self.size {
            Ok(Point(index))
        } else {
            Err(Error::PointOutOfRange(index))
        }
    }

    #[inline]
    pub fn coord(&self, x: Point, i: usize) -> Elem {
        Elem(((x.0 / self.powers[i]) % self.q() as u64) as u32)
    }

    pub fn coords(&self, x: Point) -> Vec<Elem> {
        let q = self.q() as u64;
        let mut v = x.0;
        (0..self.n)
            .map(|_| {
                let c = (v % q) as u32;
                v /= q;
                Elem(c)
            })
            .collect()
    }

    /// Writes the coordinates of `x` into `out` (length `n`).
    #[inline]
    pub fn coords_into(&self, x: Point, out: &mut [Elem]) {
        let q = self.q() as u64;
        let mut v = x.0;
        for c in out.iter_mut() {
            *c = Elem((v % q) as u32);
            v /= q;
        }
    }

    pub fn encode(&self, coords: &[Elem]) -> Result<Point> {
        if coords.len() != self.n as usize {
            return Err(Error::DimensionMismatch { expected: self.n as usize, found: coords.len() });
        }
        let q = self.q();
        let mut idx = 0u64;
        for &c in coords.iter().rev() {
            if c.0 >= q {
                return Err(Error::ElemOutOfRange(c.0 as u64));
            }
            idx = idx * q as u64 + c.0 as u64;
        }
        Ok(Point(idx))
    }

    #[inline]
    pub fn add(&self, x: Point, y: Point) -> Point {
        let f = &*self.field;
        if f.p() == 2 {
            return Point(x.0 ^ y.0);
        }
        let q = f.q() as u64;
        let (mut a, mut b) = (x.0, y.0);
        let mut out = 0u64;
        let mut place = 1u64;
        if f.is_prime_field() {
            while a > 0 || b > 0 {
                let s = (a % q + b % q) % q;
                out += s * place;
                a /= q;
                b /= q;
                place *= q;
            }
        } else {
            while a > 0 || b > 0 {
                let s = f.add(Elem((a % q) as u32), Elem((b % q) as u32)).0 as u64;
                out += s * place;
                a /= q;
                b /= q;
                place *= q;
            }
        }
        Point(out)
    }

    #[inline]
    pub fn neg(&self, x: Point) -> Point {
        let f = &*self.field;
        if f.p() == 2 {
            return x;
        }
        let q = f.q() as u64;
        let mut a = x.0;
        let mut out = 0u64;
        let mut place = 1u64;
        while a > 0 {
            out += f.neg(Elem((a % q) as u32)).0 as u64 * place;
            a /= q;
            place *= q;
        }
        Point(out)
    }

    #[inline]
    pub fn sub(&self, x: Point, y: Point) -> Point {
        self.add(x, self.neg(y))
    }

    /// Scalar multiple `c * x`.
    pub fn scale(&self, c: Elem, x: Point) -> Point {
        if c == Elem::ONE {
            return x;
        }
        let f = &*self.field;
        let q = f.q() as u64;
        let mut a = x.0;
        let mut out = 0u64;
        let mut place = 1u64;
        while a > 0 {
            out += f.mul(c, Elem((a % q) as u32)).0 as u64 * place;
            a /= q;
            place *= q;
        }
        Point(out)
    }

    /// `x * k` for an integer `k`, computed in the prime subfield.
    pub fn scale_int(&self, k: i64, x: Point) -> Point {
        self.scale(self.field.from_int(k), x)
    }

    /// `u + sum_i omega_i v_i`, with `omega` given as a bitmask (bit `i` selects `v_i`).
    pub fn combine(&self, u: Point, omega: u32, dirs: &[Point]) -> Point {
        let mut acc = u;
        for (i, &v) in dirs.iter().enumerate() {
            if omega >> i & 1 == 1 {
                acc = self.add(acc, v);
            }
        }
        acc
    }

    /// `u + sum_i omega_i v_i` with an explicit 0/1 tuple.
    pub fn point_combine(&self, u: Point, omega: &[u8], dirs: &[Point]) -> Result<Point> {
        if omega.len() != dirs.len() {
            return Err(Error::DimensionMismatch { expected: dirs.len(), found: omega.len() });
        }
        for &x in core::iter::once(&u).chain(dirs) {
            if x.0 >= self.size {
                return Err(Error::PointOutOfRange(x.0));
            }
        }
        let mask = omega.iter().enumerate().fold(0u32, |m, (i, &w)| m | ((w as u32 & 1) << i));
        Ok(self.combine(u, mask, dirs))
    }

    /// All `2^m` vertices `u + omega . v`, indexed by the bitmask `omega`.
    pub fn cube_vertices(&self, u: Point, dirs: &[Point], out: &mut Vec<Point>) {
        out.clear();
        out.push(u);
        for &v in dirs {
            let len = out.len();
            for k in 0..len {
                let p = self.add(out[k], v);
                out.push(p);
            }
        }
    }
}
