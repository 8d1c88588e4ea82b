//! Polynomial functions `V -> F_q` in reduced form.
//!
//! A polynomial is stored as a map from exponent tuples (each exponent at most
//! `q - 1`, since `x^q = x` as functions) to nonzero coefficients. Reduced
//! polynomials are in bijection with functions `V -> F_q`, and
//! [`PolyFun::interpolate`] recovers the polynomial from its value table.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_budget, Error, Result};
use crate::field::{Elem, Field};
use crate::space::{Point, Space};

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFun {
    space: Space,
    coeffs: BTreeMap<Exponents, Elem>,
}

/// `x^a * x^b` in reduced form.
#[inline]
fn reduce_exp(e: u32, q: u32) -> u32 {
    if e < q {
        e
    } else {
        (e - 1) % (q - 1) + 1
    }
}

impl PolyFun {
    pub fn zero(space: &Space) -> PolyFun {
        PolyFun { space: space.clone(), coeffs: BTreeMap::new() }
    }

    pub fn constant(space: &Space, c: Elem) -> PolyFun {
        let mut p = PolyFun::zero(space);
        p.add_term(vec![0; space.dim() as usize], c);
        p
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(space: &Space, i: usize) -> PolyFun {
        let mut e = vec![0; space.dim() as usize];
        e[i] = 1;
        PolyFun::monomial(space, e, Elem::ONE)
    }

    pub fn monomial(space: &Space, exps: Exponents, c: Elem) -> PolyFun {
        let mut p = PolyFun::zero(space);
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial from unreduced terms; exponents are reduced and
    /// like terms combined.
    pub fn from_terms(space: &Space, terms: impl IntoIterator<Item = (Exponents, Elem)>) -> Result<PolyFun> {
        let mut p = PolyFun::zero(space);
        for (e, c) in terms {
            if e.len() != space.dim() as usize {
                return Err(Error::DimensionMismatch { expected: space.dim() as usize, found: e.len() });
            }
            if c.0 >= space.q() {
                return Err(Error::ElemOutOfRange(c.0 as u64));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, mut exps: Exponents, c: Elem) {
        if c.is_zero() {
            return;
        }
        let q = self.space.q();
        for e in exps.iter_mut() {
            *e = reduce_exp(*e, q);
        }
        let f = self.space.field();
        let entry = self.coeffs.entry(exps);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, Elem)> {
        self.coeffs.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Elem {
        self.coeffs.get(exps).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Maximum total degree of a stored monomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| e.iter().sum()).max()
    }

    /// True when every monomial has the same total degree (the zero polynomial is homogeneous).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.coeffs.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> PolyFun {
        PolyFun {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, &c)| (e.clone(), c))
                .collect(),
        }
    }

    fn same_space(&self, other: &PolyFun) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &PolyFun) -> Result<PolyFun> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.coeffs {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> PolyFun {
        let f = self.space.field();
        PolyFun { space: self.space.clone(), coeffs: self.coeffs.iter().map(|(e, &c)| (e.clone(), f.neg(c))).collect() }
    }

    pub fn sub(&self, other: &PolyFun) -> Result<PolyFun> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Elem) -> PolyFun {
        if c.is_zero() {
            return PolyFun::zero(&self.space);
        }
        let f = self.space.field();
        PolyFun {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|(e, &a)| (e.clone(), f.mul(a, c))).collect(),
        }
    }

    pub fn mul(&self, other: &PolyFun) -> Result<PolyFun> {
        self.same_space(other)?;
        let f = self.space.field();
        let mut out = PolyFun::zero(&self.space);
        for (ea, &ca) in &self.coeffs {
            for (eb, &cb) in &other.coeffs {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// `sum coeff * prod x_i^{e_i}` at `x`.
    pub fn eval(&self, x: Point) -> Result<Elem> {
        if x.0 >= self.space.size() {
            return Err(Error::PointOutOfRange(x.0));
        }
        let mut coords = vec![Elem::ZERO; self.space.dim() as usize];
        self.space.coords_into(x, &mut coords);
        Ok(self.eval_coords(&coords))
    }

    pub fn eval_coords(&self, coords: &[Elem]) -> Elem {
        let f = self.space.field();
        let mut acc = Elem::ZERO;
        for (e, &c) in &self.coeffs {
            let mut t = c;
            for (&xi, &ei) in coords.iter().zip(e) {
                if ei > 0 {
                    t = f.mul(t, f.pow(xi, ei as u64));
                    if t.is_zero() {
                        break;
                    }
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Values at every point of `V`, indexed by point.
    pub fn table(&self, budget: u64) -> Result<Vec<Elem>> {
        let size = self.space.size();
        check_budget(size as u128 * self.coeffs.len().max(1) as u128, budget)?;
        let n = self.space.dim() as usize;
        let mut coords = vec![Elem::ZERO; n];
        Ok((0..size)
            .map(|x| {
                self.space.coords_into(Point(x), &mut coords);
                self.eval_coords(&coords)
            })
            .collect())
    }

    /// The unique reduced polynomial agreeing with `table` on every point.
    ///
    /// Runs one univariate interpolation per coordinate line, `O(n q^{n+1})`
    /// field operations in total.
    pub fn interpolate(space: &Space, table: &[Elem], budget: u64) -> Result<PolyFun> {
        let size = space.size();
        if table.len() as u64 != size {
            return Err(Error::DimensionMismatch { expected: size as usize, found: table.len() });
        }
        let q = space.q() as u64;
        let n = space.dim() as u64;
        check_budget(n as u128 * size as u128 * q as u128, budget)?;
        let f = space.field();
        if let Some(bad) = table.iter().find(|c| c.0 as u64 >= q) {
            return Err(Error::ElemOutOfRange(bad.0 as u64));
        }
        // m[k][a]: coefficient of x^k in the indicator-weighted sum; f(x) = sum_a f(a) (1 - (x-a)^{q-1}).
        let qs = q as usize;
        let mut m = vec![Elem::ZERO; qs * qs];
        m[0] = Elem::ONE;
        for k in 1..qs {
            for a in 0..qs {
                let e = (qs - 1 - k) as u64;
                let pw = if e == 0 { Elem::ONE } else { f.pow(Elem(a as u32), e) };
                m[k * qs + a] = f.neg(pw);
            }
        }
        let mut data: Vec<Elem> = table.to_vec();
        let mut line = vec![Elem::ZERO; qs];
        let mut stride = 1u64;
        for _ in 0..n {
            let block = stride * q;
            for base in (0..size).step_by(block as usize) {
                for off in 0..stride {
                    let start = base + off;
                    for (a, slot) in line.iter_mut().enumerate() {
                        *slot = data[(start + a as u64 * stride) as usize];
                    }
                    for k in 0..qs {
                        let mut acc = Elem::ZERO;
                        for (a, &v) in line.iter().enumerate() {
                            if !v.is_zero() {
                                let w = m[k * qs + a];
                                if !w.is_zero() {
                                    acc = f.add(acc, f.mul(w, v));
                                }
                            }
                        }
                        data[(start + k as u64 * stride) as usize] = acc;
                    }
                }
            }
            stride = block;
        }
        let mut p = PolyFun::zero(space);
        for (idx, &c) in data.iter().enumerate() {
            if !c.is_zero() {
                let exps: Exponents = space.coords(Point(idx as u64)).iter().map(|e| e.0).collect();
                p.coeffs.insert(exps, c);
            }
        }
        Ok(p)
    }

    /// All reduced exponent tuples of total degree at most `max_deg`, in
    /// lexicographic order.
    pub fn monomials_up_to(space: &Space, max_deg: u32) -> Vec<Exponents> {
        let n = space.dim() as usize;
        let q = space.q();
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, q: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponents>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left.min(q - 1) {
                cur[i] = e;
                rec(i + 1, left - e, q, cur, out);
            }
            cur[i] = 0;
        }
        rec(0, max_deg, q, &mut cur, &mut out);
        out
    }

    /// Random reduced polynomial of total degree at most `max_deg`: every
    /// admissible monomial gets an independent uniform coefficient.
    pub fn random<R: Rng + ?Sized>(space: &Space, max_deg: u32, rng: &mut R) -> PolyFun {
        let q = space.q();
        let terms = PolyFun::monomials_up_to(space, max_deg).into_iter().map(|e| (e, Elem(rng.gen_range(0..q))));
        PolyFun::from_terms(space, terms).expect("exponents sized to the space")
    }

    /// Random reduced polynomial of total degree exactly `deg`, or `None` if
    /// no reduced monomial has that degree.
    pub fn random_exact_degree<R: Rng + ?Sized>(space: &Space, deg: u32, rng: &mut R) -> Option<PolyFun> {
        let top: Vec<Exponents> =
            PolyFun::monomials_up_to(space, deg).into_iter().filter(|e| e.iter().sum::<u32>() == deg).collect();
        if top.is_empty() {
            return None;
        }
        let q = space.q();
        let mut p = PolyFun::random(space, deg, rng);
        let e = top[rng.gen_range(0..top.len())].clone();
        let c = p.coeff(&e);
        if c.is_zero() {
            p.add_term(e, Elem(rng.gen_range(1..q)));
        }
        Some(p)
    }

    /// The polarized `d`-form `sum_omega (-1)^{d-|omega|} P(x + omega . v)`.
    ///
    /// Symmetric in the directions; when `deg P <= d` it does not depend on `x`,
    /// and it vanishes identically when `deg P < d`.
    pub fn multilinear_form(&self, x: Point, dirs: &[Point]) -> Result<Elem> {
        for &p in core::iter::once(&x).chain(dirs) {
            if p.0 >= self.space.size() {
                return Err(Error::PointOutOfRange(p.0));
            }
        }
        let f = self.space.field();
        let d = dirs.len() as u32;
        let mut verts = Vec::with_capacity(1 << d);
        self.space.cube_vertices(x, dirs, &mut verts);
        let mut acc = Elem::ZERO;
        for (omega, &v) in verts.iter().enumerate() {
            let val = self.eval(v)?;
            if (d - omega.count_ones()) % 2 == 0 {
                acc = f.add(acc, val);
            } else {
                acc = f.sub(acc, val);
            }
        }
        Ok(acc)
    }

    /// `|E_{x in V} e_q(P(x))|`.
    pub fn bias(&self, budget: u64) -> Result<f64> {
        let table = self.table(budget)?;
        let f = self.space.field();
        let mut hist = vec![0u64; f.p() as usize];
        for &v in &table {
            hist[f.trace(v).0 as usize] += 1;
        }
        Ok(character_average(f, &hist).norm())
    }

    /// `|E_{x_1..x_d} e_q(P_d(0 | x_1, ..., x_d))|` over `V^d`, `d = deg P`.
    pub fn multilinear_bias(&self, budget: u64) -> Result<f64> {
        let d = self.degree().unwrap_or(0);
        self.multilinear_bias_arity(d, budget)
    }

    /// As [`multilinear_bias`](Self::multilinear_bias) with an explicit arity.
    pub fn multilinear_bias_arity(&self, d: u32, budget: u64) -> Result<f64> {
        let size = self.space.size();
        check_budget((size as u128).pow(d) << d, budget)?;
        let table = self.table(budget)?;
        let hist = form_histogram(&self.space, &table, d);
        Ok(character_average(self.space.field(), &hist).norm())
    }
}

/// `sum_k hist[k] e(k/p) / sum hist`.
pub fn character_average(f: &Field, hist: &[u64]) -> Complex64 {
    let total: u64 = hist.iter().sum();
    let mut s = Complex64::new(0.0, 0.0);
    for (k, &c) in hist.iter().enumerate() {
        s += f.root_of_unity(k as u32) * c as f64;
    }
    s / total as f64
}

/// Histogram over `F_p` of `tr(P_d(0 | x_1..x_d))` for all `(x_1..x_d) in V^d`,
/// where `table` holds the values of `P`.
pub fn form_histogram(space: &Space, table: &[Elem], d: u32) -> Vec<u64> {
    let f = space.field();
    let size = space.size();
    let p = f.p() as usize;
    let per_first: Vec<Vec<u64>> = crate::par::map_range(if d == 0 { 1 } else { size }, |x1| {
        let mut hist = vec![0u64; p];
        let mut verts: Vec<Point> = Vec::with_capacity(1 << d);
        verts.push(Point(0));
        if d == 0 {
            hist[f.trace(table[0]).0 as usize] += 1;
            return hist;
        }
        extend(space, table, d, &mut verts, Point(x1), &mut hist);
        hist
    });
    let mut hist = vec![0u64; p];
    for h in per_first {
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
    }
    hist
}

fn extend(space: &Space, table: &[Elem], d: u32, verts: &mut Vec<Point>, v: Point, hist: &mut [u64]) {
    let len = verts.len();
    for k in 0..len {
        let p = space.add(verts[k], v);
        verts.push(p);
    }
    let depth = verts.len().trailing_zeros();
    if depth == d {
        let f = space.field();
        let mut acc = Elem::ZERO;
        for (omega, &pt) in verts.iter().enumerate() {
            let val = table[pt.0 as usize];
            if (d - (omega as u32).count_ones()) % 2 == 0 {
                acc = f.add(acc, val);
            } else {
                acc = f.sub(acc, val);
            }
        }
        hist[f.trace(acc).0 as usize] += 1;
    } else {
        for w in 0..space.size() {
            extend(space, table, d, verts, Point(w), hist);
        }
    }
    verts.truncate(len);
}
