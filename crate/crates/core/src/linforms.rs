//! Systems of integer-coefficient affine forms `r_i(v) = sum_j a_ij v_j + w_i`,
//! their Cauchy–Schwarz complexity, and exact pattern counts in subsets.
//!
//! Shift slots `w_k` are handled as additional formal variables, so a form is
//! one integer row over `(v_1..v_r, w_1..w_s)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cube::SubsetOracle;
use crate::error::{check_budget, Error, Result};
use crate::gowers::uniformity;
use crate::space::{Point, Space};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinForm {
    pub v: Vec<i64>,
    pub w: Vec<i64>,
}

impl LinForm {
    pub fn new(v: Vec<i64>, w: Vec<i64>) -> LinForm {
        LinForm { v, w }
    }

    /// The full coefficient row `(v | w)`.
    pub fn row(&self) -> Vec<i64> {
        self.v.iter().chain(&self.w).copied().collect()
    }

    pub fn is_constant(&self) -> bool {
        self.v.iter().chain(&self.w).all(|&c| c == 0)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let names = self
            .v
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, 'v', i))
            .chain(self.w.iter().enumerate().map(|(i, &c)| (c, 'w', i)));
        for (c, name, i) in names {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            if a != 1 {
                write!(f, "{a}*")?;
            }
            write!(f, "{name}{}", i + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinFormSystem {
    arity: usize,
    shifts: usize,
    forms: Vec<LinForm>,
}

impl LinFormSystem {
    /// Rejects mismatched row lengths and repeated forms.
    pub fn new(arity: usize, shifts: usize, forms: Vec<LinForm>) -> Result<LinFormSystem> {
        let sys = LinFormSystem::with_duplicates(arity, shifts, forms)?;
        for i in 0..sys.forms.len() {
            for j in 0..i {
                if sys.forms[i] == sys.forms[j] {
                    return Err(Error::InvalidArgument(alloc::format!("forms {} and {} coincide", j + 1, i + 1)));
                }
            }
        }
        Ok(sys)
    }

    pub fn with_duplicates(arity: usize, shifts: usize, forms: Vec<LinForm>) -> Result<LinFormSystem> {
        if forms.is_empty() {
            return Err(Error::InvalidArgument("empty form system".into()));
        }
        for f in &forms {
            if f.v.len() != arity {
                return Err(Error::DimensionMismatch { expected: arity, found: f.v.len() });
            }
            if f.w.len() != shifts {
                return Err(Error::DimensionMismatch { expected: shifts, found: f.w.len() });
            }
        }
        Ok(LinFormSystem { arity, shifts, forms })
    }

    /// Vertices `x + omega . h` of the `m`-cube, variables `(x, h_1..h_m)`.
    pub fn cube(m: usize) -> LinFormSystem {
        let forms = (0..1usize << m)
            .map(|omega| {
                let mut v = vec![0i64; m + 1];
                v[0] = 1;
                for i in 0..m {
                    v[i + 1] = (omega >> i & 1) as i64;
                }
                LinForm::new(v, Vec::new())
            })
            .collect();
        LinFormSystem::new(m + 1, 0, forms).expect("distinct vertices")
    }

    /// The nonzero vertices `omega . h` of the almost cube with fixed base,
    /// variables `(h_1..h_m)` and base shift `w_1`.
    pub fn almost_cube(m: usize) -> LinFormSystem {
        let forms = (1..1usize << m)
            .map(|omega| LinForm::new((0..m).map(|i| (omega >> i & 1) as i64).collect(), vec![1]))
            .collect();
        LinFormSystem::new(m, 1, forms).expect("distinct vertices")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn shifts(&self) -> usize {
        self.shifts
    }

    pub fn forms(&self) -> &[LinForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// The subsystem on the given form indices.
    pub fn subsystem(&self, indices: &[usize]) -> Result<LinFormSystem> {
        let forms = indices
            .iter()
            .map(|&i| {
                self.forms.get(i).cloned().ok_or_else(|| Error::InvalidArgument(alloc::format!("no form {}", i + 1)))
            })
            .collect::<Result<_>>()?;
        LinFormSystem::with_duplicates(self.arity, self.shifts, forms)
    }

    /// The same forms with every shift slot turned into an ordinary variable.
    pub fn shifts_as_variables(&self) -> LinFormSystem {
        let forms = self.forms.iter().map(|f| LinForm::new(f.row(), Vec::new())).collect();
        LinFormSystem { arity: self.arity + self.shifts, shifts: 0, forms }
    }

    /// Pairwise distinct, nonconstant linear parts.
    pub fn is_nondegenerate(&self) -> bool {
        let rows: Vec<Vec<i64>> = self.forms.iter().map(|f| f.row()).collect();
        rows.iter().all(|r| r.iter().any(|&c| c != 0)) && (0..rows.len()).all(|i| (0..i).all(|j| rows[i] != rows[j]))
    }
}

/// The scalar field used for span questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "p", rename_all = "snake_case"))]
pub enum SpanField {
    Rationals,
    Prime(u32),
}

/// A scalar of a [`SpanField`]: a reduced fraction, or a residue with `den = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scalar {
    pub num: i128,
    pub den: i128,
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy)]
struct Arith {
    field: SpanField,
}

impl Arith {
    fn norm(&self, num: i128, den: i128) -> Scalar {
        match self.field {
            SpanField::Rationals => {
                let g = gcd(num, den).max(1);
                let s = if den < 0 { -1 } else { 1 };
                Scalar { num: s * num / g, den: s * den / g }
            }
            SpanField::Prime(p) => {
                let p = p as i128;
                let d = self.inv_mod(den.rem_euclid(p), p);
                Scalar { num: (num.rem_euclid(p) * d).rem_euclid(p), den: 1 }
            }
        }
    }

    fn inv_mod(&self, a: i128, p: i128) -> i128 {
        let mut r = 1i128;
        let mut b = a;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    fn int(&self, x: i64) -> Scalar {
        self.norm(x as i128, 1)
    }

    fn zero(&self) -> Scalar {
        Scalar { num: 0, den: 1 }
    }

    fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        self.norm(a.num * b.den + b.num * a.den, a.den * b.den)
    }

    fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.norm(a.num * b.den - b.num * a.den, a.den * b.den)
    }

    fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        self.norm(a.num * b.num, a.den * b.den)
    }

    fn div(&self, a: Scalar, b: Scalar) -> Scalar {
        match self.field {
            SpanField::Rationals => self.norm(a.num * b.den, a.den * b.num),
            SpanField::Prime(p) => {
                let p = p as i128;
                Scalar { num: a.num * self.inv_mod(b.num, p) % p, den: 1 }
            }
        }
    }

    /// One solution of `A x = b` (`A` given by rows), or `None` if inconsistent.
    fn solve(&self, mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Option<Vec<Scalar>> {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..rows).find(|&i| a[i][c].num != 0) else { continue };
            a.swap(r, piv);
            b.swap(r, piv);
            let inv = a[r][c];
            for e in &mut a[r][c..] {
                *e = self.div(*e, inv);
            }
            b[r] = self.div(b[r], inv);
            let (pivot_row, pivot_b) = (a[r].clone(), b[r]);
            for (i, (row, bi)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                if i != r && row[c].num != 0 {
                    let fct = row[c];
                    for (e, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                        *e = self.sub(*e, self.mul(fct, pv));
                    }
                    *bi = self.sub(*bi, self.mul(fct, pivot_b));
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        if b[r..].iter().any(|x| x.num != 0) {
            return None;
        }
        let mut x = vec![self.zero(); cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = b[i];
        }
        Some(x)
    }
}

/// Why a target is or is not in an affine span.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SpanWitness {
    /// `target = sum lambda_i s_i` with `sum lambda_i = 1`.
    Combination(Vec<Scalar>),
    /// A functional `phi` on `(row, 1)` vanishing on every `(s_i, 1)` with `phi(target, 1) = 1`.
    Separator(Vec<Scalar>),
}

impl SpanWitness {
    pub fn is_member(&self) -> bool {
        matches!(self, SpanWitness::Combination(_))
    }
}

/// Decides `target in aff span(set)` over `field` and returns a witness either way.
pub fn in_affine_span(target: &[i64], set: &[&[i64]], field: SpanField) -> Result<SpanWitness> {
    if let SpanField::Prime(p) = field {
        if !crate::field::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
    }
    for s in set {
        if s.len() != target.len() {
            return Err(Error::DimensionMismatch { expected: target.len(), found: s.len() });
        }
    }
    let ar = Arith { field };
    let dim = target.len();
    // columns (s_i, 1), right-hand side (t, 1)
    let a: Vec<Vec<Scalar>> =
        (0..=dim).map(|row| set.iter().map(|s| if row < dim { ar.int(s[row]) } else { ar.int(1) }).collect()).collect();
    let b: Vec<Scalar> = (0..=dim).map(|row| if row < dim { ar.int(target[row]) } else { ar.int(1) }).collect();
    if !set.is_empty() {
        if let Some(lambda) = ar.solve(a, b) {
            return Ok(SpanWitness::Combination(lambda));
        }
    }
    let mut rows: Vec<Vec<Scalar>> =
        set.iter().map(|s| s.iter().map(|&c| ar.int(c)).chain(core::iter::once(ar.int(1))).collect()).collect();
    rows.push(target.iter().map(|&c| ar.int(c)).chain(core::iter::once(ar.int(1))).collect());
    let mut rhs = vec![ar.zero(); set.len()];
    rhs.push(ar.int(1));
    let phi = ar.solve(rows, rhs).expect("a non-member is separated by some functional");
    Ok(SpanWitness::Separator(phi))
}

/// Checks a witness returned by [`in_affine_span`].
pub fn verify_witness(target: &[i64], set: &[&[i64]], field: SpanField, witness: &SpanWitness) -> bool {
    let ar = Arith { field };
    match witness {
        SpanWitness::Combination(lambda) => {
            if lambda.len() != set.len() {
                return false;
            }
            let total = lambda.iter().fold(ar.zero(), |acc, &l| ar.add(acc, l));
            if total != ar.int(1) {
                return false;
            }
            (0..target.len()).all(|k| {
                let s = set.iter().zip(lambda).fold(ar.zero(), |acc, (s, &l)| ar.add(acc, ar.mul(l, ar.int(s[k]))));
                s == ar.int(target[k])
            })
        }
        SpanWitness::Separator(phi) => {
            if phi.len() != target.len() + 1 {
                return false;
            }
            let apply = |row: &[i64]| {
                row.iter()
                    .chain(core::iter::once(&1))
                    .zip(phi)
                    .fold(ar.zero(), |acc, (&c, &f)| ar.add(acc, ar.mul(f, ar.int(c))))
            };
            set.iter().all(|s| apply(s).num == 0) && apply(target) == ar.int(1)
        }
    }
}

/// An admissible partition of `I \ {pivot}`: no part's affine span contains
/// the pivot form.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartitionCertificate {
    pub pivot: usize,
    pub parts: Vec<Vec<usize>>,
    pub separators: Vec<SpanWitness>,
}

impl PartitionCertificate {
    pub fn d(&self) -> u32 {
        self.parts.len() as u32
    }

    /// Re-checks disjointness, coverage and every separator.
    pub fn verify(&self, system: &LinFormSystem, field: SpanField) -> bool {
        let n = system.len();
        let mut seen = vec![false; n];
        for part in &self.parts {
            for &i in part {
                if i >= n || i == self.pivot || seen[i] {
                    return false;
                }
                seen[i] = true;
            }
        }
        if (0..n).any(|i| i != self.pivot && !seen[i]) || self.parts.len() != self.separators.len() {
            return false;
        }
        let rows: Vec<Vec<i64>> = system.forms.iter().map(|f| f.row()).collect();
        self.parts.iter().zip(&self.separators).all(|(part, w)| {
            let set: Vec<&[i64]> = part.iter().map(|&i| rows[i].as_slice()).collect();
            matches!(w, SpanWitness::Separator(_)) && verify_witness(&rows[self.pivot], &set, field, w)
        })
    }
}

/// CS complexity at one form.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Complexity {
    Finite {
        d: u32,
        certificate: PartitionCertificate,
    },
    /// Another form equals the pivot over the chosen field, so no partition
    /// is admissible.
    Unbounded {
        pivot: usize,
        duplicate_of: usize,
    },
}

impl Complexity {
    pub fn value(&self) -> Option<u32> {
        match self {
            Complexity::Finite { d, .. } => Some(*d),
            Complexity::Unbounded { .. } => None,
        }
    }
}

pub const MAX_FORMS: usize = 20;

/// Default node budget for the partition search.
pub const SEARCH_BUDGET: u64 = 50_000_000;

struct PartitionSearch<'a> {
    target: &'a [i64],
    rows: &'a [Vec<i64>],
    others: Vec<usize>,
    field: SpanField,
    nodes: u64,
    budget: u64,
}

impl PartitionSearch<'_> {
    fn part_ok(&self, part: &[usize]) -> Result<bool> {
        let set: Vec<&[i64]> = part.iter().map(|&i| self.rows[i].as_slice()).collect();
        Ok(!in_affine_span(self.target, &set, self.field)?.is_member())
    }

    fn go(&mut self, k: usize, parts: &mut Vec<Vec<usize>>, d: usize) -> Result<bool> {
        self.nodes += 1;
        check_budget(self.nodes as u128, self.budget)?;
        if k == self.others.len() {
            return Ok(true);
        }
        let item = self.others[k];
        for p in 0..parts.len() {
            parts[p].push(item);
            if self.part_ok(&parts[p])? && self.go(k + 1, parts, d)? {
                return Ok(true);
            }
            parts[p].pop();
        }
        if parts.len() < d {
            parts.push(vec![item]);
            if self.part_ok(&parts[parts.len() - 1])? && self.go(k + 1, parts, d)? {
                return Ok(true);
            }
            parts.pop();
        }
        Ok(false)
    }
}

/// Minimal `d` with an admissible `d`-partition at form `j`, found by
/// backtracking over set partitions with span pruning.
pub fn cs_complexity_at(system: &LinFormSystem, j: usize, field: SpanField, budget: u64) -> Result<Complexity> {
    let n = system.len();
    if n > MAX_FORMS {
        return Err(Error::InvalidArgument(alloc::format!("at most {MAX_FORMS} forms are supported, got {n}")));
    }
    if j >= n {
        return Err(Error::InvalidArgument(alloc::format!("no form {}", j + 1)));
    }
    let rows: Vec<Vec<i64>> = system.forms.iter().map(|f| f.row()).collect();
    let target = rows[j].clone();
    let mut others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    for &i in &others {
        if in_affine_span(&target, &[rows[i].as_slice()], field)?.is_member() {
            return Ok(Complexity::Unbounded { pivot: j, duplicate_of: i });
        }
    }
    // larger affine spans first: forms far from the pivot tend to need their own part
    others.sort_by_key(|&i| core::cmp::Reverse(rows[i].iter().zip(&target).filter(|(a, b)| a != b).count()));
    let mut search = PartitionSearch { target: &target, rows: &rows, others, field, nodes: 0, budget };
    for d in 0..=search.others.len() {
        let mut parts = Vec::new();
        if search.go(0, &mut parts, d)? {
            parts.iter_mut().for_each(|p| p.sort_unstable());
            parts.sort();
            let separators = parts
                .iter()
                .map(|part| {
                    let set: Vec<&[i64]> = part.iter().map(|&i| rows[i].as_slice()).collect();
                    in_affine_span(&target, &set, field)
                })
                .collect::<Result<Vec<_>>>()?;
            let certificate = PartitionCertificate { pivot: j, parts, separators };
            return Ok(Complexity::Finite { d: d as u32, certificate });
        }
    }
    unreachable!("singleton parts are always admissible once duplicates are excluded")
}

/// Complexity of the system: the maximum over all forms, with the per-form results.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemComplexity {
    pub value: Option<u32>,
    pub per_form: Vec<Complexity>,
}

pub fn cs_complexity(system: &LinFormSystem, field: SpanField, budget: u64) -> Result<SystemComplexity> {
    let per_form = (0..system.len()).map(|j| cs_complexity_at(system, j, field, budget)).collect::<Result<Vec<_>>>()?;
    let value = per_form.iter().try_fold(0u32, |acc, c| c.value().map(|v| acc.max(v)));
    Ok(SystemComplexity { value, per_form })
}

/// The scalar `c mod p` as a point multiplier.
fn scalar_points(space: &Space, row: &[i64]) -> Vec<crate::field::Elem> {
    row.iter().map(|&c| space.field().from_int(c)).collect()
}

/// Number of tuples `v in V^r` with `r_i(v) + w-part in X` for every form,
/// given values for the shift slots.
pub fn pattern_count(system: &LinFormSystem, x: &SubsetOracle, shifts: &[Point], budget: u64) -> Result<u64> {
    if shifts.len() != system.shifts {
        return Err(Error::DimensionMismatch { expected: system.shifts, found: shifts.len() });
    }
    let space = x.space();
    for s in shifts {
        if s.0 >= space.size() {
            return Err(Error::PointOutOfRange(s.0));
        }
    }
    let r = system.arity;
    check_budget((space.size() as u128).saturating_pow(r as u32), budget)?;
    let forms: Vec<(Vec<crate::field::Elem>, Point)> = system
        .forms
        .iter()
        .map(|f| {
            let base = f.w.iter().zip(shifts).fold(Point(0), |acc, (&c, &s)| space.add(acc, space.scale_int(c, s)));
            (scalar_points(space, &f.v), base)
        })
        .collect();
    // a form is checked once its last variable is assigned
    let last: Vec<Option<usize>> = forms.iter().map(|(c, _)| c.iter().rposition(|e| !e.is_zero())).collect();
    let constant_ok = forms.iter().zip(&last).all(|((_, base), l)| l.is_some() || x.contains(*base));
    if !constant_ok {
        return Ok(0);
    }
    if r == 0 {
        return Ok(1);
    }
    let ctx = CountCtx { space, x, forms: &forms, last: &last, r };
    let per_first = crate::par::map_range(space.size(), |v1| {
        let mut values: Vec<Point> = forms.iter().map(|(_, b)| *b).collect();
        ctx.assign(0, Point(v1), &mut values)
    });
    Ok(per_first.into_iter().sum())
}

struct CountCtx<'a> {
    space: &'a Space,
    x: &'a SubsetOracle,
    forms: &'a [(Vec<crate::field::Elem>, Point)],
    last: &'a [Option<usize>],
    r: usize,
}

impl CountCtx<'_> {
    fn assign(&self, k: usize, v: Point, values: &mut [Point]) -> u64 {
        let saved: Vec<Point> = values.to_vec();
        for (i, (coeffs, _)) in self.forms.iter().enumerate() {
            let c = coeffs[k];
            if !c.is_zero() {
                values[i] = self.space.add(values[i], self.space.scale(c, v));
            }
        }
        let ok = self.last.iter().enumerate().all(|(i, l)| *l != Some(k) || self.x.contains(values[i]));
        let total = if !ok {
            0
        } else if k + 1 == self.r {
            1
        } else {
            self.space.points().map(|w| self.assign(k + 1, w, values)).sum()
        };
        values.copy_from_slice(&saved);
        total
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountingReport {
    pub complexity: Option<u32>,
    pub m: u32,
    pub nondegenerate: bool,
    pub applicable: bool,
    pub count: u64,
    pub normalized: f64,
    pub delta_power: f64,
    pub deviation: f64,
    pub eta: f64,
    /// `|I| * eta`.
    pub bound: f64,
    pub pass: bool,
    pub verdict: String,
}

/// Compares `count / |V|^r` with `delta^{|I|}` against the bound `|I| eta`,
/// `eta = ||1_X - delta||_{U_m}`. Shift slots are counted as variables.
///
/// Systems of complexity above `m`, or degenerate ones, are reported as
/// inapplicable rather than failing.
pub fn counting_check(system: &LinFormSystem, x: &SubsetOracle, m: u32, budget: u64) -> Result<CountingReport> {
    let sys = system.shifts_as_variables();
    let complexity = cs_complexity(&sys, SpanField::Rationals, SEARCH_BUDGET)?.value;
    let nondegenerate = sys.is_nondegenerate();
    let applicable = nondegenerate && complexity.is_some_and(|c| c <= m);
    let count = pattern_count(&sys, x, &[], budget)?;
    let total = libm::pow(x.space().size() as f64, sys.arity as f64);
    let normalized = count as f64 / total;
    let delta = x.density();
    let delta_power = libm::pow(delta, sys.len() as f64);
    let deviation = (normalized - delta_power).abs();
    let eta = uniformity(x, m, budget, 0, 0)?.eta;
    let bound = sys.len() as f64 * eta;
    let within = deviation <= bound + 1e-9;
    let (pass, verdict) = if applicable {
        (within, String::from(if within { "pass" } else { "fail" }))
    } else {
        (true, String::from("lemma inapplicable"))
    };
    Ok(CountingReport {
        complexity,
        m,
        nondegenerate,
        applicable,
        count,
        normalized,
        delta_power,
        deviation,
        eta,
        bound,
        pass,
        verdict,
    })
}
