//! The `Q*R` rank of polynomials and polynomial families.
//!
//! The `d`-rank of `P` is the least `r` with `P = sum_{j<=r} Q_j R_j` where
//! every `Q_j`, `R_j` has degree below `d`. Exact values come from a search
//! over factor pairs (one representative per projective class, `Q <= R`),
//! compared as value tables. Lower bounds come from the polarized bilinear
//! form when `d = 2`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_budget, Error, Result};
use crate::field::{Elem, Field};
use crate::poly::{Exponents, PolyFun};
use crate::space::{Point, Space};

/// A decomposition `P = sum Q_j R_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDecomposition {
    pub terms: Vec<(PolyFun, PolyFun)>,
}

impl RankDecomposition {
    pub fn rank(&self) -> u32 {
        self.terms.len() as u32
    }

    pub fn sum(&self, space: &Space) -> Result<PolyFun> {
        let mut acc = PolyFun::zero(space);
        for (q, r) in &self.terms {
            acc = acc.add(&q.mul(r)?)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankBounds {
    pub lower: u32,
    pub upper: u32,
    pub witness: RankDecomposition,
}

impl RankBounds {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Rank of a matrix over `F_q` by Gaussian elimination.
pub fn matrix_rank(f: &Field, mut rows: Vec<Vec<Elem>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        for e in &mut rows[rank][col..] {
            *e = f.mul(*e, inv);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let factor = row[col];
                for (e, &pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *e = f.sub(*e, f.mul(factor, pv));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Gram matrix of `(u, v) = P(u+v) - P(u) - P(v) + P(0)` on the standard basis.
pub fn bilinear_matrix(p: &PolyFun) -> Result<Vec<Vec<Elem>>> {
    let s = p.space();
    let n = s.dim() as usize;
    let basis: Vec<Point> = (0..n)
        .map(|i| {
            let mut c = vec![Elem::ZERO; n];
            c[i] = Elem::ONE;
            s.encode(&c)
        })
        .collect::<Result<_>>()?;
    let mut m = vec![vec![Elem::ZERO; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = p.multilinear_form(Point(0), &[basis[i], basis[j]])?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// `ceil(rank(B) / 2)` for the polarized bilinear form `B` of a quadratic `P`.
///
/// A product of two affine functions polarizes to a form of rank at most 2, so
/// `P` needs at least this many products in any characteristic.
pub fn bilinear_lower_bound(p: &PolyFun) -> Result<u32> {
    if p.degree() != Some(2) {
        return Err(Error::InvalidArgument("bilinear lower bound needs a degree-2 polynomial".into()));
    }
    let r = matrix_rank(p.field(), bilinear_matrix(p)?) as u32;
    Ok(r.div_ceil(2))
}

/// The grouping decomposition: top-degree monomials grouped by their first
/// variable, plus the lower-degree remainder as `1 * rest`.
pub fn grouping_decomposition(p: &PolyFun, d: u32) -> Result<RankDecomposition> {
    let s = p.space();
    let mut groups: BTreeMap<usize, Vec<(Exponents, Elem)>> = BTreeMap::new();
    let mut rest = Vec::new();
    for (e, c) in p.terms() {
        let deg: u32 = e.iter().sum();
        if deg > d {
            return Err(Error::InvalidArgument(alloc::format!("polynomial has degree {deg} > {d}")));
        }
        if deg == d {
            let i = e.iter().position(|&x| x > 0).expect("positive degree");
            let mut co = e.clone();
            co[i] -= 1;
            groups.entry(i).or_default().push((co, c));
        } else {
            rest.push((e.clone(), c));
        }
    }
    let mut terms = Vec::new();
    for (i, cof) in groups {
        terms.push((PolyFun::var(s, i), PolyFun::from_terms(s, cof)?));
    }
    if !rest.is_empty() {
        terms.push((PolyFun::constant(s, Elem::ONE), PolyFun::from_terms(s, rest)?));
    }
    Ok(RankDecomposition { terms })
}

struct FactorSearch<'a> {
    space: &'a Space,
    monomials: Vec<Exponents>,
    classes: Vec<Vec<Elem>>,
    pairs: Vec<(u32, u32)>,
    products: Vec<Vec<Elem>>,
    normalized: BTreeMap<Vec<Elem>, u32>,
}

fn normalize(f: &Field, t: &[Elem]) -> Option<(Elem, Vec<Elem>)> {
    let lead = *t.iter().find(|c| !c.is_zero())?;
    let inv = f.inv(lead).expect("nonzero");
    Some((lead, t.iter().map(|&c| f.mul(c, inv)).collect()))
}

fn projective_classes(q: u32, len: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for lead in 0..len {
        let free = len - lead - 1;
        let count = (q as u64).pow(free as u32);
        for mut k in 0..count {
            let mut v = vec![Elem::ZERO; len];
            v[lead] = Elem::ONE;
            for slot in v[lead + 1..].iter_mut() {
                *slot = Elem((k % q as u64) as u32);
                k /= q as u64;
            }
            out.push(v);
        }
    }
    out
}

impl<'a> FactorSearch<'a> {
    fn classes_count(space: &Space, d: u32) -> u128 {
        let m = PolyFun::monomials_up_to(space, d - 1).len() as u32;
        let q = space.q() as u128;
        q.checked_pow(m).map_or(u128::MAX >> 70, |t| (t - 1) / (q - 1))
    }

    fn new(space: &'a Space, d: u32, budget: u64) -> Result<FactorSearch<'a>> {
        let size = space.size() as u128;
        let nclass = FactorSearch::classes_count(space, d);
        let npairs = nclass * (nclass + 1) / 2;
        check_budget(npairs.saturating_mul(size), budget)?;
        let f = space.field();
        let monomials = PolyFun::monomials_up_to(space, d - 1);
        let classes = projective_classes(space.q(), monomials.len());
        let tables: Vec<Vec<Elem>> = classes
            .iter()
            .map(|c| FactorSearch::poly_of(space, &monomials, c).table(u64::MAX))
            .collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        let mut products = Vec::new();
        let mut normalized = BTreeMap::new();
        for i in 0..tables.len() {
            for j in i..tables.len() {
                let prod: Vec<Elem> = tables[i].iter().zip(&tables[j]).map(|(&a, &b)| f.mul(a, b)).collect();
                let idx = pairs.len() as u32;
                if let Some((_, norm)) = normalize(f, &prod) {
                    normalized.entry(norm).or_insert(idx);
                }
                pairs.push((i as u32, j as u32));
                products.push(prod);
            }
        }
        Ok(FactorSearch { space, monomials, classes, pairs, products, normalized })
    }

    fn poly_of(space: &Space, monomials: &[Exponents], coeffs: &[Elem]) -> PolyFun {
        PolyFun::from_terms(space, monomials.iter().cloned().zip(coeffs.iter().copied())).expect("sized monomials")
    }

    fn term(&self, pair: u32, scale: Elem) -> (PolyFun, PolyFun) {
        let (i, j) = self.pairs[pair as usize];
        let q = FactorSearch::poly_of(self.space, &self.monomials, &self.classes[i as usize]).scale(scale);
        let r = FactorSearch::poly_of(self.space, &self.monomials, &self.classes[j as usize]);
        (q, r)
    }

    fn lookup(&self, residual: &[Elem]) -> Option<(u32, Elem)> {
        let (lead, norm) = normalize(self.space.field(), residual)?;
        let &idx = self.normalized.get(&norm)?;
        let f = self.space.field();
        let plead = *self.products[idx as usize].iter().find(|c| !c.is_zero()).expect("nonzero product");
        Some((idx, f.mul(lead, f.inv(plead).expect("nonzero"))))
    }
}

/// Exhaustive search for a decomposition of `P` with at most `max_r` terms.
///
/// Returns `Ok(None)` when no decomposition with `max_r` terms exists, and
/// [`Error::BudgetExceeded`] when some level of the search cannot be afforded.
pub fn rank_exact_small(p: &PolyFun, d: u32, max_r: u32, budget: u64) -> Result<Option<RankDecomposition>> {
    check_degree(p, d)?;
    if max_r > 3 {
        return Err(Error::InvalidArgument("exact rank search supports at most 3 terms".into()));
    }
    let s = p.space();
    if p.is_zero() {
        return Ok(Some(RankDecomposition { terms: Vec::new() }));
    }
    if max_r == 0 {
        return Ok(None);
    }
    let search = FactorSearch::new(s, d, budget)?;
    let f = s.field();
    let target = p.table(u64::MAX)?;
    if let Some((idx, c)) = search.lookup(&target) {
        return Ok(Some(RankDecomposition { terms: vec![search.term(idx, c)] }));
    }
    if max_r == 1 {
        return Ok(None);
    }
    let size = s.size() as u128;
    let npairs = search.pairs.len() as u128;
    let q = s.q();
    check_budget(npairs * (q as u128 - 1) * size * 2, budget)?;
    let scalars: Vec<Elem> = (1..q).map(Elem).collect();
    let mut residual = vec![Elem::ZERO; target.len()];
    for a in 0..search.pairs.len() as u32 {
        for &c in &scalars {
            for (k, r) in residual.iter_mut().enumerate() {
                *r = f.sub(target[k], f.mul(c, search.products[a as usize][k]));
            }
            if let Some((b, cb)) = search.lookup(&residual) {
                return Ok(Some(RankDecomposition { terms: vec![search.term(a, c), search.term(b, cb)] }));
            }
        }
    }
    if max_r == 2 {
        return Ok(None);
    }
    let qm = q as u128 - 1;
    check_budget(npairs * (npairs + 1) / 2 * qm * qm * size * 2, budget)?;
    let mut partial = vec![Elem::ZERO; target.len()];
    for a in 0..search.pairs.len() as u32 {
        for &ca in &scalars {
            for (k, r) in partial.iter_mut().enumerate() {
                *r = f.sub(target[k], f.mul(ca, search.products[a as usize][k]));
            }
            for b in a..search.pairs.len() as u32 {
                for &cb in &scalars {
                    for (k, r) in residual.iter_mut().enumerate() {
                        *r = f.sub(partial[k], f.mul(cb, search.products[b as usize][k]));
                    }
                    if let Some((c, cc)) = search.lookup(&residual) {
                        return Ok(Some(RankDecomposition {
                            terms: vec![search.term(a, ca), search.term(b, cb), search.term(c, cc)],
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn check_degree(p: &PolyFun, d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument("rank is defined for degree at least 2".into()));
    }
    match p.degree() {
        Some(e) if e == d => Ok(()),
        None => Ok(()),
        Some(e) => Err(Error::InvalidArgument(alloc::format!("polynomial has reduced degree {e}, expected {d}"))),
    }
}

/// Lower and upper bounds on the `d`-rank, with a witness for the upper bound.
///
/// The exact search is run for as many levels as the budget allows; every
/// level it completes without success raises the lower bound.
pub fn rank_bounds(p: &PolyFun, d: u32, budget: u64) -> Result<RankBounds> {
    check_degree(p, d)?;
    let s = p.space();
    let grouping = grouping_decomposition(p, d)?;
    let mut lower = 0;
    if d == 2 && !p.is_zero() {
        lower = lower.max(bilinear_lower_bound(p)?);
    }
    let mut best = grouping;
    for r in 1..=3u32.min(best.rank().saturating_sub(1)) {
        if r < lower {
            continue;
        }
        match rank_exact_small(p, d, r, budget) {
            Ok(Some(dec)) => {
                best = dec;
                break;
            }
            Ok(None) => lower = r + 1,
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    debug_assert_eq!(best.sum(s).ok().as_ref(), Some(p));
    let upper = best.rank();
    Ok(RankBounds { lower: lower.min(upper), upper, witness: best })
}

/// Bounds on the rank of a family: the minimum, over degree buckets and over
/// nonzero linear combinations within a bucket (one per projective class), of
/// the rank of the combination.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRank {
    pub lower: u32,
    pub upper: u32,
    /// The combination attaining `upper`, as coefficients on the bucket members.
    pub minimizer: Vec<(usize, Elem)>,
}

pub fn family_rank(family: &[PolyFun], budget: u64) -> Result<FamilyRank> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty polynomial family".into()));
    }
    let mut buckets: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, p) in family.iter().enumerate() {
        match p.degree() {
            Some(d) if d >= 2 => buckets.entry(d).or_default().push(i),
            other => {
                return Err(Error::InvalidArgument(alloc::format!(
                    "family member {} has degree {:?}; rank needs degree at least 2",
                    i + 1,
                    other
                )))
            }
        }
    }
    let space = family[0].space();
    let q = space.q();
    let mut best: Option<FamilyRank> = None;
    for (d, members) in buckets {
        let combos = (q as u128).pow(members.len() as u32);
        check_budget(combos, budget)?;
        for coeffs in projective_classes(q, members.len()) {
            let mut comb = PolyFun::zero(space);
            for (&i, &c) in members.iter().zip(&coeffs) {
                comb = comb.add(&family[i].scale(c))?;
            }
            let (lo, hi) = match comb.degree() {
                None => (0, 0),
                Some(e) if e < d => (1, 1),
                Some(_) => {
                    let b = rank_bounds(&comb, d, budget)?;
                    (b.lower, b.upper)
                }
            };
            let cand = FamilyRank {
                lower: lo,
                upper: hi,
                minimizer: members.iter().copied().zip(coeffs.iter().copied()).collect(),
            };
            best = Some(match best {
                None => cand,
                Some(b) => FamilyRank {
                    lower: b.lower.min(cand.lower),
                    upper: b.upper.min(cand.upper),
                    minimizer: if cand.upper < b.upper { cand.minimizer } else { b.minimizer },
                },
            });
        }
    }
    Ok(best.expect("nonempty family"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;
    use alloc::sync::Arc;

    fn space(p: u32, n: u32) -> Space {
        Space::new(Arc::new(Field::prime(p).unwrap()), n).unwrap()
    }

    fn x(s: &Space, i: usize) -> PolyFun {
        PolyFun::var(s, i)
    }

    fn prod(s: &Space, i: usize, j: usize) -> PolyFun {
        x(s, i).mul(&x(s, j)).unwrap()
    }

    /// Brute force over every (unnormalized) pair of affine functions.
    fn rank_one_brute(p: &PolyFun) -> bool {
        let s = p.space();
        let n = s.dim() as usize;
        let q = s.q() as u64;
        let count = q.pow(n as u32 + 1);
        let affine = |mut k: u64| {
            let mut terms = Vec::new();
            for i in 0..=n {
                let mut e = vec![0u32; n];
                if i < n {
                    e[i] = 1;
                }
                terms.push((e, Elem((k % q) as u32)));
                k /= q;
            }
            PolyFun::from_terms(s, terms).unwrap()
        };
        (0..count).any(|a| (0..count).any(|b| affine(a).mul(&affine(b)).unwrap() == *p))
    }

    #[test]
    fn exact_rank_examples() {
        let s = space(3, 2);
        let r = rank_exact_small(&prod(&s, 0, 1), 2, 2, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(r.rank(), 1);
        assert_eq!(r.sum(&s).unwrap(), prod(&s, 0, 1));

        let sq = prod(&s, 0, 0);
        assert_eq!(rank_exact_small(&sq, 2, 2, DEFAULT_BUDGET).unwrap().unwrap().rank(), 1);

        let sum_sq = prod(&s, 0, 0).add(&prod(&s, 1, 1)).unwrap();
        assert!(!rank_one_brute(&sum_sq));
        assert!(rank_exact_small(&sum_sq, 2, 1, DEFAULT_BUDGET).unwrap().is_none());
        let dec = rank_exact_small(&sum_sq, 2, 2, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(dec.rank(), 2);
        assert_eq!(dec.sum(&s).unwrap(), sum_sq);
    }

    #[test]
    fn rank_one_search_matches_brute_force() {
        use rand::SeedableRng;
        let s = space(3, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let p = PolyFun::random_exact_degree(&s, 2, &mut rng).unwrap();
            let fast = rank_exact_small(&p, 2, 1, DEFAULT_BUDGET).unwrap().is_some();
            assert_eq!(fast, rank_one_brute(&p), "{p:?}");
        }
    }

    #[test]
    fn bounds_examples() {
        let s = space(3, 2);
        let b = rank_bounds(&prod(&s, 0, 1), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!((b.lower, b.upper), (1, 1));

        let s4 = space(3, 4);
        let q4 = prod(&s4, 0, 1).add(&prod(&s4, 2, 3)).unwrap();
        assert_eq!(matrix_rank(s4.field(), bilinear_matrix(&q4).unwrap()), 4);
        let b = rank_bounds(&q4, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!((b.lower, b.upper), (2, 2));

        let s6 = space(2, 6);
        let q6 = prod(&s6, 0, 1).add(&prod(&s6, 2, 3)).unwrap().add(&prod(&s6, 4, 5)).unwrap();
        let b = rank_bounds(&q6, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!((b.lower, b.upper), (3, 3));
        assert_eq!(b.witness.sum(&s6).unwrap(), q6);

        // degree 3, beyond the exact search: grouping only
        let s5 = space(3, 5);
        let c = prod(&s5, 0, 1).mul(&x(&s5, 2)).unwrap().add(&prod(&s5, 3, 3).mul(&x(&s5, 4)).unwrap()).unwrap();
        let b = rank_bounds(&c, 3, 1 << 20).unwrap();
        assert_eq!((b.lower, b.upper), (0, 2));
        assert_eq!(b.witness.sum(&s5).unwrap(), c);
    }

    #[test]
    fn family_examples() {
        let s = space(3, 3);
        assert_eq!(family_rank(&[prod(&s, 0, 1)], DEFAULT_BUDGET).unwrap().upper, 1);
        let fam = family_rank(&[prod(&s, 0, 1), prod(&s, 0, 2)], DEFAULT_BUDGET).unwrap();
        assert_eq!((fam.lower, fam.upper), (1, 1));

        let s4 = space(3, 4);
        let q4 = prod(&s4, 0, 1).add(&prod(&s4, 2, 3)).unwrap();
        let fam = family_rank(&[q4], DEFAULT_BUDGET).unwrap();
        assert_eq!((fam.lower, fam.upper), (2, 2));

        assert!(family_rank(&[x(&s, 0)], DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn quadratic_bias_matches_bilinear_rank() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for p in [3u32, 5] {
            for n in 1..=4u32 {
                if p == 5 && n > 3 {
                    continue;
                }
                let s = space(p, n);
                for _ in 0..10 {
                    let mut terms = Vec::new();
                    for i in 0..n as usize {
                        for j in i..n as usize {
                            let mut e = vec![0u32; n as usize];
                            e[i] += 1;
                            e[j] += 1;
                            terms.push((e, Elem(rng.gen_range(0..p))));
                        }
                    }
                    let qf = PolyFun::from_terms(&s, terms).unwrap();
                    let r = matrix_rank(s.field(), bilinear_matrix(&qf).unwrap());
                    let want = (p as f64).powf(-(r as f64) / 2.0);
                    assert!((qf.bias(DEFAULT_BUDGET).unwrap() - want).abs() < 1e-9);
                }
            }
        }
    }
}
