//! Cubes `(u | v_1..v_m)`, almost cubes, alternating sums, and cube statistics
//! inside a subset `X` of `V`.
//!
//! Cubes are parameter tuples: repeated or zero directions are allowed and
//! each `(u, v)` is counted once.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitSet;
use crate::error::{check_budget, Error, Result};
use crate::groupfun::GroupFun;
use crate::rng::{self, purpose, StreamRng};
use crate::space::{Point, Space};
use crate::stats::{wilson_interval, Z95};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cube {
    pub u: Point,
    pub dirs: Vec<Point>,
}

/// A cube with the base vertex `u` (the `omega = 0` vertex) removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlmostCube {
    pub u: Point,
    pub dirs: Vec<Point>,
}

impl Cube {
    pub fn new(u: Point, dirs: Vec<Point>) -> Cube {
        Cube { u, dirs }
    }

    pub fn m(&self) -> usize {
        self.dirs.len()
    }

    /// The `2^m` vertices, indexed by `omega` as a bitmask.
    pub fn vertices(&self, space: &Space) -> Vec<Point> {
        let mut out = Vec::with_capacity(1 << self.dirs.len());
        space.cube_vertices(self.u, &self.dirs, &mut out);
        out
    }
}

impl AlmostCube {
    pub fn new(u: Point, dirs: Vec<Point>) -> AlmostCube {
        AlmostCube { u, dirs }
    }

    /// The `2^m - 1` vertices with `omega != 0`, in bitmask order starting at `omega = 1`.
    pub fn vertices(&self, space: &Space) -> Vec<Point> {
        let mut out = Vec::with_capacity(1 << self.dirs.len());
        space.cube_vertices(self.u, &self.dirs, &mut out);
        out.remove(0);
        out
    }
}

/// A subset `X` of `V` with both a membership bitset and a member list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetOracle {
    space: Space,
    mask: BitSet,
    members: Vec<Point>,
}

impl SubsetOracle {
    pub fn new(space: &Space, mask: BitSet) -> Result<SubsetOracle> {
        if mask.len() != space.size() {
            return Err(Error::DimensionMismatch { expected: space.size() as usize, found: mask.len() as usize });
        }
        let members: Vec<Point> = mask.iter().map(Point).collect();
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(SubsetOracle { space: space.clone(), mask, members })
    }

    pub fn full(space: &Space) -> SubsetOracle {
        SubsetOracle::new(space, BitSet::full(space.size())).expect("V is nonempty")
    }

    pub fn from_points(space: &Space, points: impl IntoIterator<Item = Point>) -> Result<SubsetOracle> {
        let size = space.size();
        let mut mask = BitSet::new(size);
        for p in points {
            if p.0 >= size {
                return Err(Error::PointOutOfRange(p.0));
            }
            mask.insert(p.0);
        }
        SubsetOracle::new(space, mask)
    }

    pub fn from_predicate(space: &Space, mut pred: impl FnMut(Point) -> bool) -> Result<SubsetOracle> {
        SubsetOracle::new(space, BitSet::from_indices(space.size(), space.points().filter(|&x| pred(x)).map(|x| x.0)))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn mask(&self) -> &BitSet {
        &self.mask
    }

    pub fn members(&self) -> &[Point] {
        &self.members
    }

    pub fn len(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: Point) -> bool {
        self.mask.contains(x.0)
    }

    /// `|X| / q^n`.
    pub fn density(&self) -> f64 {
        self.members.len() as f64 / self.space.size() as f64
    }
}

#[inline]
fn signed_sum(f: &GroupFun, verts: &[Point], skip_base: bool) -> Result<u32> {
    let n = f.modulus() as u64;
    let mut acc = 0u64;
    for (omega, &v) in verts.iter().enumerate() {
        if skip_base && omega == 0 {
            continue;
        }
        let val = f.get(v).ok_or(Error::VertexOutsideDomain(v.0))? as u64;
        if omega.count_ones() % 2 == 0 {
            acc += val;
        } else {
            acc += n - val;
        }
    }
    Ok((acc % n) as u32)
}

/// `f_m(u | v) = sum_omega (-1)^{|omega|} f(u + omega . v)` in `Z/N`.
pub fn alt_sum(f: &GroupFun, c: &Cube) -> Result<u32> {
    signed_sum(f, &c.vertices(f.space()), false)
}

/// `f'_m(u | v) = sum_{omega != 0} (-1)^{|omega|} f(u + omega . v)` in `Z/N`.
pub fn alt_sum_prime(f: &GroupFun, c: &AlmostCube) -> Result<u32> {
    let mut verts = Vec::with_capacity(1 << c.dirs.len());
    f.space().cube_vertices(c.u, &c.dirs, &mut verts);
    signed_sum(f, &verts, true)
}

/// Steps of an exhaustive pass over `C_m(X)`: `q^{n(m+1)}`.
pub fn exhaustive_cost(space: &Space, m: u32) -> u128 {
    (space.size() as u128).saturating_pow(m + 1)
}

/// Visits every cube of `C_m(X)` with base point `u` (which must lie in `X`),
/// passing its vertices (bitmask order) and directions.
pub fn for_each_cube_at(x: &SubsetOracle, m: u32, u: Point, visit: &mut impl FnMut(&[Point], &[Point])) {
    if !x.contains(u) {
        return;
    }
    let mut verts = Vec::with_capacity(1 << m);
    verts.push(u);
    let mut dirs = Vec::with_capacity(m as usize);
    walk(x, m, &mut verts, &mut dirs, visit);
}

fn walk(
    x: &SubsetOracle,
    m: u32,
    verts: &mut Vec<Point>,
    dirs: &mut Vec<Point>,
    visit: &mut impl FnMut(&[Point], &[Point]),
) {
    if dirs.len() == m as usize {
        visit(verts, dirs);
        return;
    }
    let space = x.space();
    let len = verts.len();
    'dir: for v in space.points() {
        for k in 0..len {
            let p = space.add(verts[k], v);
            if !x.contains(p) {
                verts.truncate(len);
                continue 'dir;
            }
            verts.push(p);
        }
        dirs.push(v);
        walk(x, m, verts, dirs, visit);
        dirs.pop();
        verts.truncate(len);
    }
}

/// All cubes of `C_m(X)`, ordered by base point then directions.
pub fn enumerate_cubes(x: &SubsetOracle, m: u32, budget: u64) -> Result<Vec<Cube>> {
    check_budget(exhaustive_cost(x.space(), m), budget)?;
    let mut out = Vec::new();
    for &u in x.members() {
        for_each_cube_at(x, m, u, &mut |_, dirs| out.push(Cube::new(u, dirs.to_vec())));
    }
    Ok(out)
}

/// `|C_m(X)|`.
pub fn count_cubes(x: &SubsetOracle, m: u32, budget: u64) -> Result<u64> {
    check_budget(exhaustive_cost(x.space(), m), budget)?;
    let counts = crate::par::map_slice(x.members(), |&u| {
        let mut c = 0u64;
        for_each_cube_at(x, m, u, &mut |_, _| c += 1);
        c
    });
    Ok(counts.into_iter().sum())
}

/// Attempt cap for one rejection-sampled draw: `10^4` times the expected
/// wait `delta^{-(2^m - 1)}`, clamped to `[10^4, 10^8]`.
pub fn rejection_cap(density: f64, m: u32) -> u64 {
    let wait = libm::pow(density, -(((1u64 << m) - 1) as f64));
    let cap = 1e4 * wait;
    if cap.is_finite() {
        (libm::ceil(cap) as u64).clamp(10_000, MAX_ATTEMPTS_PER_DRAW)
    } else {
        MAX_ATTEMPTS_PER_DRAW
    }
}

pub const MAX_ATTEMPTS_PER_DRAW: u64 = 100_000_000;

fn random_dirs(rng: &mut StreamRng, space: &Space, m: u32, out: &mut Vec<Point>) {
    out.clear();
    for _ in 0..m {
        out.push(Point(rng.gen_range(0..space.size())));
    }
}

fn vertices_in(x: &SubsetOracle, u: Point, dirs: &[Point], verts: &mut Vec<Point>, skip_base: bool) -> bool {
    let space = x.space();
    verts.clear();
    verts.push(u);
    for &v in dirs {
        let len = verts.len();
        for k in 0..len {
            let p = space.add(verts[k], v);
            if !x.contains(p) {
                return false;
            }
            verts.push(p);
        }
    }
    skip_base || x.contains(u)
}

/// One rejection-sampled cube: `u` uniform in `X`, directions uniform in `V^m`.
/// Returns the cube and the attempts used, or `None` with the attempts spent.
pub fn draw_cube(rng: &mut StreamRng, x: &SubsetOracle, m: u32, cap: u64) -> (Option<Cube>, u64) {
    let mut dirs = Vec::with_capacity(m as usize);
    let mut verts = Vec::with_capacity(1 << m);
    for attempt in 1..=cap {
        let u = x.members()[rng.gen_range(0..x.members().len())];
        random_dirs(rng, x.space(), m, &mut dirs);
        if vertices_in(x, u, &dirs, &mut verts, false) {
            return (Some(Cube::new(u, dirs)), attempt);
        }
    }
    (None, cap)
}

/// One rejection-sampled completion `v` with `(a | v)' in C'_m(X)`.
pub fn draw_completion(rng: &mut StreamRng, x: &SubsetOracle, a: Point, m: u32, cap: u64) -> (Option<Vec<Point>>, u64) {
    let mut dirs = Vec::with_capacity(m as usize);
    let mut verts = Vec::with_capacity(1 << m);
    for attempt in 1..=cap {
        random_dirs(rng, x.space(), m, &mut dirs);
        if vertices_in(x, a, &dirs, &mut verts, true) {
            return (Some(dirs), attempt);
        }
    }
    (None, cap)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubeSample {
    pub cubes: Vec<Cube>,
    pub attempts: u64,
    pub acceptance: f64,
}

/// `count` cubes of `C_m(X)` by rejection sampling, from stream `(seed, stream)`.
pub fn sample_cubes_stream(x: &SubsetOracle, m: u32, count: u64, seed: u64, stream: u64) -> Result<CubeSample> {
    let mut rng = rng::stream(seed, purpose::CUBES, stream);
    let cap = rejection_cap(x.density(), m);
    let mut cubes = Vec::with_capacity(count as usize);
    let mut attempts = 0u64;
    for _ in 0..count {
        let (c, used) = draw_cube(&mut rng, x, m, cap);
        attempts += used;
        match c {
            Some(c) => cubes.push(c),
            None => return Err(Error::RejectionExhausted { attempts, accepted: cubes.len() as u64, wanted: count }),
        }
    }
    let acceptance = if attempts == 0 { 1.0 } else { count as f64 / attempts as f64 };
    Ok(CubeSample { cubes, attempts, acceptance })
}

pub fn sample_cubes(x: &SubsetOracle, m: u32, count: u64, seed: u64) -> Result<CubeSample> {
    sample_cubes_stream(x, m, count, seed, 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionSample {
    pub anchor: Point,
    pub completions: Vec<Vec<Point>>,
    pub attempts: u64,
    pub acceptance: f64,
}

/// `count` uniform samples from `Y_a = { v : (a | v)' in C'_m(X) }`, from
/// stream `(seed, a)`.
pub fn sample_completions(a: Point, x: &SubsetOracle, m: u32, count: u64, seed: u64) -> Result<CompletionSample> {
    if a.0 >= x.space().size() {
        return Err(Error::PointOutOfRange(a.0));
    }
    let mut rng = rng::stream(seed, purpose::COMPLETIONS, a.0);
    let cap = rejection_cap(x.density(), m);
    let mut completions = Vec::with_capacity(count as usize);
    let mut attempts = 0;
    for _ in 0..count {
        let (c, used) = draw_completion(&mut rng, x, a, m, cap);
        attempts += used;
        match c {
            Some(c) => completions.push(c),
            None => {
                return Err(Error::RejectionExhausted { attempts, accepted: completions.len() as u64, wanted: count })
            }
        }
    }
    let acceptance = if attempts == 0 { 1.0 } else { count as f64 / attempts as f64 };
    Ok(CompletionSample { anchor: a, completions, attempts, acceptance })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BadFractionReport {
    pub mode: Mode,
    pub m: u32,
    pub samples: u64,
    pub bad: u64,
    pub eps: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: Option<u64>,
    /// Rejection attempts (sampled mode only).
    pub attempts: u64,
}

impl BadFractionReport {
    fn new(mode: Mode, m: u32, samples: u64, bad: u64, seed: Option<u64>, attempts: u64) -> BadFractionReport {
        let eps = if samples == 0 { 0.0 } else { bad as f64 / samples as f64 };
        let (ci_low, ci_high) = match mode {
            Mode::Exhaustive => (eps, eps),
            Mode::Sampled => wilson_interval(bad, samples, Z95),
        };
        BadFractionReport { mode, m, samples, bad, eps, ci_low, ci_high, seed, attempts }
    }
}

/// Exact `(|C_m(X)|, #{c : f_m(c) != 0})`.
pub fn bad_count_exhaustive(f: &GroupFun, x: &SubsetOracle, m: u32, budget: u64) -> Result<(u64, u64)> {
    check_budget(exhaustive_cost(x.space(), m), budget)?;
    if let Some(&p) = x.members().iter().find(|&&p| !f.contains(p)) {
        return Err(Error::VertexOutsideDomain(p.0));
    }
    let n = f.modulus() as u64;
    let per_u = crate::par::map_slice(x.members(), |&u| {
        let (mut total, mut bad) = (0u64, 0u64);
        for_each_cube_at(x, m, u, &mut |verts, _| {
            total += 1;
            let mut acc = 0u64;
            for (omega, &v) in verts.iter().enumerate() {
                let val = f.value_unchecked(v) as u64;
                acc += if omega.count_ones() % 2 == 0 { val } else { n - val };
            }
            if acc % n != 0 {
                bad += 1;
            }
        });
        (total, bad)
    });
    Ok(per_u.into_iter().fold((0, 0), |(t, b), (t2, b2)| (t + t2, b + b2)))
}

const SAMPLE_CHUNK: u64 = 1024;

/// Fraction of cubes in `C_m(X)` on which `f_m` does not vanish.
///
/// Exhaustive when `q^{n(m+1)} <= budget`; otherwise `samples` cubes are drawn
/// by rejection in chunks of 1024, chunk `k` using stream `k`.
pub fn bad_fraction(
    f: &GroupFun,
    x: &SubsetOracle,
    m: u32,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<BadFractionReport> {
    if exhaustive_cost(x.space(), m) <= budget as u128 {
        let (total, bad) = bad_count_exhaustive(f, x, m, budget)?;
        return Ok(BadFractionReport::new(Mode::Exhaustive, m, total, bad, None, 0));
    }
    bad_fraction_sampled(f, x, m, samples, seed)
}

pub fn bad_fraction_sampled(
    f: &GroupFun,
    x: &SubsetOracle,
    m: u32,
    samples: u64,
    seed: u64,
) -> Result<BadFractionReport> {
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let results = crate::par::map_range(chunks, |k| -> Result<(u64, u64, u64)> {
        let want = SAMPLE_CHUNK.min(samples - k * SAMPLE_CHUNK);
        let s = sample_cubes_stream(x, m, want, seed, k)?;
        let mut bad = 0;
        for c in &s.cubes {
            if alt_sum(f, c)? != 0 {
                bad += 1;
            }
        }
        Ok((want, bad, s.attempts))
    });
    let (mut n, mut bad, mut attempts) = (0, 0, 0);
    for r in results {
        let (a, b, c) = r?;
        n += a;
        bad += b;
        attempts += c;
    }
    Ok(BadFractionReport::new(Mode::Sampled, m, n, bad, Some(seed), attempts))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiberStats {
    pub domain_size: u64,
    pub fibers: u64,
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    /// `max / min` over nonempty fibers.
    pub homogeneity: f64,
}

/// Exact fiber sizes of `map` on `domain`, counting only images accepted by `keep`.
pub fn fiber_statistics<T, K: Ord>(
    domain: impl IntoIterator<Item = T>,
    map: impl Fn(&T) -> K,
    keep: impl Fn(&K) -> bool,
) -> FiberStats {
    let mut counts: BTreeMap<K, u64> = BTreeMap::new();
    let mut domain_size = 0;
    for t in domain {
        let k = map(&t);
        if keep(&k) {
            *counts.entry(k).or_default() += 1;
            domain_size += 1;
        }
    }
    let min = counts.values().copied().min().unwrap_or(0);
    let max = counts.values().copied().max().unwrap_or(0);
    let fibers = counts.len() as u64;
    FiberStats {
        domain_size,
        fibers,
        min,
        max,
        mean: if fibers == 0 { 0.0 } else { domain_size as f64 / fibers as f64 },
        homogeneity: if min == 0 { 0.0 } else { max as f64 / min as f64 },
    }
}

/// Fiber statistics of `p_m(u, v, w) = (a + u | w_1, ..., w_{m-1}, w_m - u)`
/// restricted to the tuples for which both `(a+u | .., w_m - u)` and
/// `(a+v | .., w_m - v)` lie in `C_m(X)`.
pub fn pm_fiber_statistics(x: &SubsetOracle, a: Point, m: u32, budget: u64) -> Result<FiberStats> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let space = x.space();
    let size = space.size();
    let arity = m + 2;
    check_budget((size as u128).saturating_pow(arity) << m, budget)?;
    let cube_of = |u: Point, w: &[Point]| -> Cube {
        let mut dirs = w.to_vec();
        let last = dirs.len() - 1;
        dirs[last] = space.sub(dirs[last], u);
        Cube::new(space.add(a, u), dirs)
    };
    let in_x = |c: &Cube| -> bool {
        let mut verts = Vec::new();
        vertices_in(x, c.u, &c.dirs, &mut verts, false)
    };
    let total = size.pow(arity);
    let tuples = (0..total).filter_map(|mut k| {
        let mut t = vec![Point(0); arity as usize];
        for slot in t.iter_mut() {
            *slot = Point(k % size);
            k /= size;
        }
        let (u, v, w) = (t[0], t[1], &t[2..]);
        let cu = cube_of(u, w);
        if in_x(&cu) && in_x(&cube_of(v, w)) {
            Some(cu)
        } else {
            None
        }
    });
    Ok(fiber_statistics(tuples, |c| c.clone(), |_| true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Elem, Field};
    use crate::poly::PolyFun;
    use crate::DEFAULT_BUDGET;
    use alloc::sync::Arc;

    fn space(p: u32, n: u32) -> Space {
        Space::new(Arc::new(Field::prime(p).unwrap()), n).unwrap()
    }

    fn total(s: &Space, n: u32, values: Vec<u32>) -> GroupFun {
        GroupFun::total(s, n, values).unwrap()
    }

    #[test]
    fn alt_sum_examples() {
        let s = space(3, 1);
        let c = total(&s, 3, vec![2, 2, 2]);
        assert_eq!(alt_sum(&c, &Cube::new(Point(1), vec![Point(2), Point(1)])).unwrap(), 0);
        let sq = total(&s, 3, vec![0, 1, 1]);
        assert_eq!(alt_sum(&sq, &Cube::new(Point(0), vec![Point(1), Point(1)])).unwrap(), 2);
        let id = total(&s, 3, vec![0, 1, 2]);
        assert_eq!(alt_sum_prime(&id, &AlmostCube::new(Point(0), vec![Point(1), Point(1)])).unwrap(), 0);
        assert_eq!(alt_sum_prime(&c, &AlmostCube::new(Point(0), vec![Point(1), Point(2)])).unwrap(), 1);

        let s2 = space(3, 2);
        let lin = GroupFun::from_poly(
            &PolyFun::var(&s2, 0).add(&PolyFun::var(&s2, 1).scale(Elem(2))).unwrap(),
            BitSet::full(9),
            DEFAULT_BUDGET,
        )
        .unwrap();
        for u in s2.points() {
            for h1 in s2.points() {
                for h2 in s2.points() {
                    assert_eq!(alt_sum(&lin, &Cube::new(u, vec![h1, h2])).unwrap(), 0);
                }
            }
        }

        let partial = GroupFun::new(&s, 3, BitSet::from_indices(3, [0, 1]), vec![0, 1, 0]).unwrap();
        assert_eq!(alt_sum(&partial, &Cube::new(Point(0), vec![Point(2)])), Err(Error::VertexOutsideDomain(2)));
    }

    #[test]
    fn enumeration_examples() {
        let s = space(2, 1);
        assert_eq!(enumerate_cubes(&SubsetOracle::full(&s), 1, DEFAULT_BUDGET).unwrap().len(), 4);

        let s3 = space(3, 1);
        let single = SubsetOracle::from_points(&s3, [Point(0)]).unwrap();
        let cubes = enumerate_cubes(&single, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(cubes, vec![Cube::new(Point(0), vec![Point(0), Point(0)])]);

        let s2 = space(2, 2);
        let hyper = SubsetOracle::from_predicate(&s2, |p| s2.coord(p, 0) == Elem(0)).unwrap();
        assert_eq!(enumerate_cubes(&hyper, 1, DEFAULT_BUDGET).unwrap().len(), 4);
        assert!(matches!(enumerate_cubes(&hyper, 1, 10), Err(Error::BudgetExceeded { .. })));
    }

    /// Naive count over all parameter tuples.
    fn brute_cubes(x: &SubsetOracle, m: u32) -> u64 {
        let s = x.space();
        let size = s.size();
        let total = size.pow(m + 1);
        (0..total)
            .filter(|&k| {
                let mut k = k;
                let u = Point(k % size);
                k /= size;
                let dirs: Vec<Point> = (0..m)
                    .map(|_| {
                        let d = Point(k % size);
                        k /= size;
                        d
                    })
                    .collect();
                Cube::new(u, dirs).vertices(s).iter().all(|&v| x.contains(v))
            })
            .count() as u64
    }

    #[test]
    fn pruned_enumeration_matches_brute_force() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for (p, n) in [(2u32, 3u32), (3, 2), (2, 4)] {
            let s = space(p, n);
            for _ in 0..3 {
                let x = loop {
                    if let Ok(x) = SubsetOracle::from_predicate(&s, |_| rng.gen_bool(0.6)) {
                        break x;
                    }
                };
                for m in 1..=2 {
                    assert_eq!(count_cubes(&x, m, DEFAULT_BUDGET).unwrap(), brute_cubes(&x, m));
                }
            }
        }
    }

    #[test]
    fn sampling_examples() {
        let s = space(2, 4);
        let v = SubsetOracle::full(&s);
        let smp = sample_cubes(&v, 2, 100, 1).unwrap();
        assert_eq!(smp.acceptance, 1.0);
        let c = sample_completions(Point(3), &v, 2, 50, 1).unwrap();
        assert_eq!((c.completions.len(), c.attempts), (50, 50));

        let single = SubsetOracle::from_points(&s, [Point(5)]).unwrap();
        let smp = sample_cubes(&single, 1, 5, 2).unwrap();
        assert!(smp.cubes.iter().all(|c| c.dirs == vec![Point(0)]));

        // a outside a hyperplane: no completion exists
        let hyper = SubsetOracle::from_predicate(&s, |p| s.coord(p, 0) == Elem(0)).unwrap();
        let err = sample_completions(Point(1), &hyper, 2, 3, 0).unwrap_err();
        assert!(matches!(err, Error::RejectionExhausted { accepted: 0, .. }));
    }

    #[test]
    fn half_density_acceptance_matches_exact_count() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let s = space(2, 8);
        let mut pts: Vec<Point> = s.points().collect();
        pts.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(8));
        let x = SubsetOracle::from_points(&s, pts[..128].iter().copied()).unwrap();
        let exact = count_cubes(&x, 2, DEFAULT_BUDGET).unwrap() as f64 / (x.len() as f64 * 65536.0);
        let smp = sample_cubes(&x, 2, 4000, 17).unwrap();
        let (lo, hi) = wilson_interval(4000, smp.attempts, 4.0);
        assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
        assert!((exact - 0.125).abs() < 0.02);
    }

    #[test]
    fn bad_fraction_examples() {
        let s = space(2, 4);
        let v = SubsetOracle::full(&s);
        let x1x2 = PolyFun::var(&s, 0).mul(&PolyFun::var(&s, 1)).unwrap();
        let f = GroupFun::from_poly(&x1x2, BitSet::full(16), DEFAULT_BUDGET).unwrap();
        let r = bad_fraction(&f, &v, 2, 0, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.mode, Mode::Exhaustive);
        assert_eq!(r.samples, 16 * 16 * 16);
        // f_2 = x1x2 polarized: u1 v2 + u2 v1 for the two directions, nonzero for 3/8 of pairs
        assert_eq!(r.bad, 16 * 96);

        let lin = GroupFun::from_poly(&PolyFun::var(&s, 2), BitSet::full(16), DEFAULT_BUDGET).unwrap();
        assert_eq!(bad_fraction(&lin, &v, 2, 0, 0, DEFAULT_BUDGET).unwrap().bad, 0);

        // one corrupted point: bad cubes are exactly those through it
        let mut g = lin.clone();
        g.set(Point(6), 1 - lin.get(Point(6)).unwrap()).unwrap();
        let r = bad_fraction(&g, &v, 2, 0, 0, DEFAULT_BUDGET).unwrap();
        let through = enumerate_cubes(&v, 2, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .filter(|c| {
                let vs = c.vertices(&s);
                // over F_2 repeated vertices cancel in pairs
                vs.iter().filter(|&&p| p == Point(6)).count() % 2 == 1
            })
            .count() as u64;
        assert_eq!(r.bad, through);
    }

    #[test]
    fn sampled_fraction_within_interval_of_exact() {
        let s = space(2, 4);
        let v = SubsetOracle::full(&s);
        let x1x2 = PolyFun::var(&s, 0).mul(&PolyFun::var(&s, 1)).unwrap();
        let f = GroupFun::from_poly(&x1x2, BitSet::full(16), DEFAULT_BUDGET).unwrap();
        let exact = bad_fraction(&f, &v, 2, 0, 0, DEFAULT_BUDGET).unwrap().eps;
        let hits = (0..100)
            .filter(|&seed| {
                let r = bad_fraction_sampled(&f, &v, 2, 2000, seed).unwrap();
                r.ci_low <= exact && exact <= r.ci_high
            })
            .count();
        assert!(hits >= 93, "{hits}");
    }

    #[test]
    fn fiber_examples() {
        let id = fiber_statistics(0..10u32, |&x| x, |_| true);
        assert_eq!((id.min, id.max, id.homogeneity), (1, 1, 1.0));
        let proj = fiber_statistics(0..4u32, |&x| x & 1, |_| true);
        assert_eq!((proj.fibers, proj.min, proj.max), (2, 2, 2));

        let s = space(3, 3);
        let quad = SubsetOracle::from_predicate(&s, |p| {
            let c = s.coords(p);
            (c[0].0 * c[1].0 + c[2].0 * c[2].0) % 3 == 0
        })
        .unwrap();
        let st = pm_fiber_statistics(&quad, Point(0), 2, DEFAULT_BUDGET).unwrap();
        assert!(st.fibers > 0 && st.homogeneity >= 1.0);
        assert!(st.fibers <= count_cubes(&quad, 2, DEFAULT_BUDGET).unwrap());
    }
}
