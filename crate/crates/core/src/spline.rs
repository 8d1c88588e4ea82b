//! Plurality self-correction by cube completions.
//!
//! For an anchor `a` and directions `v` such that every vertex `a + omega.v`
//! with `omega != 0` lies in `X`, the completion vote is
//!
//! ```text
//! G_a(v) = sum_{omega != 0} (-1)^{|omega| + 1} f(a + omega.v),
//! ```
//!
//! the unique value of `f(a)` that makes the alternating cube sum vanish.
//! The corrected function takes, at each anchor, the most frequent vote over
//! independently sampled completions.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample as sample_indices;
use rand::Rng;

use crate::bits::BitSet;
use crate::cube::{
    bad_count_exhaustive, bad_fraction, draw_completion, exhaustive_cost, rejection_cap, BadFractionReport,
    SubsetOracle,
};
use crate::error::{check_budget, Error, Result};
use crate::field::Elem;
use crate::groupfun::GroupFun;
use crate::poly::PolyFun;
use crate::rng::{self, purpose};
use crate::space::{Point, Space};

/// Human-readable statement of the vote used in every report.
pub const VOTE_CONVENTION: &str =
    "h(a) = plurality over completions of sum_{omega != 0} (-1)^(|omega|+1) f(a + omega.v)";

pub const DEFAULT_VOTES: u64 = 200;

/// Cubes sampled when the residual check is too large to enumerate.
pub const RESIDUAL_SAMPLES: u64 = 20_000;

/// The vote `G_a(v)` of one completion.
pub fn completion_vote(f: &GroupFun, a: Point, dirs: &[Point]) -> Result<u32> {
    let space = f.space();
    let n = f.modulus() as u64;
    let mut acc = 0u64;
    for omega in 1u32..1 << dirs.len() {
        let p = space.combine(a, omega, dirs);
        let v = f.get(p).ok_or(Error::VertexOutsideDomain(p.0))? as u64;
        acc += if omega.count_ones() % 2 == 1 { v } else { n - v };
    }
    Ok((acc % n) as u32)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VoteTally {
    pub anchor: Point,
    pub samples: u64,
    /// `(value, count)` in increasing value order.
    pub tally: Vec<(u32, u64)>,
    pub winner: Option<u32>,
    pub tie: bool,
    /// `(top - second) / samples`.
    pub margin: f64,
    pub failures: u64,
    pub attempts: u64,
}

impl VoteTally {
    fn from_counts(anchor: Point, samples: u64, counts: BTreeMap<u32, u64>, failures: u64, attempts: u64) -> VoteTally {
        let tally: Vec<(u32, u64)> = counts.into_iter().collect();
        let mut sorted: Vec<u64> = tally.iter().map(|&(_, c)| c).collect();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let top = sorted.first().copied().unwrap_or(0);
        let second = sorted.get(1).copied().unwrap_or(0);
        let tie = top > 0 && top == second;
        let winner = if top == 0 || tie { None } else { tally.iter().find(|&&(_, c)| c == top).map(|&(v, _)| v) };
        let margin = if samples == 0 { 0.0 } else { (top - second) as f64 / samples as f64 };
        VoteTally { anchor, samples, tally, winner, tie, margin, failures, attempts }
    }

    pub fn accepted(&self) -> u64 {
        self.samples - self.failures
    }

    pub fn is_unanimous(&self) -> bool {
        self.tally.len() == 1 && self.failures == 0
    }
}

/// Plurality of `votes` sampled completion votes at `a`, from stream
/// `(seed, a)`.
///
/// A failed draw (rejection cap reached) is counted and skipped, except that a
/// failure before any accepted draw aborts: `Y_a` is then taken to be empty.
pub fn correct_at(f: &GroupFun, x: &SubsetOracle, m: u32, a: Point, votes: u64, seed: u64) -> Result<VoteTally> {
    let space = x.space();
    if a.0 >= space.size() {
        return Err(Error::PointOutOfRange(a.0));
    }
    if let Some(&p) = x.members().iter().find(|&&p| !f.contains(p)) {
        return Err(Error::VertexOutsideDomain(p.0));
    }
    let mut rng = rng::stream(seed, purpose::VOTES, a.0);
    let cap = rejection_cap(x.density(), m);
    let mut counts = BTreeMap::new();
    let (mut failures, mut attempts, mut accepted) = (0u64, 0u64, 0u64);
    for _ in 0..votes {
        let (dirs, used) = draw_completion(&mut rng, x, a, m, cap);
        attempts += used;
        match dirs {
            Some(dirs) => {
                accepted += 1;
                *counts.entry(completion_vote(f, a, &dirs)?).or_insert(0u64) += 1;
            }
            None if accepted == 0 => {
                return Err(Error::RejectionExhausted { attempts, accepted: 0, wanted: votes });
            }
            None => failures += 1,
        }
    }
    Ok(VoteTally::from_counts(a, votes, counts, failures, attempts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Domain {
    X,
    V,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FlagReason {
    Tie,
    NoCompletion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlaggedAnchor {
    pub anchor: Point,
    pub reason: FlagReason,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarginSummary {
    pub anchors: u64,
    pub unanimous: u64,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub failed_draws: u64,
    pub attempts: u64,
}

impl MarginSummary {
    fn of(tallies: &[VoteTally]) -> MarginSummary {
        let margins: Vec<f64> = tallies.iter().map(|t| t.margin).collect();
        let n = margins.len();
        MarginSummary {
            anchors: n as u64,
            unanimous: tallies.iter().filter(|t| t.is_unanimous()).count() as u64,
            min: margins.iter().copied().fold(f64::INFINITY, f64::min).min(if n == 0 { 0.0 } else { f64::INFINITY }),
            mean: if n == 0 { 0.0 } else { crate::stats::pairwise_sum(&margins) / n as f64 },
            max: margins.iter().copied().fold(0.0, f64::max),
            failed_draws: tallies.iter().map(|t| t.failures).sum(),
            attempts: tallies.iter().map(|t| t.attempts).sum(),
        }
    }
}

/// Result of [`spline_on_x`] or [`extend_to_v`].
#[derive(Clone, Debug, PartialEq)]
pub struct SplineReport {
    pub domain: Domain,
    pub m: u32,
    pub votes: u64,
    pub seed: u64,
    pub convention: &'static str,
    pub h: GroupFun,
    /// Bad-cube fraction of `h` on `C_m` of its domain.
    pub residual: BadFractionReport,
    /// Points of `X` with `h != f`.
    pub disagreements: u64,
    /// `disagreements / |X|`.
    pub disagreement: f64,
    pub margins: MarginSummary,
    pub flagged: Vec<FlaggedAnchor>,
    /// For extensions of inputs with `f_m = 0` on all of `C_m(X)`: whether
    /// `h|X = f` and the residual is exactly zero. `None` when the premise
    /// fails or was not checked exhaustively.
    pub exact_extension: Option<bool>,
    pub tallies: Vec<VoteTally>,
}

fn disagreement_on(x: &SubsetOracle, f: &GroupFun, h: &GroupFun) -> (u64, f64) {
    let d = x.members().iter().filter(|&&p| f.get(p) != h.get(p)).count() as u64;
    (d, d as f64 / x.len() as f64)
}

/// Corrects `f` at every point of `X`.
///
/// Anchors with a tied vote or no completion keep `f`'s value and are listed in
/// `flagged`.
pub fn spline_on_x(f: &GroupFun, x: &SubsetOracle, m: u32, votes: u64, seed: u64, budget: u64) -> Result<SplineReport> {
    let results = crate::par::map_slice(x.members(), |&a| correct_at(f, x, m, a, votes, seed));
    let mut h = f.restrict(x.mask())?;
    let mut tallies = Vec::with_capacity(results.len());
    let mut flagged = Vec::new();
    for (&a, r) in x.members().iter().zip(results) {
        match r {
            Ok(t) => {
                match t.winner {
                    Some(w) => h.set(a, w)?,
                    None => flagged.push(FlaggedAnchor { anchor: a, reason: FlagReason::Tie }),
                }
                tallies.push(t);
            }
            Err(Error::RejectionExhausted { .. }) => {
                flagged.push(FlaggedAnchor { anchor: a, reason: FlagReason::NoCompletion })
            }
            Err(e) => return Err(e),
        }
    }
    let residual = bad_fraction(&h, x, m, RESIDUAL_SAMPLES, seed, budget)?;
    let (disagreements, disagreement) = disagreement_on(x, f, &h);
    Ok(SplineReport {
        domain: Domain::X,
        m,
        votes,
        seed,
        convention: VOTE_CONVENTION,
        h,
        residual,
        disagreements,
        disagreement,
        margins: MarginSummary::of(&tallies),
        flagged,
        exact_extension: None,
        tallies,
    })
}

/// Corrects `f` at every point of `V`, producing a total function.
///
/// Anchors without completions abort with [`Error::EmptyVotes`]; a tie off `X`
/// aborts with [`Error::TiedVote`]; a tie on `X` keeps `f`'s value.
pub fn extend_to_v(f: &GroupFun, x: &SubsetOracle, m: u32, votes: u64, seed: u64, budget: u64) -> Result<SplineReport> {
    let space = x.space();
    let anchors: Vec<Point> = space.points().collect();
    let results = crate::par::map_slice(&anchors, |&a| correct_at(f, x, m, a, votes, seed));
    let mut empty = Vec::new();
    let mut tallies = Vec::with_capacity(anchors.len());
    for r in results {
        match r {
            Ok(t) => tallies.push(t),
            Err(Error::RejectionExhausted { .. }) => empty.push(anchors[tallies.len() + empty.len()].0),
            Err(e) => return Err(e),
        }
    }
    if !empty.is_empty() {
        return Err(Error::EmptyVotes { anchors: empty });
    }
    let mut values = vec![0u32; space.size() as usize];
    let mut flagged = Vec::new();
    for t in &tallies {
        let a = t.anchor;
        values[a.0 as usize] = match (t.winner, f.get(a).filter(|_| x.contains(a))) {
            (Some(w), _) => w,
            (None, Some(v)) => {
                flagged.push(FlaggedAnchor { anchor: a, reason: FlagReason::Tie });
                v
            }
            (None, None) => return Err(Error::TiedVote { anchor: a.0 }),
        };
    }
    let h = GroupFun::total(space, f.modulus(), values)?;
    let full = SubsetOracle::full(space);
    let residual = bad_fraction(&h, &full, m, RESIDUAL_SAMPLES, seed, budget)?;
    let (disagreements, disagreement) = disagreement_on(x, f, &h);
    let clean_input = if exhaustive_cost(space, m) <= budget as u128 {
        Some(bad_count_exhaustive(f, x, m, budget)?.1 == 0)
    } else {
        None
    };
    let exact_extension = match clean_input {
        Some(true) => Some(disagreements == 0 && residual.bad == 0 && residual.mode == crate::cube::Mode::Exhaustive),
        _ => None,
    };
    Ok(SplineReport {
        domain: Domain::V,
        m,
        votes,
        seed,
        convention: VOTE_CONVENTION,
        h,
        residual,
        disagreements,
        disagreement,
        margins: MarginSummary::of(&tallies),
        flagged,
        exact_extension,
        tallies,
    })
}

/// Bad-cube fraction of `h` on `C_m(D)`, exhaustive when
/// `q^{n(m+1)} <= budget` and sampled otherwise.
pub fn verify_vanishing(
    h: &GroupFun,
    domain: &SubsetOracle,
    m: u32,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<BadFractionReport> {
    bad_fraction(h, domain, m, samples, seed, budget)
}

/// `ceil(m / (q - q/p))`.
pub fn default_subspace_dim(q: u32, p: u32, m: u32) -> u32 {
    m.div_ceil(q - q / p)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SubspaceMode {
    /// Every `l`-flat contained in `X`.
    Exhaustive,
    /// Flats grown greedily from random lines, from streams `(seed, k)`.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Flat {
    pub base: Point,
    pub dirs: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubspaceReport {
    pub l: u32,
    pub m: u32,
    pub mode: SubspaceMode,
    pub tested: u64,
    /// Flats on which the restriction has reduced degree `>= m`.
    pub failing: u64,
    pub fraction: f64,
    pub first_failure: Option<Flat>,
}

fn flat_points(space: &Space, base: Point, dirs: &[Point]) -> Vec<Point> {
    let q = space.q() as u64;
    let l = dirs.len() as u32;
    let total = q.pow(l);
    (0..total)
        .map(|t| {
            let mut p = base;
            let mut t = t;
            for &d in dirs {
                let c = Elem((t % q) as u32);
                t /= q;
                p = space.add(p, space.scale(c, d));
            }
            p
        })
        .collect()
}

fn restriction_degree(f: &GroupFun, flat_space: &Space, points: &[Point], budget: u64) -> Result<Option<u32>> {
    let field = flat_space.field();
    let table: Vec<Elem> = points
        .iter()
        .map(|&p| f.get(p).map(|v| field.from_int(v as i64)).ok_or(Error::VertexOutsideDomain(p.0)))
        .collect::<Result<_>>()?;
    Ok(PolyFun::interpolate(flat_space, &table, budget)?.degree())
}

/// All `l`-dimensional linear subspaces in reduced row-echelon form.
fn linear_subspaces(space: &Space, l: u32, mut visit: impl FnMut(&[Point]) -> Result<()>) -> Result<()> {
    let n = space.dim() as usize;
    let q = space.q();
    let l = l as usize;
    let mut pivots: Vec<usize> = (0..l).collect();
    loop {
        // free slots: entries in row i at columns > pivot_i that are not pivots
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let combos = (q as u64).pow(free.len() as u32);
        for code in 0..combos {
            let mut rows = vec![vec![Elem(0); n]; l];
            for (i, &pc) in pivots.iter().enumerate() {
                rows[i][pc] = Elem(1);
            }
            let mut t = code;
            for &(i, c) in &free {
                rows[i][c] = Elem((t % q as u64) as u32);
                t /= q as u64;
            }
            let dirs: Vec<Point> = rows.iter().map(|r| space.encode(r)).collect::<Result<_>>()?;
            visit(&dirs)?;
        }
        // next pivot combination
        let mut i = l;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if pivots[i] < n - l + i {
                pivots[i] += 1;
                for k in i + 1..l {
                    pivots[k] = pivots[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Fraction of tested `l`-flats inside `X` on which `f` restricted to the
/// flat, as a function on `F_q^l`, has reduced degree at least `m`.
///
/// Values of `f` must lie in `Z/p`; they are read as elements of the prime
/// subfield. `l = None` uses [`default_subspace_dim`].
pub fn subspace_poly_test(
    f: &GroupFun,
    x: &SubsetOracle,
    m: u32,
    l: Option<u32>,
    mode: SubspaceMode,
    budget: u64,
) -> Result<SubspaceReport> {
    let space = x.space();
    let field = space.field();
    if f.modulus() != field.p() {
        return Err(Error::InvalidArgument(alloc::format!(
            "the subspace test reads values in F_{}, got Z/{}",
            field.p(),
            f.modulus()
        )));
    }
    let l = l.unwrap_or_else(|| default_subspace_dim(space.q(), field.p(), m));
    if l == 0 || l > space.dim() {
        return Err(Error::InvalidArgument(alloc::format!("subspace dimension {l} outside 1..={}", space.dim())));
    }
    let flat_space = Space::new(space.field_arc().clone(), l)?;
    let mut tested = 0u64;
    let mut failing = 0u64;
    let mut first_failure = None;
    let mut test = |base: Point, dirs: &[Point], points: &[Point]| -> Result<()> {
        tested += 1;
        if restriction_degree(f, &flat_space, points, budget)?.is_some_and(|d| d >= m) {
            failing += 1;
            if first_failure.is_none() {
                first_failure = Some(Flat { base, dirs: dirs.to_vec() });
            }
        }
        Ok(())
    };
    match &mode {
        SubspaceMode::Exhaustive => {
            let flat_size = (space.q() as u128).pow(l);
            check_budget(flat_size * x.len() as u128 * subspace_count(space.q(), space.dim(), l), budget)?;
            linear_subspaces(space, l, |dirs| {
                for &base in x.members() {
                    let pts = flat_points(space, base, dirs);
                    // each flat is visited once, from its smallest point
                    if pts.iter().all(|&p| x.contains(p)) && pts.iter().min() == Some(&base) {
                        test(base, dirs, &pts)?;
                    }
                }
                Ok(())
            })?;
        }
        SubspaceMode::Sampled { samples, seed } => {
            for k in 0..*samples {
                let (base, dirs) = grow_flat(x, l, *seed, k, budget)?;
                let pts = flat_points(space, base, &dirs);
                test(base, &dirs, &pts)?;
            }
        }
    }
    let fraction = if tested == 0 { 0.0 } else { failing as f64 / tested as f64 };
    Ok(SubspaceReport { l, m, mode, tested, failing, fraction, first_failure })
}

fn subspace_count(q: u32, n: u32, l: u32) -> u128 {
    let q = q as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..l {
        num = num.saturating_mul(q.saturating_pow(n - i).saturating_sub(1));
        den = den.saturating_mul(q.saturating_pow(i + 1) - 1);
    }
    num / den
}

/// Restarts of the greedy search before giving up.
pub const FLAT_RESTARTS: u32 = 64;

/// Grows an affine flat inside `X` one direction at a time: a random base in
/// `X`, then directions tried in random order until the enlarged flat stays in
/// `X`. Starts over from a new base when stuck.
fn grow_flat(x: &SubsetOracle, l: u32, seed: u64, k: u64, budget: u64) -> Result<(Point, Vec<Point>)> {
    let space = x.space();
    let mut rng = rng::stream(seed, purpose::SUBSPACES, k);
    let mut deepest = 0;
    let mut work = 0u128;
    for _ in 0..FLAT_RESTARTS {
        let base = x.members()[rng.gen_range(0..x.members().len())];
        let mut dirs: Vec<Point> = Vec::new();
        let mut pts = vec![base];
        'grow: while (dirs.len() as u32) < l {
            let order = sample_indices(&mut rng, space.size() as usize, space.size() as usize);
            for v in order.iter().map(|i| Point(i as u64)) {
                work += pts.len() as u128 * space.q() as u128;
                check_budget(work, budget)?;
                if pts.contains(&space.add(base, v)) {
                    continue;
                }
                let mut grown = pts.clone();
                let mut ok = true;
                'scan: for c in 1..space.q() {
                    let shift = space.scale(Elem(c), v);
                    for &p in &pts {
                        let np = space.add(p, shift);
                        if !x.contains(np) {
                            ok = false;
                            break 'scan;
                        }
                        grown.push(np);
                    }
                }
                if ok {
                    dirs.push(v);
                    pts = grown;
                    deepest = deepest.max(dirs.len() as u32);
                    continue 'grow;
                }
            }
            break;
        }
        if dirs.len() as u32 == l {
            return Ok((base, dirs));
        }
    }
    Err(Error::SubspaceSearch { wanted: l, reached: deepest })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseRow {
    pub rho: f64,
    pub corrupted: u64,
    /// Bad-cube fraction of the corrupted input on `C_m(X)`.
    pub eps_hat: f64,
    /// Fraction of the output domain on which `h` differs from `g`.
    pub disagreement_with_g: f64,
    pub recovered: bool,
    pub margin_min: f64,
    pub margin_mean: f64,
    pub flagged: u64,
    pub error: Option<String>,
}

/// Adds a uniform nonzero offset to `f` at `ceil(rho |X|)` distinct points of
/// `X`, chosen from stream `(seed, round)`. Returns the corrupted function and
/// the changed points.
pub fn corrupt(f: &GroupFun, x: &SubsetOracle, rho: f64, seed: u64, round: u64) -> Result<(GroupFun, Vec<Point>)> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(alloc::format!("noise rate {rho} outside [0, 1]")));
    }
    let n = f.modulus();
    let mut rng = rng::stream(seed, purpose::NOISE, round);
    let k = (libm::ceil(rho * x.len() as f64) as usize).min(x.len() as usize);
    let mut out = f.clone();
    let mut changed: Vec<Point> =
        sample_indices(&mut rng, x.len() as usize, k).iter().map(|i| x.members()[i]).collect();
    for &pt in &changed {
        let v = out.get(pt).ok_or(Error::VertexOutsideDomain(pt.0))?;
        out.set(pt, (v + rng.gen_range(1..n)) % n)?;
    }
    changed.sort_unstable();
    Ok((out, changed))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseConfig {
    pub m: u32,
    pub rhos: Vec<f64>,
    pub votes: u64,
    pub seed: u64,
    /// Correct on all of `V` instead of on `X`.
    pub extend: bool,
    pub budget: u64,
}

/// Corrupts `g|X` on `ceil(rho |X|)` seeded points for each `rho`, corrects,
/// and records how well `g` is recovered. Values live in `Z/p`.
pub fn noise_experiment(g: &PolyFun, x: &SubsetOracle, config: &NoiseConfig) -> Result<Vec<NoiseRow>> {
    let NoiseConfig { m, ref rhos, votes, seed, extend, budget } = *config;
    let space = x.space();
    if !space.field().is_prime_field() {
        return Err(Error::InvalidArgument("planted polynomials need a prime field".into()));
    }
    let clean = GroupFun::from_poly(g, x.mask().clone(), budget)?;
    let g_total = GroupFun::from_poly(g, BitSet::full(space.size()), budget)?;
    let mut rows = Vec::with_capacity(rhos.len());
    for (round, &rho) in rhos.iter().enumerate() {
        let (f, changed) = corrupt(&clean, x, rho, seed, round as u64)?;
        let k = changed.len();
        let eps_hat = bad_fraction(&f, x, m, RESIDUAL_SAMPLES, seed, budget)?.eps;
        let run = if extend {
            extend_to_v(&f, x, m, votes, seed, budget)
        } else {
            spline_on_x(&f, x, m, votes, seed, budget)
        };
        let row = match run {
            Ok(r) => {
                let dom: Vec<Point> = match r.domain {
                    Domain::X => x.members().to_vec(),
                    Domain::V => space.points().collect(),
                };
                let wrong = dom.iter().filter(|&&pt| r.h.get(pt) != g_total.get(pt)).count();
                NoiseRow {
                    rho,
                    corrupted: k as u64,
                    eps_hat,
                    disagreement_with_g: wrong as f64 / dom.len() as f64,
                    recovered: wrong == 0,
                    margin_min: r.margins.min,
                    margin_mean: r.margins.mean,
                    flagged: r.flagged.len() as u64,
                    error: None,
                }
            }
            Err(e) => NoiseRow {
                rho,
                corrupted: k as u64,
                eps_hat,
                disagreement_with_g: 1.0,
                recovered: false,
                margin_min: 0.0,
                margin_mean: 0.0,
                flagged: 0,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{enumerate_cubes, Cube};
    use crate::field::Field;
    use crate::DEFAULT_BUDGET;
    use alloc::sync::Arc;
    use rand::SeedableRng;

    fn space(p: u32, n: u32) -> Space {
        Space::new(Arc::new(Field::prime(p).unwrap()), n).unwrap()
    }

    fn linear(s: &Space, coeffs: &[(usize, u32)], c: u32) -> PolyFun {
        let mut g = PolyFun::constant(s, Elem(c));
        for &(i, a) in coeffs {
            g = g.add(&PolyFun::var(s, i).scale(Elem(a))).unwrap();
        }
        g
    }

    #[test]
    fn vote_examples() {
        let s = space(3, 2);
        let g = linear(&s, &[(0, 1), (1, 2)], 1);
        let f = GroupFun::from_poly(&g, BitSet::full(s.size()), DEFAULT_BUDGET).unwrap();
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = Point(r.gen_range(0..9));
            let dirs = [Point(r.gen_range(0..9)), Point(r.gen_range(0..9))];
            assert_eq!(completion_vote(&f, a, &dirs).unwrap(), f.get(a).unwrap());
        }
        let c = GroupFun::total(&s, 3, vec![2; 9]).unwrap();
        assert_eq!(completion_vote(&c, Point(0), &[Point(1), Point(3)]).unwrap(), 2);

        let s5 = space(5, 1);
        let sq = PolyFun::monomial(&s5, vec![2], Elem(1));
        let f = GroupFun::from_poly(&sq, BitSet::full(5), DEFAULT_BUDGET).unwrap();
        assert_eq!(completion_vote(&f, Point(0), &[Point(1); 3]).unwrap(), 0);

        let part = GroupFun::new(&s, 3, BitSet::from_indices(9, [0, 1]), vec![0; 9]).unwrap();
        assert!(matches!(completion_vote(&part, Point(0), &[Point(1), Point(3)]), Err(Error::VertexOutsideDomain(_))));
    }

    #[test]
    fn vote_identity_exhaustive() {
        let s = space(3, 2);
        let x = SubsetOracle::from_predicate(&s, |p| p.0 % 4 != 1).unwrap();
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let vals: Vec<u32> = (0..9).map(|_| r.gen_range(0..3)).collect();
        let f = GroupFun::total(&s, 3, vals).unwrap();
        for c in enumerate_cubes(&x, 2, DEFAULT_BUDGET).unwrap() {
            let zero = crate::cube::alt_sum(&f, &c).unwrap() == 0;
            assert_eq!(zero, completion_vote(&f, c.u, &c.dirs).unwrap() == f.get(c.u).unwrap());
        }
    }

    #[test]
    fn correct_at_examples() {
        let s = space(3, 4);
        let x = SubsetOracle::full(&s);
        let g = linear(&s, &[(0, 1), (2, 2)], 0);
        let clean = GroupFun::from_poly(&g, BitSet::full(s.size()), DEFAULT_BUDGET).unwrap();
        let t = correct_at(&clean, &x, 2, Point(7), 200, 3).unwrap();
        assert!(t.is_unanimous());
        assert_eq!(t.winner, clean.get(Point(7)));
        assert_eq!(t, correct_at(&clean, &x, 2, Point(7), 200, 3).unwrap());

        let mut f = clean.clone();
        for pt in [Point(5), Point(40)] {
            let v = f.get(pt).unwrap();
            f.set(pt, (v + 1) % 3).unwrap();
        }
        for a in s.points() {
            let t = correct_at(&f, &x, 2, a, 200, 11).unwrap();
            assert_eq!(t.winner, clean.get(a));
            assert!(t.margin > 0.5);
            assert_eq!(t.tally.iter().map(|e| e.1).sum::<u64>(), t.samples - t.failures);
        }

        // a sparse X where no almost cube at 0 exists
        let s2 = space(2, 3);
        let sparse = SubsetOracle::from_points(&s2, [Point(1), Point(2)]).unwrap();
        let f = GroupFun::zero(&s2, 2, sparse.mask().clone()).unwrap();
        assert!(matches!(correct_at(&f, &sparse, 2, Point(0), 10, 0), Err(Error::RejectionExhausted { .. })));
    }

    #[test]
    fn spline_examples() {
        let s = space(3, 3);
        let x = SubsetOracle::full(&s);
        let g = linear(&s, &[(1, 1)], 2);
        let f = GroupFun::from_poly(&g, BitSet::full(s.size()), DEFAULT_BUDGET).unwrap();
        let r = spline_on_x(&f, &x, 2, 50, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.h, f);
        assert_eq!(r.residual.bad, 0);
        assert_eq!(r.disagreements, 0);

        let one = SubsetOracle::from_points(&s, [Point(4)]).unwrap();
        let f1 = GroupFun::new(&s, 3, one.mask().clone(), {
            let mut v = vec![0; 27];
            v[4] = 2;
            v
        })
        .unwrap();
        let r = spline_on_x(&f1, &one, 2, 20, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.h.get(Point(4)), Some(2));
        assert_eq!(r.disagreements, 0);
    }

    #[test]
    fn extend_examples() {
        let s = space(3, 3);
        let x = SubsetOracle::full(&s);
        let g = linear(&s, &[(0, 2), (2, 1)], 1);
        let f = GroupFun::from_poly(&g, BitSet::full(s.size()), DEFAULT_BUDGET).unwrap();
        let r = extend_to_v(&f, &x, 2, 30, 9, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.h, f);
        assert_eq!(r.exact_extension, Some(true));

        let s2 = space(2, 4);
        let hyper = SubsetOracle::from_predicate(&s2, |p| s2.coord(p, 0) == Elem(0)).unwrap();
        let f = GroupFun::zero(&s2, 2, hyper.mask().clone()).unwrap();
        match extend_to_v(&f, &hyper, 2, 10, 0, DEFAULT_BUDGET) {
            Err(Error::EmptyVotes { anchors }) => assert_eq!(anchors.len(), 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vanishing_examples() {
        let s = space(2, 4);
        let full = SubsetOracle::full(&s);
        let x1x2 = PolyFun::monomial(&s, vec![1, 1, 0, 0], Elem(1));
        let f = GroupFun::from_poly(&x1x2, BitSet::full(16), DEFAULT_BUDGET).unwrap();
        let r = verify_vanishing(&f, &full, 2, 0, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!((r.samples, r.bad), (4096, 1536));
        let covered = (0..100)
            .filter(|&seed| {
                let sampled = verify_vanishing(&f, &full, 2, 5_000, seed, 1).unwrap();
                sampled.mode == crate::cube::Mode::Sampled && sampled.ci_low <= r.eps && r.eps <= sampled.ci_high
            })
            .count();
        assert!(covered >= 90, "{covered}");
        let lin = GroupFun::from_poly(&linear(&s, &[(3, 1)], 0), BitSet::full(16), DEFAULT_BUDGET).unwrap();
        assert_eq!(verify_vanishing(&lin, &full, 2, 0, 0, DEFAULT_BUDGET).unwrap().bad, 0);
    }

    fn flats_brute(s: &Space, f: &GroupFun, m: u32) -> (u64, u64) {
        // every pair of independent directions over F_2, deduplicated by point set
        let mut seen = alloc::collections::BTreeSet::new();
        let mut bad = 0;
        for b in s.points() {
            for d1 in 1..s.size() {
                for d2 in 1..s.size() {
                    if d1 == d2 {
                        continue;
                    }
                    let mut pts = vec![b, s.add(b, Point(d1)), s.add(b, Point(d2)), s.add(b, Point(d1 ^ d2))];
                    pts.sort();
                    if seen.insert(pts.clone()) {
                        let c = Cube::new(b, vec![Point(d1), Point(d2)]);
                        if crate::cube::alt_sum(f, &c).unwrap() != 0 && m == 2 {
                            bad += 1;
                        }
                    }
                }
            }
        }
        (seen.len() as u64, bad)
    }

    #[test]
    fn subspace_examples() {
        assert_eq!(default_subspace_dim(2, 2, 3), 3);
        assert_eq!(default_subspace_dim(3, 3, 2), 1);
        assert_eq!(default_subspace_dim(5, 5, 5), 2);
        assert_eq!(default_subspace_dim(4, 2, 3), 2);

        let s = space(2, 4);
        let full = SubsetOracle::full(&s);
        let x1x2 = PolyFun::monomial(&s, vec![1, 1, 0, 0], Elem(1));
        let f = GroupFun::from_poly(&x1x2, BitSet::full(16), DEFAULT_BUDGET).unwrap();
        let r = subspace_poly_test(&f, &full, 2, Some(2), SubspaceMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        let (flats, bad) = flats_brute(&s, &f, 2);
        assert_eq!((r.tested, r.failing), (flats, bad));
        assert_eq!(r.tested, 140);
        assert!(r.failing > 0);

        let lin = GroupFun::from_poly(&linear(&s, &[(0, 1), (3, 1)], 1), BitSet::full(16), DEFAULT_BUDGET).unwrap();
        let r =
            subspace_poly_test(&lin, &full, 2, None, SubspaceMode::Sampled { samples: 30, seed: 2 }, DEFAULT_BUDGET)
                .unwrap();
        assert_eq!((r.l, r.tested, r.failing), (2, 30, 0));

        let line = SubsetOracle::from_points(&s, [Point(0), Point(1)]).unwrap();
        let g = GroupFun::zero(&s, 2, line.mask().clone()).unwrap();
        assert!(matches!(
            subspace_poly_test(&g, &line, 2, Some(2), SubspaceMode::Sampled { samples: 1, seed: 0 }, DEFAULT_BUDGET),
            Err(Error::SubspaceSearch { wanted: 2, reached: 1 })
        ));
    }

    #[test]
    fn noise_examples() {
        let s = space(3, 4);
        let x = SubsetOracle::full(&s);
        let g = linear(&s, &[(0, 1), (1, 1), (3, 2)], 0);
        let config = NoiseConfig {
            m: 2,
            rhos: vec![0.0, 0.02, 0.5],
            votes: 200,
            seed: 17,
            extend: false,
            budget: DEFAULT_BUDGET,
        };
        let rows = noise_experiment(&g, &x, &config).unwrap();
        assert!(rows[0].recovered && rows[0].eps_hat == 0.0);
        assert!(rows[1].recovered);
        assert!(!rows[2].recovered);
    }
}
