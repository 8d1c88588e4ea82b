//! Level sets `X = { x : P_i(x) = a_i }` of polynomial families, and the
//! counts (lines, projective zeros, anchored solutions) that make such sets
//! rich in cubes.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitSet;
use crate::cube::SubsetOracle;
use crate::error::{check_budget, Error, Result};
use crate::field::{Elem, Field};
use crate::poly::PolyFun;
use crate::rank::{family_rank, FamilyRank};
use crate::rng::{self, purpose};
use crate::space::{Point, Space};

#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    space: Space,
    equations: Vec<(PolyFun, Elem)>,
}

impl VarietySpec {
    pub fn new(space: &Space, equations: Vec<(PolyFun, Elem)>) -> Result<VarietySpec> {
        if equations.is_empty() {
            return Err(Error::InvalidArgument("a variety needs at least one equation".into()));
        }
        for (i, (p, t)) in equations.iter().enumerate() {
            if p.space() != space {
                return Err(Error::SpaceMismatch);
            }
            if t.0 >= space.q() {
                return Err(Error::ElemOutOfRange(t.0 as u64));
            }
            if p.degree().unwrap_or(0) == 0 {
                return Err(Error::InvalidArgument(alloc::format!("equation {} is constant", i + 1)));
            }
        }
        Ok(VarietySpec { space: space.clone(), equations })
    }

    /// `{P_i = 0}`.
    pub fn zero_set(space: &Space, polys: Vec<PolyFun>) -> Result<VarietySpec> {
        VarietySpec::new(space, polys.into_iter().map(|p| (p, Elem::ZERO)).collect())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn equations(&self) -> &[(PolyFun, Elem)] {
        &self.equations
    }

    pub fn polys(&self) -> Vec<PolyFun> {
        self.equations.iter().map(|(p, _)| p.clone()).collect()
    }

    /// Codimension `L`.
    pub fn codim(&self) -> usize {
        self.equations.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.equations.iter().map(|(p, _)| p.degree().unwrap_or(0)).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Every `P_i` homogeneous and every target zero.
    pub fn is_homogeneous_zero_set(&self) -> bool {
        self.equations.iter().all(|(p, t)| p.is_homogeneous() && t.is_zero())
    }

    pub fn contains(&self, x: Point) -> Result<bool> {
        for (p, t) in &self.equations {
            if p.eval(x)? != *t {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Value tables `P_i - a_i`, one per equation.
    fn residual_tables(&self, budget: u64) -> Result<Vec<Vec<Elem>>> {
        let f = self.space.field();
        self.equations.iter().map(|(p, t)| Ok(p.table(budget)?.into_iter().map(|v| f.sub(v, *t)).collect())).collect()
    }
}

/// Exact membership bitset of `X`.
pub fn variety_members(spec: &VarietySpec, budget: u64) -> Result<SubsetOracle> {
    let tables = spec.residual_tables(budget)?;
    let size = spec.space.size();
    let mask = BitSet::from_indices(size, (0..size).filter(|&x| tables.iter().all(|t| t[x as usize].is_zero())));
    SubsetOracle::new(&spec.space, mask)
}

/// `|P(V)| = (q^n - 1)/(q - 1)`.
pub fn projective_size(q: u32, n: u32) -> f64 {
    let q = q as f64;
    (libm::pow(q, n as f64) - 1.0) / (q - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AnchoredRoute {
    /// Homogeneous zero sets: the solutions contain the common zeros of the
    /// `m * sum d_i(d_i+1)/2`-degree system of Taylor coefficients in the
    /// anchor directions.
    TaylorCoefficients,
    /// General level sets: homogenize `P_i(x + a_j) - a_i` with one extra
    /// variable and discard the zeros at infinity.
    Homogenized,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnchoredReport {
    pub anchors: Vec<Point>,
    pub count: u64,
    pub route: AnchoredRoute,
    /// Total degree `D` of the auxiliary homogeneous system.
    pub degree_sum: u32,
    /// The exponent `D + 1` in `|P(W)| / (2 q^{D+1})`.
    pub exponent: u32,
    /// Projective zeros at infinity subtracted on the homogenized route.
    pub zeros_at_infinity: u64,
    pub bound: f64,
    pub pass: bool,
}

/// `|{x : P_i(x + a_j) = a_i for all i, j}|` and the explicit lower bound it
/// must meet.
pub fn solution_count_anchored(spec: &VarietySpec, anchors: &[Point], budget: u64) -> Result<AnchoredReport> {
    let space = &spec.space;
    for &a in anchors {
        if a.0 >= space.size() {
            return Err(Error::PointOutOfRange(a.0));
        }
        if !spec.contains(a)? {
            return Err(Error::InvalidArgument(alloc::format!("anchor {} is not on X", a.0)));
        }
    }
    let tables = spec.residual_tables(budget)?;
    let size = space.size();
    check_budget(size as u128 * anchors.len().max(1) as u128 * tables.len() as u128, budget)?;
    let count = crate::par::sum_range(size, |x| {
        let x = Point(x);
        let ok = anchors.iter().all(|&a| {
            let y = space.add(x, a).0 as usize;
            tables.iter().all(|t| t[y].is_zero())
        });
        ok as u64
    });
    let q = space.q();
    let n = space.dim();
    let m = anchors.len() as u32;
    let degs = spec.degrees();
    let qf = q as f64;
    let report = if spec.is_homogeneous_zero_set() {
        let d: u32 = m * degs.iter().map(|d| d * (d + 1) / 2).sum::<u32>();
        let bound = (libm::pow(qf, n as f64) - 1.0) / (2.0 * libm::pow(qf, (d + 1) as f64)) + 1.0;
        AnchoredReport {
            anchors: anchors.to_vec(),
            count,
            route: AnchoredRoute::TaylorCoefficients,
            degree_sum: d,
            exponent: d + 1,
            zeros_at_infinity: 0,
            bound,
            pass: count as f64 >= bound,
        }
    } else {
        let d: u32 = m * degs.iter().sum::<u32>();
        let tops: Vec<Vec<Elem>> = spec
            .equations
            .iter()
            .map(|(p, _)| p.homogeneous_part(p.degree().unwrap_or(0)).table(budget))
            .collect::<Result<_>>()?;
        let affine_inf = (1..size).filter(|&x| tops.iter().all(|t| t[x as usize].is_zero())).count() as u64;
        let zeros_at_infinity = affine_inf / (q as u64 - 1);
        let bound = if m == 0 {
            0.0
        } else {
            projective_size(q, n + 1) / (2.0 * libm::pow(qf, (d + 1) as f64)) - zeros_at_infinity as f64
        };
        AnchoredReport {
            anchors: anchors.to_vec(),
            count,
            route: AnchoredRoute::Homogenized,
            degree_sum: d,
            exponent: d + 1,
            zeros_at_infinity,
            bound,
            pass: count as f64 >= bound,
        }
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineCountReport {
    pub base: Point,
    /// Directions `v != 0` with `x + t v` in `X` for every `t`.
    pub count: u64,
    /// `C(d) = sum d_i(d_i+1)/2 + 1`.
    pub c_exponent: u32,
    /// `q^{n - C(d)}`.
    pub bound: f64,
    pub pass: bool,
}

/// Number of directions `v != 0` whose line through `x` lies in `X`.
pub fn lines_through(spec: &VarietySpec, x: Point, budget: u64) -> Result<LineCountReport> {
    let space = &spec.space;
    if x.0 >= space.size() {
        return Err(Error::PointOutOfRange(x.0));
    }
    let q = space.q();
    let dmax = spec.max_degree();
    if q <= dmax {
        return Err(Error::InvalidArgument(alloc::format!("line bound needs q > max degree ({q} <= {dmax})")));
    }
    if !spec.contains(x)? {
        return Err(Error::InvalidArgument(alloc::format!("point {} is not on X", x.0)));
    }
    let tables = spec.residual_tables(budget)?;
    let size = space.size();
    check_budget(size as u128 * q as u128, budget)?;
    let f = space.field();
    let scalars: Vec<Elem> = f.elements().skip(1).collect();
    let count = crate::par::sum_range(size - 1, |v| {
        let v = Point(v + 1);
        scalars.iter().all(|&t| {
            let y = space.add(x, space.scale(t, v)).0 as usize;
            tables.iter().all(|tab| tab[y].is_zero())
        }) as u64
    });
    let c: u32 = spec.degrees().iter().map(|d| d * (d + 1) / 2).sum::<u32>() + 1;
    let bound = libm::pow(q as f64, space.dim() as f64 - c as f64);
    Ok(LineCountReport { base: x, count, c_exponent: c, bound, pass: count as f64 >= bound })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectiveReport {
    pub affine_zeros: u64,
    pub projective_zeros: u64,
    pub projective_size: f64,
    pub density: f64,
    /// `D = sum d_i`.
    pub degree_sum: u32,
    /// `|P(V)| / (2 q^{D+1})`.
    pub bound: f64,
    pub pass: bool,
}

/// Projective zero count of a homogeneous system against `|P(V)|/(2q^{D+1})`.
pub fn projective_zero_density(spec: &VarietySpec, budget: u64) -> Result<ProjectiveReport> {
    if !spec.is_homogeneous_zero_set() {
        return Err(Error::InvalidArgument(
            "projective zero count needs homogeneous equations with zero targets".into(),
        ));
    }
    let x = variety_members(spec, budget)?;
    let space = &spec.space;
    let q = space.q();
    let affine_zeros = x.len();
    let projective_zeros = (affine_zeros - 1) / (q as u64 - 1);
    let psize = projective_size(q, space.dim());
    let d: u32 = spec.degrees().iter().sum();
    let bound = psize / (2.0 * libm::pow(q as f64, (d + 1) as f64));
    Ok(ProjectiveReport {
        affine_zeros,
        projective_zeros,
        projective_size: psize,
        density: projective_zeros as f64 / psize,
        degree_sum: d,
        bound,
        pass: projective_zeros as f64 >= bound,
    })
}

/// `max_a binom(d, a)`: how many partition-rank terms one product `Q R`
/// contributes to the `d`-linear form.
fn products_per_term(d: u32) -> u32 {
    let k = d / 2;
    (0..k).fold(1u64, |acc, i| acc * (d - i) as u64 / (i + 1) as u64) as u32
}

/// Largest `t` certified by `bias < q^{-c(d)(t-1)}`, where `c(d)` bounds the
/// partition rank of the multilinear form of one product.
pub fn rank_lower_from_bias(bias: f64, q: u32, d: u32) -> u32 {
    if bias <= 0.0 {
        return u32::MAX;
    }
    let s = -libm::log(bias) / libm::log(q as f64);
    let t = libm::ceil(s / products_per_term(d) as f64 - 1e-9);
    if t <= 0.0 {
        0
    } else {
        t as u32
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RankCertificate {
    /// Exact-search and bilinear bounds on the family rank.
    Quadratic(FamilyRank),
    /// Largest multilinear bias over the nonzero combinations and the rank it certifies.
    Bias { max_bias: f64, lower: u32 },
}

impl RankCertificate {
    pub fn lower(&self) -> u32 {
        match self {
            RankCertificate::Quadratic(f) => f.lower,
            RankCertificate::Bias { lower, .. } => *lower,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HighRankInstance {
    pub spec: VarietySpec,
    pub certificate: RankCertificate,
    pub attempts: u32,
}

/// Rank certificate for a family of equal-degree polynomials.
pub fn certify_family(polys: &[PolyFun], budget: u64) -> Result<RankCertificate> {
    let d = polys.first().and_then(|p| p.degree()).unwrap_or(0);
    if d == 2 {
        return Ok(RankCertificate::Quadratic(family_rank(polys, budget)?));
    }
    let space = polys[0].space();
    let q = space.q();
    let mut max_bias: f64 = 0.0;
    for coeffs in combos(q, polys.len()) {
        let mut comb = PolyFun::zero(space);
        for (p, &c) in polys.iter().zip(&coeffs) {
            comb = comb.add(&p.scale(c))?;
        }
        let b = comb.multilinear_bias_arity(d, budget)?;
        max_bias = max_bias.max(b);
    }
    Ok(RankCertificate::Bias { max_bias, lower: rank_lower_from_bias(max_bias, q, d) })
}

fn combos(q: u32, len: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for lead in 0..len {
        let count = (q as u64).pow((len - lead - 1) as u32);
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

fn hyperbolic(space: &Space) -> PolyFun {
    let mut p = PolyFun::zero(space);
    for i in (0..space.dim() as usize - 1).step_by(2) {
        p = p.add(&PolyFun::var(space, i).mul(&PolyFun::var(space, i + 1)).expect("same space")).expect("same space");
    }
    p
}

fn random_form<R: Rng + ?Sized>(space: &Space, d: u32, rng: &mut R) -> PolyFun {
    let q = space.q();
    let terms = PolyFun::monomials_up_to(space, d)
        .into_iter()
        .filter(|e| e.iter().sum::<u32>() == d)
        .map(|e| (e, Elem(rng.gen_range(0..q))));
    PolyFun::from_terms(space, terms).expect("sized exponents")
}

pub const INSTANCE_ATTEMPTS: u32 = 64;

/// A family of `L` homogeneous degree-`d` forms whose rank is certified to be
/// at least `rank_target`.
///
/// For `L = 1`, `d = 2` the hyperbolic form `x1x2 + x3x4 + ...` is tried
/// first; otherwise random forms are drawn from stream `(seed, attempt)`.
pub fn random_high_rank_instance(
    field: Arc<Field>,
    n: u32,
    d: u32,
    l: u32,
    rank_target: u32,
    seed: u64,
    budget: u64,
) -> Result<HighRankInstance> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidArgument("instances are generated for degree 2 or 3".into()));
    }
    if l == 0 {
        return Err(Error::InvalidArgument("codimension must be at least 1".into()));
    }
    let space = Space::new(field, n)?;
    if d == 2 && rank_target > n.div_ceil(2) {
        return Err(Error::Unreachable(alloc::format!(
            "a quadratic form in {n} variables has rank at most {}",
            n.div_ceil(2)
        )));
    }
    let mut attempt = 0;
    if d == 2 && l == 1 {
        attempt += 1;
        let p = hyperbolic(&space);
        if !p.is_zero() {
            let cert = certify_family(core::slice::from_ref(&p), budget)?;
            if cert.lower() >= rank_target {
                return Ok(HighRankInstance {
                    spec: VarietySpec::zero_set(&space, vec![p])?,
                    certificate: cert,
                    attempts: attempt,
                });
            }
        }
    }
    let mut best = 0;
    while attempt < INSTANCE_ATTEMPTS {
        let mut rng = rng::stream(seed, purpose::INSTANCES, attempt as u64);
        attempt += 1;
        let polys: Vec<PolyFun> = (0..l).map(|_| random_form(&space, d, &mut rng)).collect();
        if polys.iter().any(|p| p.degree() != Some(d)) {
            continue;
        }
        let cert = certify_family(&polys, budget)?;
        best = best.max(cert.lower());
        if cert.lower() >= rank_target {
            return Ok(HighRankInstance {
                spec: VarietySpec::zero_set(&space, polys)?,
                certificate: cert,
                attempts: attempt,
            });
        }
    }
    Err(Error::Unreachable(alloc::format!(
        "no family of {l} degree-{d} forms in {n} variables certified rank >= {rank_target} after {attempt} attempts \
         (best certified {best})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    fn space(p: u32, n: u32) -> Space {
        Space::new(Arc::new(Field::prime(p).unwrap()), n).unwrap()
    }

    fn quad4() -> VarietySpec {
        let s = space(3, 4);
        VarietySpec::zero_set(&s, vec![hyperbolic(&s)]).unwrap()
    }

    #[test]
    fn members_examples() {
        let s = space(2, 2);
        let h = VarietySpec::zero_set(&s, vec![PolyFun::var(&s, 0)]).unwrap();
        assert_eq!(variety_members(&h, DEFAULT_BUDGET).unwrap().density(), 0.5);
        let x = variety_members(&quad4(), DEFAULT_BUDGET).unwrap();
        assert_eq!(x.len(), 33);
        assert!(x.contains(Point(0)));
        assert!(VarietySpec::new(&s, vec![]).is_err());
        assert!(VarietySpec::zero_set(&s, vec![PolyFun::constant(&s, Elem(1))]).is_err());
    }

    #[test]
    fn membership_matches_evaluation() {
        use rand::SeedableRng;
        let spec = quad4();
        let x = variety_members(&spec, DEFAULT_BUDGET).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let p = Point(rng.gen_range(0..81));
            let direct = spec.equations()[0].0.eval(p).unwrap() == Elem(0);
            assert_eq!(x.contains(p), direct);
        }
    }

    #[test]
    fn homogeneous_sets_are_cones() {
        let spec = quad4();
        let s = spec.space().clone();
        let x = variety_members(&spec, DEFAULT_BUDGET).unwrap();
        for &p in x.members() {
            for t in s.field().elements() {
                assert!(x.contains(s.scale(t, p)));
            }
        }
    }

    #[test]
    fn line_examples() {
        let spec = quad4();
        let r = lines_through(&spec, Point(0), DEFAULT_BUDGET).unwrap();
        assert_eq!((r.count, r.c_exponent), (32, 4));
        assert!(r.pass && r.bound == 1.0);

        // cross-check: quadratic along a line through 0 is t^2 Q(v)
        let s = spec.space().clone();
        let q = &spec.equations()[0].0;
        let iso = s.points().skip(1).filter(|&v| q.eval(v).unwrap() == Elem(0)).count() as u64;
        assert_eq!(iso, r.count);

        let s3 = space(3, 3);
        let h = VarietySpec::zero_set(&s3, vec![PolyFun::var(&s3, 1)]).unwrap();
        assert_eq!(lines_through(&h, Point(1), DEFAULT_BUDGET).unwrap().count, 8);
        assert!(lines_through(&h, Point(3), DEFAULT_BUDGET).is_err());

        let s2 = space(2, 4);
        let q2 = VarietySpec::zero_set(&s2, vec![hyperbolic(&s2)]).unwrap();
        assert!(lines_through(&q2, Point(0), DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn projective_examples() {
        let r = projective_zero_density(&quad4(), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.projective_zeros, 16);
        assert!((r.bound - 40.0 / 54.0).abs() < 1e-12);
        assert!(r.pass);

        let s = space(3, 3);
        let lin = VarietySpec::zero_set(&s, vec![PolyFun::var(&s, 0)]).unwrap();
        let r = projective_zero_density(&lin, DEFAULT_BUDGET).unwrap();
        assert!((r.density - 4.0 / 13.0).abs() < 1e-12);
        assert!(r.density >= 1.0 / 18.0);

        let shifted = VarietySpec::new(&s, vec![(PolyFun::var(&s, 0), Elem(1))]).unwrap();
        assert!(projective_zero_density(&shifted, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn anchored_examples() {
        let spec = quad4();
        let x = variety_members(&spec, DEFAULT_BUDGET).unwrap();
        let one = solution_count_anchored(&spec, &[Point(0)], DEFAULT_BUDGET).unwrap();
        assert_eq!(one.count, 33);
        let a = x.members()[5];
        let b = x.members()[17];
        let two = solution_count_anchored(&spec, &[a, b], DEFAULT_BUDGET).unwrap();
        assert_eq!((two.route, two.exponent), (AnchoredRoute::TaylorCoefficients, 7));
        assert!(two.pass);
        let three = solution_count_anchored(&spec, &[a, b, x.members()[20]], DEFAULT_BUDGET).unwrap();
        assert!(
            three.count <= two.count
                && two.count <= solution_count_anchored(&spec, &[a], DEFAULT_BUDGET).unwrap().count
        );

        let s = space(3, 3);
        let lin = VarietySpec::zero_set(&s, vec![PolyFun::var(&s, 0)]).unwrap();
        let r = solution_count_anchored(&lin, &[Point(3), Point(9)], DEFAULT_BUDGET).unwrap();
        assert_eq!(r.count, 9);

        let level = VarietySpec::new(&s, vec![(PolyFun::var(&s, 0), Elem(2))]).unwrap();
        let r = solution_count_anchored(&level, &[Point(2), Point(5)], DEFAULT_BUDGET).unwrap();
        assert_eq!((r.count, r.route), (9, AnchoredRoute::Homogenized));
        assert!(r.pass);
        assert!(solution_count_anchored(&spec, &[Point(4)], DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn bias_certificate() {
        assert_eq!(products_per_term(2), 2);
        assert_eq!(products_per_term(3), 3);
        assert_eq!(rank_lower_from_bias(1.0 / 64.0, 2, 2), 3);
        assert_eq!(rank_lower_from_bias(1.0 / 81.0, 3, 2), 2);
        assert_eq!(rank_lower_from_bias(1.0, 3, 3), 0);
    }

    #[test]
    fn instance_examples() {
        let f2 = Arc::new(Field::prime(2).unwrap());
        let inst = random_high_rank_instance(f2.clone(), 6, 2, 1, 3, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(inst.attempts, 1);
        assert_eq!(inst.certificate.lower(), 3);
        assert!(matches!(random_high_rank_instance(f2, 2, 2, 1, 3, 0, DEFAULT_BUDGET), Err(Error::Unreachable(_))));
        let f3 = Arc::new(Field::prime(3).unwrap());
        let pair = random_high_rank_instance(f3.clone(), 5, 2, 2, 2, 7, DEFAULT_BUDGET).unwrap();
        assert_eq!(pair.spec.codim(), 2);
        assert!(pair.certificate.lower() >= 2);

        let cubic = random_high_rank_instance(f3, 3, 3, 1, 1, 3, DEFAULT_BUDGET).unwrap();
        assert!(matches!(cubic.certificate, RankCertificate::Bias { .. }));
    }
}
