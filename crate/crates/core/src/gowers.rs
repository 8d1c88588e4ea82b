//! Gowers uniformity norms of complex functions on `V`.
//!
//! Exact values use the recursion
//! `||g||_{U_m}^{2^m} = E_h ||g(.+h) conj(g)||_{U_{m-1}}^{2^{m-1}}` with
//! `||g||_{U_1} = |E g|`; all averages are pairwise sums, so results do not
//! depend on how the outer average is split across threads.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::cube::SubsetOracle;
use crate::error::{check_budget, Error, Result};
use crate::poly::PolyFun;
use crate::rng::{self, purpose};
use crate::space::{Point, Space};
use crate::stats::{pairwise_sum, pairwise_sum_c};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFun {
    space: Space,
    values: Vec<Complex64>,
    bound: f64,
}

impl ComplexFun {
    pub fn new(space: &Space, values: Vec<Complex64>) -> Result<ComplexFun> {
        if values.len() as u64 != space.size() {
            return Err(Error::DimensionMismatch { expected: space.size() as usize, found: values.len() });
        }
        let bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(ComplexFun { space: space.clone(), values, bound })
    }

    /// `x -> e_q(P(x))`.
    pub fn phase(poly: &PolyFun, budget: u64) -> Result<ComplexFun> {
        let f = poly.field();
        let values = poly.table(budget)?.into_iter().map(|v| f.char_value(v)).collect();
        ComplexFun::new(poly.space(), values)
    }

    /// The balanced indicator `1_X - |X|/|V|`.
    pub fn balanced_indicator(x: &SubsetOracle) -> ComplexFun {
        let delta = x.density();
        let values =
            x.space().points().map(|p| Complex64::new(if x.contains(p) { 1.0 - delta } else { -delta }, 0.0)).collect();
        ComplexFun::new(x.space(), values).expect("sized to the space")
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `max |g(x)|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Pointwise product.
    pub fn mul(&self, other: &ComplexFun) -> Result<ComplexFun> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        ComplexFun::new(&self.space, self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum GowersMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64, std_err: f64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GowersReport {
    pub m: u32,
    pub value: f64,
    pub mode: GowersMode,
    /// Real part of the `2^m`-power average before the root is taken.
    pub pre_root: f64,
    pub imag_residue: f64,
}

fn root(pre: f64, m: u32) -> f64 {
    libm::pow(pre.max(0.0), 1.0 / (1u64 << m) as f64)
}

/// Steps of [`gowers_exact`]: `q^{nm}`.
pub fn exact_cost(space: &Space, m: u32) -> u128 {
    (space.size() as u128).saturating_pow(m.max(1))
}

fn pre_root_rec(space: &Space, g: &[Complex64], m: u32) -> Complex64 {
    let size = g.len() as f64;
    if m == 1 {
        let mean = pairwise_sum_c(g) / size;
        return mean * mean.conj();
    }
    let mut d = Vec::with_capacity(g.len());
    let mut acc = Vec::with_capacity(g.len());
    for h in space.points() {
        derivative_into(space, g, h, &mut d);
        acc.push(pre_root_rec(space, &d, m - 1));
    }
    pairwise_sum_c(&acc) / size
}

fn derivative_into(space: &Space, g: &[Complex64], h: Point, out: &mut Vec<Complex64>) {
    out.clear();
    out.extend(space.points().map(|x| g[space.add(x, h).0 as usize] * g[x.0 as usize].conj()));
}

/// `||g||_{U_m}` by exhaustive recursion.
pub fn gowers_exact(g: &ComplexFun, m: u32, budget: u64) -> Result<GowersReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("Gowers norms need m >= 1".into()));
    }
    check_budget(exact_cost(&g.space, m), budget)?;
    let space = &g.space;
    let pre = if m == 1 {
        pre_root_rec(space, &g.values, 1)
    } else {
        let per_h = crate::par::map_range(space.size(), |h| {
            let mut d = Vec::with_capacity(g.values.len());
            derivative_into(space, &g.values, Point(h), &mut d);
            pre_root_rec(space, &d, m - 1)
        });
        pairwise_sum_c(&per_h) / space.size() as f64
    };
    Ok(GowersReport { m, value: root(pre.re, m), mode: GowersMode::Exact, pre_root: pre.re, imag_residue: pre.im })
}

const MC_CHUNK: u64 = 4096;

/// Monte-Carlo estimate of `||g||_{U_m}` from `samples` uniform `(x, v)` draws.
///
/// Draws are made in chunks of 4096, chunk `k` from stream `(seed, k)`.
pub fn gowers_mc(g: &ComplexFun, m: u32, samples: u64, seed: u64) -> Result<GowersReport> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidArgument("Monte-Carlo Gowers norms need 1 <= m <= 20".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let space = &g.space;
    let chunks = samples.div_ceil(MC_CHUNK);
    let draws: Vec<Vec<Complex64>> = crate::par::map_range(chunks, |k| {
        let want = MC_CHUNK.min(samples - k * MC_CHUNK);
        let mut rng = rng::stream(seed, purpose::GOWERS, k);
        let mut verts = Vec::with_capacity(1 << m);
        let mut dirs = Vec::with_capacity(m as usize);
        (0..want)
            .map(|_| {
                let x = Point(rng.gen_range(0..space.size()));
                dirs.clear();
                for _ in 0..m {
                    dirs.push(Point(rng.gen_range(0..space.size())));
                }
                space.cube_vertices(x, &dirs, &mut verts);
                let mut prod = Complex64::new(1.0, 0.0);
                for (omega, v) in verts.iter().enumerate() {
                    let val = g.values[v.0 as usize];
                    prod *= if omega.count_ones() % 2 == 0 { val } else { val.conj() };
                }
                prod
            })
            .collect()
    });
    let all: Vec<Complex64> = draws.into_iter().flatten().collect();
    let n = all.len() as f64;
    let mean = pairwise_sum_c(&all) / n;
    let sq: Vec<f64> = all.iter().map(|z| (z.re - mean.re) * (z.re - mean.re)).collect();
    let var = if all.len() > 1 { pairwise_sum(&sq) / (n - 1.0) } else { 0.0 };
    let std_err = libm::sqrt(var / n);
    Ok(GowersReport {
        m,
        value: root(mean.re, m),
        mode: GowersMode::MonteCarlo { samples, seed, std_err },
        pre_root: mean.re,
        imag_residue: mean.im,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniformityReport {
    pub delta: f64,
    pub eta: f64,
    pub gowers: GowersReport,
}

impl UniformityReport {
    /// `eta < eps`.
    pub fn is_uniform(&self, eps: f64) -> bool {
        self.eta < eps
    }
}

/// `delta = |X|/|V|` and `eta = ||1_X - delta||_{U_m}`, exact when the budget
/// allows and Monte-Carlo otherwise.
pub fn uniformity(x: &SubsetOracle, m: u32, budget: u64, samples: u64, seed: u64) -> Result<UniformityReport> {
    let g = ComplexFun::balanced_indicator(x);
    let gowers = if exact_cost(x.space(), m) <= budget as u128 {
        gowers_exact(&g, m, budget)?
    } else {
        gowers_mc(&g, m, samples, seed)?
    };
    Ok(UniformityReport { delta: x.density(), eta: gowers.value, gowers })
}
