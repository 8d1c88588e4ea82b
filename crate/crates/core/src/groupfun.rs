//! Functions from a subset of `V` into `H = Z/N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::poly::PolyFun;
use crate::space::{Point, Space};

/// A `Z/N`-valued function defined on the points of `mask`.
///
/// Values are stored densely over all of `V`; entries off the mask are kept at
/// zero and never read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFun {
    space: Space,
    modulus: u32,
    mask: BitSet,
    values: Vec<u32>,
}

impl GroupFun {
    pub fn new(space: &Space, modulus: u32, mask: BitSet, mut values: Vec<u32>) -> Result<GroupFun> {
        if modulus < 2 {
            return Err(Error::InvalidArgument("group modulus N must be at least 2".into()));
        }
        let size = space.size();
        if mask.len() != size {
            return Err(Error::DimensionMismatch { expected: size as usize, found: mask.len() as usize });
        }
        if values.len() as u64 != size {
            return Err(Error::DimensionMismatch { expected: size as usize, found: values.len() });
        }
        for (i, v) in values.iter_mut().enumerate() {
            if mask.contains(i as u64) {
                if *v >= modulus {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "value {v} at point {i} is not reduced mod {modulus}"
                    )));
                }
            } else {
                *v = 0;
            }
        }
        Ok(GroupFun { space: space.clone(), modulus, mask, values })
    }

    /// A function defined on all of `V`.
    pub fn total(space: &Space, modulus: u32, values: Vec<u32>) -> Result<GroupFun> {
        GroupFun::new(space, modulus, BitSet::full(space.size()), values)
    }

    pub fn zero(space: &Space, modulus: u32, mask: BitSet) -> Result<GroupFun> {
        let size = space.size() as usize;
        GroupFun::new(space, modulus, mask, vec![0; size])
    }

    /// `x -> P(x)` read in `Z/p`, for `P` over a prime field. Restricted to `mask`.
    pub fn from_poly(poly: &PolyFun, mask: BitSet, budget: u64) -> Result<GroupFun> {
        let f = poly.field();
        if !f.is_prime_field() {
            return Err(Error::InvalidArgument("polynomial-induced Z/N functions need a prime field (N = p)".into()));
        }
        let table = poly.table(budget)?;
        GroupFun::new(poly.space(), f.p(), mask, table.into_iter().map(|e| e.0).collect())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn mask(&self) -> &BitSet {
        &self.mask
    }

    pub fn is_total(&self) -> bool {
        self.mask.count() == self.space.size()
    }

    #[inline]
    pub fn contains(&self, x: Point) -> bool {
        x.0 < self.space.size() && self.mask.contains(x.0)
    }

    #[inline]
    pub fn get(&self, x: Point) -> Option<u32> {
        if self.contains(x) {
            Some(self.values[x.0 as usize])
        } else {
            None
        }
    }

    /// Value at `x` without the mask check.
    #[inline]
    pub fn value_unchecked(&self, x: Point) -> u32 {
        self.values[x.0 as usize]
    }

    /// The dense value table (zeros off the mask).
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Sets `f(x) = value mod N`, adding `x` to the domain.
    pub fn set(&mut self, x: Point, value: u32) -> Result<()> {
        if x.0 >= self.space.size() {
            return Err(Error::PointOutOfRange(x.0));
        }
        self.mask.insert(x.0);
        self.values[x.0 as usize] = value % self.modulus;
        Ok(())
    }

    /// The same values on the smaller domain `mask`, which must lie inside the current one.
    pub fn restrict(&self, mask: &BitSet) -> Result<GroupFun> {
        if !mask.is_subset(&self.mask) {
            return Err(Error::InvalidArgument("restriction mask is not inside the domain".into()));
        }
        GroupFun::new(&self.space, self.modulus, mask.clone(), self.values.clone())
    }

    fn compatible(&self, other: &GroupFun) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        if self.modulus != other.modulus {
            return Err(Error::InvalidArgument("group moduli differ".into()));
        }
        Ok(())
    }

    /// Pointwise sum on the intersection of the domains.
    pub fn add(&self, other: &GroupFun) -> Result<GroupFun> {
        self.compatible(other)?;
        let n = self.modulus as u64;
        let mask = BitSet::from_indices(self.space.size(), self.mask.iter().filter(|&i| other.mask.contains(i)));
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| ((a as u64 + b as u64) % n) as u32).collect();
        GroupFun::new(&self.space, self.modulus, mask, values)
    }

    pub fn neg(&self) -> GroupFun {
        let n = self.modulus;
        let values = self.values.iter().map(|&a| if a == 0 { 0 } else { n - a }).collect();
        GroupFun { space: self.space.clone(), modulus: n, mask: self.mask.clone(), values }
    }

    /// `x -> f(x + h) - f(x)` for a total `f`.
    pub fn additive_derivative(&self, h: Point) -> Result<GroupFun> {
        if !self.is_total() {
            return Err(Error::InvalidArgument("additive derivative needs a total function".into()));
        }
        if h.0 >= self.space.size() {
            return Err(Error::PointOutOfRange(h.0));
        }
        let n = self.modulus;
        let values = self
            .space
            .points()
            .map(|x| {
                let a = self.values[self.space.add(x, h).0 as usize];
                let b = self.values[x.0 as usize];
                (a + n - b) % n
            })
            .collect();
        GroupFun::total(&self.space, n, values)
    }

    /// Points of the common domain where the two functions differ.
    pub fn disagreements(&self, other: &GroupFun) -> Result<Vec<Point>> {
        self.compatible(other)?;
        Ok(self
            .mask
            .iter()
            .filter(|&i| other.mask.contains(i) && self.values[i as usize] != other.values[i as usize])
            .map(Point)
            .collect())
    }

    /// The reduced polynomial of a total function over a prime field with `N = p`.
    pub fn to_poly(&self, budget: u64) -> Result<PolyFun> {
        let f = self.space.field();
        if !f.is_prime_field() || self.modulus != f.p() {
            return Err(Error::InvalidArgument("interpolation needs a prime field with N = p".into()));
        }
        if !self.is_total() {
            return Err(Error::InvalidArgument("interpolation needs a total function".into()));
        }
        let table: Vec<_> = self.values.iter().map(|&v| crate::field::Elem(v)).collect();
        PolyFun::interpolate(&self.space, &table, budget)
    }
}
