#![allow(dead_code)]

use std::sync::Arc;

use polyspline_core::{Field, Space};

pub fn field(p: u32, l: u32) -> Arc<Field> {
    let modulus = if l == 1 { None } else { Some(Field::first_irreducible(p, l).unwrap()) };
    Arc::new(Field::new(p, l, modulus.as_deref()).unwrap())
}

pub fn space(p: u32, l: u32, n: u32) -> Space {
    Space::new(field(p, l), n).unwrap()
}

/// `(p, l)` for every field of order at most 64.
pub fn small_fields() -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
        let mut l = 1;
        while p.pow(l) <= 64 {
            out.push((p, l));
            l += 1;
        }
    }
    out
}
