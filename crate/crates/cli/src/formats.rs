//! Text formats: field specs, polynomials, variety files, form systems and
//! function tables.
//!
//! Field spec: `p`, `p^l` (first irreducible modulus) or `p^l/c_l...c_0`, the
//! modulus coefficients written from the leading one down, e.g. `2^3/1011`
//! for `x^3 + x + 1`. Use commas between coefficients when `p > 10`.
//!
//! Coefficients and targets are integers. Over a prime field they are reduced
//! mod `p`; over `F_{p^l}` they are element indices in `[0, q)` whose base-`p`
//! digits are the coordinates in the polynomial basis.

use std::fmt::Write as _;
use std::sync::Arc;

use polyspline_core::bits::BitSet;
use polyspline_core::linforms::{LinForm, LinFormSystem};
use polyspline_core::poly::Exponents;
use polyspline_core::variety::VarietySpec;
use polyspline_core::{Elem, Field, GroupFun, Point, PolyFun, Space};

use crate::error::{CliError, CliResult};

pub fn parse_field(spec: &str) -> CliResult<Field> {
    let bad = |msg: &str| CliError::input(format!("field spec {spec:?}: {msg}"));
    let spec = spec.trim();
    let (head, modulus) = match spec.split_once('/') {
        Some((h, m)) => (h, Some(m)),
        None => (spec, None),
    };
    let (p, l) = match head.split_once('^') {
        Some((p, l)) => (p.trim().parse::<u32>(), l.trim().parse::<u32>()),
        None => (head.trim().parse::<u32>(), Ok(1)),
    };
    let (p, l) = (p.map_err(|_| bad("bad characteristic"))?, l.map_err(|_| bad("bad degree"))?);
    let field = match modulus {
        None if l == 1 => Field::prime(p)?,
        None => Field::new(p, l, Some(&Field::first_irreducible(p, l)?))?,
        Some(m) => {
            let digits: Vec<u32> = if m.contains(',') {
                m.split(',')
                    .map(|d| d.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("bad modulus"))?
            } else {
                m.trim()
                    .chars()
                    .map(|c| c.to_digit(10).ok_or(()))
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("bad modulus"))?
            };
            if digits.iter().any(|&d| d >= p) {
                return Err(bad("modulus coefficient not reduced mod p"));
            }
            let low_first: Vec<u32> = digits.into_iter().rev().collect();
            Field::new(p, l, Some(&low_first))?
        }
    };
    Ok(field)
}

/// Canonical spec string, with the modulus spelled out for extension fields.
pub fn format_field(f: &Field) -> String {
    if f.is_prime_field() {
        return f.p().to_string();
    }
    let coeffs: Vec<String> = f.modulus().iter().rev().map(|c| c.to_string()).collect();
    let sep = if f.p() > 10 { "," } else { "" };
    format!("{}^{}/{}", f.p(), f.degree(), coeffs.join(sep))
}

pub fn elem_from_int(f: &Field, v: i64) -> CliResult<Elem> {
    if f.is_prime_field() {
        Ok(f.from_int(v))
    } else if (0..f.q() as i64).contains(&v) {
        Ok(Elem(v as u32))
    } else {
        Err(CliError::input(format!("{v} is not an element index of F_{}", f.q())))
    }
}

/// Parses `c*x1^e1*x2 - x3 + 4`; repeated variables multiply.
pub fn parse_poly(space: &Space, text: &str) -> CliResult<PolyFun> {
    let f = space.field();
    let n = space.dim() as usize;
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(CliError::input("empty polynomial"));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut negative = false;
    for (i, c) in compact.char_indices() {
        if c == '+' || c == '-' {
            if i > start {
                terms.push((negative, &compact[start..i]));
            } else if i > 0 {
                return Err(CliError::input(format!("dangling sign in {text:?}")));
            }
            negative = c == '-';
            start = i + 1;
        }
    }
    if start >= compact.len() {
        return Err(CliError::input(format!("dangling sign in {text:?}")));
    }
    terms.push((negative, &compact[start..]));

    let mut out = Vec::with_capacity(terms.len());
    for (negative, body) in terms {
        let mut coeff = Elem(1);
        let mut exps: Exponents = vec![0; n];
        for factor in body.split('*') {
            if let Some(var) = factor.strip_prefix('x') {
                let (idx, exp) = match var.split_once('^') {
                    Some((i, e)) => {
                        (i, e.parse::<u32>().map_err(|_| CliError::input(format!("bad exponent in {factor:?}")))?)
                    }
                    None => (var, 1),
                };
                let idx: usize = idx.parse().map_err(|_| CliError::input(format!("bad variable {factor:?}")))?;
                if idx == 0 || idx > n {
                    return Err(CliError::input(format!("variable x{idx} outside x1..x{n}")));
                }
                exps[idx - 1] += exp;
            } else {
                let v: i64 =
                    factor.parse().map_err(|_| CliError::input(format!("bad factor {factor:?} in {text:?}")))?;
                coeff = f.mul(coeff, elem_from_int(f, v)?);
            }
        }
        if negative {
            coeff = f.neg(coeff);
        }
        out.push((exps, coeff));
    }
    Ok(PolyFun::from_terms(space, out)?)
}

/// Canonical text: terms in increasing exponent-tuple order, unit
/// coefficients omitted, `0` for the zero polynomial.
pub fn format_poly(p: &PolyFun) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (exps, c)) in p.terms().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        let vars: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
            .collect();
        if vars.is_empty() {
            let _ = write!(out, "{}", c.0);
        } else if c.0 == 1 {
            out.push_str(&vars.join("*"));
        } else {
            let _ = write!(out, "{}*{}", c.0, vars.join("*"));
        }
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One equation per line, `poly` or `poly = target`; `#` starts a comment.
pub fn parse_variety(space: &Space, text: &str) -> CliResult<VarietySpec> {
    let mut eqs = Vec::new();
    for (line, body) in content_lines(text) {
        let (lhs, rhs) = match body.split_once('=') {
            Some((l, r)) => (l, Some(r.trim())),
            None => (body, None),
        };
        let poly = parse_poly(space, lhs).map_err(|e| CliError::parse("variety", line, e.to_string()))?;
        let target = match rhs {
            None => Elem(0),
            Some(r) => {
                let v: i64 = r.parse().map_err(|_| CliError::parse("variety", line, format!("bad target {r:?}")))?;
                elem_from_int(space.field(), v).map_err(|e| CliError::parse("variety", line, e.to_string()))?
            }
        };
        eqs.push((poly, target));
    }
    if eqs.is_empty() {
        return Err(CliError::input("variety has no equations"));
    }
    Ok(VarietySpec::new(space, eqs)?)
}

pub fn format_variety(spec: &VarietySpec) -> String {
    spec.equations().iter().map(|(p, t)| format!("{} = {}\n", format_poly(p), t.0)).collect()
}

/// Sparse `(index, coefficient)` terms of one form's `v` and `w` parts.
type SparseForm = (Vec<(usize, i64)>, Vec<(usize, i64)>);

/// One form per line, `2*v1 - v3 + w1`. Arity and shift count are the largest
/// indices used.
pub fn parse_forms(text: &str) -> CliResult<LinFormSystem> {
    let mut rows: Vec<SparseForm> = Vec::new();
    let (mut arity, mut shifts) = (0usize, 0usize);
    for (line, body) in content_lines(text) {
        let err = |m: String| CliError::parse("form system", line, m);
        let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        let mut vs = Vec::new();
        let mut ws = Vec::new();
        let mut sign = 1i64;
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('+') {
                sign = 1;
                rest = r;
                continue;
            }
            if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r;
                continue;
            }
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let (coef, var) = match term.split_once('*') {
                Some((c, v)) => (c.parse::<i64>().map_err(|_| err(format!("bad coefficient in {term:?}")))?, v),
                None => (1, term),
            };
            let (slot, idx) = match (var.strip_prefix('v'), var.strip_prefix('w')) {
                (Some(i), _) => (&mut vs, i),
                (_, Some(i)) => (&mut ws, i),
                _ => return Err(err(format!("terms must be c*v<i> or c*w<i>, got {term:?}"))),
            };
            let idx: usize = idx.parse().map_err(|_| err(format!("bad index in {term:?}")))?;
            if idx == 0 {
                return Err(err("indices start at 1".into()));
            }
            slot.push((idx - 1, sign * coef));
            sign = 1;
        }
        arity = arity.max(vs.iter().map(|&(i, _)| i + 1).max().unwrap_or(0));
        shifts = shifts.max(ws.iter().map(|&(i, _)| i + 1).max().unwrap_or(0));
        rows.push((vs, ws));
    }
    if rows.is_empty() {
        return Err(CliError::input("form system has no forms"));
    }
    let forms = rows
        .into_iter()
        .map(|(vs, ws)| {
            let mut v = vec![0i64; arity];
            let mut w = vec![0i64; shifts];
            for (i, c) in vs {
                v[i] += c;
            }
            for (i, c) in ws {
                w[i] += c;
            }
            LinForm::new(v, w)
        })
        .collect();
    Ok(LinFormSystem::new(arity, shifts, forms)?)
}

pub fn format_point(space: &Space, x: Point) -> String {
    let c: Vec<String> = space.coords(x).iter().map(|e| e.0.to_string()).collect();
    format!("({})", c.join(", "))
}

/// `(u | v1, v2, ...)` with points as coordinate tuples.
pub fn format_cube(space: &Space, u: Point, dirs: &[Point]) -> String {
    let d: Vec<String> = dirs.iter().map(|&v| format_point(space, v)).collect();
    format!("({} | {})", format_point(space, u), d.join(", "))
}

const TABLE_MAGIC: &str = "polyspline-table 1";
const VALUES_PER_LINE: usize = 32;

/// Header lines `field`, `dim`, `group`, `mask <len> <runs...>` (alternating
/// absent/present run lengths), then `values` and `q^n` values in point order.
/// Entries off the mask are written as 0.
pub fn write_table(f: &GroupFun) -> String {
    let space = f.space();
    let mut out = String::new();
    let _ = writeln!(out, "{TABLE_MAGIC}");
    let _ = writeln!(out, "field {}", format_field(space.field()));
    let _ = writeln!(out, "dim {}", space.dim());
    let _ = writeln!(out, "group {}", f.modulus());
    let runs: Vec<String> = f.mask().runs().iter().map(|r| r.to_string()).collect();
    let _ = writeln!(out, "mask {} {}", space.size(), runs.join(" "));
    let _ = writeln!(out, "values");
    for chunk in f.values().chunks(VALUES_PER_LINE) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn read_table(text: &str) -> CliResult<GroupFun> {
    let err = |line: usize, m: &str| CliError::parse("function table", line, m);
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == TABLE_MAGIC => {}
        Some((i, _)) => return Err(err(i, "missing table header")),
        None => return Err(err(0, "empty file")),
    }
    let mut field = None;
    let mut dim = None;
    let mut group = None;
    let mut mask_spec: Option<(usize, Vec<u64>)> = None;
    let mut values_line = 0;
    for (i, l) in lines.by_ref() {
        let (key, rest) = l.split_once(' ').unwrap_or((l, ""));
        match key {
            "field" => field = Some(parse_field(rest).map_err(|e| err(i, &e.to_string()))?),
            "dim" => dim = Some(rest.trim().parse::<u32>().map_err(|_| err(i, "bad dim"))?),
            "group" => group = Some(rest.trim().parse::<u32>().map_err(|_| err(i, "bad group modulus"))?),
            "mask" => {
                let nums: Vec<u64> = rest
                    .split_whitespace()
                    .map(|t| t.parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(i, "bad mask"))?;
                mask_spec = Some((i, nums));
            }
            "values" => {
                values_line = i;
                break;
            }
            _ => return Err(err(i, &format!("unknown header key {key:?}"))),
        }
    }
    let (Some(field), Some(dim), Some(group)) = (field, dim, group) else {
        return Err(err(values_line, "header needs field, dim and group"));
    };
    let space = Space::new(Arc::new(field), dim)?;
    let size = space.size();
    let mask = match mask_spec {
        None => BitSet::full(size),
        Some((i, nums)) => {
            let (&len, runs) = nums.split_first().ok_or_else(|| err(i, "mask needs a length"))?;
            if len != size {
                return Err(err(i, &format!("mask length {len} but the space has {size} points")));
            }
            BitSet::from_runs(len, runs).ok_or_else(|| err(i, "mask runs do not add up to the length"))?
        }
    };
    let mut values = Vec::with_capacity(size as usize);
    for (i, l) in lines {
        for t in l.split_whitespace() {
            values.push(t.parse::<u32>().map_err(|_| err(i, &format!("bad value {t:?}")))?);
        }
    }
    if values.len() as u64 != size {
        return Err(err(values_line, &format!("expected {size} values, found {}", values.len())));
    }
    Ok(GroupFun::new(&space, group, mask, values)?)
}
