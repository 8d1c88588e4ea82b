use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use polyspline_core::bits::BitSet;
use polyspline_core::cube::{self, Cube, Mode, SubsetOracle};
use polyspline_core::gowers::{self, ComplexFun};
use polyspline_core::linforms::{self, SpanField};
use polyspline_core::spline::{self, NoiseConfig, SplineReport, SubspaceMode, VOTE_CONVENTION};
use polyspline_core::variety::{self, RankCertificate, VarietySpec};
use polyspline_core::{rank, Error, GroupFun, PolyFun, Space};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::formats;
use crate::report::{emit, RunReport, Verdict};

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report values serialize")
}

fn load_table(fun: &FunArgs) -> CliResult<Option<GroupFun>> {
    match &fun.fun {
        Some(path) => Ok(Some(formats::read_table(&read(path)?)?)),
        None => Ok(None),
    }
}

fn resolve_space(args: &SpaceArgs, table: Option<&GroupFun>) -> CliResult<Space> {
    let given = match &args.field {
        Some(spec) => Some(formats::parse_field(spec)?),
        None => None,
    };
    if let Some(t) = table {
        let space = t.space().clone();
        if let Some(f) = &given {
            if formats::format_field(f) != formats::format_field(space.field()) {
                return Err(CliError::input(format!(
                    "--field {} does not match the table's field {}",
                    formats::format_field(f),
                    formats::format_field(space.field())
                )));
            }
        }
        if args.dim.is_some_and(|n| n != space.dim()) {
            return Err(CliError::input(format!("--dim does not match the table's dimension {}", space.dim())));
        }
        return Ok(space);
    }
    let field = given.ok_or_else(|| CliError::input("--field is required"))?;
    let dim = args.dim.ok_or_else(|| CliError::input("--dim is required"))?;
    Ok(Space::new(Arc::new(field), dim)?)
}

fn variety_spec(space: &Space, args: &DomainArgs) -> CliResult<Option<VarietySpec>> {
    if !args.is_given() {
        return Ok(None);
    }
    let mut text = String::new();
    if let Some(path) = &args.variety {
        text.push_str(&read(path)?);
        text.push('\n');
    }
    for eq in &args.equations {
        text.push_str(eq);
        text.push('\n');
    }
    Ok(Some(formats::parse_variety(space, &text)?))
}

fn domain(space: &Space, args: &DomainArgs, budget: u64) -> CliResult<(SubsetOracle, Option<VarietySpec>)> {
    match variety_spec(space, args)? {
        Some(spec) => {
            let x = variety::variety_members(&spec, budget)?;
            if x.is_empty() {
                return Err(CliError::input("X is empty"));
            }
            Ok((x, Some(spec)))
        }
        None => Ok((SubsetOracle::full(space), None)),
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::input(format!("{what} is sampled; pass --seed")))
}

/// The input function on X, plus the planted polynomial and corrupted points
/// when it was built from `--poly`.
struct Input {
    f: GroupFun,
    planted: Option<(PolyFun, Vec<polyspline_core::Point>)>,
}

fn input_function(
    space: &Space,
    x: &SubsetOracle,
    fun: &FunArgs,
    table: Option<GroupFun>,
    seed: Option<u64>,
    budget: u64,
) -> CliResult<Input> {
    if fun.fun.is_some() && fun.poly.is_some() {
        return Err(CliError::input("pass either --fun or --poly, not both"));
    }
    if let Some(t) = table {
        if fun.noise != 0.0 {
            return Err(CliError::input("--noise applies to --poly only"));
        }
        if let Some(p) = x.members().iter().find(|&&p| !t.contains(p)) {
            return Err(CliError::input(format!(
                "the table is undefined at {} in X",
                formats::format_point(space, *p)
            )));
        }
        return Ok(Input { f: t.restrict(x.mask())?, planted: None });
    }
    let text = fun.poly.as_ref().ok_or_else(|| CliError::input("pass --fun or --poly"))?;
    let g = formats::parse_poly(space, text)?;
    let clean = GroupFun::from_poly(&g, x.mask().clone(), budget)?;
    let (f, changed) = if fun.noise > 0.0 {
        spline::corrupt(&clean, x, fun.noise, require_seed(seed, "--noise")?, 0)?
    } else {
        (clean, Vec::new())
    };
    Ok(Input { f, planted: Some((g, changed)) })
}

fn cube_sampled(x: &SubsetOracle, m: u32, budget: u64) -> bool {
    cube::exhaustive_cost(x.space(), m) > budget as u128
}

fn space_json(space: &Space, x: &SubsetOracle, spec: Option<&VarietySpec>) -> Value {
    json!({
        "field": formats::format_field(space.field()),
        "dim": space.dim(),
        "size": space.size(),
        "x_size": x.len(),
        "density": x.density(),
        "variety": spec.map(formats::format_variety),
    })
}

fn first_bad_cube(f: &GroupFun, x: &SubsetOracle, m: u32) -> CliResult<Option<String>> {
    for &u in x.members() {
        let mut found: Option<Vec<polyspline_core::Point>> = None;
        let mut err = None;
        cube::for_each_cube_at(x, m, u, &mut |_, dirs| {
            if found.is_some() || err.is_some() {
                return;
            }
            match cube::alt_sum(f, &Cube::new(u, dirs.to_vec())) {
                Ok(0) => {}
                Ok(_) => found = Some(dirs.to_vec()),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        if let Some(dirs) = found {
            return Ok(Some(formats::format_cube(x.space(), u, &dirs)));
        }
    }
    Ok(None)
}

fn cube_test(a: &CubeTestArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let table = load_table(&a.fun)?;
    let space = resolve_space(&a.space, table.as_ref())?;
    let b = &a.budget;
    let (x, spec) = domain(&space, &a.domain, b.budget)?;
    let input = input_function(&space, &x, &a.fun, table, b.seed, b.budget)?;
    let sampled = cube_sampled(&x, a.m, b.budget);
    let seed = if sampled { require_seed(b.seed, "the cube test")? } else { b.seed.unwrap_or(0) };
    let rep = cube::bad_fraction(&input.f, &x, a.m, b.samples, seed, b.budget)?;
    let example = if rep.mode == Mode::Exhaustive && rep.bad > 0 { first_bad_cube(&input.f, &x, a.m)? } else { None };
    let results = json!({
        "space": space_json(&space, &x, spec.as_ref()),
        "bad_fraction": to_value(&rep),
        "example_bad_cube": example,
        "corrupted": input.planted.as_ref().map(|(_, c)| c.len()),
    });
    let check = format!("bad {}-cube fraction", a.m);
    let v = Verdict::compare(&check, rep.eps, "<=", a.max_eps);
    Ok((results, vec![v]))
}

fn spline_json(r: &SplineReport, tallies: bool) -> Value {
    json!({
        "domain": to_value(&r.domain),
        "m": r.m,
        "votes": r.votes,
        "seed": r.seed,
        "convention": r.convention,
        "residual": to_value(&r.residual),
        "disagreements": r.disagreements,
        "disagreement": r.disagreement,
        "margins": to_value(&r.margins),
        "flagged": to_value(&r.flagged),
        "exact_extension": r.exact_extension,
        "tallies": if tallies { to_value(&r.tallies) } else { Value::Null },
    })
}

fn correct(a: &CorrectArgs, extend: bool) -> CliResult<(Value, Vec<Verdict>)> {
    let table = load_table(&a.fun)?;
    let space = resolve_space(&a.space, table.as_ref())?;
    let b = &a.budget;
    let seed = require_seed(b.seed, "plurality correction")?;
    let (x, spec) = domain(&space, &a.domain, b.budget)?;
    let input = input_function(&space, &x, &a.fun, table, Some(seed), b.budget)?;
    let eps_in = cube::bad_fraction(&input.f, &x, a.m, b.samples, seed, b.budget)?;
    let run = if extend {
        spline::extend_to_v(&input.f, &x, a.m, a.votes, seed, b.budget)
    } else {
        spline::spline_on_x(&input.f, &x, a.m, a.votes, seed, b.budget)
    };
    let mut results = json!({
        "space": space_json(&space, &x, spec.as_ref()),
        "input_bad_fraction": to_value(&eps_in),
        "convention": VOTE_CONVENTION,
    });
    let r = match run {
        Ok(r) => r,
        Err(e @ (Error::EmptyVotes { .. } | Error::TiedVote { .. })) => {
            results["error"] = Value::from(e.to_string());
            let v = Verdict::with_outcome(
                "correction completed",
                Value::from(e.to_string()),
                "==",
                Value::from("ok"),
                false,
            )
            .summary(format!("correction failed: {e}"));
            return Ok((results, vec![v]));
        }
        Err(e) => return Err(e.into()),
    };
    results["spline"] = spline_json(&r, a.tallies);
    if let Some((g, changed)) = &input.planted {
        let dom = match r.domain {
            spline::Domain::X => x.mask().clone(),
            spline::Domain::V => BitSet::full(space.size()),
        };
        let g_dom = GroupFun::from_poly(g, dom, b.budget)?;
        let wrong = g_dom.disagreements(&r.h)?.len() as u64;
        let size = g_dom.mask().count() as f64;
        results["planted"] = json!({
            "poly": formats::format_poly(g),
            "noise": a.fun.noise,
            "corrupted": changed.len(),
            "corrupted_points": to_value(changed),
            "disagreement_with_g": wrong as f64 / size,
            "recovered": wrong == 0,
        });
    }
    if let Some(path) = &a.out {
        write(path, formats::write_table(&r.h).as_bytes())?;
    }
    let mut verdicts = vec![Verdict::compare("residual bad-cube fraction", r.residual.eps, "<=", eps_in.eps / 2.0)];
    if let Some(exact) = r.exact_extension {
        verdicts.push(Verdict::with_outcome("exact extension", Value::from(exact), "==", Value::from(true), exact));
    }
    Ok((results, verdicts))
}

fn complex_input(
    space: &Space,
    x: &SubsetOracle,
    a: &GowersArgs,
    table: Option<GroupFun>,
) -> CliResult<(ComplexFun, &'static str)> {
    if a.fun.noise != 0.0 {
        return Err(CliError::input("--noise is not used by gowers"));
    }
    if let Some(t) = table {
        let n = t.modulus() as f64;
        let values = (0..space.size())
            .map(|i| match t.get(polyspline_core::Point(i)) {
                Some(v) => Complex64::from_polar(1.0, std::f64::consts::TAU * v as f64 / n),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        return Ok((ComplexFun::new(space, values)?, "table phase"));
    }
    if let Some(text) = &a.fun.poly {
        let p = formats::parse_poly(space, text)?;
        return Ok((ComplexFun::phase(&p, a.budget.budget)?, "polynomial phase"));
    }
    if a.domain.is_given() {
        return Ok((ComplexFun::balanced_indicator(x), "balanced indicator"));
    }
    Err(CliError::input("pass --fun, --poly or a variety"))
}

fn gowers_cmd(a: &GowersArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let table = load_table(&a.fun)?;
    let space = resolve_space(&a.space, table.as_ref())?;
    let b = &a.budget;
    let (x, spec) = domain(&space, &a.domain, b.budget)?;
    let (g, source) = complex_input(&space, &x, a, table)?;
    let rep = if gowers::exact_cost(&space, a.m) <= b.budget as u128 {
        gowers::gowers_exact(&g, a.m, b.budget)?
    } else {
        gowers::gowers_mc(&g, a.m, b.samples, require_seed(b.seed, "the Gowers norm")?)?
    };
    let results = json!({
        "space": space_json(&space, &x, spec.as_ref()),
        "source": source,
        "gowers": to_value(&rep),
    });
    let mut verdicts = Vec::new();
    if let Some(expect) = a.expect {
        let dev = (rep.value - expect).abs();
        verdicts.push(
            Verdict::compare(&format!("|U{} - expected|", a.m), dev, "<=", a.tol)
                .summary(format!("U{} = {} vs expected {expect} (tol {})", a.m, rep.value, a.tol)),
        );
    }
    Ok((results, verdicts))
}

fn uniformity_cmd(a: &UniformityArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let space = resolve_space(&a.space, None)?;
    let b = &a.budget;
    let (x, spec) = domain(&space, &a.domain, b.budget)?;
    let seed = if gowers::exact_cost(&space, a.m) > b.budget as u128 {
        require_seed(b.seed, "the uniformity norm")?
    } else {
        0
    };
    let rep = gowers::uniformity(&x, a.m, b.budget, b.samples, seed)?;
    let results = json!({
        "space": space_json(&space, &x, spec.as_ref()),
        "uniformity": to_value(&rep),
    });
    let verdicts = a.eps.map(|eps| Verdict::compare("eta", rep.eta, "<", eps)).into_iter().collect();
    Ok((results, verdicts))
}

fn span_field(spec: Option<&str>) -> CliResult<SpanField> {
    match spec.map(str::trim) {
        None | Some("Q") | Some("q") => Ok(SpanField::Rationals),
        Some(s) => {
            let p: u32 =
                s.parse().map_err(|_| CliError::input(format!("span field must be Q or a prime, got {s:?}")))?;
            if !polyspline_core::field::is_prime(p as u64) {
                return Err(CliError::input(format!("{p} is not prime")));
            }
            Ok(SpanField::Prime(p))
        }
    }
}

fn csc(a: &CscArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let sys = formats::parse_forms(&read(&a.system)?)?;
    let field = span_field(a.field.as_deref())?;
    let forms: Vec<String> = sys.forms().iter().map(|f| f.to_string()).collect();
    let (value, per_form) = match a.at {
        Some(j) => {
            if j == 0 || j > sys.len() {
                return Err(CliError::input(format!("--at {j} outside 1..={}", sys.len())));
            }
            let c = linforms::cs_complexity_at(&sys, j - 1, field, a.budget)?;
            (c.value(), vec![to_value(&c)])
        }
        None => {
            let c = linforms::cs_complexity(&sys, field, a.budget)?;
            (c.value, c.per_form.iter().map(to_value).collect())
        }
    };
    let results = json!({
        "forms": forms,
        "arity": sys.arity(),
        "shifts": sys.shifts(),
        "span_field": to_value(&field),
        "complexity": value,
        "per_form": per_form,
    });
    let mut verdicts = Vec::new();
    if let Some(m) = a.m {
        let pass = value.is_some_and(|v| v <= m);
        let shown = value.map_or("unbounded".to_string(), |v| v.to_string());
        let verdict = if pass { "pass" } else { "fail" };
        verdicts.push(
            Verdict::with_outcome("complexity", to_value(&value), "<=", Value::from(m), pass)
                .summary(format!("complexity {shown} \u{2264} m={m}: {verdict}")),
        );
    }
    Ok((results, verdicts))
}

fn count(a: &CountArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let sys = formats::parse_forms(&read(&a.system)?)?;
    let space = resolve_space(&a.space, None)?;
    let (x, spec) = domain(&space, &a.domain, a.budget)?;
    let rep = linforms::counting_check(&sys, &x, a.m, a.budget)?;
    let results = json!({
        "space": space_json(&space, &x, spec.as_ref()),
        "forms": sys.forms().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "counting": to_value(&rep),
    });
    let v = if rep.applicable {
        Verdict::compare("|count/|V|^k - delta^|I||", rep.deviation, "<=", rep.bound)
    } else {
        Verdict::inapplicable("counting bound", to_value(&rep.complexity), &rep.verdict)
    };
    Ok((results, vec![v]))
}

fn rank_cmd(a: &RankArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let space = resolve_space(&a.space, None)?;
    let polys: Vec<PolyFun> = a.polys.iter().map(|t| formats::parse_poly(&space, t)).collect::<CliResult<_>>()?;
    let mut results = json!({ "polys": polys.iter().map(formats::format_poly).collect::<Vec<_>>() });
    let lower = if polys.len() == 1 {
        let p = &polys[0];
        let d = a.degree.or(p.degree()).ok_or_else(|| CliError::input("the zero polynomial has no rank"))?;
        let rb = rank::rank_bounds(p, d, a.budget)?;
        let witness: Vec<Value> = rb
            .witness
            .terms
            .iter()
            .map(|(q, r)| json!({ "q": formats::format_poly(q), "r": formats::format_poly(r) }))
            .collect();
        results["rank"] = json!({
            "d": d,
            "lower": rb.lower,
            "upper": rb.upper,
            "exact": rb.is_exact(),
            "witness": witness,
            "bilinear_lower": if p.degree() == Some(2) { Some(rank::bilinear_lower_bound(p)?) } else { None },
            "bias": p.bias(a.budget).ok(),
        });
        rb.lower
    } else {
        let degs: Vec<Option<u32>> = polys.iter().map(|p| p.degree()).collect();
        if degs.iter().any(|d| *d != degs[0]) || degs[0].is_none() {
            return Err(CliError::input("a family needs nonzero polynomials of one degree"));
        }
        let cert = variety::certify_family(&polys, a.budget)?;
        results["family"] = match &cert {
            RankCertificate::Quadratic(f) => json!({
                "kind": "quadratic",
                "lower": f.lower,
                "upper": f.upper,
                "minimizer": f.minimizer.iter().map(|(i, c)| json!([i + 1, c.index()])).collect::<Vec<_>>(),
            }),
            RankCertificate::Bias { max_bias, lower } => {
                json!({ "kind": "bias", "max_bias": max_bias, "lower": lower })
            }
        };
        cert.lower()
    };
    let verdicts =
        a.min_rank.map(|r| Verdict::compare("rank lower bound", lower as f64, ">=", r as f64)).into_iter().collect();
    Ok((results, verdicts))
}

fn lines(a: &LinesArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let space = resolve_space(&a.space, None)?;
    let spec = variety_spec(&space, &a.domain)?.ok_or_else(|| CliError::input("lines needs a variety"))?;
    let x = space.point(a.point)?;
    let mut results = json!({ "variety": formats::format_variety(&spec), "point": formats::format_point(&space, x) });
    let mut verdicts = Vec::new();
    if space.q() > spec.max_degree() {
        let lr = variety::lines_through(&spec, x, a.budget)?;
        verdicts.push(Verdict::compare("lines through point", lr.count as f64, ">=", lr.bound));
        results["lines"] = to_value(&lr);
    } else {
        verdicts.push(Verdict::inapplicable("lines through point", Value::Null, "needs q > max degree"));
    }
    if spec.is_homogeneous_zero_set() {
        let pr = variety::projective_zero_density(&spec, a.budget)?;
        verdicts.push(Verdict::compare("projective zeros", pr.projective_zeros as f64, ">=", pr.bound));
        results["projective"] = to_value(&pr);
    }
    if !a.anchors.is_empty() {
        let anchors: Vec<_> = a.anchors.iter().map(|&i| space.point(i)).collect::<Result<_, _>>()?;
        let ar = variety::solution_count_anchored(&spec, &anchors, a.budget)?;
        verdicts.push(Verdict::compare("anchored solutions", ar.count as f64, ">=", ar.bound));
        results["anchored"] = to_value(&ar);
    }
    Ok((results, verdicts))
}

fn subspace(a: &SubspaceArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let table = load_table(&a.fun)?;
    let space = resolve_space(&a.space, table.as_ref())?;
    let b = &a.budget;
    let (x, spec) = domain(&space, &a.domain, b.budget)?;
    let input = input_function(&space, &x, &a.fun, table, b.seed, b.budget)?;
    let mode = if a.exhaustive {
        SubspaceMode::Exhaustive
    } else {
        SubspaceMode::Sampled {
            samples: b.samples,
            seed: require_seed(b.seed, "the subspace test without --exhaustive")?,
        }
    };
    let mut results = json!({
        "space": space_json(&space, &x, spec.as_ref()),
        "default_l": spline::default_subspace_dim(space.q(), space.field().p(), a.m),
    });
    match spline::subspace_poly_test(&input.f, &x, a.m, a.l, mode, b.budget) {
        Ok(rep) => {
            let v = Verdict::compare("failing flat fraction", rep.fraction, "<=", a.max_fraction);
            results["first_failure_text"] =
                to_value(&rep.first_failure.as_ref().map(|fl| formats::format_cube(&space, fl.base, &fl.dirs)));
            results["subspace"] = to_value(&rep);
            Ok((results, vec![v]))
        }
        Err(e @ Error::SubspaceSearch { .. }) => {
            results["error"] = Value::from(e.to_string());
            let v = Verdict::with_outcome("flat search", Value::from(e.to_string()), "==", Value::from("ok"), false)
                .summary(format!("subspace test failed: {e}"));
            Ok((results, vec![v]))
        }
        Err(e) => Err(e.into()),
    }
}

fn sweep(a: &SweepArgs) -> CliResult<(Value, Vec<Verdict>)> {
    let space = resolve_space(&a.space, None)?;
    let (x, spec) = domain(&space, &a.domain, a.budget)?;
    let g = formats::parse_poly(&space, &a.poly)?;
    let config =
        NoiseConfig { m: a.m, rhos: a.rhos.clone(), votes: a.votes, seed: a.seed, extend: a.extend, budget: a.budget };
    let rows = spline::noise_experiment(&g, &x, &config)?;
    Ok((json!({ "space": space_json(&space, &x, spec.as_ref()), "rows": to_value(&rows) }), Vec::new()))
}

fn dispatch(cmd: &Command) -> CliResult<(Value, Vec<Verdict>)> {
    match cmd {
        Command::CubeTest(a) => cube_test(a),
        Command::Correct(a) => correct(a, a.extend),
        Command::Extend(a) => correct(a, true),
        Command::Gowers(a) => gowers_cmd(a),
        Command::Uniformity(a) => uniformity_cmd(a),
        Command::Csc(a) => csc(a),
        Command::Count(a) => count(a),
        Command::Rank(a) => rank_cmd(a),
        Command::Lines(a) => lines(a),
        Command::Subspace(a) => subspace(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn config_of(cmd: &Command) -> Value {
    match to_value(cmd) {
        Value::Object(mut map) => map.remove(cmd.name()).unwrap_or(Value::Null),
        other => other,
    }
}

/// Runs the command and builds its report. Errors are input problems; a
/// failed check is a report with `pass == false`.
pub fn run(cli: &Cli) -> CliResult<RunReport> {
    let go = || -> CliResult<RunReport> {
        let start = Instant::now();
        let (results, verdicts) = dispatch(&cli.command)?;
        let mut report = RunReport::new(cli.command.name(), config_of(&cli.command), results, verdicts);
        if !cli.no_timing {
            report.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        Ok(report)
    };
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::input(format!("thread pool: {e}")))?;
            pool.install(go)
        }
        None => go(),
    }
}

/// Runs, writes the report, and returns whether every verdict passed.
pub fn execute(cli: &Cli) -> CliResult<bool> {
    let report = run(cli)?;
    let bytes = emit(&report, cli.format)?;
    match &cli.report {
        Some(path) => write(path, &bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(report.pass)
}
