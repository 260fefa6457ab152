//! One function per subcommand. Each writes its artifacts and returns the
//! verdict.

use std::collections::BTreeMap;
use std::fs::File;

use jointcok::moments::{
    check_moment_growth, cohen_lenstra_weight, invert_moments, l1_distance, signed_moments, unit_moment_fixed_point,
    unit_moments, MomentTable, TruncatedLattice,
};
use jointcok::montecarlo::empirical::fmt_f64;
use jointcok::montecarlo::theory::theory_table;
use jointcok::montecarlo::{
    compare_with_theory, estimate_mixed_moment, run_joint_cokernel, sparse_failure_probe, TheoryModel,
};
use jointcok::nonabelian::{
    distance, expected_sur_random_quotient, pair_moment_monte_carlo, pair_moment_random_quotients, pair_set_bound,
    pair_set_table, sur_free_count, FreeGroupWord, SmallGroup,
};
use jointcok::pgroup::density::format_rational;
use jointcok::{smith_normal_form, EntrySampler, MatModPk};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_tuple, parse_tuples, InvertSection, NonabelianSection, ProbeSection, SimulateSection, TheorySection};
use crate::error::{CliError, CliResult};
use crate::output::{csv_writer, RunOutput};

fn join_tuple(t: &[jointcok::PGroupType]) -> String {
    t.iter().map(|h| h.lambda.to_string()).collect::<Vec<_>>().join("|")
}

pub fn theory(sec: &TheorySection, out: &RunOutput) -> CliResult<bool> {
    let model = match sec.model.as_str() {
        "marginal" => TheoryModel::Marginal { u: sec.u },
        "shifts" => TheoryModel::JointShifts,
        "pshift" => TheoryModel::PShiftPair,
        "independent" => TheoryModel::Independent { u: sec.u },
        other => return Err(CliError::Config(format!("unknown theory model {other:?}"))),
    };
    let targets = parse_tuples(sec.p, &sec.targets)?;
    let mut rows = Vec::new();
    for t in &targets {
        let d = model.density(sec.p, t)?;
        let m = model.moment(t)?;
        rows.push([
            join_tuple(t),
            d.to_string(),
            fmt_f64(d.value()),
            format_rational(&m),
            fmt_f64(m.to_f64().unwrap_or(f64::NAN)),
        ]);
    }
    out.csv("theory.csv", |buf| {
        let mut w = csv_writer(buf);
        w.write_record(["tuple", "density", "density_value", "moment", "moment_value"])?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::Io("theory.csv".into(), e))
    })?;
    for r in &rows {
        println!("{:<16} density {} = {}  moment {}", r[0], r[1], r[2], r[3]);
    }
    out.summary(true, &json!({ "model": model, "rows": rows.len() }))?;
    Ok(true)
}

pub fn simulate(sec: &SimulateSection, seed: u64, workers: usize, out: &RunOutput) -> CliResult<bool> {
    let plan = sec.plan(seed)?;
    let emp = run_joint_cokernel(&plan, workers)?;
    out.csv("joint.csv", |buf| Ok(emp.write_csv(buf)?))?;
    let model = if plan.targets.is_empty() {
        None
    } else {
        Some(TheoryModel::infer(&plan).ok_or_else(|| {
            CliError::Config("targets given, but no limiting law is known for these transforms".into())
        })?)
    };
    let report = match model {
        Some(m) => compare_with_theory(&emp, &theory_table(&plan, m)?, sec.z),
        None => compare_with_theory(&emp, &BTreeMap::new(), sec.z),
    };
    out.csv("cells.csv", |buf| Ok(report.write_csv(buf)?))?;
    for c in &report.cells {
        println!(
            "n={:<5} {:<12} freq {:.6} ± {:.6}  theory {:.6}  z {:+.2}",
            c.n, c.tuple, c.freq, c.stderr, c.theory, c.z
        );
    }
    println!(
        "verdict at n={}: max |z| = {:.2} (threshold {}) -> {}",
        report.verdict_n.map_or("-".into(), |n| n.to_string()),
        report.max_abs_z,
        sec.z,
        if report.pass { "pass" } else { "fail" }
    );
    out.summary(
        report.pass,
        &json!({
            "plan": plan,
            "model": model,
            "verdict_n": report.verdict_n,
            "max_abs_z": report.max_abs_z,
            "z_threshold": report.z_threshold,
            "unclassified_mass": report.unclassified_mass,
            "overflow_mass": report.overflow_mass,
        }),
    )?;
    Ok(report.pass)
}

pub fn probe(sec: &ProbeSection, seed: u64, workers: usize, out: &RunOutput) -> CliResult<bool> {
    let EntrySampler::SparseAlpha { schedule } = format!("sparse:{}", sec.schedule).parse()? else {
        unreachable!("sparse prefix always yields a sparse sampler")
    };
    let rows = sparse_failure_probe(sec.p, sec.u, &sec.sizes, schedule, sec.trials, seed, workers)?;
    let z = |r: &jointcok::montecarlo::ProbeRow| jointcok::montecarlo::empirical::binomial_z(r.count, r.trials, r.theory);
    out.csv("probe.csv", |buf| {
        let mut w = csv_writer(buf);
        w.write_record(["n", "alpha", "trials", "count", "freq", "stderr", "theory", "z"])?;
        for r in &rows {
            w.write_record([
                r.n.to_string(),
                fmt_f64(r.alpha),
                r.trials.to_string(),
                r.count.to_string(),
                fmt_f64(r.freq),
                fmt_f64(r.stderr),
                fmt_f64(r.theory),
                fmt_f64(z(r)),
            ])?;
        }
        w.flush().map_err(|e| CliError::Io("probe.csv".into(), e))
    })?;
    for r in &rows {
        println!("n={:<6} alpha {:.5}  freq {:.5} ± {:.5}  exact {:.5}", r.n, r.alpha, r.freq, r.stderr, r.theory);
    }
    let last = rows.iter().max_by_key(|r| r.n);
    let pass = last.is_none_or(|r| r.trials == 0 || z(r).abs() <= sec.z);
    out.summary(
        pass,
        &json!({
            "schedule": schedule,
            "rows": rows,
            "limit_log_schedule": 1.0 - (-1.0f64).exp(),
        }),
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    tuple: String,
    trials: u64,
    estimate: f64,
    stderr: f64,
    theory: Option<f64>,
    z: Option<f64>,
}

pub fn moment(sec: &SimulateSection, seed: u64, workers: usize, out: &RunOutput) -> CliResult<bool> {
    let mut plan_sec = sec.clone();
    plan_sec.targets.clear();
    let plan = plan_sec.plan(seed)?;
    let model = TheoryModel::infer(&plan);
    let largest = plan.sizes.iter().copied().max();
    let mut rows = Vec::new();
    for target in &sec.targets {
        let t = parse_tuple(sec.p, target)?;
        let theory = match model {
            Some(m) => Some(m.moment(&t)?.to_f64().unwrap_or(f64::NAN)),
            None => None,
        };
        for e in estimate_mixed_moment(&plan, &t, workers)? {
            rows.push(MomentRow {
                n: e.n,
                tuple: join_tuple(&t),
                trials: e.trials,
                estimate: e.estimate,
                stderr: e.stderr,
                theory,
                z: theory.map(|th| e.z_score(th)),
            });
        }
    }
    out.csv("moments.csv", |buf| {
        let mut w = csv_writer(buf);
        w.write_record(["n", "tuple", "trials", "estimate", "stderr", "theory", "z"])?;
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in &rows {
            w.write_record([
                r.n.to_string(),
                r.tuple.clone(),
                r.trials.to_string(),
                fmt_f64(r.estimate),
                fmt_f64(r.stderr),
                opt(r.theory),
                opt(r.z),
            ])?;
        }
        w.flush().map_err(|e| CliError::Io("moments.csv".into(), e))
    })?;
    for r in &rows {
        println!(
            "n={:<5} {:<12} {:.5} ± {:.5}  theory {}",
            r.n,
            r.tuple,
            r.estimate,
            r.stderr,
            r.theory.map_or("-".into(), |t| t.to_string())
        );
    }
    let pass = rows
        .iter()
        .filter(|r| Some(r.n) == largest && r.trials > 0)
        .all(|r| r.z.is_none_or(|z| z.abs() <= sec.z));
    out.summary(pass, &json!({ "plan": plan, "model": model, "rows": rows }))?;
    Ok(pass)
}

pub fn invert(sec: &InvertSection, out: &RunOutput) -> CliResult<bool> {
    let lattice = TruncatedLattice::new(sec.primes.clone(), sec.max_exp.clone(), sec.max_rank, sec.arity)?;
    let unit = sec.moments == "unit";
    let table = if unit {
        unit_moments(&lattice)
    } else {
        let f = File::open(&sec.moments).map_err(|e| CliError::Io(sec.moments.clone(), e))?;
        MomentTable::read_csv(&lattice, f)?
    };
    let x = invert_moments(&table, &lattice)?;
    let back = signed_moments(&x, &lattice)?;
    let residual: Vec<String> = lattice
        .points()
        .into_iter()
        .filter(|pt| back.values.get(pt) != table.values.get(pt))
        .map(|pt| pt.to_string())
        .collect();
    let negative = x.values().filter(|w| w.is_negative()).count();
    let mass: BigRational = x.values().sum();
    out.csv("distribution.csv", |buf| {
        let mut w = csv_writer(buf);
        let mut header = vec!["tuple", "weight", "weight_value"];
        if unit {
            header.push("cohen_lenstra");
        }
        w.write_record(&header)?;
        for pt in lattice.points() {
            let v = &x[&pt];
            let mut rec = vec![pt.to_string(), format_rational(v), fmt_f64(v.to_f64().unwrap_or(f64::NAN))];
            if unit {
                rec.push(fmt_f64(cohen_lenstra_weight(&lattice, &pt)));
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::Io("distribution.csv".into(), e))
    })?;
    let reference = unit.then(|| {
        let l1 = l1_distance(&x, &lattice, |pt| cohen_lenstra_weight(&lattice, pt));
        let inside: f64 = lattice.points().iter().map(|pt| cohen_lenstra_weight(&lattice, pt)).sum();
        json!({ "l1_to_cohen_lenstra": l1, "cohen_lenstra_mass_outside": 1.0 - inside })
    });
    let growth = sec.growth_f.map(|f| check_moment_growth(&table, f));
    let fixed = if sec.fixed_point {
        let [p] = sec.primes[..] else {
            return Err(CliError::Config("fixed_point needs a single prime".into()));
        };
        Some(unit_moment_fixed_point(p, sec.arity, &lattice)?)
    } else {
        None
    };
    println!("lattice [{lattice}]: {} points", lattice.points().len());
    println!("recovered mass {}  negative weights {negative}  residual cells {}", format_rational(&mass), residual.len());
    if let Some(r) = &reference {
        println!("L1 distance to c_inf/|Aut|: {}", r["l1_to_cohen_lenstra"]);
    }
    let pass = residual.is_empty();
    out.summary(
        pass,
        &json!({
            "lattice": lattice.to_string(),
            "points": lattice.points().len(),
            "residual_cells": residual,
            "negative_weights": negative,
            "mass": format_rational(&mass),
            "reference": reference,
            "growth": growth,
            "fixed_point": fixed,
        }),
    )?;
    Ok(pass)
}

fn words_for(sec: &NonabelianSection, n: usize) -> CliResult<Vec<FreeGroupWord>> {
    if let Some(ws) = &sec.words {
        return ws.iter().map(|w| Ok(w.parse::<FreeGroupWord>()?)).collect();
    }
    let d = sec.basis_size.unwrap_or(n).min(n);
    Ok((0..n + sec.u)
        .map(|i| {
            if i < d {
                FreeGroupWord::generator(i + 1).inverse()
            } else {
                FreeGroupWord::identity()
            }
        })
        .collect())
}

pub fn nonabelian(sec: &NonabelianSection, seed: u64, workers: usize, out: &RunOutput) -> CliResult<bool> {
    let h1 = SmallGroup::from_spec(&sec.h1.parse()?)?;
    let h2 = sec.h2.as_ref().map(|s| s.parse().map_err(CliError::from).and_then(|g| Ok(SmallGroup::from_spec(&g)?))).transpose()?;
    jointcok::montecarlo::with_pool(workers, || match &h2 {
        None => single_quotient(sec, &h1, out),
        Some(h2) => pair_quotients(sec, &h1, h2, seed, out),
    })?
}

fn single_quotient(sec: &NonabelianSection, h: &SmallGroup, out: &RunOutput) -> CliResult<bool> {
    let limit = BigRational::new(BigInt::one(), BigInt::from(BigUint::from(h.order()).pow(sec.u as u32)));
    let mut rows = Vec::new();
    for &n in &sec.ns {
        let v = expected_sur_random_quotient(n, sec.u, h);
        rows.push([
            n.to_string(),
            sur_free_count(n, h).to_string(),
            format_rational(&v),
            fmt_f64(v.to_f64().unwrap_or(f64::NAN)),
            format_rational(&limit),
            fmt_f64(distance(&v, &limit)),
        ]);
    }
    out.csv("moments.csv", |buf| {
        let mut w = csv_writer(buf);
        w.write_record(["n", "sur_free_count", "value", "value_float", "limit", "distance"])?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::Io("moments.csv".into(), e))
    })?;
    for r in &rows {
        println!("n={:<3} #Sur(F_n,H)={:<10} E = {}  (limit {}, distance {})", r[0], r[1], r[2], r[4], r[5]);
    }
    out.summary(true, &json!({ "group": h.table.to_string(), "order": h.order(), "rank": h.rank() }))?;
    Ok(true)
}

fn pair_quotients(sec: &NonabelianSection, h1: &SmallGroup, h2: &SmallGroup, seed: u64, out: &RunOutput) -> CliResult<bool> {
    let u = sec.u as u32;
    let limit = BigRational::new(
        BigInt::one(),
        BigInt::from(BigUint::from(h1.order()).pow(u) * BigUint::from(h2.order()).pow(u)),
    );
    let mut rows = Vec::new();
    let mut mc_pass = true;
    for &n in &sec.ns {
        let b = words_for(sec, n)?;
        let v = pair_moment_random_quotients(n, sec.u, h1, h2, &b)?;
        let d = b.iter().filter(|w| !w.is_empty()).count();
        let mut r = vec![
            n.to_string(),
            d.to_string(),
            format_rational(&v),
            fmt_f64(v.to_f64().unwrap_or(f64::NAN)),
            format_rational(&limit),
            fmt_f64(distance(&v, &limit)),
        ];
        if sec.mc_trials > 0 {
            let mc = pair_moment_monte_carlo(n, sec.u, h1, h2, &b, sec.mc_trials, jointcok::padic::sampler::derive_seed(seed, n as u64))?;
            let exact = v.to_f64().unwrap_or(f64::NAN);
            let z = if mc.stderr > 0.0 {
                (mc.estimate - exact) / mc.stderr
            } else if mc.estimate == exact {
                0.0
            } else {
                f64::INFINITY
            };
            mc_pass &= z.abs() <= sec.z;
            r.extend([fmt_f64(mc.estimate), fmt_f64(mc.stderr), fmt_f64(z)]);
        }
        rows.push(r);
    }
    out.csv("pair_moments.csv", |buf| {
        let mut w = csv_writer(buf);
        let mut header = vec!["n", "d", "value", "value_float", "limit", "distance"];
        if sec.mc_trials > 0 {
            header.extend(["mc_estimate", "mc_stderr", "mc_z"]);
        }
        w.write_record(&header)?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::Io("pair_moments.csv".into(), e))
    })?;
    for r in &rows {
        println!("n={:<3} d={:<3} value {} = {}  distance to {} = {}", r[0], r[1], r[2], r[3], r[4], r[5]);
    }

    let mut bound_pass = true;
    if sec.pair_sets {
        let mut set_rows = Vec::new();
        for &n in &sec.ns {
            let table = pair_set_table(n, h1, h2)?;
            for i1 in h1.lattice.normal_subgroups() {
                for i2 in h2.lattice.normal_subgroups() {
                    let count = table.get(&(i1, i2)).copied().unwrap_or(0);
                    let bound = pair_set_bound(n, h1, h2, h2.lattice.order_of(i2));
                    let ok = BigUint::from(count) <= bound;
                    bound_pass &= ok;
                    set_rows.push([
                        n.to_string(),
                        h1.lattice.describe(&h1.table, i1),
                        h2.lattice.describe(&h2.table, i2),
                        count.to_string(),
                        bound.to_string(),
                        ok.to_string(),
                    ]);
                }
            }
        }
        out.csv("pair_sets.csv", |buf| {
            let mut w = csv_writer(buf);
            w.write_record(["n", "g1", "g2", "count", "bound", "within_bound"])?;
            for r in &set_rows {
                w.write_record(r)?;
            }
            w.flush().map_err(|e| CliError::Io("pair_sets.csv".into(), e))
        })?;
    }
    let pass = mc_pass && bound_pass;
    out.summary(
        pass,
        &json!({
            "h1": h1.table.to_string(),
            "h2": h2.table.to_string(),
            "limit": format_rational(&limit),
            "monte_carlo_within_threshold": mc_pass,
            "pair_sets_within_bound": bound_pass,
        }),
    )?;
    Ok(pass)
}

pub fn snf(literal: &str, out: &RunOutput) -> CliResult<bool> {
    let a: MatModPk = literal.parse()?;
    let s = smith_normal_form(&a);
    let cok = a.cokernel_type();
    out.csv("snf.csv", |buf| {
        let mut w = csv_writer(buf);
        w.write_record(["index", "exponent", "saturated"])?;
        for (i, (e, sat)) in s.exponents.iter().zip(&s.saturated).enumerate() {
            w.write_record([i.to_string(), e.to_string(), sat.to_string()])?;
        }
        w.flush().map_err(|e| CliError::Io("snf.csv".into(), e))
    })?;
    let group = cok.truncated_group(a.p());
    println!("diagonal exponents: {:?}", s.exponents);
    println!(
        "cokernel mod p^{}: {}{}",
        a.k(),
        group,
        if cok.is_saturated() {
            format!(" ({} saturated part(s) of order >= p^{})", cok.saturated, a.k())
        } else {
            String::new()
        }
    );
    out.summary(
        true,
        &json!({
            "p": a.p(),
            "k": a.k(),
            "rows": a.rows(),
            "cols": a.cols(),
            "exponents": s.exponents,
            "saturated": s.saturated,
            "unit_count": s.unit_count(),
            "cokernel_type": cok.lambda.to_string(),
            "cokernel": group.to_string(),
        }),
    )?;
    Ok(true)
}
