//! Self-contained consistency run across all modules. Every row is a
//! deviation measure and the bound it must stay under.

use clap::Args;
use qdtree::eavesdrop::{converge_eavesdrop, critical_rate, eavesdrop_fixed_point, EavesdropParams};
use qdtree::joint::{classify_joint_support, iterate_joint, JointParams, SUPPORT_TOL};
use qdtree::oracle::{consistency_report, TreeRealization};
use qdtree::recursion::{
    apply_mb, apply_mb_by_table, classify_phase, closed_form_fixed_points, converge, initial_condition, iterate,
    qd_fixed_point, Convergence, PhaseLabel,
};
use qdtree::replica::{compute_pc, p_l};
use qdtree::Dist5;
use rayon::prelude::*;

use crate::mc::{self, CheckArgs, CurveArgs, McArgs, PurityArgs, ShapeArgs};
use crate::table::{Cell, Table};
use crate::{grid_arg, CliResult, Report};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Samples per Monte-Carlo check.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Largest |z| accepted in Monte-Carlo checks.
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
}

struct Row {
    name: String,
    value: f64,
    bound: f64,
}

fn row(name: impl Into<String>, value: f64, bound: f64) -> Row {
    Row { name: name.into(), value, bound }
}

const EXACT: f64 = 1e-10;

fn probes() -> Vec<Dist5> {
    [[0.2, 0.2, 0.2, 0.2, 0.2], [0.5, 0.1, 0.3, 0.0, 0.1], [0.0, 0.7, 0.1, 0.2, 0.0], [0.1, 0.0, 0.0, 0.0, 0.9]]
        .into_iter()
        .map(|c| Dist5::new(c).expect("probe on the simplex"))
        .collect()
}

fn analytic_rows() -> CliResult<Vec<Row>> {
    let mut rows = Vec::new();
    let table_gap = probes().iter().map(|pi| apply_mb(pi).sup_distance(&apply_mb_by_table(pi))).fold(0.0, f64::max);
    rows.push(row("branching map equals the composition table", table_gap, EXACT));

    let mut residual: f64 = 0.0;
    for p in [0.1, 0.3, 0.5, 0.65, 0.7, 0.9] {
        for r in closed_form_fixed_points(p)? {
            residual = residual.max(r.residual);
        }
    }
    rows.push(row("closed-form fixed points are fixed", residual, EXACT));

    let limit = converge(&initial_condition(0.2, false)?, 0.3, &Convergence::default())?;
    rows.push(row("QD point attracts at p = 0.3", limit.point.sup_distance(&qd_fixed_point(0.3)?), 1e-8));

    let expected = [(0.55, PhaseLabel::Qd), (0.65, PhaseLabel::Mixed), (0.8, PhaseLabel::Encoding)];
    let wrong = expected.iter().filter(|&&(p, phase)| classify_phase(p, 0.3).ok().and_then(|o| o.phase()) != Some(phase));
    rows.push(row("phases at f = 0.3 for p = 0.55, 0.65, 0.8", wrong.count() as f64, 0.5));

    let a = iterate(&initial_condition(0.3, false)?, 0.68, 200)?;
    let b = iterate(&initial_condition(0.7, false)?, 0.68, 200)?;
    rows.push(row("f <-> 1-f mirrors n <-> a", a[200].z2_swap().sup_distance(&b[200]), EXACT));

    let mut eav: f64 = 0.0;
    for (r, f) in [(0.05, 0.9), (0.1, 1.0), (0.2, 0.5), (0.3, 1.0)] {
        let params = EavesdropParams::new(r, f)?;
        let (it, _) = converge_eavesdrop(&params, 1e-14, 1_000_000);
        eav = eav.max(it.sup_distance(&eavesdrop_fixed_point(&params).point));
    }
    rows.push(row("eavesdrop iteration reaches the closed form", eav, 1e-8));
    let at_rc = eavesdrop_fixed_point(&EavesdropParams::new(critical_rate(), 1.0)?).point.as_array()[0];
    rows.push(row("pi_n vanishes at r_c with full access", at_rc, 1e-12));

    rows.push(row("p_c(1/2) equals p_l", (compute_pc(0.5)? - p_l()).abs(), 1e-6));
    rows.push(row("p_c(f) = p_c(1-f)", (compute_pc(0.3)? - compute_pc(0.7)?).abs(), 1e-6));

    let params = JointParams::new(0.68, 0.25, 0.75)?;
    let joint = iterate_joint(&params, 50);
    let single = |f: f64| -> CliResult<Dist5> { Ok(iterate(&initial_condition(f, false)?, 0.68, 50)?[50]) };
    let marg = joint
        .marginal_first()
        .sup_distance(&single(0.25)?)
        .max(joint.marginal_second().sup_distance(&single(0.75)?));
    rows.push(row("joint marginals equal single-copy recursion", marg, EXACT));
    let mut off: f64 = 0.0;
    for (p, f, g) in [(0.2, 0.1, 0.3), (0.68, 0.2, 0.7), (0.9, 0.6, 0.9)] {
        let pi = iterate_joint(&JointParams::new(p, f, g)?, 400);
        off = off.max(classify_joint_support(&pi, f, g, SUPPORT_TOL).off_pattern_mass);
    }
    rows.push(row("joint support pattern", off, SUPPORT_TOL));

    let violations: usize = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let real = TreeRealization::sample(5, 0.6, 0.0, 7, i).expect("valid parameters");
            let state = real.build();
            let access = state.leaf_access(&real, 0.1 + 0.004 * i as f64);
            usize::from(!consistency_report(&state, &access).holds())
        })
        .sum();
    rows.push(row("realization entropies and subgroups agree", violations as f64, 0.5));
    Ok(rows)
}

fn max_z(report: &Report) -> f64 {
    let last = report.table.rows()[0].len() - 1;
    report
        .table
        .rows()
        .iter()
        .map(|r| match r[last] {
            Cell::Num(z) => z.abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn mc_rows(a: &VerifyArgs, seed: u64) -> CliResult<Vec<Row>> {
    let check = || CheckArgs { check: false, threshold: a.threshold };
    let mut rows = Vec::new();
    for (p, f, z_only) in [(0.3, 0.2, false), (0.7, 0.3, false), (0.9, 0.7, false), (0.5, 0.3, true)] {
        let args = McArgs { p, f, t: 6, samples: a.samples, z_only, r: None, check: check() };
        let name = format!("MC pi at p = {p}, f = {f}{}", if z_only { ", Z only" } else { "" });
        rows.push(row(name, max_z(&mc::mc(&args, seed)?), a.threshold));
    }
    for r in [0.05, 0.2] {
        let args = McArgs { p: 1.0, f: 1.0, t: 6, samples: a.samples, z_only: false, r: Some(r), check: check() };
        rows.push(row(format!("MC eavesdrop pi at r = {r}"), max_z(&mc::mc(&args, seed)?), a.threshold));
    }
    let grid = grid_arg("0.2,0.5,0.8").expect("literal grid");
    let curve = CurveArgs { p: 0.68, t: 6, f_grid: grid, samples: a.samples, check: check() };
    rows.push(row("MC mean I(R, F) at p = 0.68", max_z(&mc::curve(&curve, seed)?), a.threshold));
    let probes = grid_arg("0.25,0.75").expect("literal grid");
    let shapes = ShapeArgs { p: 0.68, t: 6, probes, samples: a.samples, check: check() };
    rows.push(row("MC curve shapes vs joint recursion", max_z(&mc::shapes(&shapes, seed)?), a.threshold));
    let purity = PurityArgs { p: 0.9, f: 0.3, t: 6, samples: a.samples, check: check() };
    rows.push(row("MC purity ratio vs replica weights", max_z(&mc::purity(&purity, seed)?), a.threshold));
    Ok(rows)
}

pub fn verify(a: &VerifyArgs, seed: u64) -> CliResult<Report> {
    let mut rows = analytic_rows()?;
    rows.extend(mc_rows(a, seed)?);
    let mut table = Table::new(["check", "value", "bound", "pass"]);
    let mut failed = Vec::new();
    for r in rows {
        let pass = r.value <= r.bound;
        if !pass {
            failed.push(r.name.clone());
        }
        table.push(vec![r.name.into(), r.value.into(), r.bound.into(), pass.into()]);
    }
    let failure = (!failed.is_empty()).then(|| failed.join("; "));
    Ok(Report { table, failure })
}
