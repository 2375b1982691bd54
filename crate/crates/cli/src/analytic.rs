//! Deterministic sweeps over the recursions.

use clap::Args;
use qdtree::eavesdrop::{eavesdrop_fixed_point, iterate_eavesdrop, scaling_collapse, EavesdropParams};
use qdtree::joint::{classify_joint_support, iterate_joint, shape_masses, JointParams, SUPPORT_TOL};
use qdtree::recursion::{
    closed_form_fixed_points, initial_condition, iterate, mean_mutual_info, ModelParams, FixedPointKind,
    PhaseOutcome,
};
use qdtree::replica::{annealed_purities, compute_pc, i2_of_weights, weights_at, Horizon};
use qdtree::{Dist5, SubgroupLabel};
use rayon::prelude::*;

use crate::grid::Grid;
use crate::table::{Cell, Table};
use crate::{grid_arg, CliResult};

const PI_COLUMNS: [&str; 5] = ["pi_n", "pi_z", "pi_x", "pi_y", "pi_a"];

fn pi_cells(pi: &Dist5) -> impl Iterator<Item = Cell> + '_ {
    pi.as_array().iter().map(|&v| Cell::Num(v))
}

fn columns(head: &[&str], tail: &[&str]) -> Vec<String> {
    head.iter().chain(PI_COLUMNS.iter()).chain(tail).map(|s| s.to_string()).collect()
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub f: f64,
    #[arg(long, default_value_t = 50)]
    pub t: u32,
    /// Start from (1-f, f, 0, 0, 0): only Z operators are accessible.
    #[arg(long)]
    pub z_only: bool,
}

pub fn trajectory(a: &IterateArgs) -> CliResult<Table> {
    let params = ModelParams::new(a.p, a.f, a.t)?;
    let traj = iterate(&initial_condition(params.f, a.z_only)?, params.p, params.t as usize)?;
    let mut table = Table::new(columns(&["t", "p", "f"], &[]));
    for (t, pi) in traj.iter().enumerate() {
        let mut row = vec![t.into(), a.p.into(), a.f.into()];
        row.extend(pi_cells(pi));
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, value_parser = grid_arg, default_value = "0:1:0.005")]
    pub p_grid: Grid,
    #[arg(long, value_parser = grid_arg, default_value = "0.3")]
    pub f_grid: Grid,
    /// Extra `1 - pi_n` columns at these finite depths.
    #[arg(long, value_delimiter = ',')]
    pub finite_t: Vec<u32>,
}

pub fn phase_diagram(a: &PhaseArgs) -> CliResult<Table> {
    let mut cols = columns(&["p", "f", "phase", "one_minus_pi_n"], &["mean_mi"]);
    cols.extend(a.finite_t.iter().map(|t| format!("one_minus_pi_n_t{t}")));
    cols.push("error".into());
    let width = cols.len();
    let points: Vec<(f64, f64)> =
        a.f_grid.points().iter().flat_map(|&f| a.p_grid.points().iter().map(move |&p| (p, f))).collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(p, f)| {
            let mut row = vec![p.into(), f.into()];
            match qdtree::recursion::classify_phase(p, f) {
                Ok(outcome) => {
                    let limit = match outcome {
                        PhaseOutcome::Phase { limit, .. } | PhaseOutcome::Critical { limit } => limit,
                        PhaseOutcome::FirstOrderLine { limits } => limits[0],
                    };
                    row.push(outcome.tag().into());
                    row.push((1.0 - limit.as_array()[0]).into());
                    row.extend(pi_cells(&limit));
                    row.push(mean_mutual_info(&limit).into());
                    for &t in &a.finite_t {
                        let at = initial_condition(f, false)
                            .and_then(|pi0| iterate(&pi0, p, t as usize))
                            .ok()
                            .and_then(|traj| traj.last().map(|pi| 1.0 - pi.as_array()[0]));
                        row.push(at.into());
                    }
                    row.push(Cell::Missing);
                }
                Err(e) => {
                    row.resize(width - 1, Cell::Missing);
                    row.push(e.to_string().into());
                }
            }
            row
        })
        .collect();
    let mut table = Table::new(cols);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

#[derive(Debug, Args)]
pub struct FixedPointArgs {
    #[arg(long, value_parser = grid_arg, default_value = "0:1:0.05")]
    pub p_grid: Grid,
}

fn kind_name(kind: FixedPointKind) -> &'static str {
    match kind {
        FixedPointKind::Qd => "qd",
        FixedPointKind::Mixed => "mixed",
        FixedPointKind::EncodingN => "encoding_n",
        FixedPointKind::EncodingA => "encoding_a",
        FixedPointKind::Z2Symmetric => "z2_symmetric",
    }
}

pub fn fixed_points(a: &FixedPointArgs) -> CliResult<Table> {
    let cols = columns(&["p", "kind", "stable", "marginal", "leading_modulus", "residual"], &["error"]);
    let width = cols.len();
    let mut table = Table::new(cols);
    for &p in a.p_grid.points() {
        match closed_form_fixed_points(p) {
            Ok(reports) => {
                for r in reports {
                    let mut row = vec![
                        p.into(),
                        kind_name(r.kind).into(),
                        r.stable.into(),
                        r.marginal.into(),
                        r.leading_eigenvalue_modulus.into(),
                        r.residual.into(),
                    ];
                    row.extend(pi_cells(&r.point));
                    row.push(Cell::Missing);
                    table.push(row);
                }
            }
            Err(e) => {
                let mut row = vec![p.into()];
                row.resize(width - 1, Cell::Missing);
                row.push(e.to_string().into());
                table.push(row);
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct EavesdropArgs {
    #[arg(long, value_parser = grid_arg, default_value = "0:0.3:0.01")]
    pub r_grid: Grid,
    #[arg(long, value_parser = grid_arg, default_value = "1")]
    pub f: Grid,
    /// Also report `pi_n` after this many steps from `(1, 0, 0, 0, 0)`.
    #[arg(long)]
    pub t: Option<u32>,
}

pub fn eavesdrop(a: &EavesdropArgs) -> CliResult<Table> {
    let mut points = Vec::new();
    for &f in a.f.points() {
        for &r in a.r_grid.points() {
            points.push(EavesdropParams::new(r, f)?);
        }
    }
    let rc = qdtree::eavesdrop::critical_rate();
    let mut table = Table::new(columns(
        &["r", "f", "delta", "purified"],
        &["pi_n_t", "y", "scaled", "reference"],
    ));
    for params in points {
        let fixed = eavesdrop_fixed_point(&params);
        let mut row = vec![params.r.into(), params.f.into(), (params.r - rc).into(), fixed.purified.into()];
        row.extend(pi_cells(&fixed.point));
        let finite = a.t.map(|t| iterate_eavesdrop(&params, t as usize)[t as usize].as_array()[0]);
        row.push(finite.into());
        match scaling_collapse(&[params.f], &[params.r]).first() {
            Some(s) => row.extend([s.y.into(), s.scaled.into(), s.reference.into()]),
            None => row.extend([Cell::Missing, Cell::Missing, Cell::Missing]),
        }
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct ReplicaArgs {
    #[arg(long, value_parser = grid_arg, default_value = "0.7:0.8:0.01")]
    pub p_grid: Grid,
    #[arg(long, value_parser = grid_arg, default_value = "0.3")]
    pub f_grid: Grid,
    /// Finite depth; the long-time limit when omitted.
    #[arg(long)]
    pub t: Option<u32>,
    /// Report the threshold p_c(f) for each f instead of a sweep over p.
    #[arg(long)]
    pub pc: bool,
}

pub fn replica(a: &ReplicaArgs) -> CliResult<Table> {
    if a.pc {
        let values: Vec<_> = a.f_grid.points().par_iter().map(|&f| compute_pc(f).map(|pc| (f, pc))).collect();
        let mut table = Table::new(["f", "p_c"]);
        for v in values {
            let (f, pc) = v?;
            table.push(vec![f.into(), pc.into()]);
        }
        return Ok(table);
    }
    let horizon = a.t.map_or(Horizon::Infinite, Horizon::Finite);
    let points: Vec<(f64, f64)> =
        a.f_grid.points().iter().flat_map(|&f| a.p_grid.points().iter().map(move |&p| (p, f))).collect();
    let rows: Vec<_> = points.par_iter().map(|&(p, f)| weights_at(p, f, horizon).map(|w| (p, f, w))).collect();
    let mut table = Table::new(["p", "f", "t", "w_sigma", "w_nu", "w_tau", "purity_f", "purity_rf", "i2"]);
    for row in rows {
        let (p, f, w) = row?;
        let (pf, prf) = annealed_purities(&w);
        table.push(vec![
            p.into(),
            f.into(),
            a.t.into(),
            w.w_sigma.into(),
            w.w_nu.into(),
            w.w_tau.into(),
            pf.into(),
            prf.into(),
            i2_of_weights(&w).into(),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct JointArgs {
    #[arg(long, value_parser = grid_arg, default_value = "0.68")]
    pub p_grid: Grid,
    #[arg(long, default_value_t = 0.25)]
    pub f: f64,
    #[arg(long, default_value_t = 0.75)]
    pub g: f64,
    #[arg(long, default_value_t = 200)]
    pub t: u32,
}

pub fn joint(a: &JointArgs) -> CliResult<Table> {
    let mut cols: Vec<String> = ["p", "f", "g", "t"].map(String::from).to_vec();
    for s in SubgroupLabel::ALL {
        for t in SubgroupLabel::ALL {
            cols.push(format!("pi_{}_{}", s.name(), t.name()));
        }
    }
    cols.extend(["pattern", "consistent", "off_pattern_mass", "plateau", "step", "other"].map(String::from));
    let mut table = Table::new(cols);
    for &p in a.p_grid.points() {
        let params = JointParams::new(p, a.f, a.g)?;
        let pi = iterate_joint(&params, a.t as usize);
        let support = classify_joint_support(&pi, a.f, a.g, SUPPORT_TOL);
        let shapes = shape_masses(&pi);
        let mut row = vec![p.into(), a.f.into(), a.g.into(), a.t.into()];
        row.extend(pi.entries().iter().flatten().map(|&v| Cell::Num(v)));
        row.extend([
            support.pattern().into(),
            support.consistent().into(),
            support.off_pattern_mass.into(),
            shapes.plateau.into(),
            shapes.step.into(),
            shapes.other.into(),
        ]);
        table.push(row);
    }
    Ok(table)
}
