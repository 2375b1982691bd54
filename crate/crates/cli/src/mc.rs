//! Monte-Carlo runs. Samples are keyed by `(seed, index)` and collected in
//! index order, so output does not depend on the thread count.

use std::io::Write;

use clap::Args;
use qdtree::eavesdrop::{iterate_eavesdrop, EavesdropParams};
use qdtree::joint::{iterate_joint, shape_masses, JointParams};
use qdtree::oracle::{
    binomial_z, nested_mi_curve, sample_curve_shape, sample_purities, sample_subgroup, sample_subgroup_eavesdrop,
    CurveShape, McEstimate, PurityAccumulator, ShapeCounts, TreeRealization,
};
use qdtree::recursion::{initial_condition, iterate, mean_mutual_info, ModelParams};
use qdtree::replica::{annealed_purities, iterate_weights};
use qdtree::{Pauli, SubgroupLabel};
use rayon::prelude::*;
use serde_json::json;

use crate::grid::Grid;
use crate::table::{Format, Table};
use crate::{config_err, grid_arg, CliResult, Report};

fn par_samples<T: Send>(samples: usize, f: impl Fn(u64) -> qdtree::Result<T> + Sync + Send) -> CliResult<Vec<T>> {
    if samples == 0 {
        return Err(config_err("--samples must be at least 1"));
    }
    Ok((0..samples as u64).into_par_iter().map(f).collect::<qdtree::Result<Vec<T>>>()?)
}

/// `Some(message)` if `max |z|` is above the threshold or undefined.
fn check_failure(enabled: bool, max_z: f64, threshold: f64, what: &str) -> Option<String> {
    (enabled && (max_z > threshold || max_z.is_nan())).then(|| format!("{what}: max |z| = {max_z:.3} exceeds {threshold}"))
}

/// z-score of a sample mean; a zero standard error counts only exact agreement.
fn mean_z(mean: f64, stderr: f64, reference: f64) -> f64 {
    let diff = mean - reference;
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Exit with status 3 when any |z| exceeds --threshold.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 0.7)]
    pub p: f64,
    #[arg(long, default_value_t = 0.3)]
    pub f: f64,
    #[arg(long, default_value_t = 8)]
    pub t: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Only Z operators on F are accessible.
    #[arg(long)]
    pub z_only: bool,
    /// Eavesdropper rate: samples the p = 1 tree with environment qubits and
    /// measures Z on a fraction f of them; --p is ignored.
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub check: CheckArgs,
}

pub fn mc(a: &McArgs, seed: u64) -> CliResult<Report> {
    let (labels, reference) = match a.r {
        Some(r) => {
            let params = EavesdropParams::new(r, a.f)?;
            let reference = iterate_eavesdrop(&params, a.t as usize)[a.t as usize];
            (par_samples(a.samples, |i| sample_subgroup_eavesdrop(&params, a.t, seed, i))?, reference)
        }
        None => {
            let params = ModelParams::new(a.p, a.f, a.t)?;
            let traj = iterate(&initial_condition(a.f, a.z_only)?, a.p, a.t as usize)?;
            (par_samples(a.samples, |i| sample_subgroup(&params, a.z_only, seed, i))?, traj[a.t as usize])
        }
    };
    let est = McEstimate::from_labels(labels);
    let z = est.z_scores(reference.as_array());
    let mut table = Table::new([
        "p", "f", "t", "r", "z_only", "samples", "seed", "label", "count", "estimate", "stderr", "reference", "z",
    ]);
    for s in SubgroupLabel::ALL {
        let i = s.index();
        table.push(vec![
            if a.r.is_some() { 1.0 } else { a.p }.into(),
            a.f.into(),
            a.t.into(),
            a.r.into(),
            (a.z_only || a.r.is_some()).into(),
            est.samples.into(),
            seed.into(),
            s.name().into(),
            est.counts[i].into(),
            est.mean[i].into(),
            est.stderr[i].into(),
            reference.as_array()[i].into(),
            z[i].into(),
        ]);
    }
    let failure = check_failure(a.check.check, est.max_abs_z(reference.as_array()), a.check.threshold, "pi");
    Ok(Report { table, failure })
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 0.68)]
    pub p: f64,
    #[arg(long, default_value_t = 8)]
    pub t: u32,
    #[arg(long, value_parser = grid_arg, default_value = "0.05:0.95:0.05")]
    pub f_grid: Grid,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub check: CheckArgs,
}

pub fn curve(a: &CurveArgs, seed: u64) -> CliResult<Report> {
    let grid = a.f_grid.points();
    let mut references = Vec::with_capacity(grid.len());
    for &f in grid {
        let params = ModelParams::new(a.p, f, a.t)?;
        let traj = iterate(&initial_condition(f, false)?, params.p, a.t as usize)?;
        references.push(mean_mutual_info(&traj[a.t as usize]));
    }
    let curves = par_samples(a.samples, |i| {
        let real = TreeRealization::sample(a.t, a.p, 0.0, seed, i)?;
        Ok(nested_mi_curve(&real, &real.build(), grid))
    })?;
    let n = a.samples as f64;
    let mut table = Table::new(["p", "t", "f", "samples", "mean_mi", "stderr", "reference", "z"]);
    let mut max_z: f64 = 0.0;
    for (k, (&f, &reference)) in grid.iter().zip(&references).enumerate() {
        let (s, s2) = curves.iter().fold((0u64, 0u64), |(s, s2), c| (s + c[k] as u64, s2 + (c[k] * c[k]) as u64));
        let mean = s as f64 / n;
        let var = if a.samples > 1 { (s2 as f64 - n * mean * mean) / (n - 1.0) } else { 0.0 };
        let stderr = (var.max(0.0) / n).sqrt();
        let z = mean_z(mean, stderr, reference);
        max_z = max_z.max(z.abs());
        table.push(vec![
            a.p.into(),
            a.t.into(),
            f.into(),
            a.samples.into(),
            mean.into(),
            stderr.into(),
            reference.into(),
            z.into(),
        ]);
    }
    let failure = check_failure(a.check.check, max_z, a.check.threshold, "mean I(R, F)");
    Ok(Report { table, failure })
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long, default_value_t = 0.68)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub t: u32,
    /// Two access fractions, one on each side of 1/2.
    #[arg(long, value_parser = grid_arg, default_value = "0.25,0.75")]
    pub probes: Grid,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[command(flatten)]
    pub check: CheckArgs,
}

pub fn shapes(a: &ShapeArgs, seed: u64) -> CliResult<Report> {
    let &[f, g] = a.probes.points() else {
        return Err(config_err("--probes needs exactly two values"));
    };
    if !(f < 0.5 && 0.5 < g) {
        return Err(config_err(format!("--probes must straddle 1/2, got {f} and {g}")));
    }
    let masses = shape_masses(&iterate_joint(&JointParams::new(a.p, f, g)?, a.t as usize));
    let shapes = par_samples(a.samples, |i| sample_curve_shape(a.p, a.t, (f, g), seed, i))?;
    let mut counts = ShapeCounts::default();
    shapes.into_iter().for_each(|s| counts.add(s));
    let n = counts.total();
    let mut table = Table::new(["p", "t", "f", "g", "samples", "shape", "count", "fraction", "stderr", "reference", "z"]);
    let mut max_z: f64 = 0.0;
    for (shape, count, reference) in [
        (CurveShape::Plateau, counts.plateau, masses.plateau),
        (CurveShape::Step, counts.step, masses.step),
        (CurveShape::Other, counts.other, masses.other),
    ] {
        let fraction = count as f64 / n as f64;
        let z = binomial_z(fraction, reference, n);
        max_z = max_z.max(z.abs());
        table.push(vec![
            a.p.into(),
            a.t.into(),
            f.into(),
            g.into(),
            n.into(),
            shape.name().into(),
            count.into(),
            fraction.into(),
            (fraction * (1.0 - fraction) / n as f64).sqrt().into(),
            reference.into(),
            z.into(),
        ]);
    }
    let failure = check_failure(a.check.check, max_z, a.check.threshold, "curve shapes");
    Ok(Report { table, failure })
}

#[derive(Debug, Args)]
pub struct PurityArgs {
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    #[arg(long, default_value_t = 0.3)]
    pub f: f64,
    #[arg(long, default_value_t = 6)]
    pub t: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub check: CheckArgs,
}

pub fn purity(a: &PurityArgs, seed: u64) -> CliResult<Report> {
    let params = ModelParams::new(a.p, a.f, a.t)?;
    let pairs = par_samples(a.samples, |i| sample_purities(&params, seed, i))?;
    let mut acc = PurityAccumulator::default();
    pairs.into_iter().for_each(|pair| acc.push(pair));
    let est = acc.finish();
    let w = iterate_weights(a.p, a.f, a.t)?[a.t as usize];
    let (pf, prf) = annealed_purities(&w);
    let reference = prf / pf;
    let z = mean_z(est.ratio, est.ratio_stderr, reference);
    let mut table = Table::new([
        "p", "f", "t", "samples", "mean_purity_f", "stderr_f", "mean_purity_rf", "stderr_rf", "ratio", "ratio_stderr",
        "reference", "z",
    ]);
    table.push(vec![
        a.p.into(),
        a.f.into(),
        a.t.into(),
        est.samples.into(),
        est.mean_f.into(),
        est.stderr_f.into(),
        est.mean_rf.into(),
        est.stderr_rf.into(),
        est.ratio.into(),
        est.ratio_stderr.into(),
        reference.into(),
        z.into(),
    ]);
    let failure = check_failure(a.check.check, z.abs(), a.check.threshold, "purity ratio");
    Ok(Report { table, failure })
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    #[arg(long, default_value_t = 3)]
    pub t: u32,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Sample index within the seed's stream.
    #[arg(long, default_value_t = 0)]
    pub index: u64,
}

fn pauli_char(p: Pauli) -> char {
    match p {
        Pauli::I => 'I',
        Pauli::X => 'X',
        Pauli::Y => 'Y',
        Pauli::Z => 'Z',
    }
}

/// CSV lists one row per internal edge; JSON adds keys and the stabilizer
/// generators of the built state.
pub fn realize(a: &RealizeArgs, seed: u64, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let real = TreeRealization::sample(a.t, a.p, a.r, seed, a.index)?;
    match format {
        Format::Csv => {
            let mut table = Table::new(["edge", "gate", "eavesdrop"]);
            for (e, (gate, &flag)) in real.gates.iter().zip(&real.eavesdrops).enumerate() {
                let gate = gate.map(|g| [SubgroupLabel::Z, SubgroupLabel::X, SubgroupLabel::Y].map(|s| g.act(s).name()).concat());
                table.push(vec![e.into(), gate.into(), flag.into()]);
            }
            table.write(format, out)?;
        }
        Format::Json => {
            let state = real.build();
            let generators: Vec<String> =
                state.tableau.generators().into_iter().map(|g| g.into_iter().map(pauli_char).collect()).collect();
            let doc = json!({
                "realization": real,
                "num_qubits": state.tableau.num_qubits(),
                "leaves": state.leaves,
                "environment": state.environment,
                "generators": generators,
            });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
