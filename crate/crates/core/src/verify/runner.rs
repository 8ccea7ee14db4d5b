//! Task enumeration, execution and report writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::assembly::{
    assemble_1d, assemble_2d_direct, assemble_2d_tensor, decompose_2d, Direction, GalerkinSet1D,
};
use crate::error::Result;
use crate::export;
use crate::gbspline::{ratio_bounds, GBSplineBasis, SectionSpace};
use crate::par;
use crate::spectral::{
    check_parter, check_specdist_lemma, conditioning_sweep, distribution_2d, eq10_checks,
    estimate_cp, mineig_checks, numerical_rank, sym_eigs, worst_step, BoundCheck, CaseContext,
    Relation, MONOTONE_SLACK,
};
use crate::toeplitz::{toeplitz, toeplitz_parts, SymbolCoeffs};

use super::config::{CheckKind, ExperimentConfig};
use super::properties::{commutation_error, kronecker_properties};
use super::report::{join, write_report_csv, CaseFields, ReportRow, Summary};

/// Sizes used for the monotone-extremes law of `T_m(f)`.
pub const TOEPLITZ_SIZES: [usize; 5] = [4, 8, 16, 32, 64];
/// Points per element in the ratio-bounds check.
pub const RATIO_GRID: usize = 16;
/// Symbol grid for extreme values.
const EXTREME_GRID: usize = 4096;

/// One unit of parallel work.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Mineig {
        p: usize,
        space: SectionSpace,
    },
    Eq10 {
        p: usize,
        space: SectionSpace,
    },
    Conditioning {
        p: usize,
        space: SectionSpace,
    },
    Parter {
        p: usize,
        space: SectionSpace,
    },
    ToeplitzCase {
        p: usize,
        space: SectionSpace,
        n: usize,
    },
    ToeplitzProperties,
    Specdist {
        p: usize,
        space: SectionSpace,
    },
    Assembly2d {
        p: (usize, usize),
        nu: usize,
        space: SectionSpace,
    },
    Decomposition2d {
        p: (usize, usize),
        nu: usize,
        space: SectionSpace,
    },
    Distribution2d {
        p: (usize, usize),
        nu: usize,
        space: SectionSpace,
    },
    RatioBounds {
        p: usize,
        space: SectionSpace,
        n: usize,
    },
}

impl Task {
    pub fn kind(&self) -> CheckKind {
        match self {
            Task::Mineig { .. } => CheckKind::Mineig,
            Task::Eq10 { .. } => CheckKind::Eq10,
            Task::Conditioning { .. } => CheckKind::Conditioning,
            Task::Parter { .. } => CheckKind::Parter,
            Task::ToeplitzCase { .. } | Task::ToeplitzProperties => CheckKind::Toeplitz,
            Task::Specdist { .. } => CheckKind::Specdist,
            Task::Assembly2d { .. } => CheckKind::Assembly2d,
            Task::Decomposition2d { .. } => CheckKind::Decomposition2d,
            Task::Distribution2d { .. } => CheckKind::Distribution2d,
            Task::RatioBounds { .. } => CheckKind::RatioBounds,
        }
    }

    fn label(&self) -> String {
        match self {
            Task::Mineig { p, space }
            | Task::Eq10 { p, space }
            | Task::Conditioning { p, space }
            | Task::Parter { p, space }
            | Task::Specdist { p, space } => format!("{} p={p} {space}", self.kind()),
            Task::ToeplitzCase { p, space, n } | Task::RatioBounds { p, space, n } => {
                format!("{} p={p} {space} n={n}", self.kind())
            }
            Task::ToeplitzProperties => "toeplitz properties".to_string(),
            Task::Assembly2d { p, nu, space }
            | Task::Decomposition2d { p, nu, space }
            | Task::Distribution2d { p, nu, space } => {
                format!("{} p={}x{} nu={nu} {space}", self.kind(), p.0, p.1)
            }
        }
    }
}

/// Rows and side files produced by one task.
#[derive(Debug, Default)]
struct TaskOutput {
    rows: Vec<ReportRow>,
    files: Vec<(PathBuf, String)>,
}

/// Symbols of a degree-1 non-polynomial space do not reproduce constants, so
/// the symbol-based 2D checks only run when every direction has `p >= 2` or
/// is polynomial.
fn has_symbols(p: (usize, usize), space: &SectionSpace) -> bool {
    space.is_polynomial() || p.0.min(p.1) >= 2
}

/// All tasks of a configuration in case-key order.
pub fn plan(cfg: &ExperimentConfig) -> Vec<Task> {
    let mut tasks = Vec::new();
    for &check in &cfg.checks {
        match check {
            CheckKind::Mineig
            | CheckKind::Eq10
            | CheckKind::Conditioning
            | CheckKind::Parter
            | CheckKind::Specdist => {
                for &p in &cfg.p {
                    for &space in &cfg.spaces {
                        tasks.push(match check {
                            CheckKind::Mineig => Task::Mineig { p, space },
                            CheckKind::Eq10 => Task::Eq10 { p, space },
                            CheckKind::Conditioning => Task::Conditioning { p, space },
                            CheckKind::Parter => Task::Parter { p, space },
                            _ => Task::Specdist { p, space },
                        });
                    }
                }
            }
            CheckKind::Toeplitz | CheckKind::RatioBounds => {
                if check == CheckKind::Toeplitz {
                    tasks.push(Task::ToeplitzProperties);
                }
                for &p in &cfg.p {
                    for &space in &cfg.spaces {
                        for &n in &cfg.n {
                            tasks.push(if check == CheckKind::Toeplitz {
                                Task::ToeplitzCase { p, space, n }
                            } else {
                                Task::RatioBounds { p, space, n }
                            });
                        }
                    }
                }
            }
            CheckKind::Assembly2d | CheckKind::Decomposition2d | CheckKind::Distribution2d => {
                for &p in &cfg.p2d {
                    for &nu in &cfg.nu {
                        for &space in &cfg.spaces {
                            match check {
                                CheckKind::Assembly2d => {
                                    tasks.push(Task::Assembly2d { p, nu, space })
                                }
                                CheckKind::Decomposition2d if has_symbols(p, &space) => {
                                    tasks.push(Task::Decomposition2d { p, nu, space })
                                }
                                CheckKind::Distribution2d if has_symbols(p, &space) => {
                                    tasks.push(Task::Distribution2d { p, nu, space })
                                }
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }
    tasks
}

fn file_stem(p: impl std::fmt::Display, space: &SectionSpace, n: impl std::fmt::Display) -> String {
    let space = space.to_string().replace([':', '.'], "_");
    format!("p{p}_{space}_n{n}")
}

fn values_csv(columns: &[(&str, &[f64])]) -> String {
    let mut out = String::from("index");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let len = columns.iter().map(|c| c.1.len()).max().unwrap_or(0);
    for i in 0..len {
        let _ = write!(out, "{}", i + 1);
        for (_, v) in columns {
            match v.get(i) {
                Some(x) => {
                    let _ = write!(out, ",{}", export::fmt_f64(*x));
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

fn symbol_csv(s: &SymbolCoeffs) -> String {
    let mut buf = Vec::new();
    export::write_symbol_csv(&mut buf, s).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 csv")
}

fn set_1d(n: usize, p: usize, space: SectionSpace) -> Result<GalerkinSet1D> {
    assemble_1d(GBSplineBasis::uniform(n, p, space)?)
}

fn execute(task: &Task, cfg: &ExperimentConfig) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let n_list = join(&cfg.n, "|");
    match *task {
        Task::Mineig { p, space } => {
            let cp = estimate_cp(p, space, &cfg.n)?;
            for &n in &cfg.n {
                let set = set_1d(n, p, space)?;
                let case = CaseFields::new(p, &space, n);
                out.rows
                    .extend(mineig_checks(&set, cp)?.iter().map(|c| case.from_check(c)));
                let k = sym_eigs(&set.stiffness)?.values;
                let m = sym_eigs(&set.mass)?.values;
                out.files.push((
                    PathBuf::from("eigenvalues").join(format!("{}.csv", file_stem(p, &space, n))),
                    values_csv(&[("stiffness", &k), ("mass", &m)]),
                ));
            }
        }
        Task::Eq10 { p, space } => {
            let cp = estimate_cp(p, space, &cfg.n)?;
            for &n in &cfg.n {
                let set = set_1d(n, p, space)?;
                for &beta in &cfg.beta {
                    for &gamma in &cfg.gamma {
                        let case = CaseFields::new(p, &space, n).with_coefficients(beta, gamma);
                        out.rows.extend(
                            eq10_checks(&set, beta, gamma, cp)?
                                .iter()
                                .map(|c| case.from_check(c)),
                        );
                    }
                }
            }
        }
        Task::Conditioning { p, space } => {
            let table = conditioning_sweep(p, space, &cfg.conditioning_n, 1.0, 1.0)?;
            let case =
                CaseFields::new(p, &space, join(&cfg.conditioning_n, "|")).with_coefficients(1, 1);
            let spread = table.spread();
            let bound = cfg.tol.conditioning_spread;
            out.rows
                .push(case.row("conditioning:spread", spread, bound, spread < bound));
        }
        Task::Parter { p, space } => {
            let table = check_parter(p, space, &cfg.parter_j, &cfg.n)?;
            let case = CaseFields::new(p, &space, &n_list);
            for &j in &cfg.parter_j {
                let entries = table.for_j(j);
                let last = entries.last().expect("nonempty n list").rel_err;
                out.rows.push(case.row(
                    format!("parter:j{j}:error"),
                    last,
                    cfg.tol.parter,
                    last < cfg.tol.parter,
                ));
                let errs: Vec<f64> = entries.iter().map(|e| e.rel_err).collect();
                let step = worst_step(&errs, true);
                out.rows.push(case.row(
                    format!("parter:j{j}:monotone"),
                    step,
                    0.0,
                    step <= MONOTONE_SLACK,
                ));
            }
        }
        Task::ToeplitzCase { p, space, n } => toeplitz_case(p, space, n, &mut out)?,
        Task::ToeplitzProperties => {
            let case = CaseFields::global();
            let comm = commutation_error(cfg.seed, cfg.property_cases, 5);
            out.rows
                .push(case.row("toeplitz:commutation", comm, 0.0, comm == 0.0));
            let k = kronecker_properties(cfg.seed, cfg.property_cases)?;
            let tol = cfg.tol.kronecker;
            out.rows
                .push(case.row("toeplitz:kron-normal", k.normal, tol, k.normal <= tol));
            out.rows
                .push(case.row("toeplitz:kron-spectrum", k.spectrum, tol, k.spectrum <= tol));
            let mismatches = k.rank_mismatches as f64;
            out.rows
                .push(case.row("toeplitz:kron-rank", mismatches, 0.0, mismatches == 0.0));
            out.rows
                .push(case.row("toeplitz:kron-norm", k.norm, tol, k.norm <= tol));
        }
        Task::Specdist { p, space } => {
            let case = CaseFields::new(p, &space, &n_list);
            out.rows.extend(
                check_specdist_lemma(p, space, &cfg.n)?
                    .iter()
                    .map(|c| case.from_check(c)),
            );
        }
        Task::Assembly2d { p, nu, space } => {
            let beta = cfg.beta.iter().copied().fold(0.0, f64::max);
            let gamma = cfg.gamma.iter().copied().fold(0.0, f64::max);
            for &n1 in &cfg.n1_2d {
                let (x, y) = (
                    Direction::new(n1, p.0, space),
                    Direction::new(nu * n1, p.1, space),
                );
                let tensor = assemble_2d_tensor(x, y, [beta, beta], gamma)?;
                let direct = assemble_2d_direct(x, y, [beta, beta], gamma)?;
                let rel = (&tensor.a - &direct).norm() / direct.norm();
                let case = CaseFields::new(
                    format!("{}x{}", p.0, p.1),
                    &space,
                    format!("{n1}x{}", nu * n1),
                )
                .with_coefficients(beta, gamma);
                out.rows.push(case.row(
                    "2d-assembly:tensor-vs-direct",
                    rel,
                    cfg.tol.assembly,
                    rel <= cfg.tol.assembly,
                ));
            }
        }
        Task::Decomposition2d { p, nu, space } => {
            let mut previous: Option<f64> = None;
            for &n1 in &cfg.n1_2d {
                let set = assemble_2d_tensor(
                    Direction::new(n1, p.0, space),
                    Direction::new(nu * n1, p.1, space),
                    [0.0, 0.0],
                    0.0,
                )?;
                let d = decompose_2d(&set, nu as f64)?;
                let case = CaseFields::new(
                    format!("{}x{}", p.0, p.1),
                    &space,
                    format!("{n1}x{}", nu * n1),
                );
                out.rows.push(case.row(
                    "2d-decomposition:rank",
                    d.rank as f64,
                    d.rank_bound as f64,
                    d.rank <= d.rank_bound,
                ));
                out.rows.push(case.row(
                    "2d-decomposition:norm",
                    d.norm2,
                    f64::INFINITY,
                    d.norm2.is_finite(),
                ));
                if let Some(prev) = previous {
                    let ratio = norm_ratio(prev, d.norm2);
                    out.rows.push(case.row(
                        "2d-decomposition:norm-ratio",
                        ratio,
                        cfg.tol.norm_ratio,
                        ratio < cfg.tol.norm_ratio,
                    ));
                }
                previous = Some(d.norm2);
            }
        }
        Task::Distribution2d { p, nu, space } => {
            let mut means = Vec::new();
            let case = CaseFields::new(
                format!("{}x{}", p.0, p.1),
                &space,
                cfg.n1_2d
                    .iter()
                    .map(|n1| format!("{n1}x{}", nu * n1))
                    .collect::<Vec<_>>()
                    .join("|"),
            )
            .with_coefficients(1, 1);
            let mut last = None;
            for &n1 in &cfg.n1_2d {
                let r = distribution_2d(p, nu, space, n1, cfg.tol.outlier_level)?;
                means.push(r.mean);
                last = Some((n1, r));
            }
            let step = worst_step(&means, true);
            out.rows.push(case.row(
                "2d-distribution:mean-decreasing",
                step,
                0.0,
                step <= MONOTONE_SLACK,
            ));
            if let Some((n1, r)) = last {
                let fraction = r.outliers as f64 / r.eigs.len() as f64;
                out.rows.push(case.row(
                    "2d-distribution:outlier-fraction",
                    fraction,
                    cfg.tol.outlier_fraction,
                    fraction < cfg.tol.outlier_fraction,
                ));
                out.rows.push(case.row(
                    "2d-distribution:mean-distance",
                    r.mean,
                    f64::INFINITY,
                    r.mean.is_finite(),
                ));
                out.files.push((
                    PathBuf::from("eigenvalues").join(format!(
                        "2d_{}_nu{nu}.csv",
                        file_stem(format!("{}x{}", p.0, p.1), &space, n1)
                    )),
                    values_csv(&[("eigenvalue", &r.eigs), ("symbol_sample", &r.samples)]),
                ));
            }
        }
        Task::RatioBounds { p, space, n } => {
            let (lo, hi) = ratio_bounds(p, space, n, RATIO_GRID)?;
            let case = CaseFields::new(p, &space, n);
            out.rows
                .push(case.row("ratio-bounds:low-positive", lo, 0.0, lo > 0.0));
            out.rows
                .push(case.row("ratio-bounds:low-at-most-one", lo, 1.0, lo <= 1.0 + 1e-12));
            out.rows.push(case.row(
                "ratio-bounds:high-at-least-one",
                hi,
                1.0,
                hi >= 1.0 - 1e-12 && hi.is_finite(),
            ));
        }
    }
    Ok(out)
}

/// `‖R‖` growth between consecutive sizes; a remainder that is zero at both
/// sizes counts as bounded.
fn norm_ratio(previous: f64, current: f64) -> f64 {
    if current == 0.0 {
        0.0
    } else if previous == 0.0 {
        f64::INFINITY
    } else {
        current / previous
    }
}

fn toeplitz_case(p: usize, space: SectionSpace, n: usize, out: &mut TaskOutput) -> Result<()> {
    let case = CaseFields::new(p, &space, n);
    let ctx = CaseContext::new(p, space, n);
    let set = set_1d(n, p, space)?;
    let parts = toeplitz_parts(&set)?;
    let stem = file_stem(p, &space, n);
    for (s, tag) in [(&parts.f, "f"), (&parts.h, "h")] {
        out.files.push((
            PathBuf::from("symbols").join(format!("{stem}_{tag}.csv")),
            symbol_csv(s),
        ));
        let (lo, hi) = s.extremes(EXTREME_GRID);
        let spec = sym_eigs(&toeplitz(set.size(), s))?;
        let margin = (spec.min() - lo).min(hi - spec.max());
        out.rows
            .push(case.row(format!("toeplitz:szego-{tag}"), margin, 0.0, margin > 0.0));
        let mut mins = Vec::new();
        let mut maxs = Vec::new();
        for m in TOEPLITZ_SIZES {
            let e = sym_eigs(&toeplitz(m, s))?;
            mins.push(e.min());
            maxs.push(e.max());
        }
        let step = worst_step(&mins, true).max(worst_step(&maxs, false));
        out.rows.push(case.from_check(&BoundCheck::new(
            format!("toeplitz:monotone-{tag}"),
            step,
            Relation::AtMost,
            0.0,
            MONOTONE_SLACK,
            ctx,
        )));
    }
    let rank = numerical_rank(&parts.r, 1e-10);
    let bound = 4 * p - 2;
    out.rows.push(case.row(
        "toeplitz:remainder-rank",
        rank as f64,
        bound as f64,
        rank <= bound,
    ));
    Ok(())
}

/// Result of a configured run.
#[derive(Debug)]
pub struct RunOutcome {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.all_passed()
    }
}

/// Path relative to the output directory and contents of one side file.
pub type SideFile = (PathBuf, String);

/// Runs every task of `cfg` and returns the sorted rows; writes nothing.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<(Vec<ReportRow>, Vec<SideFile>, Vec<String>)> {
    cfg.validate()?;
    let tasks = plan(cfg);
    let results = par::with_jobs(cfg.jobs, || {
        par::map(&tasks, |task| {
            let start = Instant::now();
            let result = execute(task, cfg);
            (result, start.elapsed().as_millis() as u64)
        })
    });
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut errors = Vec::new();
    for (task, (result, ms)) in tasks.iter().zip(results) {
        match result {
            Ok(output) => {
                rows.extend(output.rows.into_iter().map(|mut r| {
                    if cfg.timings {
                        r.ms = ms;
                    }
                    r
                }));
                files.extend(output.files);
            }
            Err(e) => {
                errors.push(format!("{}: {e}", task.label()));
                let case = CaseFields::global();
                let mut row = case.row(format!("{}:error", task.kind()), f64::NAN, f64::NAN, false);
                row.p = task.label().replace(',', ";");
                rows.push(row);
            }
        }
    }
    // stable: rows of one check keep their case-key order
    rows.sort_by(|a, b| a.check.cmp(&b.check));
    files.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((rows, files, errors))
}

/// Runs `cfg` and writes `report.csv`, `summary.json`, `symbols/` and
/// `eigenvalues/` under `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (rows, files, errors) = evaluate(cfg)?;
    let out_dir = cfg.out.clone();
    write_outputs(&out_dir, &rows, &files)?;
    let summary = Summary::from_rows(&rows, cfg.seed, errors);
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    Ok(RunOutcome {
        rows,
        summary,
        out_dir,
    })
}

fn write_outputs(dir: &Path, rows: &[ReportRow], files: &[(PathBuf, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut report = Vec::new();
    write_report_csv(&mut report, rows)?;
    fs::write(dir.join("report.csv"), report)?;
    for (rel, contents) in files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, contents)?;
    }
    Ok(())
}
