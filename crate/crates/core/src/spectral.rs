//! Dense eigen/singular value routines and the bound checks built on them.

use std::f64::consts::PI;

use nalgebra::{Complex, Schur};

use crate::assembly::{assemble_1d, assemble_2d_tensor, assemble_a_1d, Direction, GalerkinSet1D};
use crate::error::{Error, Result};
use crate::gbspline::{GBSplineBasis, SectionSpace};
use crate::par;
use crate::toeplitz::{
    distribution_distance, sample_two_level, symbols_at, toeplitz, SymbolCoeffs, TwoLevelSymbol,
};
use crate::Matrix;

/// Per-step slack before a "monotone" sequence is flagged.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `j`-th smallest, 1-based.
    pub fn nth(&self, j: usize) -> f64 {
        self.values[j - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex<f64>>,
}

impl ComplexSpectrum {
    /// An eigenvalue of minimum modulus.
    pub fn min_modulus(&self) -> Complex<f64> {
        self.values
            .iter()
            .copied()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("empty spectrum")
    }
}

fn require_square(x: &Matrix) -> Result<()> {
    if x.nrows() != x.ncols() {
        return Err(Error::NotSquare {
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    Ok(())
}

/// Maximum absolute row sum.
pub fn inf_norm(x: &Matrix) -> f64 {
    x.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn one_norm(x: &Matrix) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn symmetric_part(x: &Matrix) -> Matrix {
    (x + x.transpose()) * 0.5
}

/// `(X - Xᵀ)/2`; the imaginary part of `X` is this divided by `i`.
pub fn skew_part(x: &Matrix) -> Matrix {
    (x - x.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigs(s: &Matrix) -> Result<Spectrum> {
    require_square(s)?;
    let asym = inf_norm(&(s - s.transpose()));
    let tol = 1e-10 * inf_norm(s);
    if asym > tol {
        return Err(Error::NotSymmetric { asym, tol });
    }
    if s.is_empty() {
        return Ok(Spectrum { values: Vec::new() });
    }
    let mut values: Vec<f64> = symmetric_part(s)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(Spectrum { values })
}

/// Eigenvalues of a general real matrix (Hessenberg reduction + shifted QR),
/// sorted by real then imaginary part.
pub fn gen_eigs(x: &Matrix) -> Result<ComplexSpectrum> {
    require_square(x)?;
    let size = x.nrows();
    let schur = Schur::try_new(x.clone(), f64::EPSILON, 100 * size.max(1))
        .ok_or(Error::NoConvergence(size))?;
    let mut values: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ComplexSpectrum { values })
}

/// Singular values, descending.
pub fn singular_values(x: &Matrix) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = x.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(x: &Matrix) -> f64 {
    singular_values(x).first().copied().unwrap_or(0.0)
}

/// `κ₂(X) = s_max / s_min`.
pub fn condition_2(x: &Matrix) -> Result<f64> {
    require_square(x)?;
    let s = singular_values(x);
    let (smax, smin) = (s[0], s[s.len() - 1]);
    if smin <= f64::EPSILON * smax * s.len() as f64 {
        return Err(Error::Singular);
    }
    Ok(smax / smin)
}

/// Number of singular values above `rel_tol · s_max`.
pub fn numerical_rank(x: &Matrix, rel_tol: f64) -> usize {
    let s = singular_values(x);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&v| v > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Smallest eigenvalue of the pencil `K - λM` (`M` symmetric positive
/// definite) via `M = LLᵀ` and the congruent matrix `L⁻¹KL⁻ᵀ`.
pub fn pencil_min_eig(k: &Matrix, m: &Matrix) -> Result<f64> {
    let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let y = l
        .solve_lower_triangular(k)
        .ok_or(Error::NotPositiveDefinite)?;
    let z = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(sym_eigs(&symmetric_part(&z))?.min())
}

/// Same quantity as [`pencil_min_eig`] through `M^{-1/2} K M^{-1/2}`.
pub fn pencil_min_eig_sqrt(k: &Matrix, m: &Matrix) -> Result<f64> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&v| v <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let d = nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|v| 1.0 / v.sqrt()),
    );
    let q = &eig.eigenvectors;
    let inv_sqrt = q * Matrix::from_diagonal(&d) * q.transpose();
    let z = &inv_sqrt * k * &inv_sqrt;
    Ok(sym_eigs(&symmetric_part(&z))?.min())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }
    }
}

/// Parameters of the case a check was run on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseContext {
    pub p: usize,
    pub space: SectionSpace,
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
}

impl CaseContext {
    pub fn new(p: usize, space: SectionSpace, n: usize) -> Self {
        Self {
            p,
            space,
            n,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    pub fn with_coefficients(mut self, beta: f64, gamma: f64) -> Self {
        self.beta = beta;
        self.gamma = gamma;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    pub context: CaseContext,
}

impl BoundCheck {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        relation: Relation,
        bound: f64,
        tolerance: f64,
        context: CaseContext,
    ) -> Self {
        let pass = match relation {
            Relation::AtLeast => measured >= bound - tolerance,
            Relation::AtMost => measured <= bound + tolerance,
        } && measured.is_finite();
        Self {
            name: name.into(),
            measured,
            bound,
            relation,
            tolerance,
            pass,
            context,
        }
    }

    /// `measured / bound`.
    pub fn slack_ratio(&self) -> f64 {
        self.measured / self.bound
    }
}

/// Largest step against the wanted direction in a sequence (0 when it is
/// monotone).
pub fn worst_step(values: &[f64], decreasing: bool) -> f64 {
    values
        .windows(2)
        .map(|w| if decreasing { w[1] - w[0] } else { w[0] - w[1] })
        .fold(0.0, f64::max)
}

/// Measured constants `C_p` (lower) and `C̄_p` (upper): extremes of the
/// spectrum of the normalized mass matrix over the tested `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpEstimate {
    pub lower: f64,
    pub upper: f64,
}

pub fn estimate_cp(p: usize, space: SectionSpace, n_list: &[usize]) -> Result<CpEstimate> {
    let extremes = par::map(n_list, |&n| -> Result<(f64, f64)> {
        let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
        let spec = sym_eigs(&set.mass)?;
        Ok((spec.min(), spec.max()))
    });
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for e in extremes {
        let (lo, hi) = e?;
        lower = lower.min(lo);
        upper = upper.max(hi);
    }
    Ok(CpEstimate { lower, upper })
}

/// Lower bounds on `λ_min(M)`, the pencil `(K, M)` and `λ_min(K)`.
pub fn check_theorem_mineig(
    p: usize,
    space: SectionSpace,
    n: usize,
    cp: CpEstimate,
) -> Result<Vec<BoundCheck>> {
    let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
    mineig_checks(&set, cp)
}

pub fn mineig_checks(set: &GalerkinSet1D, cp: CpEstimate) -> Result<Vec<BoundCheck>> {
    let ctx = CaseContext::new(set.p(), set.basis().space(), set.n());
    let nf = set.n() as f64;
    let mass_min = sym_eigs(&set.mass)?.min();
    let pencil = pencil_min_eig(&set.stiffness, &set.mass)?;
    let stiff_min = sym_eigs(&set.stiffness)?.min();
    let pencil_bound = PI * PI / (nf * nf);
    let stiff_bound = PI * PI * cp.lower / (nf * nf);
    Ok(vec![
        BoundCheck::new(
            "mineig:mass",
            mass_min,
            Relation::AtLeast,
            cp.lower,
            1e-12,
            ctx,
        ),
        BoundCheck::new(
            "mineig:pencil",
            pencil,
            Relation::AtLeast,
            pencil_bound,
            1e-10 * pencil_bound,
            ctx,
        ),
        BoundCheck::new(
            "mineig:stiffness",
            stiff_min,
            Relation::AtLeast,
            stiff_bound,
            1e-10 * stiff_bound,
            ctx,
        ),
    ])
}

/// `|λ_min(A)| >= λ_min(Re A) >= C_p (π² + γ)/n`, as two checks.
pub fn check_eq10(
    p: usize,
    space: SectionSpace,
    n: usize,
    beta: f64,
    gamma: f64,
    cp: CpEstimate,
) -> Result<Vec<BoundCheck>> {
    let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
    eq10_checks(&set, beta, gamma, cp)
}

pub fn eq10_checks(
    set: &GalerkinSet1D,
    beta: f64,
    gamma: f64,
    cp: CpEstimate,
) -> Result<Vec<BoundCheck>> {
    let a = assemble_a_1d(set, beta, gamma)?;
    let ctx =
        CaseContext::new(set.p(), set.basis().space(), set.n()).with_coefficients(beta, gamma);
    let modulus = gen_eigs(&a)?.min_modulus().norm();
    let re_min = sym_eigs(&symmetric_part(&a))?.min();
    let bound = cp.lower * (PI * PI + gamma) / set.n() as f64;
    Ok(vec![
        BoundCheck::new(
            "eq10:modulus",
            modulus,
            Relation::AtLeast,
            re_min,
            1e-9 * re_min.abs(),
            ctx,
        ),
        BoundCheck::new(
            "eq10:real-part",
            re_min,
            Relation::AtLeast,
            bound,
            1e-10 * bound,
            ctx,
        ),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningTable {
    /// `(n, κ₂(A), κ₂(A)/n²)`
    pub rows: Vec<(usize, f64, f64)>,
}

impl ConditioningTable {
    /// max/min of `κ₂(A)/n²` over the table.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.2), hi.max(r.2))
            });
        hi / lo
    }
}

pub fn conditioning_sweep(
    p: usize,
    space: SectionSpace,
    n_list: &[usize],
    beta: f64,
    gamma: f64,
) -> Result<ConditioningTable> {
    let rows = par::map(n_list, |&n| -> Result<(usize, f64, f64)> {
        let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
        let kappa = condition_2(&assemble_a_1d(&set, beta, gamma)?)?;
        Ok((n, kappa, kappa / (n * n) as f64))
    });
    Ok(ConditioningTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParterEntry {
    pub j: usize,
    pub n: usize,
    /// `n² λ_j(K)`
    pub scaled: f64,
    /// `|n² λ_j(K) / (j²π²) - 1|`
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParterTable {
    pub entries: Vec<ParterEntry>,
}

impl ParterTable {
    pub fn for_j(&self, j: usize) -> Vec<ParterEntry> {
        self.entries.iter().filter(|e| e.j == j).copied().collect()
    }

    /// Whether `rel_err` decreases with `n` for this `j`.
    pub fn monotone(&self, j: usize) -> bool {
        let errs: Vec<f64> = self.for_j(j).iter().map(|e| e.rel_err).collect();
        worst_step(&errs, true) <= MONOTONE_SLACK
    }
}

/// `n² λ_j(K_{n,p})` against its conjectured limit `j²π²`.
pub fn check_parter(
    p: usize,
    space: SectionSpace,
    j_list: &[usize],
    n_list: &[usize],
) -> Result<ParterTable> {
    let spectra = par::map(n_list, |&n| -> Result<(usize, Spectrum)> {
        let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
        Ok((n, sym_eigs(&set.stiffness)?))
    });
    let mut entries = Vec::new();
    for s in spectra {
        let (n, spec) = s?;
        for &j in j_list {
            if j == 0 || j > spec.len() {
                return Err(Error::Config(format!(
                    "parter: j = {j} outside 1..={} for n = {n}",
                    spec.len()
                )));
            }
            let scaled = (n * n) as f64 * spec.nth(j);
            let limit = (j * j) as f64 * PI * PI;
            entries.push(ParterEntry {
                j,
                n,
                scaled,
                rel_err: (scaled / limit - 1.0).abs(),
            });
        }
    }
    entries.sort_by_key(|e| (e.j, e.n));
    Ok(ParterTable { entries })
}

/// Grid used to estimate extreme symbol values.
pub const SYMBOL_GRID: usize = 4096;

/// Extreme-eigenvalue behaviour of the Toeplitz parts `B_n = T(f)` and
/// `C_n = T(h)` along `n_list` (ascending): decay of `λ_min(B)` to 0, `λ_j(B)`
/// against `j²π²/n²`, `λ_max(B)` against `max f`, `λ_max(C)` towards 1 and
/// `λ_min(C)` against `min h`. Nested spaces are compared with the polynomial
/// limit symbols; non-nested spaces with their own (n-independent) symbols.
pub fn check_specdist_lemma(
    p: usize,
    space: SectionSpace,
    n_list: &[usize],
) -> Result<Vec<BoundCheck>> {
    let extremes = par::map(n_list, |&n| -> Result<ExtremeSample> {
        let (f, h) = symbols_at(p, space, n)?;
        let m = n + p - 2;
        let b = sym_eigs(&toeplitz(m, &f))?;
        let c = sym_eigs(&toeplitz(m, &h))?;
        let parter = (1..=3)
            .map(|j| {
                let nf = n as f64;
                (b.values.get(j - 1).copied().unwrap_or(f64::NAN) * nf * nf
                    / ((j * j) as f64 * PI * PI)
                    - 1.0)
                    .abs()
            })
            .collect();
        Ok(ExtremeSample {
            b_min: b.min(),
            b_max: b.max(),
            c_min: c.min(),
            c_max: c.max(),
            parter,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let n_last = *n_list.last().expect("empty n_list");
    let ctx = CaseContext::new(p, space, n_last);
    let (f_lim, h_lim): (SymbolCoeffs, SymbolCoeffs) = if space.is_refinement_invariant() {
        symbols_at(p, space, n_last)?
    } else {
        symbols_at(p, SectionSpace::polynomial(), n_last)?
    };
    let f_max = f_lim.extremes(SYMBOL_GRID).1;
    let h_min = h_lim.extremes(SYMBOL_GRID).0;

    let col = |g: fn(&ExtremeSample) -> f64| extremes.iter().map(g).collect::<Vec<f64>>();
    let b_min = col(|s| s.b_min);
    let b_max = col(|s| s.b_max);
    let c_min = col(|s| s.c_min);
    let c_max = col(|s| s.c_max);
    let last = extremes.len() - 1;
    let slack = MONOTONE_SLACK;

    let mut checks = vec![
        BoundCheck::new(
            "specdist:B-min-decreasing",
            worst_step(&b_min, true),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ),
        BoundCheck::new(
            "specdist:B-min-positive",
            b_min[last],
            Relation::AtLeast,
            0.0,
            0.0,
            ctx,
        ),
        BoundCheck::new(
            "specdist:C-max-increasing",
            worst_step(&c_max, false),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ),
        BoundCheck::new(
            "specdist:C-max-below-one",
            c_max[last],
            Relation::AtMost,
            1.0,
            1e-12,
            ctx,
        ),
    ];
    for j in 1..=3 {
        let errs: Vec<f64> = extremes.iter().map(|s| s.parter[j - 1]).collect();
        checks.push(BoundCheck::new(
            format!("specdist:B-parter-j{j}"),
            worst_step(&errs, true),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ));
    }
    if space.is_refinement_invariant() {
        checks.push(BoundCheck::new(
            "specdist:B-max-increasing",
            worst_step(&b_max, false),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ));
        checks.push(BoundCheck::new(
            "specdist:B-max-below-sup",
            b_max[last],
            Relation::AtMost,
            f_max,
            1e-12,
            ctx,
        ));
        checks.push(BoundCheck::new(
            "specdist:C-min-decreasing",
            worst_step(&c_min, true),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ));
        checks.push(BoundCheck::new(
            "specdist:C-min-above-inf",
            c_min[last],
            Relation::AtLeast,
            h_min,
            1e-12,
            ctx,
        ));
    } else {
        let b_gap: Vec<f64> = b_max.iter().map(|v| (v - f_max).abs()).collect();
        let c_gap: Vec<f64> = c_min.iter().map(|v| (v - h_min).abs()).collect();
        checks.push(BoundCheck::new(
            "specdist:B-max-gap-decreasing",
            worst_step(&b_gap, true),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ));
        checks.push(BoundCheck::new(
            "specdist:C-min-gap-decreasing",
            worst_step(&c_gap, true),
            Relation::AtMost,
            0.0,
            slack,
            ctx,
        ));
    }
    Ok(checks)
}

/// Sorted eigenvalues of `Re A` (2D, `β = (1, 1)`, `γ = 1`) against sorted
/// samples of the two-level symbol on the matching grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution2D {
    pub mean: f64,
    pub max: f64,
    pub outliers: usize,
    /// `max g` over the samples; outliers are counted at `level · max_g`.
    pub max_g: f64,
    pub eigs: Vec<f64>,
    pub samples: Vec<f64>,
}

/// Nested spaces are compared with the polynomial symbols (their limit);
/// refinement-invariant spaces with their own.
pub fn distribution_2d(
    p: (usize, usize),
    nu: usize,
    space: SectionSpace,
    n1: usize,
    outlier_level: f64,
) -> Result<Distribution2D> {
    let n2 = nu * n1;
    let set = assemble_2d_tensor(
        Direction::new(n1, p.0, space),
        Direction::new(n2, p.1, space),
        [1.0, 1.0],
        1.0,
    )?;
    let eigs = sym_eigs(&symmetric_part(&set.a))?.values;
    let limit = if space.is_refinement_invariant() {
        space
    } else {
        SectionSpace::polynomial()
    };
    let (fx, hx) = symbols_at(p.0, limit, n1)?;
    let (fy, hy) = symbols_at(p.1, limit, n2)?;
    let g = TwoLevelSymbol {
        fx,
        hx,
        fy,
        hy,
        nu: nu as f64,
    };
    let samples = sample_two_level(&g, set.x.size(), set.y.size());
    let max_g = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d = distribution_distance(&eigs, &samples, outlier_level * max_g)?;
    Ok(Distribution2D {
        mean: d.mean_abs,
        max: d.max_abs,
        outliers: d.outliers,
        max_g,
        eigs,
        samples,
    })
}

struct ExtremeSample {
    b_min: f64,
    b_max: f64,
    c_min: f64,
    c_max: f64,
    parter: Vec<f64>,
}
