//! Toeplitz and two-level Toeplitz matrices, Kronecker products, and the
//! spectral symbols read off the normalized Galerkin matrices.
//!
//! A symbol here is a real even trigonometric polynomial
//! `f(θ) = c_0 + 2 Σ_{k=1}^{p} c_k cos(kθ)`, stored by its coefficients
//! `c_0, ..., c_p`.

use std::f64::consts::PI;

use crate::assembly::{assemble_1d, GalerkinSet1D};
use crate::error::{Error, Result};
use crate::gbspline::{GBSplineBasis, SectionSpace};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// `f`: interior row of the normalized stiffness matrix.
    Stiffness,
    /// `h`: interior row of the normalized mass matrix.
    Mass,
    /// Any other coefficient list.
    Generic,
}

impl SymbolKind {
    pub fn label(&self) -> &'static str {
        match self {
            SymbolKind::Stiffness => "f",
            SymbolKind::Mass => "h",
            SymbolKind::Generic => "g",
        }
    }
}

/// Where an extracted symbol came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolOrigin {
    pub p: usize,
    pub space: SectionSpace,
    /// Per-element phase the coefficients were computed at.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCoeffs {
    kind: SymbolKind,
    coeffs: Vec<f64>,
    origin: Option<SymbolOrigin>,
}

impl SymbolCoeffs {
    /// `coeffs[k] = c_k = c_{-k}` for `k = 0..=p`.
    pub fn new(kind: SymbolKind, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a symbol needs at least c_0");
        Self {
            kind,
            coeffs,
            origin: None,
        }
    }

    pub fn generic(coeffs: Vec<f64>) -> Self {
        Self::new(SymbolKind::Generic, coeffs)
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn origin(&self) -> Option<SymbolOrigin> {
        self.origin
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c_0, ..., c_p`.
    pub fn half(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: isize) -> f64 {
        self.coeffs.get(k.unsigned_abs()).copied().unwrap_or(0.0)
    }

    /// `(k, c_k)` for `k = -p..=p`.
    pub fn full(&self) -> Vec<(isize, f64)> {
        let p = self.degree() as isize;
        (-p..=p).map(|k| (k, self.coeff(k))).collect()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .fold(self.coeffs[0], |acc, (k, &c)| {
                acc + 2.0 * c * (k as f64 * theta).cos()
            })
    }

    /// Sampled `(min, max)` over `[0, π]` including both endpoints; the symbol
    /// is even, so this covers `[-π, π]`.
    pub fn extremes(&self, grid: usize) -> (f64, f64) {
        let grid = grid.max(2);
        (0..grid)
            .map(|j| self.eval(PI * j as f64 / (grid - 1) as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Checks `f(0) = 0, f >= 0` (stiffness) or `h(0) = 1, 0 < h <= 1` (mass)
    /// on a `grid`-point sampling.
    pub fn check_invariants(&self, grid: usize) -> Result<()> {
        let at_zero = self.eval(0.0);
        let (lo, hi) = self.extremes(grid);
        match self.kind {
            SymbolKind::Stiffness => {
                if at_zero.abs() > 1e-10 {
                    return Err(Error::SymbolInvariant(format!(
                        "f(0) = {at_zero:e}, expected 0"
                    )));
                }
                if lo < -1e-10 {
                    return Err(Error::SymbolInvariant(format!(
                        "f takes negative value {lo:e}"
                    )));
                }
            }
            SymbolKind::Mass => {
                if (at_zero - 1.0).abs() > 1e-10 {
                    return Err(Error::SymbolInvariant(format!(
                        "h(0) = {at_zero}, expected 1"
                    )));
                }
                if lo <= 0.0 || hi > 1.0 + 1e-10 {
                    return Err(Error::SymbolInvariant(format!(
                        "h range [{lo}, {hi}] not inside (0, 1]"
                    )));
                }
            }
            SymbolKind::Generic => {}
        }
        Ok(())
    }
}

/// `g(θ_x, θ_y) = (1/ν) h_y(θ_y) f_x(θ_x) + ν f_y(θ_y) h_x(θ_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelSymbol {
    pub fx: SymbolCoeffs,
    pub hx: SymbolCoeffs,
    pub fy: SymbolCoeffs,
    pub hy: SymbolCoeffs,
    pub nu: f64,
}

impl TwoLevelSymbol {
    pub fn eval(&self, theta_x: f64, theta_y: f64) -> f64 {
        self.hy.eval(theta_y) * self.fx.eval(theta_x) / self.nu
            + self.nu * self.fy.eval(theta_y) * self.hx.eval(theta_x)
    }

    /// Fourier coefficients with the y-direction as the outer (block) level,
    /// matching the inverse lexicographic ordering of the 2D matrices.
    pub fn coefficient_table(&self) -> CoefficientTable {
        let a = CoefficientTable::tensor(&self.hy, &self.fx).scaled(1.0 / self.nu);
        let b = CoefficientTable::tensor(&self.fy, &self.hx).scaled(self.nu);
        a.add(&b)
    }
}

/// Finite table of two-level Fourier coefficients `g_{k,l}`, `|k| <= outer`,
/// `|l| <= inner`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    outer: usize,
    inner: usize,
    values: Vec<f64>,
}

impl CoefficientTable {
    pub fn zeros(outer: usize, inner: usize) -> Self {
        Self {
            outer,
            inner,
            values: vec![0.0; (2 * outer + 1) * (2 * inner + 1)],
        }
    }

    /// Coefficients of `(f ⊗ h)(θ_1, θ_2) = f(θ_1) h(θ_2)`: `g_{k,l} = f_k h_l`.
    pub fn tensor(outer: &SymbolCoeffs, inner: &SymbolCoeffs) -> Self {
        let mut t = Self::zeros(outer.degree(), inner.degree());
        for (k, fk) in outer.full() {
            for (l, hl) in inner.full() {
                t.set(k, l, fk * hl);
            }
        }
        t
    }

    fn index(&self, k: isize, l: isize) -> Option<usize> {
        let (o, i) = (self.outer as isize, self.inner as isize);
        if k.abs() > o || l.abs() > i {
            return None;
        }
        Some(((k + o) * (2 * i + 1) + (l + i)) as usize)
    }

    pub fn get(&self, k: isize, l: isize) -> f64 {
        self.index(k, l).map_or(0.0, |ix| self.values[ix])
    }

    pub fn set(&mut self, k: isize, l: isize, v: f64) {
        let ix = self
            .index(k, l)
            .expect("coefficient index out of table range");
        self.values[ix] = v;
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= s);
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let outer = self.outer.max(other.outer);
        let inner = self.inner.max(other.inner);
        let mut t = Self::zeros(outer, inner);
        for k in -(outer as isize)..=outer as isize {
            for l in -(inner as isize)..=inner as isize {
                t.set(k, l, self.get(k, l) + other.get(k, l));
            }
        }
        t
    }
}

/// `T_m(f)[i, j] = c_{i-j}`.
pub fn toeplitz(m: usize, symbol: &SymbolCoeffs) -> Matrix {
    Matrix::from_fn(m, m, |i, j| symbol.coeff(i as isize - j as isize))
}

/// Block-Toeplitz matrix with Toeplitz blocks: `m_outer` blocks per side, each
/// `m_inner x m_inner`, block `(I, J)` holding `G_{I-J}` with entries
/// `g_{I-J, i-j}`.
pub fn two_level_toeplitz(m_outer: usize, m_inner: usize, table: &CoefficientTable) -> Matrix {
    let size = m_outer * m_inner;
    Matrix::from_fn(size, size, |r, c| {
        let (bi, i) = (r / m_inner, r % m_inner);
        let (bj, j) = (c / m_inner, c % m_inner);
        table.get(bi as isize - bj as isize, i as isize - j as isize)
    })
}

/// Kronecker product `X ⊗ Y`.
pub fn kron(x: &Matrix, y: &Matrix) -> Matrix {
    let (xr, xc) = x.shape();
    let (yr, yc) = y.shape();
    let mut out = Matrix::zeros(xr * yr, xc * yc);
    for i in 0..xr {
        for j in 0..xc {
            let a = x[(i, j)];
            if a == 0.0 {
                continue;
            }
            out.view_mut((i * yr, j * yc), (yr, yc)).copy_from(&(y * a));
        }
    }
    out
}

/// Row read as symbol coefficients: the 1-based row `ceil((n+p-2)/2)`.
fn central_row(size: usize) -> usize {
    size.div_ceil(2) - 1
}

fn row_symbol(mat: &Matrix, p: usize, kind: SymbolKind) -> Result<SymbolCoeffs> {
    let r = central_row(mat.nrows());
    let coeffs: Vec<f64> = (0..=p).map(|k| mat[(r, r + k)]).collect();
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        let left = mat[(r, r - k)];
        if (left - c).abs() > 1e-12 * c.abs().max(1.0) {
            return Err(Error::SymbolInvariant(format!(
                "central row not symmetric at offset {k}: {left} vs {c}"
            )));
        }
    }
    Ok(SymbolCoeffs::new(kind, coeffs))
}

fn symbols_of(set: &GalerkinSet1D) -> Result<(SymbolCoeffs, SymbolCoeffs)> {
    let p = set.p();
    Ok((
        row_symbol(&set.stiffness, p, SymbolKind::Stiffness)?,
        row_symbol(&set.mass, p, SymbolKind::Mass)?,
    ))
}

/// Both symbols `(f, h)` of the `(p, space)` family at `n` elements, read off
/// the central rows of the normalized stiffness and mass matrices.
///
/// Requires `n >= 3p + 1`. For refinement-invariant spaces (polynomial,
/// non-nested) the rows are compared against an assembly with `2n` elements.
pub fn extract_symbols(
    p: usize,
    space: SectionSpace,
    n: usize,
) -> Result<(SymbolCoeffs, SymbolCoeffs)> {
    space.validate(n)?;
    if n < 3 * p + 1 {
        return Err(Error::SymbolPrecondition { p, n });
    }
    let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
    let (mut f, mut h) = symbols_of(&set)?;
    if space.is_refinement_invariant() {
        let fine = assemble_1d(GBSplineBasis::uniform(2 * n, p, space)?)?;
        let (f2, h2) = symbols_of(&fine)?;
        for (a, b) in [(&f, &f2), (&h, &h2)] {
            for k in 0..=p {
                let diff = (a.coeffs[k] - b.coeffs[k]).abs();
                if diff > 1e-10 {
                    return Err(Error::SymbolUnstable { k, diff });
                }
            }
        }
    }
    let origin = SymbolOrigin {
        p,
        space,
        phase: space.element_phase(n),
    };
    f.origin = Some(origin);
    h.origin = Some(origin);
    f.check_invariants(512)?;
    h.check_invariants(512)?;
    Ok((f, h))
}

/// One symbol of the `(p, space)` family at `n` elements.
pub fn extract_symbol(
    p: usize,
    space: SectionSpace,
    n: usize,
    kind: SymbolKind,
) -> Result<SymbolCoeffs> {
    let (f, h) = extract_symbols(p, space, n)?;
    match kind {
        SymbolKind::Stiffness => Ok(f),
        SymbolKind::Mass => Ok(h),
        SymbolKind::Generic => Err(Error::SymbolInvariant(
            "only stiffness (f) or mass (h) symbols can be extracted".into(),
        )),
    }
}

/// Symbols governing the Toeplitz parts of the `n`-element matrices, valid for
/// any `n >= 2`: the coefficients depend only on `p` and the per-element
/// phase, so they are read from a reference assembly with `3p + 1` elements at
/// that phase.
pub fn symbols_at(p: usize, space: SectionSpace, n: usize) -> Result<(SymbolCoeffs, SymbolCoeffs)> {
    space.validate(n)?;
    let phase = space.element_phase(n);
    let reference = space.with_fixed_phase(phase);
    let (mut f, mut h) = extract_symbols(p, reference, 3 * p + 1)?;
    let origin = SymbolOrigin { p, space, phase };
    f.origin = Some(origin);
    h.origin = Some(origin);
    Ok((f, h))
}

/// Toeplitz parts `B = T(f)`, `C = T(h)` of a 1D set and the remainders
/// `R = K - B`, `S = M - C`.
#[derive(Debug, Clone)]
pub struct ToeplitzParts {
    pub f: SymbolCoeffs,
    pub h: SymbolCoeffs,
    pub b: Matrix,
    pub c: Matrix,
    pub r: Matrix,
    pub s: Matrix,
}

pub fn toeplitz_parts(set: &GalerkinSet1D) -> Result<ToeplitzParts> {
    let (f, h) = symbols_at(set.p(), set.basis().space(), set.n())?;
    let m = set.size();
    let b = toeplitz(m, &f);
    let c = toeplitz(m, &h);
    let r = &set.stiffness - &b;
    let s = &set.mass - &c;
    Ok(ToeplitzParts { f, h, b, c, r, s })
}

/// Uniform open grid `θ_j = -π + (2j - 1)π/N`, `j = 1..=N`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| -PI + (2 * j - 1) as f64 * PI / n as f64)
        .collect()
}

/// Symbol values on [`theta_grid`], sorted ascending.
pub fn sample_symbol(symbol: &SymbolCoeffs, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = theta_grid(n).into_iter().map(|t| symbol.eval(t)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-level symbol values on the `nx x ny` product grid, sorted ascending.
pub fn sample_two_level(symbol: &TwoLevelSymbol, nx: usize, ny: usize) -> Vec<f64> {
    let tx = theta_grid(nx);
    let ty = theta_grid(ny);
    let mut v: Vec<f64> = ty
        .iter()
        .flat_map(|&b| tx.iter().map(move |&a| (a, b)))
        .map(|(a, b)| symbol.eval(a, b))
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionDistance {
    pub mean_abs: f64,
    pub max_abs: f64,
    pub outliers: usize,
}

/// Index-wise comparison of two ascending sequences; `outliers` counts the
/// positions differing by more than `tol`.
pub fn distribution_distance(
    eigs: &[f64],
    samples: &[f64],
    tol: f64,
) -> Result<DistributionDistance> {
    if eigs.len() != samples.len() {
        return Err(Error::LengthMismatch {
            left: eigs.len(),
            right: samples.len(),
        });
    }
    if eigs.is_empty() {
        return Ok(DistributionDistance {
            mean_abs: 0.0,
            max_abs: 0.0,
            outliers: 0,
        });
    }
    let mut sum = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut outliers = 0;
    for (a, b) in eigs.iter().zip(samples) {
        let d = (a - b).abs();
        sum += d;
        max_abs = max_abs.max(d);
        if d > tol {
            outliers += 1;
        }
    }
    Ok(DistributionDistance {
        mean_abs: sum / eigs.len() as f64,
        max_abs,
        outliers,
    })
}
