//! Galerkin matrices on the interior basis functions `N_2, ..., N_{n+p-1}`
//! (homogeneous Dirichlet conditions).
//!
//! Normalization: `M = n·mass`, `K = stiffness/n`, `H = advection`, so the 1D
//! system matrix of `-u'' + βu' + γu` is `A = nK + βH + (γ/n)M` and the interior
//! rows of `M` and `K` do not depend on `n`.

use crate::error::{Error, Result};
use crate::gbspline::{GBSplineBasis, SectionSpace};
use crate::quadrature::GaussRule;
use crate::spectral;
use crate::toeplitz::{kron, toeplitz_parts, TwoLevelSymbol};
use crate::Matrix;

/// Absolute entrywise tolerance for the quadrature refinement check.
pub const QUADRATURE_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct GalerkinSet1D {
    pub mass: Matrix,
    pub stiffness: Matrix,
    pub advection: Matrix,
    basis: GBSplineBasis,
    quad_nodes: usize,
}

impl GalerkinSet1D {
    pub fn basis(&self) -> &GBSplineBasis {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.elements()
    }

    pub fn p(&self) -> usize {
        self.basis.degree()
    }

    /// Matrix size `n + p - 2`.
    pub fn size(&self) -> usize {
        self.mass.nrows()
    }

    /// Gauss nodes per element that passed the refinement check.
    pub fn quad_nodes(&self) -> usize {
        self.quad_nodes
    }
}

struct Raw {
    mass: Matrix,
    stiffness: Matrix,
    advection: Matrix,
}

fn assemble_raw(basis: &GBSplineBasis, q: usize) -> Raw {
    let n = basis.elements();
    let p = basis.degree();
    let dim = basis.dim();
    let m = dim - 2;
    let rule = GaussRule::new(q);
    let mut mass = Matrix::zeros(m, m);
    let mut stiffness = Matrix::zeros(m, m);
    let mut advection = Matrix::zeros(m, m);
    let mut val = vec![0.0; p + 1];
    let mut der = vec![0.0; p + 1];
    // element width h and the normalizations cancel: n·h = 1, so in local
    // derivatives all three matrices are plain weighted sums
    for e in 0..n {
        for (t, w) in rule.iter() {
            basis.local_values(e, t, 0, &mut val);
            basis.local_values(e, t, 1, &mut der);
            for a in 0..=p {
                let ia = e + a;
                if ia == 0 || ia == dim - 1 {
                    continue;
                }
                for b in 0..=p {
                    let ib = e + b;
                    if ib == 0 || ib == dim - 1 {
                        continue;
                    }
                    let (r, c) = (ia - 1, ib - 1);
                    mass[(r, c)] += w * val[a] * val[b];
                    stiffness[(r, c)] += w * der[a] * der[b];
                    advection[(r, c)] += w * der[b] * val[a];
                }
            }
        }
    }
    Raw {
        mass,
        stiffness,
        advection,
    }
}

fn max_disagreement(a: &Raw, b: &Raw) -> (f64, &'static str, usize, usize) {
    let mut worst = (0.0, "M", 0, 0);
    for (name, x, y) in [
        ("M", &a.mass, &b.mass),
        ("K", &a.stiffness, &b.stiffness),
        ("H", &a.advection, &b.advection),
    ] {
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                let d = (x[(i, j)] - y[(i, j)]).abs();
                if d > worst.0 {
                    worst = (d, name, i, j);
                }
            }
        }
    }
    worst
}

/// Assembles the normalized `M`, `K`, `H` of a basis with per-element Gauss
/// quadrature: `q = p + 3` nodes checked against `q + 2`, with one doubling
/// before giving up.
pub fn assemble_1d(basis: GBSplineBasis) -> Result<GalerkinSet1D> {
    let q0 = basis.degree() + 3;
    let mut last = (0.0, "M", 0, 0);
    for q in [q0, 2 * q0] {
        let coarse = assemble_raw(&basis, q);
        let fine = assemble_raw(&basis, q + 2);
        last = max_disagreement(&coarse, &fine);
        if last.0 <= QUADRATURE_TOL {
            return Ok(GalerkinSet1D {
                mass: fine.mass,
                stiffness: fine.stiffness,
                advection: fine.advection,
                basis,
                quad_nodes: q + 2,
            });
        }
    }
    let (diff, matrix, row, col) = last;
    Err(Error::QuadratureNotConverged {
        matrix,
        row,
        col,
        diff,
    })
}

/// `A = nK + βH + (γ/n)M`.
pub fn assemble_a_1d(set: &GalerkinSet1D, beta: f64, gamma: f64) -> Result<Matrix> {
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    let n = set.n() as f64;
    Ok(&set.stiffness * n + &set.advection * beta + &set.mass * (gamma / n))
}

/// One coordinate direction of a tensor-product discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub n: usize,
    pub p: usize,
    pub space: SectionSpace,
}

impl Direction {
    pub fn new(n: usize, p: usize, space: SectionSpace) -> Self {
        Self { n, p, space }
    }

    pub fn basis(&self) -> Result<GBSplineBasis> {
        GBSplineBasis::uniform(self.n, self.p, self.space)
    }

    pub fn size(&self) -> usize {
        self.n + self.p - 2
    }
}

/// Tensor-product matrices on `(0,1)^2`; unknown `(i, j)` (x-index `i`,
/// y-index `j`, both 0-based) sits at flat index `j·m_x + i`.
#[derive(Debug, Clone)]
pub struct GalerkinSet2D {
    pub x: GalerkinSet1D,
    pub y: GalerkinSet1D,
    pub beta: [f64; 2],
    pub gamma: f64,
    pub a: Matrix,
}

impl GalerkinSet2D {
    /// `ν = n_y / n_x`.
    pub fn nu(&self) -> f64 {
        self.y.n() as f64 / self.x.n() as f64
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    /// `M_y ⊗ K_x`
    pub fn k_hat(&self) -> Matrix {
        kron(&self.y.mass, &self.x.stiffness)
    }

    /// `K_y ⊗ M_x`
    pub fn k_tilde(&self) -> Matrix {
        kron(&self.y.stiffness, &self.x.mass)
    }

    /// `M_y ⊗ H_x`
    pub fn h_hat(&self) -> Matrix {
        kron(&self.y.mass, &self.x.advection)
    }

    /// `H_y ⊗ M_x`
    pub fn h_tilde(&self) -> Matrix {
        kron(&self.y.advection, &self.x.mass)
    }

    /// `M_y ⊗ M_x`
    pub fn mass(&self) -> Matrix {
        kron(&self.y.mass, &self.x.mass)
    }

    /// Recombines the stored factors into the system matrix.
    pub fn combine(&self) -> Matrix {
        let n1 = self.x.n() as f64;
        let n2 = self.y.n() as f64;
        self.k_hat() * (n1 / n2)
            + self.k_tilde() * (n2 / n1)
            + self.h_hat() * (self.beta[0] / n2)
            + self.h_tilde() * (self.beta[1] / n1)
            + self.mass() * (self.gamma / (n1 * n2))
    }
}

/// System matrix of `-Δu + β·∇u + γu` as a combination of Kronecker products
/// of the 1D factors.
pub fn assemble_2d_tensor(
    x: Direction,
    y: Direction,
    beta: [f64; 2],
    gamma: f64,
) -> Result<GalerkinSet2D> {
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    let sx = assemble_1d(x.basis()?)?;
    let sy = assemble_1d(y.basis()?)?;
    let mut set = GalerkinSet2D {
        x: sx,
        y: sy,
        beta,
        gamma,
        a: Matrix::zeros(0, 0),
    };
    set.a = set.combine();
    Ok(set)
}

/// Oracle for [`assemble_2d_tensor`]: integrates the bilinear form
/// `∫∇u·∇v + β·∇u v + γuv` directly with a tensor Gauss rule on each element
/// rectangle. The per-direction rules are the ones the 1D assembly settled on.
pub fn assemble_2d_direct(
    x: Direction,
    y: Direction,
    beta: [f64; 2],
    gamma: f64,
) -> Result<Matrix> {
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    let bx = x.basis()?;
    let by = y.basis()?;
    let qx = assemble_1d(bx.clone())?.quad_nodes();
    let qy = assemble_1d(by.clone())?.quad_nodes();
    let rx = GaussRule::new(qx);
    let ry = GaussRule::new(qy);
    let (n1, p1, d1) = (bx.elements(), bx.degree(), bx.dim());
    let (n2, p2, d2) = (by.elements(), by.degree(), by.dim());
    let (hx, hy) = (1.0 / n1 as f64, 1.0 / n2 as f64);
    let m1 = d1 - 2;
    let size = m1 * (d2 - 2);
    let mut a = Matrix::zeros(size, size);

    // per-direction tables: [element][node] -> (values, physical derivatives)
    let table = |basis: &GBSplineBasis, rule: &GaussRule| -> Vec<Vec<(Vec<f64>, Vec<f64>)>> {
        let p = basis.degree();
        let scale = basis.elements() as f64;
        (0..basis.elements())
            .map(|e| {
                rule.nodes
                    .iter()
                    .map(|&t| {
                        let mut v = vec![0.0; p + 1];
                        let mut d = vec![0.0; p + 1];
                        basis.local_values(e, t, 0, &mut v);
                        basis.local_values(e, t, 1, &mut d);
                        d.iter_mut().for_each(|z| *z *= scale);
                        (v, d)
                    })
                    .collect()
            })
            .collect()
    };
    let tx = table(&bx, &rx);
    let ty = table(&by, &ry);
    let interior = |i: usize, dim: usize| (i > 0 && i < dim - 1).then(|| i - 1);

    for (ey, ty_e) in ty.iter().enumerate() {
        for (ex, tx_e) in tx.iter().enumerate() {
            for (ky, &wy) in ry.weights.iter().enumerate() {
                let (vy, dy) = &ty_e[ky];
                for (kx, &wx) in rx.weights.iter().enumerate() {
                    let (vx, dx) = &tx_e[kx];
                    let w = wx * wy * hx * hy;
                    for ay in 0..=p2 {
                        let Some(jy) = interior(ey + ay, d2) else {
                            continue;
                        };
                        for ax in 0..=p1 {
                            let Some(ix) = interior(ex + ax, d1) else {
                                continue;
                            };
                            let row = jy * m1 + ix;
                            // test function v = φ_row
                            let v = vx[ax] * vy[ay];
                            let vdx = dx[ax] * vy[ay];
                            let vdy = vx[ax] * dy[ay];
                            for by_ in 0..=p2 {
                                let Some(jb) = interior(ey + by_, d2) else {
                                    continue;
                                };
                                for bx_ in 0..=p1 {
                                    let Some(ib) = interior(ex + bx_, d1) else {
                                        continue;
                                    };
                                    let col = jb * m1 + ib;
                                    // trial function u = φ_col
                                    let u = vx[bx_] * vy[by_];
                                    let udx = dx[bx_] * vy[by_];
                                    let udy = vx[bx_] * dy[by_];
                                    a[(row, col)] += w
                                        * (udx * vdx
                                            + udy * vdy
                                            + beta[0] * udx * v
                                            + beta[1] * udy * v
                                            + gamma * u * v);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(a)
}

/// Relative tolerance for the numerical rank of the remainder.
pub const RANK_TOL: f64 = 1e-10;

/// Splitting of `(1/ν)K̂ + νK̃` into its two-level Toeplitz part and a
/// low-rank remainder.
#[derive(Debug, Clone)]
pub struct Decomposition2D {
    /// `(1/ν)(C_y ⊗ B_x) + ν(B_y ⊗ C_x)`
    pub b: Matrix,
    /// `(1/ν)K̂ + νK̃ - B`
    pub r: Matrix,
    pub rank: usize,
    pub norm2: f64,
    /// `m_y(4p_x-2) + (4p_y-2)m_x + (4p_y-2)(4p_x-2)`
    pub rank_bound: usize,
    pub symbol: TwoLevelSymbol,
}

pub fn decompose_2d(set: &GalerkinSet2D, nu: f64) -> Result<Decomposition2D> {
    let stored = set.nu();
    if (stored - nu).abs() > 1e-12 * nu.abs().max(1.0) {
        return Err(Error::NuMismatch {
            stored,
            requested: nu,
        });
    }
    for dir in [&set.x, &set.y] {
        if dir.n() < 3 * dir.p() + 1 {
            return Err(Error::SymbolPrecondition {
                p: dir.p(),
                n: dir.n(),
            });
        }
    }
    let px = toeplitz_parts(&set.x)?;
    let py = toeplitz_parts(&set.y)?;
    let b = kron(&py.c, &px.b) / nu + kron(&py.b, &px.c) * nu;
    let k = set.k_hat() / nu + set.k_tilde() * nu;
    let scale = k.amax();
    let r = k - &b;
    let (rank, norm2) = symmetric_rank_and_norm(&r, scale, RANK_TOL)?;
    let (mx, my) = (set.x.size(), set.y.size());
    let (fx, fy) = (4 * set.x.p() - 2, 4 * set.y.p() - 2);
    Ok(Decomposition2D {
        b,
        r,
        rank,
        norm2,
        rank_bound: my * fx + fy * mx + fy * fx,
        symbol: TwoLevelSymbol {
            fx: px.f,
            hx: px.h,
            fy: py.f,
            hy: py.h,
            nu,
        },
    })
}

/// Numerical rank and spectral norm of a symmetric matrix whose nonzeros are
/// confined to a few rows and columns. Rows whose entries are all below
/// `1e-14·scale` (roundoff relative to the matrix `r` was split from) are
/// dropped; the rest is a principal submatrix carrying the whole nonzero
/// spectrum.
fn symmetric_rank_and_norm(r: &Matrix, scale: f64, rel_tol: f64) -> Result<(usize, f64)> {
    let keep: Vec<usize> = (0..r.nrows())
        .filter(|&i| r.row(i).amax() > 1e-14 * scale)
        .collect();
    if keep.is_empty() {
        return Ok((0, 0.0));
    }
    let sub = r.select_rows(&keep).select_columns(&keep);
    let spec = spectral::sym_eigs(&sub)?;
    let norm = spec.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rank = spec
        .values
        .iter()
        .filter(|v| v.abs() > rel_tol * norm)
        .count();
    Ok((rank, norm))
}
