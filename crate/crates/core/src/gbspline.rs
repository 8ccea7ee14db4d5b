//! Polynomial and generalized (hyperbolic / trigonometric) B-splines on open
//! uniform knot vectors over [0, 1].
//!
//! On every element the degree-`k` GB-splines live in the space
//! `<1, t, ..., t^(k-2), u, v>` where `{u, v}` is `{cos, sin}` (trigonometric),
//! `{cosh, sinh}` (hyperbolic) or `{1, t}` shifted up two degrees (polynomial).
//! Each basis function is stored exactly, per element, in the local variable
//! `t ∈ [0, 1]` using the family
//!
//! ```text
//! w_0(t) = cos(φt) | cosh(φt) | 1,    w_{j+1}(t) = ∫_0^t w_j
//! ```
//!
//! so a degree-`k` piece is `Σ_j a_j t^j/j! + b w_{k-1} + c w_k`. The integral
//! recurrence
//!
//! ```text
//! N_{i,k}(x) = ∫_0^x N_{i,k-1}/μ_{i,k-1} - N_{i+1,k-1}/μ_{i+1,k-1}
//! ```
//!
//! then only shifts coefficient indices, and the `w_j` are evaluated by their
//! power series, which stays accurate as `φ → 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    elements: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn open_uniform(n: usize, p: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidKnots(format!(
                "need n >= 2 elements, got {n}"
            )));
        }
        if p < 1 {
            return Err(Error::InvalidKnots("need degree p >= 1".into()));
        }
        let nf = n as f64;
        let knots = (0..n + 2 * p + 1)
            .map(|j| {
                if j <= p {
                    0.0
                } else if j >= n + p {
                    1.0
                } else {
                    (j - p) as f64 / nf
                }
            })
            .collect();
        Ok(Self {
            degree: p,
            elements: n,
            knots,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn element_width(&self) -> f64 {
        1.0 / self.elements as f64
    }
}

pub fn make_knots(n: usize, p: usize) -> Result<KnotVector> {
    KnotVector::open_uniform(n, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    Polynomial,
    Hyperbolic,
    Trigonometric,
}

/// How the phase behaves under refinement: `Nested` keeps the global
/// frequency α (per-element phase α/n), `NonNested` scales the frequency with
/// n so every element sees phase α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Refinement {
    Nested,
    NonNested,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionSpace {
    pub kind: SpaceKind,
    pub alpha: f64,
    pub mode: Refinement,
}

impl SectionSpace {
    pub fn polynomial() -> Self {
        Self {
            kind: SpaceKind::Polynomial,
            alpha: 0.0,
            mode: Refinement::Nested,
        }
    }

    pub fn hyperbolic(alpha: f64, mode: Refinement) -> Self {
        Self {
            kind: SpaceKind::Hyperbolic,
            alpha,
            mode,
        }
    }

    pub fn trigonometric(alpha: f64, mode: Refinement) -> Self {
        Self {
            kind: SpaceKind::Trigonometric,
            alpha,
            mode,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.kind == SpaceKind::Polynomial
    }

    /// Per-element phase φ = ω·h for `n` elements.
    pub fn element_phase(&self, n: usize) -> f64 {
        match (self.kind, self.mode) {
            (SpaceKind::Polynomial, _) => 0.0,
            (_, Refinement::Nested) => self.alpha / n as f64,
            (_, Refinement::NonNested) => self.alpha,
        }
    }

    /// True when the symbols of this space do not depend on `n`.
    pub fn is_refinement_invariant(&self) -> bool {
        self.is_polynomial() || self.mode == Refinement::NonNested
    }

    /// Space with the same kind whose per-element phase is fixed at `phase`.
    pub fn with_fixed_phase(&self, phase: f64) -> Self {
        match self.kind {
            SpaceKind::Polynomial => *self,
            kind => Self {
                kind,
                alpha: phase,
                mode: Refinement::NonNested,
            },
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.is_polynomial() {
            return Ok(());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidSpace(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if self.kind == SpaceKind::Trigonometric {
            let phase = self.element_phase(n);
            if phase >= PI {
                return Err(Error::PhaseConstraint {
                    alpha: self.alpha,
                    n,
                    phase,
                    min_n: (self.alpha / PI).floor() as usize + 1,
                });
            }
        }
        Ok(())
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            SpaceKind::Polynomial => "poly",
            SpaceKind::Hyperbolic => "hyp",
            SpaceKind::Trigonometric => "trig",
        }
    }

    pub fn mode_label(&self) -> &'static str {
        match (self.kind, self.mode) {
            (SpaceKind::Polynomial, _) => "-",
            (_, Refinement::Nested) => "nested",
            (_, Refinement::NonNested) => "nonnested",
        }
    }
}

impl fmt::Display for SectionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Polynomial => write!(f, "poly"),
            _ => write!(
                f,
                "{}:{}:{}",
                self.kind_label(),
                self.alpha,
                self.mode_label()
            ),
        }
    }
}

impl FromStr for SectionSpace {
    type Err = Error;

    /// Parses `poly`, `hyp:ALPHA[:MODE]` or `trig:ALPHA[:MODE]` with MODE one
    /// of `nested` (default) or `nonnested`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let bad = || Error::InvalidSpace(format!("cannot parse space spec '{s}'"));
        let kind = match parts[0].to_ascii_lowercase().as_str() {
            "poly" | "polynomial" => {
                if parts.len() > 1 {
                    return Err(bad());
                }
                return Ok(Self::polynomial());
            }
            "hyp" | "hyperbolic" => SpaceKind::Hyperbolic,
            "trig" | "trigonometric" => SpaceKind::Trigonometric,
            _ => return Err(bad()),
        };
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let alpha: f64 = parts[1].parse().map_err(|_| bad())?;
        let mode = match parts.get(2).map(|m| m.to_ascii_lowercase()) {
            None => Refinement::Nested,
            Some(m) if m == "nested" => Refinement::Nested,
            Some(m) if m == "nonnested" || m == "non-nested" => Refinement::NonNested,
            Some(_) => return Err(bad()),
        };
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidSpace(format!(
                "alpha must be positive and finite in '{s}'"
            )));
        }
        Ok(Self { kind, alpha, mode })
    }
}

/// The element-local function family `w_j` for a fixed phase.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Family {
    /// `w_0'' = lambda * w_0`.
    lambda: f64,
}

impl Family {
    fn new(kind: SpaceKind, phase: f64) -> Self {
        let lambda = match kind {
            SpaceKind::Polynomial => 0.0,
            SpaceKind::Hyperbolic => phase * phase,
            SpaceKind::Trigonometric => -phase * phase,
        };
        Self { lambda }
    }

    /// `w_j(t) = Σ_m λ^m t^(j+2m) / (j+2m)!`
    fn w(&self, j: usize, t: f64) -> f64 {
        let mut term = t.powi(j as i32) / factorial(j);
        let x = self.lambda * t * t;
        if term == 0.0 || x == 0.0 {
            return term;
        }
        let mut sum = term;
        let mut m = j;
        for _ in 0..500 {
            let a = (m + 1) as f64;
            let b = (m + 2) as f64;
            term *= x / (a * b);
            sum += term;
            m += 2;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    }

    fn w_deriv(&self, j: usize, order: usize, t: f64) -> f64 {
        if order <= j {
            return self.w(j - order, t);
        }
        let r = order - j;
        if r.is_multiple_of(2) {
            self.lambda.powi((r / 2) as i32) * self.w(0, t)
        } else {
            self.lambda.powi(r.div_ceil(2) as i32) * self.w(1, t)
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// One element's restriction of a degree-`k` function:
/// `Σ_{j<k-1} poly[j] t^j/j! + top[0] w_{k-1}(t) + top[1] w_k(t)`.
#[derive(Debug, Clone, PartialEq)]
struct Piece {
    poly: Vec<f64>,
    top: [f64; 2],
}

impl Piece {
    fn degree(&self) -> usize {
        self.poly.len() + 1
    }

    fn constant(degree: usize, c: f64) -> Self {
        debug_assert!(degree >= 2);
        let mut poly = vec![0.0; degree - 1];
        poly[0] = c;
        Self {
            poly,
            top: [0.0, 0.0],
        }
    }

    fn eval(&self, fam: &Family, t: f64, order: usize) -> f64 {
        let k = self.degree();
        let mut v = 0.0;
        for (j, &c) in self.poly.iter().enumerate() {
            if j >= order && c != 0.0 {
                let e = j - order;
                v += c * t.powi(e as i32) / factorial(e);
            }
        }
        if self.top[0] != 0.0 {
            v += self.top[0] * fam.w_deriv(k - 1, order, t);
        }
        if self.top[1] != 0.0 {
            v += self.top[1] * fam.w_deriv(k, order, t);
        }
        v
    }

    /// `∫_0^t` of this piece, one degree higher.
    fn antiderivative(&self) -> Piece {
        let mut poly = Vec::with_capacity(self.poly.len() + 1);
        poly.push(0.0);
        poly.extend_from_slice(&self.poly);
        Piece {
            poly,
            top: self.top,
        }
    }

    fn scaled(mut self, s: f64) -> Piece {
        self.poly.iter_mut().for_each(|c| *c *= s);
        self.top[0] *= s;
        self.top[1] *= s;
        self
    }

    fn minus(&self, other: &Piece) -> Piece {
        debug_assert_eq!(self.degree(), other.degree());
        Piece {
            poly: self
                .poly
                .iter()
                .zip(&other.poly)
                .map(|(a, b)| a - b)
                .collect(),
            top: [self.top[0] - other.top[0], self.top[1] - other.top[1]],
        }
    }
}

/// A basis function given by its pieces on consecutive elements starting at
/// `first`; identically zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
struct LocalSpline {
    first: usize,
    pieces: Vec<Piece>,
}

impl LocalSpline {
    fn piece(&self, e: usize) -> Option<&Piece> {
        e.checked_sub(self.first).and_then(|k| self.pieces.get(k))
    }
}

/// GB-spline basis `N_{1,p}, ..., N_{n+p,p}` (stored 0-based).
///
/// Immutable after construction; `Sync`, so one basis can be shared between
/// threads evaluating it.
#[derive(Debug, Clone)]
pub struct GBSplineBasis {
    knots: KnotVector,
    space: SectionSpace,
    family: Family,
    funcs: Vec<LocalSpline>,
}

pub fn build_basis(knots: KnotVector, space: SectionSpace) -> Result<GBSplineBasis> {
    GBSplineBasis::new(knots, space)
}

impl GBSplineBasis {
    pub fn new(knots: KnotVector, space: SectionSpace) -> Result<Self> {
        let n = knots.elements();
        let p = knots.degree();
        space.validate(n)?;
        let family = Family::new(space.kind, space.element_phase(n));
        let mut funcs = degree_one(n, p, &family);
        for k in 2..=p {
            funcs = raise_degree(&funcs, k, n, p, &family);
        }
        debug_assert_eq!(funcs.len(), n + p);
        Ok(Self {
            knots,
            space,
            family,
            funcs,
        })
    }

    /// Convenience constructor from element count and degree.
    pub fn uniform(n: usize, p: usize, space: SectionSpace) -> Result<Self> {
        Self::new(KnotVector::open_uniform(n, p)?, space)
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn space(&self) -> SectionSpace {
        self.space
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn elements(&self) -> usize {
        self.knots.elements()
    }

    /// Number of basis functions, `n + p`.
    pub fn dim(&self) -> usize {
        self.funcs.len()
    }

    /// Closed support `[knots[i], knots[i+p+1]]` of the 0-based function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        let k = self.knots.knots();
        (k[i], k[i + self.degree() + 1])
    }

    /// Element containing `x` and the local coordinate in it; `x = 1` belongs
    /// to the last element.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.elements();
        let s = x * n as f64;
        let e = (s.floor() as usize).min(n - 1);
        (e, s - e as f64)
    }

    /// Local `d`-th derivatives (with respect to the local coordinate `t`) of
    /// the `p + 1` functions `e, ..., e + p` that are active on element `e`.
    pub fn local_values(&self, e: usize, t: f64, d: usize, out: &mut [f64]) {
        let p = self.degree();
        for (a, slot) in out.iter_mut().enumerate().take(p + 1) {
            *slot = self.funcs[e + a]
                .piece(e)
                .map_or(0.0, |piece| piece.eval(&self.family, t, d));
        }
    }

    /// Values (`d = 0`) or physical derivatives (`d = 1, 2`) of all `n + p`
    /// basis functions at `x`.
    pub fn eval_basis(&self, x: f64, d: usize) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        let (e, t) = self.locate(x);
        self.eval_in_element(e, t, d)
    }

    /// Like [`eval_basis`](Self::eval_basis) but evaluated with the pieces of
    /// element `e` at local coordinate `t`; at a knot this gives one-sided
    /// values.
    pub fn eval_in_element(&self, e: usize, t: f64, d: usize) -> Result<Vec<f64>> {
        if d > 2 {
            return Err(Error::DerivativeOrder(d));
        }
        let p = self.degree();
        let scale = (self.elements() as f64).powi(d as i32);
        let mut local = vec![0.0; p + 1];
        self.local_values(e, t, d, &mut local);
        let mut out = vec![0.0; self.dim()];
        for (a, v) in local.into_iter().enumerate() {
            out[e + a] = v * scale;
        }
        Ok(out)
    }
}

fn degree_one(n: usize, p: usize, fam: &Family) -> Vec<LocalSpline> {
    let w0 = fam.w(0, 1.0);
    let w1 = fam.w(1, 1.0);
    // u(t) = sin(φt)/sin(φ), v(t) = sin(φ(1-t))/sin(φ) and analogues
    let rising = Piece {
        poly: Vec::new(),
        top: [0.0, 1.0 / w1],
    };
    let falling = Piece {
        poly: Vec::new(),
        top: [1.0, -w0 / w1],
    };
    let in_range = |interval: usize| interval >= p && interval - p < n;
    (0..n + 2 * p - 1)
        .map(|i| {
            let mut first = None;
            let mut pieces = Vec::new();
            if in_range(i) {
                first = Some(i - p);
                pieces.push(rising.clone());
            }
            if in_range(i + 1) {
                first.get_or_insert(i + 1 - p);
                pieces.push(falling.clone());
            }
            LocalSpline {
                first: first.unwrap_or(0),
                pieces,
            }
        })
        .collect()
}

/// Normalized cumulative integral `G_i(x) = ∫_0^x N_{i,k-1} / μ_{i,k-1}`.
struct Cumulative<'a> {
    source: &'a LocalSpline,
    /// Heaviside value when the source has empty support.
    step: f64,
    prefix: Vec<f64>,
    inv_mu: f64,
}

impl<'a> Cumulative<'a> {
    fn new(index: usize, source: &'a LocalSpline, p: usize, fam: &Family) -> Self {
        let mut prefix = Vec::with_capacity(source.pieces.len());
        let mut acc = 0.0;
        for piece in &source.pieces {
            prefix.push(acc);
            acc += piece.antiderivative().eval(fam, 1.0, 0);
        }
        Self {
            source,
            // empty support sits at x = 0 when all its knots precede the first element
            step: if index < p { 1.0 } else { 0.0 },
            prefix,
            inv_mu: if acc != 0.0 { 1.0 / acc } else { 0.0 },
        }
    }

    fn piece(&self, e: usize, degree: usize) -> Piece {
        if self.source.pieces.is_empty() {
            return Piece::constant(degree, self.step);
        }
        let first = self.source.first;
        let last = first + self.source.pieces.len() - 1;
        if e < first {
            Piece::constant(degree, 0.0)
        } else if e > last {
            Piece::constant(degree, 1.0)
        } else {
            let k = e - first;
            let mut g = self.source.pieces[k].antiderivative().scaled(self.inv_mu);
            g.poly[0] += self.prefix[k] * self.inv_mu;
            g
        }
    }
}

fn raise_degree(
    prev: &[LocalSpline],
    k: usize,
    n: usize,
    p: usize,
    fam: &Family,
) -> Vec<LocalSpline> {
    let cumulative: Vec<Cumulative> = prev
        .iter()
        .enumerate()
        .map(|(i, s)| Cumulative::new(i, s, p, fam))
        .collect();
    (0..prev.len() - 1)
        .map(|i| {
            // N_{i,k} covers knot intervals i..=i+k
            let lo = i.max(p);
            let hi = (i + k).min(p + n - 1);
            if lo > hi {
                return LocalSpline {
                    first: 0,
                    pieces: Vec::new(),
                };
            }
            let pieces = (lo - p..=hi - p)
                .map(|e| {
                    cumulative[i]
                        .piece(e, k)
                        .minus(&cumulative[i + 1].piece(e, k))
                })
                .collect();
            LocalSpline {
                first: lo - p,
                pieces,
            }
        })
        .collect()
}

/// Sampled extremes of `N^Q_{i,p}(x) / N_{i,p}(x)` over the interior functions
/// `i = 2..n+p-1` (1-based) and `grid_size` points per element, skipping points
/// within 1e-6 of a knot and points where the polynomial value is below 1e-14.
pub fn ratio_bounds(
    p: usize,
    space: SectionSpace,
    n: usize,
    grid_size: usize,
) -> Result<(f64, f64)> {
    let generalized = GBSplineBasis::uniform(n, p, space)?;
    let polynomial = GBSplineBasis::uniform(n, p, SectionSpace::polynomial())?;
    let dim = generalized.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut gq = vec![0.0; p + 1];
    let mut gp = vec![0.0; p + 1];
    let knot_guard = 1e-6 * n as f64;
    for e in 0..n {
        for j in 0..grid_size {
            let t = (j as f64 + 0.5) / grid_size as f64;
            if t < knot_guard || 1.0 - t < knot_guard {
                continue;
            }
            generalized.local_values(e, t, 0, &mut gq);
            polynomial.local_values(e, t, 0, &mut gp);
            for a in 0..=p {
                let i = e + a;
                if i == 0 || i == dim - 1 || gp[a] < 1e-14 {
                    continue;
                }
                let r = gq[a] / gp[a];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    if lo.is_finite() && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(Error::NoRatioSamples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spaces() -> Vec<SectionSpace> {
        vec![
            SectionSpace::polynomial(),
            SectionSpace::hyperbolic(1.0, Refinement::Nested),
            SectionSpace::hyperbolic(1.0, Refinement::NonNested),
            SectionSpace::trigonometric(1.0, Refinement::Nested),
            SectionSpace::trigonometric(1.0, Refinement::NonNested),
        ]
    }

    #[test]
    fn knots_examples() {
        assert_eq!(
            make_knots(2, 1).unwrap().knots(),
            &[0.0, 0.0, 0.5, 1.0, 1.0]
        );
        assert_eq!(
            make_knots(4, 2).unwrap().knots(),
            &[0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]
        );
        assert!(make_knots(1, 2).is_err());
        assert!(make_knots(4, 0).is_err());
    }

    #[test]
    fn knot_vector_invariants() {
        for n in 2..10 {
            for p in 1..5 {
                let kv = make_knots(n, p).unwrap();
                let k = kv.knots();
                assert_eq!(k.len(), n + 2 * p + 1);
                assert!(k[..=p].iter().all(|&v| v == 0.0));
                assert!(k[n + p..].iter().all(|&v| v == 1.0));
                assert!(k[p..=n + p].windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn family_matches_closed_forms() {
        let phi = 0.7;
        let trig = Family::new(SpaceKind::Trigonometric, phi);
        let hyp = Family::new(SpaceKind::Hyperbolic, phi);
        for &t in &[0.0, 0.3, 1.0] {
            let x: f64 = phi * t;
            assert!((trig.w(0, t) - x.cos()).abs() < 1e-15);
            assert!((trig.w(1, t) - x.sin() / phi).abs() < 1e-15);
            assert!((trig.w(2, t) - (1.0 - x.cos()) / (phi * phi)).abs() < 1e-14);
            assert!((hyp.w(0, t) - x.cosh()).abs() < 1e-15);
            assert!((hyp.w(3, t) - (x.sinh() / phi - t) / (phi * phi)).abs() < 1e-14);
            assert!((trig.w_deriv(0, 1, t) + phi * x.sin()).abs() < 1e-15);
            assert!((trig.w_deriv(1, 3, t) + phi * phi * x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn hat_function_midpoint() {
        let basis = GBSplineBasis::uniform(2, 1, SectionSpace::polynomial()).unwrap();
        let v = basis.eval_basis(0.25, 0).unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[0] - 0.5).abs() < 1e-15);
        assert!((v[1] - 0.5).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn dimension_and_phase_checks() {
        let b = GBSplineBasis::uniform(8, 2, SectionSpace::polynomial()).unwrap();
        assert_eq!(b.dim(), 10);
        let trig = SectionSpace::trigonometric(PI / 2.0, Refinement::Nested);
        assert!((trig.element_phase(8) - PI / 16.0).abs() < 1e-15);
        assert!(GBSplineBasis::uniform(8, 2, trig).is_ok());

        let err = GBSplineBasis::uniform(
            2,
            2,
            SectionSpace::trigonometric(4.0 * PI, Refinement::Nested),
        )
        .unwrap_err();
        match err {
            Error::PhaseConstraint { min_n, .. } => assert_eq!(min_n, 5),
            other => panic!("unexpected error {other}"),
        }
        assert!(SectionSpace::trigonometric(4.0, Refinement::NonNested)
            .validate(100)
            .is_err());
        assert!(SectionSpace::trigonometric(3.0, Refinement::NonNested)
            .validate(2)
            .is_ok());
    }

    #[test]
    fn rejects_bad_evaluation_requests() {
        let b = GBSplineBasis::uniform(4, 2, SectionSpace::polynomial()).unwrap();
        assert!(matches!(b.eval_basis(-0.1, 0), Err(Error::OutOfDomain(_))));
        assert!(matches!(b.eval_basis(1.5, 0), Err(Error::OutOfDomain(_))));
        assert!(matches!(
            b.eval_basis(0.5, 3),
            Err(Error::DerivativeOrder(3))
        ));
    }

    #[test]
    fn partition_of_unity_and_locality() {
        for space in spaces() {
            for p in 2..=4 {
                let b = GBSplineBasis::uniform(9, p, space).unwrap();
                for k in 0..=200 {
                    let x = k as f64 / 200.0;
                    let v = b.eval_basis(x, 0).unwrap();
                    let s: f64 = v.iter().sum();
                    assert!((s - 1.0).abs() < 1e-12, "{space} p={p} x={x} sum={s}");
                    assert!(v.iter().filter(|&&y| y != 0.0).count() <= p + 1);
                    assert!(v.iter().all(|&y| y >= -1e-14));
                }
            }
        }
    }

    #[test]
    fn derivatives_sum_to_zero() {
        for space in spaces() {
            let b = GBSplineBasis::uniform(7, 3, space).unwrap();
            for k in 0..=50 {
                let x = k as f64 / 50.0;
                for d in 1..=2 {
                    let s: f64 = b.eval_basis(x, d).unwrap().iter().sum();
                    assert!(s.abs() < 1e-9, "{space} d={d} x={x} sum={s}");
                }
            }
        }
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let space = SectionSpace::trigonometric(1.0, Refinement::NonNested);
        let b = GBSplineBasis::uniform(6, 3, space).unwrap();
        let x = 0.37;
        let h = 1e-6;
        let d1 = b.eval_basis(x, 1).unwrap();
        let fp = b.eval_basis(x + h, 0).unwrap();
        let fm = b.eval_basis(x - h, 0).unwrap();
        for i in 0..b.dim() {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            assert!((fd - d1[i]).abs() < 1e-6, "i={i}");
        }
    }

    #[test]
    fn ratio_bounds_polynomial_is_identity() {
        let (lo, hi) = ratio_bounds(3, SectionSpace::polynomial(), 8, 16).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
    }

    #[test]
    fn space_spec_round_trip() {
        for s in ["poly", "hyp:1:nonnested", "trig:0.5:nested"] {
            let space: SectionSpace = s.parse().unwrap();
            assert_eq!(space.to_string(), s);
        }
        let t: SectionSpace = "trig:1.0".parse().unwrap();
        assert_eq!(t.mode, Refinement::Nested);
        assert!("trig".parse::<SectionSpace>().is_err());
        assert!("trig:-1:nested".parse::<SectionSpace>().is_err());
        assert!("poly:1".parse::<SectionSpace>().is_err());
        assert!("cubic:1:nested".parse::<SectionSpace>().is_err());
    }
}
