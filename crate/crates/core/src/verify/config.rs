//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! p = 2, 3
//! n = 16, 32, 64
//! spaces = poly, hyp:1:nonnested, trig:1:nested, trig:1:nonnested
//! checks = mineig, eq10
//! out = results
//! tol.parter = 0.05
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gbspline::{Refinement, SectionSpace};

pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Mineig,
    Eq10,
    Conditioning,
    Parter,
    Toeplitz,
    Specdist,
    Assembly2d,
    Decomposition2d,
    Distribution2d,
    RatioBounds,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::Mineig,
        CheckKind::Eq10,
        CheckKind::Conditioning,
        CheckKind::Parter,
        CheckKind::Toeplitz,
        CheckKind::Specdist,
        CheckKind::Assembly2d,
        CheckKind::Decomposition2d,
        CheckKind::Distribution2d,
        CheckKind::RatioBounds,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Mineig => "mineig",
            CheckKind::Eq10 => "eq10",
            CheckKind::Conditioning => "conditioning",
            CheckKind::Parter => "parter",
            CheckKind::Toeplitz => "toeplitz",
            CheckKind::Specdist => "specdist",
            CheckKind::Assembly2d => "2d-assembly",
            CheckKind::Decomposition2d => "2d-decomposition",
            CheckKind::Distribution2d => "2d-distribution",
            CheckKind::RatioBounds => "ratio-bounds",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| {
                let known: Vec<&str> = CheckKind::ALL.iter().map(|c| c.name()).collect();
                Error::Config(format!("unknown check `{s}` (known: {})", known.join(", ")))
            })
    }
}

/// Thresholds of the empirical checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max `|n²λ_j/(j²π²) - 1|` at the largest `n`.
    pub parter: f64,
    /// Max spread (max/min) of `κ₂(A)/n²`.
    pub conditioning_spread: f64,
    /// Relative Frobenius distance between tensor and direct 2D assembly.
    pub assembly: f64,
    /// Max ratio of `‖R‖₂` between consecutive `n₁`.
    pub norm_ratio: f64,
    /// Outlier level as a fraction of `max g`.
    pub outlier_level: f64,
    /// Max outlier count as a fraction of the matrix size.
    pub outlier_fraction: f64,
    /// Kronecker property tests.
    pub kronecker: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            parter: 0.05,
            conditioning_spread: 2.0,
            assembly: 1e-12,
            norm_ratio: 1.1,
            outlier_level: 0.2,
            outlier_fraction: 0.1,
            kronecker: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub p: Vec<usize>,
    pub n: Vec<usize>,
    pub spaces: Vec<SectionSpace>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// `n₂ = ν n₁` in the 2D checks.
    pub nu: Vec<usize>,
    /// `(p₁, p₂)` pairs of the 2D checks.
    pub p2d: Vec<(usize, usize)>,
    pub n1_2d: Vec<usize>,
    pub parter_j: Vec<usize>,
    pub conditioning_n: Vec<usize>,
    pub checks: Vec<CheckKind>,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    /// Random cases in the Toeplitz property checks.
    pub property_cases: usize,
    /// Record wall time in the `ms` column (otherwise 0, keeping the report
    /// reproducible byte for byte).
    pub timings: bool,
    pub tol: Tolerances,
}

pub fn default_spaces() -> Vec<SectionSpace> {
    vec![
        SectionSpace::polynomial(),
        SectionSpace::hyperbolic(1.0, Refinement::NonNested),
        SectionSpace::trigonometric(1.0, Refinement::Nested),
        SectionSpace::trigonometric(1.0, Refinement::NonNested),
    ]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: vec![2, 3],
            n: vec![16, 32, 64],
            spaces: default_spaces(),
            beta: vec![0.0, 1.0],
            gamma: vec![0.0, 1.0],
            nu: vec![1, 2],
            p2d: vec![(1, 1), (2, 2), (1, 2)],
            n1_2d: vec![8, 16, 24],
            parter_j: vec![1, 2, 3],
            conditioning_n: vec![16, 32, 64, 128],
            checks: CheckKind::ALL.to_vec(),
            out: PathBuf::from("gbspectra-out"),
            seed: DEFAULT_SEED,
            jobs: None,
            property_cases: 100,
            timings: false,
            tol: Tolerances::default(),
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse `{s}`")))
        })
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{}`", value.trim())))
}

/// Accepts decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(value: &str) -> Result<u64> {
    let v = value.trim();
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("seed: cannot parse `{v}`")))
}

fn pair(key: &str, s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| Error::Config(format!("{key}: expected `P1xP2`, got `{s}`")))?;
    Ok((scalar(key, a)?, scalar(key, b)?))
}

pub fn parse_spaces(value: &str) -> Result<Vec<SectionSpace>> {
    value
        .split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(SectionSpace::from_str)
        .collect()
}

pub fn parse_checks(value: &str) -> Result<Vec<CheckKind>> {
    let mut checks: Vec<CheckKind> = list("checks", value)?;
    checks.sort();
    checks.dedup();
    Ok(checks)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one key; used by the file parser and by command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = list(key, value)?,
            "n" => self.n = list(key, value)?,
            "spaces" | "space" => self.spaces = parse_spaces(value)?,
            "beta" => self.beta = list(key, value)?,
            "gamma" => self.gamma = list(key, value)?,
            "nu" => self.nu = list(key, value)?,
            "p2d" => {
                self.p2d = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| pair(key, s))
                    .collect::<Result<_>>()?
            }
            "n1_2d" => self.n1_2d = list(key, value)?,
            "parter_j" => self.parter_j = list(key, value)?,
            "conditioning_n" => self.conditioning_n = list(key, value)?,
            "checks" => self.checks = parse_checks(value)?,
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse_seed(value)?,
            "jobs" => self.jobs = Some(scalar(key, value)?),
            "property_cases" => self.property_cases = scalar(key, value)?,
            "timings" => self.timings = scalar(key, value)?,
            "tol.parter" => self.tol.parter = scalar(key, value)?,
            "tol.conditioning_spread" => self.tol.conditioning_spread = scalar(key, value)?,
            "tol.assembly" => self.tol.assembly = scalar(key, value)?,
            "tol.norm_ratio" => self.tol.norm_ratio = scalar(key, value)?,
            "tol.outlier_level" => self.tol.outlier_level = scalar(key, value)?,
            "tol.outlier_fraction" => self.tol.outlier_fraction = scalar(key, value)?,
            "tol.kronecker" => self.tol.kronecker = scalar(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn has(&self, check: CheckKind) -> bool {
        self.checks.contains(&check)
    }

    pub fn has_2d(&self) -> bool {
        [
            CheckKind::Assembly2d,
            CheckKind::Decomposition2d,
            CheckKind::Distribution2d,
        ]
        .iter()
        .any(|c| self.has(*c))
    }

    /// Every `n` a check may be run at, per direction for the 2D grid.
    fn all_n(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.n.clone();
        if self.has(CheckKind::Conditioning) {
            all.extend(&self.conditioning_n);
        }
        if self.has_2d() {
            for &n1 in &self.n1_2d {
                all.push(n1);
                all.extend(self.nu.iter().map(|nu| nu * n1));
            }
        }
        all
    }

    /// Rejects empty lists, degenerate sizes, negative reaction and any
    /// trigonometric phase `≥ π` before anything is computed.
    pub fn validate(&self) -> Result<()> {
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::Config(format!("`{name}` must not be empty")))
            } else {
                Ok(())
            }
        };
        nonempty("p", self.p.len())?;
        nonempty("n", self.n.len())?;
        nonempty("spaces", self.spaces.len())?;
        nonempty("beta", self.beta.len())?;
        nonempty("gamma", self.gamma.len())?;
        nonempty("checks", self.checks.len())?;
        if self.has(CheckKind::Conditioning) {
            nonempty("conditioning_n", self.conditioning_n.len())?;
        }
        if self.has(CheckKind::Parter) {
            nonempty("parter_j", self.parter_j.len())?;
        }
        if self.has_2d() {
            nonempty("nu", self.nu.len())?;
            nonempty("p2d", self.p2d.len())?;
            nonempty("n1_2d", self.n1_2d.len())?;
        }
        if let Some(&p) = self
            .p
            .iter()
            .chain(self.p2d.iter().flat_map(|(a, b)| [a, b]))
            .find(|&&p| p == 0)
        {
            return Err(Error::Config(format!("degree must be at least 1, got {p}")));
        }
        if let Some(&n) = self.all_n().iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("n must be at least 2, got {n}")));
        }
        if let Some(&nu) = self.nu.iter().find(|&&nu| nu == 0) {
            return Err(Error::Config(format!("nu must be positive, got {nu}")));
        }
        if let Some(&j) = self.parter_j.iter().find(|&&j| j == 0) {
            return Err(Error::Config(format!("parter_j is 1-based, got {j}")));
        }
        if let Some(&g) = self.gamma.iter().find(|&&g| g.is_nan() || g < 0.0) {
            return Err(Error::NegativeGamma(g));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        for space in &self.spaces {
            for n in self.all_n() {
                space.validate(n)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn parses_keys_and_comments() {
        let cfg = ExperimentConfig::parse(
            "# grid\np = 2\nn = 8, 16 # trailing\nspaces = poly; trig:1.0:nested\n\
             checks = toeplitz,mineig\np2d = 1x2, 2x2\nseed = 0x10\ntol.parter = 0.1\n",
        )
        .unwrap();
        assert_eq!(cfg.p, vec![2]);
        assert_eq!(cfg.n, vec![8, 16]);
        assert_eq!(cfg.spaces.len(), 2);
        assert_eq!(cfg.checks, vec![CheckKind::Mineig, CheckKind::Toeplitz]);
        assert_eq!(cfg.p2d, vec![(1, 2), (2, 2)]);
        assert_eq!(cfg.seed, 16);
        assert_eq!(cfg.tol.parter, 0.1);
    }

    #[test]
    fn rejects_unknown_input() {
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("checks = mineig, nope").is_err());
        assert!(ExperimentConfig::parse("p 2").is_err());
        assert!(ExperimentConfig::parse("n = a").is_err());
    }

    #[test]
    fn refuses_large_trig_phase() {
        let cfg = ExperimentConfig::parse(
            "spaces = trig:12.566370614359172:nested\nn = 2\nchecks = mineig",
        )
        .unwrap();
        match cfg.validate() {
            Err(Error::PhaseConstraint { min_n, .. }) => assert_eq!(min_n, 5),
            other => panic!("expected phase error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_gamma() {
        let cfg = ExperimentConfig::parse("gamma = -1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::NegativeGamma(_))));
    }
}
