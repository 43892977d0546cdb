//! Run configuration files (TOML).
//!
//! ```text
//! [kernel]
//! type = "riemann_liouville"
//! alpha = 0.5
//!
//! [operator]
//! type = "dirichlet_laplacian"
//! length = 1.0
//! modes = 32
//!
//! [source]
//! type = "fisher_kpp"
//!
//! [initial]
//! type = "bump"
//!
//! [time]
//! T = 2.0
//! steps = 1024
//! mesh = "uniform"
//!
//! [output]
//! dir = "out"
//! keep_fields = false
//! ```
//!
//! Unknown keys are rejected. Errors carry the line they refer to.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sonine_core::pde::{initial_with_projection, Tolerances};
use sonine_core::spatial::build_operator;
use sonine_core::{Field, KernelPair, Mesh, NonlinearSource, OperatorKind, ProblemSpec, SonineSpec, TimeGrid};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Dirac,
    RiemannLiouville { alpha: f64 },
    DistributedOrder,
    Tempered { alpha: f64, mu: f64 },
    Bessel { alpha: f64 },
    MittagLeffler { alpha: f64, beta: f64 },
    MultiTerm { alphas: Vec<f64> },
}

impl KernelConfig {
    pub fn spec(&self) -> SonineSpec {
        match self {
            KernelConfig::Dirac => SonineSpec::Dirac,
            KernelConfig::RiemannLiouville { alpha } => SonineSpec::RiemannLiouville { alpha: *alpha },
            KernelConfig::DistributedOrder => SonineSpec::DistributedOrder,
            KernelConfig::Tempered { alpha, mu } => SonineSpec::Tempered { alpha: *alpha, mu: *mu },
            KernelConfig::Bessel { alpha } => SonineSpec::BesselPair { alpha: *alpha },
            KernelConfig::MittagLeffler { alpha, beta } => {
                SonineSpec::MittagLefflerPair { alpha: *alpha, beta: *beta }
            }
            KernelConfig::MultiTerm { alphas } => SonineSpec::MultiTerm { alphas: alphas.clone() },
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    DirichletLaplacian {
        #[serde(default = "unit_length")]
        length: f64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
    FractionalLaplacian {
        #[serde(default = "unit_length")]
        length: f64,
        s: f64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
    Involution {
        epsilon: f64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
}

fn unit_length() -> f64 {
    1.0
}

fn default_modes() -> usize {
    64
}

impl OperatorConfig {
    pub fn kind(&self) -> OperatorKind {
        match *self {
            OperatorConfig::DirichletLaplacian { length, .. } => OperatorKind::DirichletLaplacian { length },
            OperatorConfig::FractionalLaplacian { length, s, .. } => {
                OperatorKind::SpectralFractionalLaplacian { length, s }
            }
            OperatorConfig::Involution { epsilon, .. } => OperatorKind::Involution { epsilon },
        }
    }

    pub fn modes(&self) -> usize {
        match *self {
            OperatorConfig::DirichletLaplacian { modes, .. }
            | OperatorConfig::FractionalLaplacian { modes, .. }
            | OperatorConfig::Involution { modes, .. } => modes,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    FisherKpp,
    PowerFisher { p: f64, q: f64 },
    Logarithmic,
    ExpExp,
    ExpShift,
    SinhShift,
    TanhShift,
    /// `f ≡ 0`, for linear runs.
    Zero,
}

impl SourceConfig {
    pub fn source(&self) -> sonine_core::Result<NonlinearSource> {
        Ok(match *self {
            SourceConfig::FisherKpp => NonlinearSource::FisherKPP,
            SourceConfig::PowerFisher { p, q } => NonlinearSource::power_fisher(p, q)?,
            SourceConfig::Logarithmic => NonlinearSource::Logarithmic,
            SourceConfig::ExpExp => NonlinearSource::ExpExp,
            SourceConfig::ExpShift => NonlinearSource::ExpShift,
            SourceConfig::SinhShift => NonlinearSource::SinhShift,
            SourceConfig::TanhShift => NonlinearSource::TanhShift,
            SourceConfig::Zero => NonlinearSource::custom("zero", |_| 0.0),
        })
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `scale · φ_k` with the orthonormal sine of wavenumber `k`.
    Eigenfunction {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "first")]
        wavenumber: usize,
    },
    /// `u₀ ∝ φ₁` with `∫u₀φ̃₁ = scale` for the unit-integral `φ̃₁`.
    ScaledEigenfunction { scale: f64 },
    /// `scale · sin(πx/ℓ)` sampled at the nodes.
    Bump {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Whitespace-separated nodal values, one per interior node.
    NodalFile { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn first() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MeshConfig {
    Uniform,
    Graded,
    Geometric,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub steps: usize,
    #[serde(default = "uniform_mesh")]
    pub mesh: MeshConfig,
    pub grading_r: Option<f64>,
    pub t_min: Option<f64>,
}

fn uniform_mesh() -> MeshConfig {
    MeshConfig::Uniform
}

impl TimeConfig {
    pub fn grid(&self) -> sonine_core::Result<TimeGrid> {
        let mesh = match self.mesh {
            MeshConfig::Uniform => Mesh::Uniform,
            MeshConfig::Graded => Mesh::Graded { r: self.grading_r.unwrap_or(1.0) },
            MeshConfig::Geometric => Mesh::Geometric { t_min: self.t_min.unwrap_or(1e-6 * self.horizon) },
        };
        TimeGrid::new(self.horizon, self.steps, mesh)
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub fixed_point_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub blowup_threshold: Option<f64>,
    pub min_rel_width: Option<f64>,
    pub subdivisions: Option<usize>,
}

impl TolerancesConfig {
    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            fixed_point_tol: self.fixed_point_tol.unwrap_or(d.fixed_point_tol),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            blowup_threshold: self.blowup_threshold.unwrap_or(d.blowup_threshold),
            min_rel_width: self.min_rel_width.unwrap_or(d.min_rel_width),
            subdivisions: self.subdivisions.unwrap_or(d.subdivisions),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub keep_fields: bool,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: KernelConfig,
    pub operator: OperatorConfig,
    pub source: SourceConfig,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A configuration error, anchored to a line of the file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: Option<PathBuf>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = self.path.as_ref().map_or("<config>".into(), |p| p.display().to_string());
        match self.line {
            Some(line) => write!(f, "{path}:{line}: {}", self.message),
            None => write!(f, "{path}: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of `[section]`'s `key = ...` (or of the section header when `key` is absent).
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut in_section = false;
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            in_section = line.trim_matches(|c| c == '[' || c == ']').trim() == section;
            if in_section {
                header = Some(i + 1);
            }
            continue;
        }
        if let (true, Some(k)) = (in_section, key) {
            if line.split('=').next().map(str::trim) == Some(k) {
                return Some(i + 1);
            }
        }
    }
    header
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

/// Line of a deserialization error. Unknown keys are reported on the
/// enclosing table, so the key itself is searched for from there on.
pub(crate) fn error_line(text: &str, err: &toml::de::Error) -> Option<usize> {
    let start = err.span().map(|s| line_of_offset(text, s.start))?;
    let key = err.message().strip_prefix("unknown field `").and_then(|r| r.split('`').next());
    let found = key.and_then(|k| {
        text.lines()
            .enumerate()
            .skip(start - 1)
            .take_while(|(i, l)| *i + 1 == start || !l.trim_start().starts_with('['))
            .find(|(_, l)| l.split('=').next().map(str::trim) == Some(k))
            .map(|(i, _)| i + 1)
    });
    Some(found.unwrap_or(start))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError {
            path: None,
            line: error_line(text, &e),
            message: e.message().trim().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: Some(path.to_path_buf()),
            line: None,
            message: format!("cannot read: {e}"),
        })?;
        let cfg = Self::parse(&text).map_err(|e| ConfigError { path: Some(path.to_path_buf()), ..e })?;
        Ok((cfg, text))
    }

    /// Validates every parameter and assembles the problem. `text` is the file
    /// the config came from, used to anchor errors.
    pub fn build(&self, text: &str, base_dir: &Path) -> Result<ProblemSpec, ConfigError> {
        let fail = |section: &str, err: &dyn fmt::Display, key_hint: Option<&str>| {
            let msg = err.to_string();
            let key = key_hint.or_else(|| msg.split_whitespace().nth(2));
            ConfigError {
                path: None,
                line: key.and_then(|k| locate(text, section, Some(k))).or_else(|| locate(text, section, None)),
                message: format!("[{section}] {msg}"),
            }
        };
        let spec = self.kernel.spec();
        spec.validate().map_err(|e| fail("kernel", &e, None))?;
        let pair = KernelPair::new(spec).map_err(|e| fail("kernel", &e, None))?;
        let op = build_operator(self.operator.kind(), self.operator.modes()).map_err(|e| {
            let hint = match &e {
                sonine_core::Error::InvalidParameter { what, .. } if what.contains("epsilon") => Some("epsilon"),
                sonine_core::Error::InvalidParameter { what, .. } if what.contains("order") => Some("s"),
                sonine_core::Error::InvalidParameter { what, .. } if *what == "n_modes" => Some("modes"),
                _ => None,
            };
            fail("operator", &e, hint)
        })?;
        let source = self.source.source().map_err(|e| fail("source", &e, None))?;
        let grid = self.time.grid().map_err(|e| {
            let hint = match &e {
                sonine_core::Error::InvalidParameter { what, .. } => match *what {
                    "horizon" => Some("T"),
                    "n_steps" => Some("steps"),
                    "grading exponent" => Some("grading_r"),
                    "geometric t_min" => Some("t_min"),
                    _ => None,
                },
                _ => None,
            };
            fail("time", &e, hint)
        })?;
        if grid.horizon() > pair.horizon() {
            return Err(fail(
                "time",
                &format!("horizon {} exceeds the kernel's tabulated range {}", grid.horizon(), pair.horizon()),
                Some("T"),
            ));
        }
        let u0 = match &self.initial {
            InitialConfig::Eigenfunction { scale, wavenumber } => {
                let idx = op.index_of_wavenumber(*wavenumber).ok_or_else(|| {
                    fail("initial", &format!("wavenumber {wavenumber} is not among the retained modes"), Some("wavenumber"))
                })?;
                Field::eigenmode(&op, idx, *scale)
            }
            InitialConfig::ScaledEigenfunction { scale } => {
                initial_with_projection(&op, *scale).map_err(|e| fail("initial", &e, Some("scale")))?
            }
            InitialConfig::Bump { scale } => {
                let len = op.length();
                Field::sample(&op, |x| scale * (std::f64::consts::PI * x / len).sin())
            }
            InitialConfig::NodalFile { path } => {
                let full = base_dir.join(path);
                let data = std::fs::read_to_string(&full)
                    .map_err(|e| fail("initial", &format!("cannot read {}: {e}", full.display()), Some("path")))?;
                let values: Vec<f64> = data
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e| fail("initial", &format!("{}: {e}", full.display()), Some("path")))?;
                if values.len() != op.n_nodes() {
                    return Err(fail(
                        "initial",
                        &format!("{} holds {} values, expected {}", full.display(), values.len(), op.n_nodes()),
                        Some("path"),
                    ));
                }
                Field::from_nodal(values)
            }
        };
        let check = |what: &str, v: Option<f64>| -> Result<(), ConfigError> {
            match v {
                Some(x) if !(x > 0.0) || !x.is_finite() => {
                    Err(fail("tolerances", &format!("{what} must be positive, got {x}"), Some(what)))
                }
                _ => Ok(()),
            }
        };
        check("fixed_point_tol", self.tolerances.fixed_point_tol)?;
        check("blowup_threshold", self.tolerances.blowup_threshold)?;
        check("min_rel_width", self.tolerances.min_rel_width)?;
        if self.tolerances.max_iters == Some(0) {
            return Err(fail("tolerances", &"max_iters must be at least 1", Some("max_iters")));
        }
        if matches!(self.tolerances.subdivisions, Some(s) if s < 2) {
            return Err(fail("tolerances", &"subdivisions must be at least 2", Some("subdivisions")));
        }
        Ok(ProblemSpec {
            pair,
            op,
            source,
            u0,
            grid,
            tolerances: self.tolerances.tolerances(),
            keep_fields: self.output.keep_fields,
        })
    }
}
