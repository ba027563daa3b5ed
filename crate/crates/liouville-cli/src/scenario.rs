//! Scenario files: the TOML schema, validation, and the bundled catalog.
//!
//! A scenario is one experiment: a `kind` choosing the engine, a kind-specific
//! `[params]` block, an `[integrator]` block (`dt`, `T`, `sample_stride`), an
//! `[output]` block, and a `seed` for sampling oracles. Parsing collects
//! *every* validation problem instead of stopping at the first, so a file can
//! be fixed in one pass; each message carries the offending field's path.
//!
//! The resolved scenario has a canonical TOML form (fixed key order, full
//! defaults, round-trip float precision). Its SHA-256 is the scenario digest
//! recorded in the run manifest, so two files that resolve to the same
//! experiment get the same digest regardless of formatting.

use crate::manifest::{fmt_f64, sha256_hex};
use liouville::grid::{Grid1D, MIN_SAMPLES};
use liouville::hybrid::{HybridSpec, MAX_HYBRID_POINTS};
use liouville::poly::BivariatePoly;
use liouville::superspace::DensityMatrix;
use liouville::{c64, grid::PolynomialPotential};
use std::fmt;
use std::fmt::Write as _;

/// One validation problem: the field path that caused it and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Command-line overrides applied before validation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_total: Option<f64>,
}

/// Time-stepping block shared by every kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrator {
    pub dt: f64,
    pub t_total: f64,
    pub sample_stride: usize,
}

/// Output switches. The directory is part of the scenario (and its digest);
/// the `--out` flag overrides it at execution time without changing identity.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: Option<String>,
    pub series: bool,
    pub snapshot: bool,
    pub classification: bool,
}

/// A qubit state given as `ρ₁₁` and the complex `ρ₁₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho11: f64,
    pub rho12_re: f64,
    pub rho12_im: f64,
}

/// Initial state of a two-level scenario: explicit entries or the
/// generator's stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitInit {
    Explicit(QubitState),
    Stationary,
}

/// Which solution methods a two-level run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Ode,
    Both,
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Ode => "ode",
            Method::Both => "both",
        }
    }
}

/// Optional rate fit performed on the emitted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFit {
    None,
    PopulationRelaxation,
    CoherenceGrowth,
}

impl RateFit {
    fn label(self) -> &'static str {
        match self {
            RateFit::None => "none",
            RateFit::PopulationRelaxation => "population_relaxation",
            RateFit::CoherenceGrowth => "coherence_growth",
        }
    }
}

/// Eigenvalue-excursion scan window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyScan {
    pub horizon: f64,
    pub dt: f64,
}

/// Parameters of a `finite_2x2` scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Finite2x2Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub initial: QubitInit,
    pub method: Method,
    pub fit: RateFit,
    pub anomaly_scan: Option<AnomalyScan>,
    pub report_stationary: bool,
}

/// Parameters of a `gl_params` scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct GlParamsParams {
    pub flat: [f64; 16],
    pub initial: QubitState,
    pub project: bool,
}

/// Generator source for a `map_analysis` scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSource {
    Simplified { alpha: f64, beta: f64, gamma: f64 },
    Flat([f64; 16]),
}

/// Parameters of a `map_analysis` scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct MapAnalysisParams {
    pub generator: GeneratorSource,
    pub conserved: bool,
    pub initial: Option<QubitState>,
}

/// Grid geometry block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub extent: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl GridSpec {
    /// Builds the engine grid (validation has already dry-run this).
    pub fn build(&self) -> liouville::Result<Grid1D> {
        Grid1D::new(self.n, self.extent, self.mass, self.hbar)
    }
}

/// Potential over one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    Harmonic { mass: Option<f64>, omega: f64 },
    Quartic { lambda: f64 },
    Poly { coeffs: Vec<f64> },
}

impl PotentialSpec {
    /// Builds the engine potential; harmonic terms default to the grid mass.
    pub fn build(&self, grid_mass: f64) -> liouville::Result<PolynomialPotential> {
        match self {
            PotentialSpec::Zero => Ok(PolynomialPotential::zero()),
            PotentialSpec::Harmonic { mass, omega } => {
                Ok(PolynomialPotential::harmonic(mass.unwrap_or(grid_mass), *omega))
            }
            PotentialSpec::Quartic { lambda } => Ok(PolynomialPotential::quartic(*lambda)),
            PotentialSpec::Poly { coeffs } => PolynomialPotential::new(coeffs.clone()),
        }
    }
}

/// Bivariate coupling over the two coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    Bilinear { scale: f64 },
    PowerOfDifference { power: usize, scale: f64 },
    Poly { rows: Vec<Vec<f64>> },
}

impl CouplingSpec {
    /// Builds the engine polynomial.
    pub fn build(&self) -> liouville::Result<BivariatePoly> {
        match self {
            CouplingSpec::Bilinear { scale } => Ok(BivariatePoly::bilinear(*scale)),
            CouplingSpec::PowerOfDifference { power, scale } => {
                BivariatePoly::power_of_difference(*power, *scale)
            }
            CouplingSpec::Poly { rows } => BivariatePoly::new(rows.clone()),
        }
    }
}

/// Initial state over one grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState1D {
    /// Minimum-uncertainty packet: `|ψ⟩⟨ψ|` of a Gaussian wave packet.
    Packet { x0: f64, p0: f64, sigma: f64 },
    /// Gaussian phase-space blob with independent position/momentum widths.
    Blob { x0: f64, p0: f64, sigma_x: f64, sigma_p: f64 },
}

impl InitialState1D {
    /// The nominal phase-space center, used by trajectory references.
    pub fn center(&self) -> (f64, f64) {
        match *self {
            InitialState1D::Packet { x0, p0, .. } => (x0, p0),
            InitialState1D::Blob { x0, p0, .. } => (x0, p0),
        }
    }
}

/// Evolution mode selection for `grid_1d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSpec {
    Classical,
    Quantum,
    Both,
}

impl ModeSpec {
    fn label(self) -> &'static str {
        match self {
            ModeSpec::Classical => "classical",
            ModeSpec::Quantum => "quantum",
            ModeSpec::Both => "both",
        }
    }

    /// Whether a classical evolution is part of the run.
    pub fn includes_classical(self) -> bool {
        matches!(self, ModeSpec::Classical | ModeSpec::Both)
    }
}

/// Centroid reference curve compared against the evolved `⟨x⟩(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentroidRef {
    None,
    /// Straight characteristic `x₀ + p₀ t / m`.
    Line,
    /// Harmonic law `x₀ cos ωt + (p₀/mω) sin ωt`.
    Cosine,
}

impl CentroidRef {
    fn label(self) -> &'static str {
        match self {
            CentroidRef::None => "none",
            CentroidRef::Line => "line",
            CentroidRef::Cosine => "cosine",
        }
    }
}

/// Independent-sampler settings for the classical cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSpec {
    pub dt: f64,
    pub samples: usize,
}

/// Parameters of a `grid_1d` scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1dParams {
    pub grid: GridSpec,
    pub mode: ModeSpec,
    pub potential: PotentialSpec,
    pub initial: InitialState1D,
    pub oracle: Option<OracleSpec>,
    pub coupling_gap: bool,
    pub convergence: bool,
    pub centroid_reference: CentroidRef,
    pub marginal_drift: bool,
}

/// Gaussian packet block for one hybrid particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
}

/// Parameters of a `hybrid` scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridParams {
    pub grid1: GridSpec,
    pub grid2: GridSpec,
    pub v1: PotentialSpec,
    pub v2: PotentialSpec,
    pub coupling: CouplingSpec,
    pub lambda: f64,
    pub packet1: PacketSpec,
    pub packet2: PacketSpec,
    pub evolve: bool,
    pub equivalence_check: bool,
}

/// Kind-specific parameter block.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Finite2x2(Finite2x2Params),
    GlParams(GlParamsParams),
    MapAnalysis(MapAnalysisParams),
    Grid1d(Grid1dParams),
    Hybrid(HybridParams),
}

impl Params {
    /// The scenario-kind label as written in the file.
    pub fn kind_label(&self) -> &'static str {
        match self {
            Params::Finite2x2(_) => "finite_2x2",
            Params::GlParams(_) => "gl_params",
            Params::MapAnalysis(_) => "map_analysis",
            Params::Grid1d(_) => "grid_1d",
            Params::Hybrid(_) => "hybrid",
        }
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub integrator: Integrator,
    pub output: OutputSpec,
    pub params: Params,
}

impl Scenario {
    /// Canonical TOML rendering: fixed key order, every default made
    /// explicit, floats in round-trip precision. Parsing this text yields a
    /// scenario equal to `self`.
    pub fn canonical_toml(&self) -> String {
        let mut out = String::new();
        writeln!(out, "name = \"{}\"", self.name).unwrap();
        writeln!(out, "kind = \"{}\"", self.params.kind_label()).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        out.push_str("\n[integrator]\n");
        writeln!(out, "dt = {}", fmt_f64(self.integrator.dt)).unwrap();
        writeln!(out, "T = {}", fmt_f64(self.integrator.t_total)).unwrap();
        writeln!(out, "sample_stride = {}", self.integrator.sample_stride).unwrap();
        out.push_str("\n[output]\n");
        if let Some(dir) = &self.output.directory {
            writeln!(out, "directory = \"{dir}\"").unwrap();
        }
        writeln!(out, "series = {}", self.output.series).unwrap();
        writeln!(out, "snapshot = {}", self.output.snapshot).unwrap();
        writeln!(out, "classification = {}", self.output.classification).unwrap();
        match &self.params {
            Params::Finite2x2(p) => {
                out.push_str("\n[params]\n");
                writeln!(out, "alpha = {}", fmt_f64(p.alpha)).unwrap();
                writeln!(out, "beta = {}", fmt_f64(p.beta)).unwrap();
                writeln!(out, "gamma = {}", fmt_f64(p.gamma)).unwrap();
                writeln!(out, "method = \"{}\"", p.method.label()).unwrap();
                writeln!(out, "fit = \"{}\"", p.fit.label()).unwrap();
                writeln!(out, "report_stationary = {}", p.report_stationary).unwrap();
                match p.initial {
                    QubitInit::Stationary => {
                        writeln!(out, "initial = \"stationary\"").unwrap();
                    }
                    QubitInit::Explicit(q) => write_qubit(&mut out, "params.initial", q),
                }
                if let Some(scan) = p.anomaly_scan {
                    out.push_str("\n[params.anomaly_scan]\n");
                    writeln!(out, "horizon = {}", fmt_f64(scan.horizon)).unwrap();
                    writeln!(out, "dt = {}", fmt_f64(scan.dt)).unwrap();
                }
            }
            Params::GlParams(p) => {
                out.push_str("\n[params]\n");
                write_flat16(&mut out, &p.flat);
                writeln!(out, "project = {}", p.project).unwrap();
                write_qubit(&mut out, "params.initial", p.initial);
            }
            Params::MapAnalysis(p) => {
                out.push_str("\n[params]\n");
                writeln!(out, "conserved = {}", p.conserved).unwrap();
                match &p.generator {
                    GeneratorSource::Simplified { alpha, beta, gamma } => {
                        writeln!(out, "alpha = {}", fmt_f64(*alpha)).unwrap();
                        writeln!(out, "beta = {}", fmt_f64(*beta)).unwrap();
                        writeln!(out, "gamma = {}", fmt_f64(*gamma)).unwrap();
                    }
                    GeneratorSource::Flat(flat) => write_flat16(&mut out, flat),
                }
                if let Some(q) = p.initial {
                    write_qubit(&mut out, "params.initial", q);
                }
            }
            Params::Grid1d(p) => {
                out.push_str("\n[params]\n");
                writeln!(out, "mode = \"{}\"", p.mode.label()).unwrap();
                writeln!(out, "coupling_gap = {}", p.coupling_gap).unwrap();
                writeln!(out, "convergence = {}", p.convergence).unwrap();
                writeln!(out, "centroid_reference = \"{}\"", p.centroid_reference.label())
                    .unwrap();
                writeln!(out, "marginal_drift = {}", p.marginal_drift).unwrap();
                write_grid(&mut out, "params.grid", &p.grid);
                write_potential(&mut out, "params.potential", &p.potential);
                out.push_str("\n[params.initial]\n");
                match p.initial {
                    InitialState1D::Packet { x0, p0, sigma } => {
                        writeln!(out, "type = \"packet\"").unwrap();
                        writeln!(out, "x0 = {}", fmt_f64(x0)).unwrap();
                        writeln!(out, "p0 = {}", fmt_f64(p0)).unwrap();
                        writeln!(out, "sigma = {}", fmt_f64(sigma)).unwrap();
                    }
                    InitialState1D::Blob { x0, p0, sigma_x, sigma_p } => {
                        writeln!(out, "type = \"blob\"").unwrap();
                        writeln!(out, "x0 = {}", fmt_f64(x0)).unwrap();
                        writeln!(out, "p0 = {}", fmt_f64(p0)).unwrap();
                        writeln!(out, "sigma_x = {}", fmt_f64(sigma_x)).unwrap();
                        writeln!(out, "sigma_p = {}", fmt_f64(sigma_p)).unwrap();
                    }
                }
                if let Some(oracle) = p.oracle {
                    out.push_str("\n[params.oracle]\n");
                    writeln!(out, "dt = {}", fmt_f64(oracle.dt)).unwrap();
                    writeln!(out, "samples = {}", oracle.samples).unwrap();
                }
            }
            Params::Hybrid(p) => {
                out.push_str("\n[params]\n");
                writeln!(out, "lambda = {}", fmt_f64(p.lambda)).unwrap();
                writeln!(out, "evolve = {}", p.evolve).unwrap();
                writeln!(out, "equivalence_check = {}", p.equivalence_check).unwrap();
                write_grid(&mut out, "params.grid1", &p.grid1);
                write_grid(&mut out, "params.grid2", &p.grid2);
                write_potential(&mut out, "params.v1", &p.v1);
                write_potential(&mut out, "params.v2", &p.v2);
                out.push_str("\n[params.coupling]\n");
                match &p.coupling {
                    CouplingSpec::Bilinear { scale } => {
                        writeln!(out, "type = \"bilinear\"").unwrap();
                        writeln!(out, "scale = {}", fmt_f64(*scale)).unwrap();
                    }
                    CouplingSpec::PowerOfDifference { power, scale } => {
                        writeln!(out, "type = \"power_of_difference\"").unwrap();
                        writeln!(out, "power = {power}").unwrap();
                        writeln!(out, "scale = {}", fmt_f64(*scale)).unwrap();
                    }
                    CouplingSpec::Poly { rows } => {
                        writeln!(out, "type = \"poly\"").unwrap();
                        let rendered: Vec<String> = rows
                            .iter()
                            .map(|row| {
                                let cells: Vec<String> =
                                    row.iter().map(|c| fmt_f64(*c)).collect();
                                format!("[{}]", cells.join(", "))
                            })
                            .collect();
                        writeln!(out, "rows = [{}]", rendered.join(", ")).unwrap();
                    }
                }
                for (path, packet) in
                    [("params.initial.packet1", p.packet1), ("params.initial.packet2", p.packet2)]
                {
                    writeln!(out, "\n[{path}]").unwrap();
                    writeln!(out, "x0 = {}", fmt_f64(packet.x0)).unwrap();
                    writeln!(out, "p0 = {}", fmt_f64(packet.p0)).unwrap();
                    writeln!(out, "sigma = {}", fmt_f64(packet.sigma)).unwrap();
                }
            }
        }
        out
    }

    /// Content hash of the canonical form, prefixed with the algorithm.
    pub fn digest(&self) -> String {
        format!("sha256:{}", sha256_hex(self.canonical_toml().as_bytes()))
    }
}

fn write_qubit(out: &mut String, path: &str, q: QubitState) {
    writeln!(out, "\n[{path}]").unwrap();
    writeln!(out, "rho11 = {}", fmt_f64(q.rho11)).unwrap();
    writeln!(out, "rho12_re = {}", fmt_f64(q.rho12_re)).unwrap();
    writeln!(out, "rho12_im = {}", fmt_f64(q.rho12_im)).unwrap();
}

fn write_flat16(out: &mut String, flat: &[f64; 16]) {
    let cells: Vec<String> = flat.iter().map(|c| fmt_f64(*c)).collect();
    writeln!(out, "flat = [{}]", cells.join(", ")).unwrap();
}

fn write_grid(out: &mut String, path: &str, g: &GridSpec) {
    writeln!(out, "\n[{path}]").unwrap();
    writeln!(out, "n = {}", g.n).unwrap();
    writeln!(out, "extent = {}", fmt_f64(g.extent)).unwrap();
    writeln!(out, "mass = {}", fmt_f64(g.mass)).unwrap();
    writeln!(out, "hbar = {}", fmt_f64(g.hbar)).unwrap();
}

fn write_potential(out: &mut String, path: &str, v: &PotentialSpec) {
    writeln!(out, "\n[{path}]").unwrap();
    match v {
        PotentialSpec::Zero => writeln!(out, "type = \"zero\"").unwrap(),
        PotentialSpec::Harmonic { mass, omega } => {
            writeln!(out, "type = \"harmonic\"").unwrap();
            if let Some(m) = mass {
                writeln!(out, "mass = {}", fmt_f64(*m)).unwrap();
            }
            writeln!(out, "omega = {}", fmt_f64(*omega)).unwrap();
        }
        PotentialSpec::Quartic { lambda } => {
            writeln!(out, "type = \"quartic\"").unwrap();
            writeln!(out, "lambda = {}", fmt_f64(*lambda)).unwrap();
        }
        PotentialSpec::Poly { coeffs } => {
            writeln!(out, "type = \"poly\"").unwrap();
            let cells: Vec<String> = coeffs.iter().map(|c| fmt_f64(*c)).collect();
            writeln!(out, "coeffs = [{}]", cells.join(", ")).unwrap();
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

/// Error collector with typed getters over a TOML table. Every getter
/// records a contextual error and returns `None` instead of failing fast.
struct Checker {
    errors: Vec<ValidationError>,
}

impl Checker {
    fn new() -> Self {
        Self { errors: Vec::new() }
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ValidationError {
            field: field.into(),
            message: message.into(),
        });
    }

    /// Flags any key the caller did not consume.
    fn check_unknown(&mut self, table: &toml::Table, path: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                self.push(
                    join(path, key),
                    format!("unknown key (expected one of: {})", allowed.join(", ")),
                );
            }
        }
    }

    fn req_table<'t>(&mut self, table: &'t toml::Table, path: &str, key: &str)
        -> Option<&'t toml::Table>
    {
        match table.get(key) {
            Some(toml::Value::Table(t)) => Some(t),
            Some(other) => {
                self.push(join(path, key), format!("expected a table, got {}", other.type_str()));
                None
            }
            None => {
                self.push(join(path, key), "missing required table");
                None
            }
        }
    }

    fn opt_table<'t>(&mut self, table: &'t toml::Table, path: &str, key: &str)
        -> Option<&'t toml::Table>
    {
        match table.get(key) {
            Some(toml::Value::Table(t)) => Some(t),
            Some(other) => {
                self.push(join(path, key), format!("expected a table, got {}", other.type_str()));
                None
            }
            None => None,
        }
    }

    fn value_f64(&mut self, value: &toml::Value, path: String) -> Option<f64> {
        let v = match value {
            toml::Value::Float(v) => *v,
            toml::Value::Integer(v) => *v as f64,
            other => {
                self.push(path, format!("expected a number, got {}", other.type_str()));
                return None;
            }
        };
        if v.is_finite() {
            Some(v)
        } else {
            self.push(path, format!("must be finite (got {v})"));
            None
        }
    }

    fn req_f64(&mut self, table: &toml::Table, path: &str, key: &str) -> Option<f64> {
        match table.get(key) {
            Some(value) => self.value_f64(value, join(path, key)),
            None => {
                self.push(join(path, key), "missing required number");
                None
            }
        }
    }

    fn opt_f64(&mut self, table: &toml::Table, path: &str, key: &str) -> Option<f64> {
        table.get(key).and_then(|v| self.value_f64(v, join(path, key)))
    }

    /// Required strictly positive number.
    fn req_pos(&mut self, table: &toml::Table, path: &str, key: &str) -> Option<f64> {
        let v = self.req_f64(table, path, key)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.push(join(path, key), format!("must be > 0 (got {v})"));
            None
        }
    }

    fn req_usize(&mut self, table: &toml::Table, path: &str, key: &str) -> Option<usize> {
        match table.get(key) {
            Some(toml::Value::Integer(v)) if *v >= 0 => Some(*v as usize),
            Some(toml::Value::Integer(v)) => {
                self.push(join(path, key), format!("must be non-negative (got {v})"));
                None
            }
            Some(other) => {
                self.push(join(path, key), format!("expected an integer, got {}", other.type_str()));
                None
            }
            None => {
                self.push(join(path, key), "missing required integer");
                None
            }
        }
    }

    fn opt_usize(&mut self, table: &toml::Table, path: &str, key: &str) -> Option<usize> {
        match table.get(key) {
            Some(toml::Value::Integer(v)) if *v >= 0 => Some(*v as usize),
            Some(toml::Value::Integer(v)) => {
                self.push(join(path, key), format!("must be non-negative (got {v})"));
                None
            }
            Some(other) => {
                self.push(join(path, key), format!("expected an integer, got {}", other.type_str()));
                None
            }
            None => None,
        }
    }

    fn opt_bool(&mut self, table: &toml::Table, path: &str, key: &str, default: bool) -> bool {
        match table.get(key) {
            Some(toml::Value::Boolean(v)) => *v,
            Some(other) => {
                self.push(join(path, key), format!("expected a boolean, got {}", other.type_str()));
                default
            }
            None => default,
        }
    }

    fn opt_str<'t>(&mut self, table: &'t toml::Table, path: &str, key: &str)
        -> Option<&'t str>
    {
        match table.get(key) {
            Some(toml::Value::String(s)) => Some(s.as_str()),
            Some(other) => {
                self.push(join(path, key), format!("expected a string, got {}", other.type_str()));
                None
            }
            None => None,
        }
    }

    fn req_str<'t>(&mut self, table: &'t toml::Table, path: &str, key: &str)
        -> Option<&'t str>
    {
        match table.get(key) {
            Some(toml::Value::String(s)) => Some(s.as_str()),
            Some(other) => {
                self.push(join(path, key), format!("expected a string, got {}", other.type_str()));
                None
            }
            None => {
                self.push(join(path, key), "missing required string");
                None
            }
        }
    }

    fn f64_array(&mut self, table: &toml::Table, path: &str, key: &str) -> Option<Vec<f64>> {
        match table.get(key) {
            Some(toml::Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                let mut ok = true;
                for (idx, item) in items.iter().enumerate() {
                    match self.value_f64(item, format!("{}[{idx}]", join(path, key))) {
                        Some(v) => out.push(v),
                        None => ok = false,
                    }
                }
                ok.then_some(out)
            }
            Some(other) => {
                self.push(join(path, key), format!("expected an array, got {}", other.type_str()));
                None
            }
            None => {
                self.push(join(path, key), "missing required array");
                None
            }
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

/// Parses and fully validates scenario text. `name` is the fallback scenario
/// name (file stem or bundled name); a `name` key in the file wins.
/// Returns either a resolved scenario or every problem found.
pub fn parse_scenario(
    default_name: &str,
    text: &str,
    overrides: Overrides,
) -> Result<Scenario, Vec<ValidationError>> {
    let table: toml::Table = match text.parse() {
        Ok(t) => t,
        Err(err) => {
            return Err(vec![ValidationError {
                field: "(syntax)".into(),
                message: err.to_string().replace('\n', " "),
            }]);
        }
    };
    let mut c = Checker::new();

    c.check_unknown(&table, "", &["name", "kind", "seed", "integrator", "output", "params"]);

    let name = match c.opt_str(&table, "", "name") {
        Some(n) => n.to_owned(),
        None => default_name.to_owned(),
    };
    if name.is_empty()
        || !name
            .chars()
            .all(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '-' | '_' | '.'))
    {
        c.push("name", format!("must be non-empty [A-Za-z0-9._-] (got \"{name}\")"));
    }

    let seed = match table.get("seed") {
        Some(toml::Value::Integer(v)) if *v >= 0 => *v as u64,
        Some(toml::Value::Integer(v)) => {
            c.push("seed", format!("must be non-negative (got {v})"));
            0
        }
        Some(other) => {
            c.push("seed", format!("expected an integer, got {}", other.type_str()));
            0
        }
        None => 0,
    };

    let integrator = parse_integrator(&mut c, &table, overrides);

    let kind = c.req_str(&table, "", "kind").map(str::to_owned);
    let output = parse_output(&mut c, &table, kind.as_deref());

    let params = match kind.as_deref() {
        Some("finite_2x2") => {
            parse_finite_2x2(&mut c, &table).map(Params::Finite2x2)
        }
        Some("gl_params") => parse_gl_params(&mut c, &table).map(Params::GlParams),
        Some("map_analysis") => parse_map_analysis(&mut c, &table).map(Params::MapAnalysis),
        Some("grid_1d") => parse_grid_1d(&mut c, &table).map(Params::Grid1d),
        Some("hybrid") => parse_hybrid(&mut c, &table).map(Params::Hybrid),
        Some(other) => {
            c.push(
                "kind",
                format!(
                    "unknown kind \"{other}\" (expected finite_2x2, gl_params, map_analysis, \
                     grid_1d, or hybrid)"
                ),
            );
            None
        }
        None => None,
    };

    match (params, integrator) {
        (Some(params), Some(integrator)) if c.errors.is_empty() => Ok(Scenario {
            name,
            seed,
            integrator,
            output,
            params,
        }),
        _ => Err(c.errors),
    }
}

fn parse_integrator(
    c: &mut Checker,
    table: &toml::Table,
    overrides: Overrides,
) -> Option<Integrator> {
    let t = c.req_table(table, "", "integrator")?;
    c.check_unknown(t, "integrator", &["dt", "T", "sample_stride"]);
    let dt = match overrides.dt {
        Some(dt) => {
            // Still surface a missing key: the file should be complete.
            c.req_f64(t, "integrator", "dt");
            Some(dt)
        }
        None => c.req_f64(t, "integrator", "dt"),
    };
    let t_total = match overrides.t_total {
        Some(t_val) => {
            c.req_f64(t, "integrator", "T");
            Some(t_val)
        }
        None => c.req_f64(t, "integrator", "T"),
    };
    let sample_stride = c.opt_usize(t, "integrator", "sample_stride").unwrap_or(1).max(1);
    let (dt, t_total) = (dt?, t_total?);
    let mut ok = true;
    if !(dt > 0.0) || !dt.is_finite() {
        c.push("integrator.dt", format!("must be > 0 (got {dt})"));
        ok = false;
    }
    if !(t_total > 0.0) || !t_total.is_finite() {
        c.push("integrator.T", format!("must be > 0 (got {t_total})"));
        ok = false;
    }
    ok.then_some(Integrator {
        dt,
        t_total,
        sample_stride,
    })
}

fn parse_output(c: &mut Checker, table: &toml::Table, kind: Option<&str>) -> OutputSpec {
    let mut output = OutputSpec {
        directory: None,
        series: true,
        snapshot: false,
        classification: false,
    };
    let Some(t) = c.opt_table(table, "", "output") else {
        return output;
    };
    c.check_unknown(t, "output", &["directory", "series", "snapshot", "classification"]);
    output.directory = c.opt_str(t, "output", "directory").map(str::to_owned);
    if output.directory.as_deref() == Some("") {
        c.push("output.directory", "must be non-empty when present");
        output.directory = None;
    }
    output.series = c.opt_bool(t, "output", "series", true);
    output.snapshot = c.opt_bool(t, "output", "snapshot", false);
    output.classification = c.opt_bool(t, "output", "classification", false);
    if output.snapshot && !matches!(kind, Some("grid_1d") | Some("hybrid") | None) {
        c.push("output.snapshot", "snapshots are only available for grid_1d and hybrid kinds");
    }
    if output.classification && !matches!(kind, Some("hybrid") | None) {
        c.push("output.classification", "classification output is only available for hybrid");
    }
    output
}

/// Validates explicit qubit entries by dry-running the engine constructor.
fn check_qubit(c: &mut Checker, path: &str, q: QubitState) {
    if let Err(err) = DensityMatrix::qubit(q.rho11, c64(q.rho12_re, q.rho12_im)) {
        c.push(path.to_owned(), format!("not a valid qubit state: {err}"));
    }
}

fn parse_qubit_table(c: &mut Checker, t: &toml::Table, path: &str) -> Option<QubitState> {
    c.check_unknown(t, path, &["rho11", "rho12_re", "rho12_im"]);
    let rho11 = c.req_f64(t, path, "rho11");
    let rho12_re = c.req_f64(t, path, "rho12_re");
    let rho12_im = c.req_f64(t, path, "rho12_im");
    let q = QubitState {
        rho11: rho11?,
        rho12_re: rho12_re?,
        rho12_im: rho12_im?,
    };
    check_qubit(c, path, q);
    Some(q)
}

fn parse_finite_2x2(c: &mut Checker, table: &toml::Table) -> Option<Finite2x2Params> {
    let p = c.req_table(table, "", "params")?;
    c.check_unknown(
        p,
        "params",
        &["alpha", "beta", "gamma", "initial", "method", "fit", "anomaly_scan",
          "report_stationary"],
    );
    let alpha = c.req_f64(p, "params", "alpha");
    let beta = c.req_f64(p, "params", "beta");
    let gamma = c.req_f64(p, "params", "gamma");

    let initial = match p.get("initial") {
        Some(toml::Value::String(s)) if s == "stationary" => Some(QubitInit::Stationary),
        Some(toml::Value::String(s)) => {
            c.push("params.initial", format!("expected \"stationary\" or a table (got \"{s}\")"));
            None
        }
        Some(toml::Value::Table(t)) => {
            parse_qubit_table(c, t, "params.initial").map(QubitInit::Explicit)
        }
        Some(other) => {
            c.push(
                "params.initial",
                format!("expected \"stationary\" or a table, got {}", other.type_str()),
            );
            None
        }
        None => {
            c.push("params.initial", "missing required initial state");
            None
        }
    };

    let method = match c.opt_str(p, "params", "method") {
        None => Some(Method::Both),
        Some("analytic") => Some(Method::Analytic),
        Some("ode") => Some(Method::Ode),
        Some("both") => Some(Method::Both),
        Some(other) => {
            c.push("params.method", format!("expected analytic, ode, or both (got \"{other}\")"));
            None
        }
    };
    let fit = match c.opt_str(p, "params", "fit") {
        None => Some(RateFit::None),
        Some("none") => Some(RateFit::None),
        Some("population_relaxation") => Some(RateFit::PopulationRelaxation),
        Some("coherence_growth") => Some(RateFit::CoherenceGrowth),
        Some(other) => {
            c.push(
                "params.fit",
                format!(
                    "expected none, population_relaxation, or coherence_growth (got \"{other}\")"
                ),
            );
            None
        }
    };
    let anomaly_scan = match c.opt_table(p, "params", "anomaly_scan") {
        None => None,
        Some(t) => {
            c.check_unknown(t, "params.anomaly_scan", &["horizon", "dt"]);
            let horizon = c.req_pos(t, "params.anomaly_scan", "horizon");
            let dt = c.req_pos(t, "params.anomaly_scan", "dt");
            match (horizon, dt) {
                (Some(horizon), Some(dt)) => Some(AnomalyScan { horizon, dt }),
                _ => None,
            }
        }
    };
    let report_stationary = c.opt_bool(p, "params", "report_stationary", false);

    // The fits linearize around the stationary coherence, which needs a
    // nondegenerate denominator; surface that here rather than as NaNs.
    if let (Some(RateFit::CoherenceGrowth), Some(a), Some(g)) = (fit, alpha, gamma) {
        if 4.0 * a * a <= g.powi(4) {
            c.push(
                "params.fit",
                format!(
                    "coherence_growth needs 4*alpha^2 > gamma^4 (got alpha={a}, gamma={g})"
                ),
            );
        }
    }

    Some(Finite2x2Params {
        alpha: alpha?,
        beta: beta?,
        gamma: gamma?,
        initial: initial?,
        method: method?,
        fit: fit?,
        anomaly_scan,
        report_stationary,
    })
}

fn parse_flat16(c: &mut Checker, p: &toml::Table, path: &str) -> Option<[f64; 16]> {
    let values = c.f64_array(p, path, "flat")?;
    if values.len() != 16 {
        c.push(
            join(path, "flat"),
            format!("must have exactly 16 entries (got {})", values.len()),
        );
        return None;
    }
    let mut flat = [0.0; 16];
    flat.copy_from_slice(&values);
    Some(flat)
}

fn parse_gl_params(c: &mut Checker, table: &toml::Table) -> Option<GlParamsParams> {
    let p = c.req_table(table, "", "params")?;
    c.check_unknown(p, "params", &["flat", "initial", "project"]);
    let flat = parse_flat16(c, p, "params");
    let project = c.opt_bool(p, "params", "project", false);
    let initial = c
        .req_table(p, "params", "initial")
        .and_then(|t| parse_qubit_table(c, t, "params.initial"));
    Some(GlParamsParams {
        flat: flat?,
        initial: initial?,
        project,
    })
}

fn parse_map_analysis(c: &mut Checker, table: &toml::Table) -> Option<MapAnalysisParams> {
    let p = c.req_table(table, "", "params")?;
    c.check_unknown(p, "params", &["alpha", "beta", "gamma", "flat", "conserved", "initial"]);
    let has_simplified =
        p.contains_key("alpha") || p.contains_key("beta") || p.contains_key("gamma");
    let has_flat = p.contains_key("flat");
    let generator = match (has_simplified, has_flat) {
        (true, true) => {
            c.push("params", "give either alpha/beta/gamma or flat, not both");
            None
        }
        (false, false) => {
            c.push("params", "missing generator: give alpha/beta/gamma or flat");
            None
        }
        (true, false) => {
            let alpha = c.req_f64(p, "params", "alpha");
            let beta = c.req_f64(p, "params", "beta");
            let gamma = c.req_f64(p, "params", "gamma");
            match (alpha, beta, gamma) {
                (Some(alpha), Some(beta), Some(gamma)) => {
                    Some(GeneratorSource::Simplified { alpha, beta, gamma })
                }
                _ => None,
            }
        }
        (false, true) => parse_flat16(c, p, "params").map(GeneratorSource::Flat),
    };
    let conserved = c.opt_bool(p, "params", "conserved", false);
    let initial = c
        .opt_table(p, "params", "initial")
        .and_then(|t| parse_qubit_table(c, t, "params.initial"));
    Some(MapAnalysisParams {
        generator: generator?,
        conserved,
        initial,
    })
}

fn parse_grid_spec(c: &mut Checker, t: &toml::Table, path: &str) -> Option<GridSpec> {
    c.check_unknown(t, path, &["n", "extent", "mass", "hbar"]);
    let n = c.req_usize(t, path, "n");
    let extent = c.req_pos(t, path, "extent");
    let mass = c.opt_f64(t, path, "mass").unwrap_or(1.0);
    let hbar = c.opt_f64(t, path, "hbar").unwrap_or(1.0);
    let spec = GridSpec {
        n: n?,
        extent: extent?,
        mass,
        hbar,
    };
    if let Err(err) = spec.build() {
        c.push(path.to_owned(), format!("invalid grid: {err}"));
        return None;
    }
    Some(spec)
}

fn parse_potential(c: &mut Checker, parent: &toml::Table, path: &str, key: &str)
    -> Option<PotentialSpec>
{
    let t = c.req_table(parent, path, key)?;
    let full = join(path, key);
    c.check_unknown(t, &full, &["type", "omega", "mass", "lambda", "coeffs"]);
    let spec = match c.req_str(t, &full, "type")? {
        "zero" => Some(PotentialSpec::Zero),
        "harmonic" => {
            let omega = c.req_pos(t, &full, "omega");
            let mass = c.opt_f64(t, &full, "mass");
            if let Some(m) = mass {
                if !(m > 0.0) {
                    c.push(join(&full, "mass"), format!("must be > 0 (got {m})"));
                    return None;
                }
            }
            Some(PotentialSpec::Harmonic { mass, omega: omega? })
        }
        "quartic" => {
            let lambda = c.req_f64(t, &full, "lambda");
            Some(PotentialSpec::Quartic { lambda: lambda? })
        }
        "poly" => {
            let coeffs = c.f64_array(t, &full, "coeffs");
            Some(PotentialSpec::Poly { coeffs: coeffs? })
        }
        other => {
            c.push(
                join(&full, "type"),
                format!("expected zero, harmonic, quartic, or poly (got \"{other}\")"),
            );
            None
        }
    }?;
    if let Err(err) = spec.build(1.0) {
        c.push(full, format!("invalid potential: {err}"));
        return None;
    }
    Some(spec)
}

fn parse_grid_1d(c: &mut Checker, table: &toml::Table) -> Option<Grid1dParams> {
    let p = c.req_table(table, "", "params")?;
    c.check_unknown(
        p,
        "params",
        &["grid", "mode", "potential", "initial", "oracle", "coupling_gap", "convergence",
          "centroid_reference", "marginal_drift"],
    );
    let grid = c.req_table(p, "params", "grid").and_then(|t| parse_grid_spec(c, t, "params.grid"));
    let mode = match c.req_str(p, "params", "mode") {
        Some("classical") => Some(ModeSpec::Classical),
        Some("quantum") => Some(ModeSpec::Quantum),
        Some("both") => Some(ModeSpec::Both),
        Some(other) => {
            c.push("params.mode", format!("expected classical, quantum, or both (got \"{other}\")"));
            None
        }
        None => None,
    };
    let potential = parse_potential(c, p, "params", "potential");

    let initial = match c.req_table(p, "params", "initial") {
        None => None,
        Some(t) => {
            let path = "params.initial";
            match c.req_str(t, path, "type") {
                Some("packet") => {
                    c.check_unknown(t, path, &["type", "x0", "p0", "sigma"]);
                    let x0 = c.req_f64(t, path, "x0");
                    let p0 = c.req_f64(t, path, "p0");
                    let sigma = c.req_pos(t, path, "sigma");
                    match (x0, p0, sigma) {
                        (Some(x0), Some(p0), Some(sigma)) => {
                            Some(InitialState1D::Packet { x0, p0, sigma })
                        }
                        _ => None,
                    }
                }
                Some("blob") => {
                    c.check_unknown(t, path, &["type", "x0", "p0", "sigma_x", "sigma_p"]);
                    let x0 = c.req_f64(t, path, "x0");
                    let p0 = c.req_f64(t, path, "p0");
                    let sigma_x = c.req_pos(t, path, "sigma_x");
                    let sigma_p = c.req_pos(t, path, "sigma_p");
                    match (x0, p0, sigma_x, sigma_p) {
                        (Some(x0), Some(p0), Some(sigma_x), Some(sigma_p)) => {
                            Some(InitialState1D::Blob { x0, p0, sigma_x, sigma_p })
                        }
                        _ => None,
                    }
                }
                Some(other) => {
                    c.push(join(path, "type"), format!("expected packet or blob (got \"{other}\")"));
                    None
                }
                None => None,
            }
        }
    };

    let oracle = match c.opt_table(p, "params", "oracle") {
        None => None,
        Some(t) => {
            c.check_unknown(t, "params.oracle", &["dt", "samples"]);
            let dt = c.req_pos(t, "params.oracle", "dt");
            let samples = c.req_usize(t, "params.oracle", "samples");
            if let Some(s) = samples {
                if s < MIN_SAMPLES {
                    c.push(
                        "params.oracle.samples",
                        format!("must be at least {MIN_SAMPLES} (got {s})"),
                    );
                }
            }
            match (dt, samples) {
                (Some(dt), Some(samples)) => Some(OracleSpec { dt, samples }),
                _ => None,
            }
        }
    };
    let coupling_gap = c.opt_bool(p, "params", "coupling_gap", false);
    let convergence = c.opt_bool(p, "params", "convergence", false);
    let centroid_reference = match c.opt_str(p, "params", "centroid_reference") {
        None => Some(CentroidRef::None),
        Some("none") => Some(CentroidRef::None),
        Some("line") => Some(CentroidRef::Line),
        Some("cosine") => Some(CentroidRef::Cosine),
        Some(other) => {
            c.push(
                "params.centroid_reference",
                format!("expected none, line, or cosine (got \"{other}\")"),
            );
            None
        }
    };
    let marginal_drift = c.opt_bool(p, "params", "marginal_drift", false);

    // Cross-field rules.
    if let (Some(mode), Some(_)) = (mode, oracle.as_ref()) {
        if !mode.includes_classical() {
            c.push("params.oracle", "the trajectory cross-check needs a classical evolution");
        }
    }
    if let (Some(CentroidRef::Cosine), Some(v)) = (centroid_reference, potential.as_ref()) {
        if !matches!(v, PotentialSpec::Harmonic { .. }) {
            c.push(
                "params.centroid_reference",
                "the cosine reference is only defined for a harmonic potential",
            );
        }
    }
    if marginal_drift {
        if let Some(mode) = mode {
            if !mode.includes_classical() {
                c.push("params.marginal_drift", "needs a classical evolution");
            }
        }
        if !matches!(initial, Some(InitialState1D::Blob { .. }) | None) {
            c.push("params.marginal_drift", "needs a phase-space blob initial state");
        }
    }

    Some(Grid1dParams {
        grid: grid?,
        mode: mode?,
        potential: potential?,
        initial: initial?,
        oracle,
        coupling_gap,
        convergence,
        centroid_reference: centroid_reference?,
        marginal_drift,
    })
}

fn parse_packet(c: &mut Checker, t: &toml::Table, path: &str) -> Option<PacketSpec> {
    c.check_unknown(t, path, &["x0", "p0", "sigma"]);
    let x0 = c.req_f64(t, path, "x0");
    let p0 = c.req_f64(t, path, "p0");
    let sigma = c.req_pos(t, path, "sigma");
    Some(PacketSpec {
        x0: x0?,
        p0: p0?,
        sigma: sigma?,
    })
}

fn parse_hybrid(c: &mut Checker, table: &toml::Table) -> Option<HybridParams> {
    let p = c.req_table(table, "", "params")?;
    c.check_unknown(
        p,
        "params",
        &["grid1", "grid2", "v1", "v2", "coupling", "lambda", "initial", "evolve",
          "equivalence_check"],
    );
    let grid1 = c.req_table(p, "params", "grid1").and_then(|t| parse_grid_spec(c, t, "params.grid1"));
    let grid2 = c.req_table(p, "params", "grid2").and_then(|t| parse_grid_spec(c, t, "params.grid2"));
    if let (Some(g1), Some(g2)) = (grid1.as_ref(), grid2.as_ref()) {
        for (path, g) in [("params.grid1.n", g1), ("params.grid2.n", g2)] {
            if g.n > MAX_HYBRID_POINTS {
                c.push(path, format!("hybrid grids are capped at {MAX_HYBRID_POINTS} points (got {})", g.n));
            }
        }
        if g1.hbar != g2.hbar {
            c.push("params.grid2.hbar", format!("must match grid1 ({} vs {})", g2.hbar, g1.hbar));
        }
    }
    let v1 = parse_potential(c, p, "params", "v1");
    let v2 = parse_potential(c, p, "params", "v2");

    let coupling = match c.req_table(p, "params", "coupling") {
        None => None,
        Some(t) => {
            let path = "params.coupling";
            c.check_unknown(t, path, &["type", "scale", "power", "rows"]);
            match c.req_str(t, path, "type") {
                Some("bilinear") => {
                    let scale = c.req_f64(t, path, "scale");
                    scale.map(|scale| CouplingSpec::Bilinear { scale })
                }
                Some("power_of_difference") => {
                    let power = c.req_usize(t, path, "power");
                    let scale = c.req_f64(t, path, "scale");
                    match (power, scale) {
                        (Some(power), Some(scale)) => {
                            Some(CouplingSpec::PowerOfDifference { power, scale })
                        }
                        _ => None,
                    }
                }
                Some("poly") => match t.get("rows") {
                    Some(toml::Value::Array(rows)) => {
                        let mut out = Vec::with_capacity(rows.len());
                        let mut ok = true;
                        for (i, row) in rows.iter().enumerate() {
                            match row {
                                toml::Value::Array(cells) => {
                                    let mut parsed = Vec::with_capacity(cells.len());
                                    for (j, cell) in cells.iter().enumerate() {
                                        match c.value_f64(
                                            cell,
                                            format!("{path}.rows[{i}][{j}]"),
                                        ) {
                                            Some(v) => parsed.push(v),
                                            None => ok = false,
                                        }
                                    }
                                    out.push(parsed);
                                }
                                other => {
                                    c.push(
                                        format!("{path}.rows[{i}]"),
                                        format!("expected an array, got {}", other.type_str()),
                                    );
                                    ok = false;
                                }
                            }
                        }
                        ok.then_some(CouplingSpec::Poly { rows: out })
                    }
                    Some(other) => {
                        c.push(
                            format!("{path}.rows"),
                            format!("expected an array of arrays, got {}", other.type_str()),
                        );
                        None
                    }
                    None => {
                        c.push(format!("{path}.rows"), "missing required array of arrays");
                        None
                    }
                },
                Some(other) => {
                    c.push(
                        join(path, "type"),
                        format!("expected bilinear, power_of_difference, or poly (got \"{other}\")"),
                    );
                    None
                }
                None => None,
            }
        }
    };
    if let Some(spec) = coupling.as_ref() {
        if let Err(err) = spec.build() {
            c.push("params.coupling", format!("invalid coupling: {err}"));
        }
    }

    let lambda = c.req_f64(p, "params", "lambda");
    let evolve = c.opt_bool(p, "params", "evolve", true);
    let equivalence_check = c.opt_bool(p, "params", "equivalence_check", false);

    let (packet1, packet2) = match c.req_table(p, "params", "initial") {
        None => (None, None),
        Some(t) => {
            c.check_unknown(t, "params.initial", &["packet1", "packet2"]);
            let p1 = c
                .req_table(t, "params.initial", "packet1")
                .and_then(|t| parse_packet(c, t, "params.initial.packet1"));
            let p2 = c
                .req_table(t, "params.initial", "packet2")
                .and_then(|t| parse_packet(c, t, "params.initial.packet2"));
            (p1, p2)
        }
    };

    // Evolution demands a harmonic coupling: the classical and quantum
    // coupling forms agree only up to quadratic order, so steeper couplings
    // admit no consistent joint propagator. Report the offending monomials.
    if evolve {
        if let (Some(coupling), Some(v1), Some(v2), Some(lambda)) =
            (coupling.as_ref(), v1.as_ref(), v2.as_ref(), lambda)
        {
            if let (Ok(poly), Ok(pot1), Ok(pot2)) =
                (coupling.build(), v1.build(1.0), v2.build(1.0))
            {
                if let Ok(spec) = HybridSpec::new(pot1, pot2, poly, lambda) {
                    let report = spec.validate();
                    if !report.is_harmonic() {
                        c.push(
                            "params.coupling",
                            format!(
                                "evolution requires a harmonic coupling (total degree <= 2): \
                                 {report}; set evolve = false for classification-only runs"
                            ),
                        );
                    }
                }
            }
        }
    }

    Some(HybridParams {
        grid1: grid1?,
        grid2: grid2?,
        v1: v1?,
        v2: v2?,
        coupling: coupling?,
        lambda: lambda?,
        packet1: packet1?,
        packet2: packet2?,
        evolve,
        equivalence_check,
    })
}

// ---------------------------------------------------------------------------
// Bundled catalog
// ---------------------------------------------------------------------------

/// One catalog entry: a named scenario shipped inside the binary.
#[derive(Debug, Clone, Copy)]
pub struct BundledScenario {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($name:literal, $desc:literal) => {
        BundledScenario {
            name: $name,
            description: $desc,
            text: include_str!(concat!("../scenarios/", $name, ".toml")),
        }
    };
}

/// The bundled scenarios, one or more per regression criterion.
pub const BUNDLED: &[BundledScenario] = &[
    bundled!(
        "analytic-2x2",
        "closed-form two-level solution against step-by-step integration"
    ),
    bundled!(
        "relaxation-rate",
        "population decay toward 1/2 at rate 2*gamma^2, with a log-linear fit"
    ),
    bundled!(
        "growth-rate",
        "coherence envelope growth at rate 2*beta^2 + gamma^2, sampled per period"
    ),
    bundled!("fixed-point", "stationary state of the noisy two-level generator stays put"),
    bundled!(
        "anomalous-scan",
        "eigenvalue excursions outside [0, 1] under noise-driven two-level dynamics"
    ),
    bundled!("qm-recovery", "noise-free two-level dynamics keeps spectrum and purity"),
    bundled!(
        "gl-constraints",
        "trace-preservation constraints of a generic 16-parameter generator, with projection"
    ),
    bundled!(
        "cp-boundary",
        "complete positivity of the evolved map, watched until it fails under noise"
    ),
    bundled!("conserved-observables", "commutant observables stay constant along a trajectory"),
    bundled!(
        "e-vanishing",
        "classical-quantum coupling gap vanishes for a harmonic potential on the grid"
    ),
    bundled!(
        "harmonic-coincidence",
        "classical and quantum propagation coincide in a harmonic well"
    ),
    bundled!("free-transport", "free packet rides the straight characteristic"),
    bundled!("harmonic-coherent", "coherent-state centroid follows the cosine law"),
    bundled!(
        "quartic-classical-oracle",
        "spectral classical evolution against independently sampled trajectories"
    ),
    bundled!(
        "hybrid-factorization",
        "zero-coupling two-particle evolution keeps reduced purities constant"
    ),
    bundled!(
        "coupling-equivalence",
        "classical-form and quantum-form couplings agree for a squared difference"
    ),
    bundled!(
        "entanglement-classifier",
        "term-by-term classification of a quartic coupling's superpotential expansion"
    ),
    bundled!("strang-convergence", "split-step error falls by four when the step halves"),
];

/// Looks a bundled scenario up by name.
pub fn find_bundled(name: &str) -> Option<&'static BundledScenario> {
    BUNDLED.iter().find(|s| s.name == name)
}
