//! Finite-element models of the controlled 1D heat and wave equations.
//!
//! A rod of length `L` is meshed with linear hat elements.  Node 0 carries a
//! Dirichlet value `g0`; the far end takes the scalar control (a heat flux or
//! a force) as a Neumann load.  [`assemble`] builds the mass and stiffness
//! matrices, [`simulate`] runs the implicit time stepper, and the resulting
//! [`Trajectory`] is what the robustness evaluator and the optimizer consume.

mod assemble;
mod simulate;

pub use assemble::{assemble, Assembled, FactoredTri, TriSystem, Tridiag};
pub use simulate::{final_state, simulate};

use serde::{Deserialize, Serialize};

/// Which PDE governs the rod.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PdeKind {
    Heat,
    Wave,
}

/// One piecewise-constant material segment, running from the previous
/// segment's `end` (or 0) up to its own `end`.
///
/// Heat rods use `rho` (kg/mm), `c` (μJ/kg/K), and `kappa` (mW·mm/K); wave
/// rods use `rho` and the Young's modulus `E` (N).  The unusual units follow
/// the tabulated material ranges verbatim; they form a self-consistent
/// scaled system and are never converted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSegment {
    pub end: f64,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "E")]
    pub young: Option<f64>,
}

impl MaterialSegment {
    pub fn heat(end: f64, rho: f64, c: f64, kappa: f64) -> MaterialSegment {
        MaterialSegment { end, rho, c: Some(c), kappa: Some(kappa), young: None }
    }

    pub fn wave(end: f64, rho: f64, young: f64) -> MaterialSegment {
        MaterialSegment { end, rho, c: None, kappa: None, young: Some(young) }
    }
}

/// Initial state profile: a constant, or explicit per-node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialProfile {
    Const(f64),
    Nodes(Vec<f64>),
}

/// Rod geometry, horizon, boundary data, and materials for one PDE instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSystem {
    pub kind: PdeKind,
    #[serde(rename = "L")]
    pub length: f64,
    pub tmax: f64,
    /// Dirichlet value held at node 0 (K for heat, mm for wave).
    pub g0: f64,
    /// Initial profile; defaults to `g0` for heat and 0 for wave.
    pub u0: InitialProfile,
    pub materials: Vec<MaterialSegment>,
    /// Bound on the boundary control magnitude (mW for heat, N for wave).
    pub q_max: f64,
    /// Optional state box for the optimizer; see [`PdeSystem::state_bounds`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_hi: Option<f64>,
    /// Replace the consistent mass matrix with its row-lumped diagonal.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lumped_mass: bool,
}

pub const DEFAULT_Q_MAX_HEAT: f64 = 1e6;
pub const DEFAULT_Q_MAX_WAVE: f64 = 50.0;

/// Default half-width of the heat state box around `g0`.
pub const HEAT_STATE_HALF_SPAN: f64 = 200.0;
/// Default displacement bound for wave rods.
pub const WAVE_STATE_SPAN: f64 = 10.0;

impl PdeSystem {
    /// A single-material system with default control bound and initial state.
    pub fn uniform(
        kind: PdeKind,
        length: f64,
        tmax: f64,
        g0: f64,
        segment: MaterialSegment,
    ) -> PdeSystem {
        let mut segment = segment;
        segment.end = length;
        PdeSystem {
            kind,
            length,
            tmax,
            g0,
            u0: match kind {
                PdeKind::Heat => InitialProfile::Const(g0),
                PdeKind::Wave => InitialProfile::Const(0.0),
            },
            materials: vec![segment],
            q_max: match kind {
                PdeKind::Heat => DEFAULT_Q_MAX_HEAT,
                PdeKind::Wave => DEFAULT_Q_MAX_WAVE,
            },
            u_lo: None,
            u_hi: None,
            lumped_mass: false,
        }
    }

    /// State box used by the optimizer: explicit values if configured, else
    /// `g0 ± 200` for heat and `±10` for wave.
    pub fn state_bounds(&self) -> (f64, f64) {
        let (lo, hi) = match self.kind {
            PdeKind::Heat => (
                self.g0 - HEAT_STATE_HALF_SPAN,
                self.g0 + HEAT_STATE_HALF_SPAN,
            ),
            PdeKind::Wave => (-WAVE_STATE_SPAN, WAVE_STATE_SPAN),
        };
        (self.u_lo.unwrap_or(lo), self.u_hi.unwrap_or(hi))
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if !(self.length > 0.0) {
            return Err(FemError::invalid("rod length must be positive"));
        }
        if !(self.tmax > 0.0) {
            return Err(FemError::invalid("horizon must be positive"));
        }
        if !(self.q_max > 0.0) {
            return Err(FemError::invalid("control bound must be positive"));
        }
        if self.materials.is_empty() {
            return Err(FemError::invalid("at least one material segment required"));
        }
        let mut prev = 0.0;
        for (i, seg) in self.materials.iter().enumerate() {
            if !(seg.end > prev) {
                return Err(FemError::invalid(format!(
                    "material segment {i} end {} does not increase past {prev}",
                    seg.end
                )));
            }
            prev = seg.end;
            if !(seg.rho > 0.0) {
                return Err(FemError::invalid(format!("segment {i}: rho must be positive")));
            }
            match self.kind {
                PdeKind::Heat => {
                    let c = seg.c.ok_or_else(|| {
                        FemError::invalid(format!("segment {i}: heat rod needs c"))
                    })?;
                    let kappa = seg.kappa.ok_or_else(|| {
                        FemError::invalid(format!("segment {i}: heat rod needs kappa"))
                    })?;
                    if !(c > 0.0) || !(kappa > 0.0) {
                        return Err(FemError::invalid(format!(
                            "segment {i}: material constants must be positive"
                        )));
                    }
                }
                PdeKind::Wave => {
                    let young = seg.young.ok_or_else(|| {
                        FemError::invalid(format!("segment {i}: wave rod needs E"))
                    })?;
                    if !(young > 0.0) {
                        return Err(FemError::invalid(format!(
                            "segment {i}: material constants must be positive"
                        )));
                    }
                }
            }
        }
        let last = self.materials.last().expect("checked non-empty").end;
        if (last - self.length).abs() > 1e-9 * self.length.max(1.0) {
            return Err(FemError::invalid(format!(
                "material segments end at {last}, rod ends at {}",
                self.length
            )));
        }
        if let InitialProfile::Nodes(nodes) = &self.u0 {
            if nodes.iter().any(|v| !v.is_finite()) {
                return Err(FemError::invalid("initial profile has non-finite values"));
            }
        }
        let (lo, hi) = self.state_bounds();
        if !(lo < hi) {
            return Err(FemError::invalid("state bounds are inverted"));
        }
        Ok(())
    }

    /// Material segment covering coordinate `x`.
    fn segment_at(&self, x: f64) -> &MaterialSegment {
        self.materials
            .iter()
            .find(|seg| x <= seg.end)
            .unwrap_or_else(|| self.materials.last().expect("validated non-empty"))
    }

    /// Initial node values on an `nx`-element mesh.
    pub fn initial_nodes(&self, nx: usize) -> Result<Vec<f64>, FemError> {
        match &self.u0 {
            InitialProfile::Const(v) => {
                let mut nodes = vec![*v; nx + 1];
                nodes[0] = self.g0;
                Ok(nodes)
            }
            InitialProfile::Nodes(nodes) => {
                if nodes.len() != nx + 1 {
                    return Err(FemError::invalid(format!(
                        "initial profile has {} nodes, mesh has {}",
                        nodes.len(),
                        nx + 1
                    )));
                }
                if (nodes[0] - self.g0).abs() > 1e-6 * self.g0.abs().max(1.0) {
                    return Err(FemError::invalid(format!(
                        "initial profile starts at {}, boundary holds {}",
                        nodes[0], self.g0
                    )));
                }
                Ok(nodes.clone())
            }
        }
    }
}

/// Mesh resolution: `nx` elements over the rod, `nt` implicit time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discretization {
    pub nx: usize,
    pub nt: usize,
}

impl Discretization {
    pub fn new(nx: usize, nt: usize) -> Discretization {
        Discretization { nx, nt }
    }

    /// Default resolution: 20 elements, ~100 time steps.
    pub fn default_for(_sys: &PdeSystem) -> Discretization {
        Discretization { nx: 20, nt: 100 }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if self.nx < 2 {
            return Err(FemError::invalid("need at least 2 elements"));
        }
        if self.nt < 1 {
            return Err(FemError::invalid("need at least 1 time step"));
        }
        Ok(())
    }

    pub fn dx(&self, length: f64) -> f64 {
        length / self.nx as f64
    }

    pub fn dt(&self, tmax: f64) -> f64 {
        tmax / self.nt as f64
    }

    /// Node coordinates, endpoints exact.
    pub fn xs(&self, length: f64) -> Vec<f64> {
        grid(length, self.nx)
    }

    /// Time instants, endpoints exact.
    pub fn ts(&self, tmax: f64) -> Vec<f64> {
        grid(tmax, self.nt)
    }
}

fn grid(span: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { span } else { span * i as f64 / n as f64 })
        .collect()
}

/// Boundary control sequence: one value per time step, applied at `x = L`
/// while stepping from `k` to `k+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlTrajectory {
    pub values: Vec<f64>,
    pub q_max: f64,
}

impl ControlTrajectory {
    pub fn zeros(nt: usize, q_max: f64) -> ControlTrajectory {
        ControlTrajectory { values: vec![0.0; nt], q_max }
    }

    pub fn new(values: Vec<f64>, q_max: f64) -> ControlTrajectory {
        ControlTrajectory { values, q_max }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        let slack = 1e-9 * self.q_max.max(1.0);
        for (k, v) in self.values.iter().enumerate() {
            if !v.is_finite() || v.abs() > self.q_max + slack {
                return Err(FemError::invalid(format!(
                    "control value {v} at step {k} violates |q| <= {}",
                    self.q_max
                )));
            }
        }
        Ok(())
    }
}

/// Discretized state: `u[k][i]` is the value at time `ts[k]`, node `xs[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn nx(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn nt(&self) -> usize {
        self.ts.len() - 1
    }

    pub fn dt(&self) -> f64 {
        if self.ts.len() < 2 {
            0.0
        } else {
            (self.ts[self.ts.len() - 1] - self.ts[0]) / (self.ts.len() - 1) as f64
        }
    }

    /// Grid step nearest to `t`; exact midpoints round to the later step.
    pub fn nearest_time_step(&self, t: f64) -> usize {
        nearest_index(&self.ts, t)
    }

    /// Grid node nearest to `x`; exact midpoints round to the later node.
    pub fn nearest_node(&self, x: f64) -> usize {
        nearest_index(&self.xs, x)
    }
}

pub(crate) fn nearest_index(grid: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = (grid[0] - v).abs();
    for (i, g) in grid.iter().enumerate().skip(1) {
        let d = (g - v).abs();
        if d <= best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FemError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("singular step matrix")]
    SingularSystem,
}

impl FemError {
    fn invalid(msg: impl Into<String>) -> FemError {
        FemError::Invalid(msg.into())
    }
}
