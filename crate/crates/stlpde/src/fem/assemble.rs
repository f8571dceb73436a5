//! Matrix assembly over linear hat elements, plus the tridiagonal
//! factor/solve used by the time stepper.

use super::{Discretization, FemError, PdeKind, PdeSystem};

/// Symmetric tridiagonal matrix: `main` diagonal plus one `off` diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    pub main: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Tridiag {
        Tridiag { main: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn n(&self) -> usize {
        self.main.len()
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Tridiag, factor: f64) -> Tridiag {
        Tridiag {
            main: self
                .main
                .iter()
                .zip(&other.main)
                .map(|(a, b)| a + factor * b)
                .collect(),
            off: self
                .off
                .iter()
                .zip(&other.off)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.main[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// General system with the first row replaced by the identity (the
    /// Dirichlet boundary row).
    pub fn into_dirichlet_system(&self) -> TriSystem {
        let n = self.n();
        let mut sub = vec![0.0; n.saturating_sub(1)];
        let mut main = self.main.clone();
        let mut sup = vec![0.0; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            sub[i] = self.off[i];
            sup[i] = self.off[i];
        }
        main[0] = 1.0;
        if n > 1 {
            sup[0] = 0.0;
        }
        TriSystem { sub, main, sup }
    }
}

/// General (not necessarily symmetric) tridiagonal system.
/// `sub[i]` sits at `(i+1, i)`, `sup[i]` at `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriSystem {
    pub sub: Vec<f64>,
    pub main: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TriSystem {
    pub fn n(&self) -> usize {
        self.main.len()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.main[i] * v[i];
            if i > 0 {
                acc += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Thomas factorization; fails on a (near-)zero pivot.
    pub fn factor(&self) -> Result<FactoredTri, FemError> {
        let n = self.n();
        let mut diag = self.main.clone();
        let mut mult = vec![0.0; n.saturating_sub(1)];
        for i in 1..n {
            let pivot = diag[i - 1];
            if pivot.abs() < 1e-300 {
                return Err(FemError::SingularSystem);
            }
            let w = self.sub[i - 1] / pivot;
            mult[i - 1] = w;
            diag[i] -= w * self.sup[i - 1];
        }
        if let Some(last) = diag.last() {
            if last.abs() < 1e-300 {
                return Err(FemError::SingularSystem);
            }
        }
        Ok(FactoredTri { mult, diag, sup: self.sup.clone() })
    }
}

/// LU factors of a [`TriSystem`]; one factorization serves every time step.
#[derive(Debug, Clone)]
pub struct FactoredTri {
    mult: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl FactoredTri {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= self.mult[i - 1] * y[i - 1];
        }
        let mut x = y;
        x[n - 1] /= self.diag[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.sup[i] * x[i + 1]) / self.diag[i];
        }
        x
    }
}

/// Assembled mass and stiffness matrices for one system on one mesh.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub mass: Tridiag,
    pub stiffness: Tridiag,
}

/// Assemble the global matrices.  Heat rods use mass density `ρ·c` and
/// stiffness `κ`; wave rods use `ρ` and `E`.  Element material constants
/// come from the segment covering the element midpoint.  The returned
/// matrices are the raw symmetric forms; the Dirichlet row replacement
/// happens when a step system is formed (see [`Tridiag::into_dirichlet_system`]).
pub fn assemble(sys: &PdeSystem, disc: &Discretization) -> Result<Assembled, FemError> {
    sys.validate()?;
    disc.validate()?;
    let nx = disc.nx;
    let dx = disc.dx(sys.length);
    let xs = disc.xs(sys.length);

    let mut mass = Tridiag::zeros(nx + 1);
    let mut stiffness = Tridiag::zeros(nx + 1);
    for e in 0..nx {
        let mid = 0.5 * (xs[e] + xs[e + 1]);
        let seg = sys.segment_at(mid);
        let (mass_coef, stiff_coef) = match sys.kind {
            PdeKind::Heat => (
                seg.rho * seg.c.expect("validated heat segment"),
                seg.kappa.expect("validated heat segment"),
            ),
            PdeKind::Wave => (seg.rho, seg.young.expect("validated wave segment")),
        };

        if sys.lumped_mass {
            let half = mass_coef * dx / 2.0;
            mass.main[e] += half;
            mass.main[e + 1] += half;
        } else {
            let sixth = mass_coef * dx / 6.0;
            mass.main[e] += 2.0 * sixth;
            mass.main[e + 1] += 2.0 * sixth;
            mass.off[e] += sixth;
        }

        let k = stiff_coef / dx;
        stiffness.main[e] += k;
        stiffness.main[e + 1] += k;
        stiffness.off[e] -= k;
    }
    Ok(Assembled { mass, stiffness })
}
