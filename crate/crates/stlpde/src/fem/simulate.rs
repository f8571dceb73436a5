//! Implicit time stepping.
//!
//! Heat: `(M + Δt·K) u^{k+1} = M·u^k + Δt·F^{k+1}`.
//!
//! Wave: the second-order equation is split into `u̇ = v`, `M·v̇ = −K·u + F`
//! and stepped with implicit Euler:
//! `(M + Δt²·K) v^{k+1} = M·v^k − Δt·K·u^k + Δt·F^{k+1}`,
//! then `u^{k+1} = u^k + Δt·v^{k+1}`, starting from `v^0 = 0`.
//!
//! `F^{k+1}` is the load vector carrying the control value for the step from
//! `k` to `k+1` at the last node; the Dirichlet row pins node 0 (to `g0` for
//! heat states, to zero velocity for wave).  The step matrix is factored
//! once and reused for every step.

use super::{
    assemble, ControlTrajectory, Discretization, FemError, PdeKind, PdeSystem, Trajectory,
};

/// Run the stepper from `u_init` under the given control sequence.
pub fn simulate(
    sys: &PdeSystem,
    disc: &Discretization,
    ctrl: &ControlTrajectory,
    u_init: &[f64],
) -> Result<Trajectory, FemError> {
    let asm = assemble(sys, disc)?;
    ctrl.validate()?;
    if ctrl.values.len() != disc.nt {
        return Err(FemError::Invalid(format!(
            "control has {} steps, grid has {}",
            ctrl.values.len(),
            disc.nt
        )));
    }
    if u_init.len() != disc.nx + 1 {
        return Err(FemError::Invalid(format!(
            "initial profile has {} nodes, mesh has {}",
            u_init.len(),
            disc.nx + 1
        )));
    }
    if (u_init[0] - sys.g0).abs() > 1e-6 * sys.g0.abs().max(1.0) {
        return Err(FemError::Invalid(format!(
            "initial profile starts at {}, boundary holds {}",
            u_init[0], sys.g0
        )));
    }

    let nx = disc.nx;
    let nt = disc.nt;
    let dt = disc.dt(sys.tmax);
    let mut rows = Vec::with_capacity(nt + 1);
    rows.push(u_init.to_vec());

    match sys.kind {
        PdeKind::Heat => {
            let step = asm.mass.add_scaled(&asm.stiffness, dt).into_dirichlet_system();
            let fac = step.factor()?;
            for k in 0..nt {
                let prev = rows.last().expect("seeded with u_init");
                let mut rhs = asm.mass.mul_vec(prev);
                rhs[nx] += dt * ctrl.values[k];
                rhs[0] = sys.g0;
                rows.push(fac.solve(&rhs));
            }
        }
        PdeKind::Wave => {
            let step = asm
                .mass
                .add_scaled(&asm.stiffness, dt * dt)
                .into_dirichlet_system();
            let fac = step.factor()?;
            let mut v = vec![0.0; nx + 1];
            for k in 0..nt {
                let prev = rows.last().expect("seeded with u_init");
                let mv = asm.mass.mul_vec(&v);
                let ku = asm.stiffness.mul_vec(prev);
                let mut rhs: Vec<f64> =
                    mv.iter().zip(&ku).map(|(m, s)| m - dt * s).collect();
                rhs[nx] += dt * ctrl.values[k];
                rhs[0] = 0.0;
                v = fac.solve(&rhs);
                let next: Vec<f64> =
                    prev.iter().zip(&v).map(|(u, vi)| u + dt * vi).collect();
                rows.push(next);
            }
        }
    }

    Ok(Trajectory { xs: disc.xs(sys.length), ts: disc.ts(sys.tmax), u: rows })
}

/// State row at the grid step nearest `t_s` (exact midpoints round later);
/// the restart profile for chained solves.
pub fn final_state(traj: &Trajectory, t_s: f64) -> Vec<f64> {
    traj.u[traj.nearest_time_step(t_s)].clone()
}
