//! Model construction: dynamics rows that mirror the stepper, epigraph rows
//! for the formula.

use crate::fem::{assemble, Discretization, PdeKind, PdeSystem};
use crate::semantics::{window_steps, spatial_nodes, SemanticsError};
use crate::stl::{Comparison, StlFormula, TemporalAtom, TemporalOp};

use super::{MilpError, MilpModel, MilpRow, NodeEnc, NodeKind, RowOp, VarDef};

/// Big-M for one atom: the widest state excursion plus the largest profile
/// swing across the rod, with a unit of slack.
fn atom_big_m(sys: &PdeSystem, atom: &TemporalAtom) -> f64 {
    let (u_lo, u_hi) = sys.state_bounds();
    (u_hi - u_lo) + atom.pred.slope.abs() * sys.length + 1.0
}

/// Interval the margin of `atom` can take when `u` ranges over the state box,
/// after the spatial minimum over the atom's grid nodes.
fn margin_interval(sys: &PdeSystem, atom: &TemporalAtom, xs: &[f64], i_lo: usize, i_hi: usize) -> (f64, f64) {
    let (u_lo, u_hi) = sys.state_bounds();
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for &x in &xs[i_lo..=i_hi] {
        let p = atom.pred.profile_at(x);
        let (l, h) = match atom.pred.cmp {
            Comparison::Gt => (u_lo - p, u_hi - p),
            Comparison::Lt => (p - u_hi, p - u_lo),
            Comparison::Eq => {
                let a = (u_lo - p).abs();
                let b = (u_hi - p).abs();
                let worst = a.max(b);
                let best = if u_lo <= p && p <= u_hi { 0.0 } else { -a.min(b) };
                (-worst, best)
            }
        };
        lo = lo.min(l);
        hi = hi.min(h);
    }
    (lo, hi)
}

struct Proto {
    kind: ProtoKind,
    r_lo: f64,
    r_hi: f64,
    big_m: f64,
}

enum ProtoKind {
    And(usize, usize),
    Or(usize, usize),
    Atom { atom: TemporalAtom, k_lo: usize, k_hi: usize, i_lo: usize, i_hi: usize },
}

/// Preorder layout; returns (index, r_lo, r_hi, max descendant atom big-M).
fn shape(
    f: &StlFormula,
    sys: &PdeSystem,
    xs: &[f64],
    ts: &[f64],
    protos: &mut Vec<Proto>,
) -> Result<(usize, f64, f64, f64), MilpError> {
    let idx = protos.len();
    match f {
        StlFormula::Atom(atom) => {
            let (k_lo, k_hi) = window_steps(ts, atom.t_lo, atom.t_hi)?;
            let (i_lo, i_hi) = spatial_nodes(xs, atom.pred.x_lo, atom.pred.x_hi);
            let (r_lo, r_hi) = margin_interval(sys, atom, xs, i_lo, i_hi);
            let m_formula = atom_big_m(sys, atom);
            let big_m = if atom.op == TemporalOp::Eventually {
                m_formula.max(r_hi - r_lo)
            } else {
                0.0
            };
            protos.push(Proto {
                kind: ProtoKind::Atom { atom: *atom, k_lo, k_hi, i_lo, i_hi },
                r_lo,
                r_hi,
                big_m,
            });
            Ok((idx, r_lo, r_hi, m_formula))
        }
        StlFormula::And(l, r) | StlFormula::Or(l, r) => {
            let and = matches!(f, StlFormula::And(..));
            protos.push(Proto {
                kind: ProtoKind::And(0, 0),
                r_lo: 0.0,
                r_hi: 0.0,
                big_m: 0.0,
            });
            let (li, l_lo, l_hi, l_m) = shape(l, sys, xs, ts, protos)?;
            let (ri, r_lo_c, r_hi_c, r_m) = shape(r, sys, xs, ts, protos)?;
            let m_formula = l_m.max(r_m);
            let (lo, hi, big_m, kind) = if and {
                (l_lo.min(r_lo_c), l_hi.min(r_hi_c), 0.0, ProtoKind::And(li, ri))
            } else {
                let lo = l_lo.min(r_lo_c);
                let hi = l_hi.max(r_hi_c);
                (lo, hi, m_formula.max(hi - lo), ProtoKind::Or(li, ri))
            };
            protos[idx] = Proto { kind, r_lo: lo, r_hi: hi, big_m };
            Ok((idx, lo, hi, m_formula))
        }
    }
}

/// Build the robustness-maximization model for one problem.
///
/// The equality rows reproduce the implicit-Euler stepping term for term, so
/// any simulated trajectory satisfies them to solver roundoff.  State
/// variables carry the box from [`PdeSystem::state_bounds`]; an initial
/// profile outside that box makes the model honestly infeasible.
pub fn encode(
    sys: &PdeSystem,
    disc: &Discretization,
    formula: &StlFormula,
) -> Result<MilpModel, MilpError> {
    sys.validate()?;
    disc.validate()?;
    let report = crate::stl::validate(formula, sys);
    if !report.valid {
        return Err(SemanticsError::DomainMismatch { issues: report.issues }.into());
    }

    let nx = disc.nx;
    let nt = disc.nt;
    let xs = disc.xs(sys.length);
    let ts = disc.ts(sys.tmax);
    let dt = disc.dt(sys.tmax);
    let (u_lo, u_hi) = sys.state_bounds();
    let asm = assemble(sys, disc)?;
    let mass = &asm.mass;
    let stiffness = &asm.stiffness;
    let init = sys.initial_nodes(nx)?;
    let wave = sys.kind == PdeKind::Wave;

    let mut protos = Vec::new();
    shape(formula, sys, &xs, &ts, &mut protos)?;

    // Variables, in a fixed order: states, (velocities,) controls, then per
    // formula node its robustness plus any candidates and selectors.
    let mut vars: Vec<VarDef> = Vec::new();
    let push_var = |vars: &mut Vec<VarDef>, name: String, lo: f64, hi: f64, binary: bool| {
        vars.push(VarDef { name, lo, hi, binary });
        vars.len() - 1
    };
    let mut u_vars = Vec::with_capacity(nt + 1);
    for k in 0..=nt {
        let row: Vec<usize> = (0..=nx)
            .map(|i| push_var(&mut vars, format!("u_{k}_{i}"), u_lo, u_hi, false))
            .collect();
        u_vars.push(row);
    }
    let v_vars = if wave {
        let v_bound = (u_hi - u_lo) / dt;
        let mut rows = Vec::with_capacity(nt + 1);
        for k in 0..=nt {
            let row: Vec<usize> = (0..=nx)
                .map(|i| push_var(&mut vars, format!("v_{k}_{i}"), -v_bound, v_bound, false))
                .collect();
            rows.push(row);
        }
        Some(rows)
    } else {
        None
    };
    let q_vars: Vec<usize> = (1..=nt)
        .map(|k| push_var(&mut vars, format!("q_{k}"), -sys.q_max, sys.q_max, false))
        .collect();

    let mut nodes = Vec::with_capacity(protos.len());
    for (n, proto) in protos.iter().enumerate() {
        let r_var = push_var(&mut vars, format!("r_{n}"), proto.r_lo, proto.r_hi, false);
        let kind = match &proto.kind {
            ProtoKind::And(l, r) => NodeKind::And { left: *l, right: *r },
            ProtoKind::Or(l, r) => {
                let z0 = push_var(&mut vars, format!("z_{n}_0"), 0.0, 1.0, true);
                let z1 = push_var(&mut vars, format!("z_{n}_1"), 0.0, 1.0, true);
                NodeKind::Or { left: *l, right: *r, z: [z0, z1] }
            }
            ProtoKind::Atom { atom, k_lo, k_hi, i_lo, i_hi } => {
                let (mut cand, mut z) = (Vec::new(), Vec::new());
                if atom.op == TemporalOp::Eventually {
                    for k in *k_lo..=*k_hi {
                        cand.push(push_var(
                            &mut vars,
                            format!("r_{n}_{k}"),
                            proto.r_lo,
                            proto.r_hi,
                            false,
                        ));
                    }
                    for k in *k_lo..=*k_hi {
                        z.push(push_var(&mut vars, format!("z_{n}_{k}"), 0.0, 1.0, true));
                    }
                }
                NodeKind::Atom {
                    atom: *atom,
                    k_lo: *k_lo,
                    k_hi: *k_hi,
                    i_lo: *i_lo,
                    i_hi: *i_hi,
                    cand,
                    z,
                }
            }
        };
        nodes.push(NodeEnc { r_var, r_lo: proto.r_lo, r_hi: proto.r_hi, big_m: proto.big_m, kind });
    }

    // Rows: initial profile, stepping, then the formula in preorder.
    let mut rows: Vec<MilpRow> = Vec::new();
    let add = |rows: &mut Vec<MilpRow>, name: String, terms: Vec<(usize, f64)>, op: RowOp, rhs: f64| {
        rows.push(MilpRow { name, terms, op, rhs });
    };

    for i in 0..=nx {
        add(&mut rows, format!("ic_{i}"), vec![(u_vars[0][i], 1.0)], RowOp::Eq, init[i]);
    }
    if let Some(v) = &v_vars {
        for i in 0..=nx {
            add(&mut rows, format!("vic_{i}"), vec![(v[0][i], 1.0)], RowOp::Eq, 0.0);
        }
    }

    // Symmetric tridiagonal row i of `t`, scaled, applied to variable row `vs`.
    let tri_terms = |t: &crate::fem::Tridiag, scale: f64, vs: &[usize], i: usize, terms: &mut Vec<(usize, f64)>| {
        if i > 0 {
            terms.push((vs[i - 1], scale * t.off[i - 1]));
        }
        terms.push((vs[i], scale * t.main[i]));
        if i < vs.len() - 1 {
            terms.push((vs[i + 1], scale * t.off[i]));
        }
    };

    match sys.kind {
        PdeKind::Heat => {
            let lhs = mass.add_scaled(stiffness, dt);
            for k in 1..=nt {
                add(&mut rows, format!("dir_{k}"), vec![(u_vars[k][0], 1.0)], RowOp::Eq, sys.g0);
                for i in 1..=nx {
                    let mut terms = Vec::with_capacity(7);
                    tri_terms(&lhs, 1.0, &u_vars[k], i, &mut terms);
                    tri_terms(mass, -1.0, &u_vars[k - 1], i, &mut terms);
                    if i == nx {
                        terms.push((q_vars[k - 1], -dt));
                    }
                    add(&mut rows, format!("dyn_{k}_{i}"), terms, RowOp::Eq, 0.0);
                }
            }
        }
        PdeKind::Wave => {
            let v = v_vars.as_ref().expect("wave carries velocity variables");
            let lhs = mass.add_scaled(stiffness, dt * dt);
            for k in 1..=nt {
                add(&mut rows, format!("vdir_{k}"), vec![(v[k][0], 1.0)], RowOp::Eq, 0.0);
                for i in 1..=nx {
                    let mut terms = Vec::with_capacity(10);
                    tri_terms(&lhs, 1.0, &v[k], i, &mut terms);
                    tri_terms(mass, -1.0, &v[k - 1], i, &mut terms);
                    tri_terms(stiffness, dt, &u_vars[k - 1], i, &mut terms);
                    if i == nx {
                        terms.push((q_vars[k - 1], -dt));
                    }
                    add(&mut rows, format!("vdyn_{k}_{i}"), terms, RowOp::Eq, 0.0);
                }
                for i in 0..=nx {
                    add(
                        &mut rows,
                        format!("uup_{k}_{i}"),
                        vec![(u_vars[k][i], 1.0), (u_vars[k - 1][i], -1.0), (v[k][i], -dt)],
                        RowOp::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    // Epigraph rows binding `r` (or a candidate) to the margin at one (k, i).
    let margin_rows = |rows: &mut Vec<MilpRow>, tag: &str, n: usize, r: usize, atom: &TemporalAtom, k: usize, i: usize| {
        let p = atom.pred.profile_at(xs[i]);
        let u = u_vars[k][i];
        match atom.pred.cmp {
            Comparison::Gt => rows.push(MilpRow {
                name: format!("{tag}{n}_{k}_{i}"),
                terms: vec![(r, 1.0), (u, -1.0)],
                op: RowOp::Le,
                rhs: -p,
            }),
            Comparison::Lt => rows.push(MilpRow {
                name: format!("{tag}{n}_{k}_{i}"),
                terms: vec![(r, 1.0), (u, 1.0)],
                op: RowOp::Le,
                rhs: p,
            }),
            Comparison::Eq => {
                rows.push(MilpRow {
                    name: format!("{tag}{n}_{k}_{i}a"),
                    terms: vec![(r, 1.0), (u, -1.0)],
                    op: RowOp::Le,
                    rhs: -p,
                });
                rows.push(MilpRow {
                    name: format!("{tag}{n}_{k}_{i}b"),
                    terms: vec![(r, 1.0), (u, 1.0)],
                    op: RowOp::Le,
                    rhs: p,
                });
            }
        }
    };

    for (n, node) in nodes.iter().enumerate() {
        let r = node.r_var;
        match &node.kind {
            NodeKind::And { left, right } => {
                add(&mut rows, format!("and{n}_l"), vec![(r, 1.0), (nodes[*left].r_var, -1.0)], RowOp::Le, 0.0);
                add(&mut rows, format!("and{n}_r"), vec![(r, 1.0), (nodes[*right].r_var, -1.0)], RowOp::Le, 0.0);
            }
            NodeKind::Or { left, right, z } => {
                let m = node.big_m;
                add(
                    &mut rows,
                    format!("or{n}_0"),
                    vec![(r, 1.0), (nodes[*left].r_var, -1.0), (z[0], m)],
                    RowOp::Le,
                    m,
                );
                add(
                    &mut rows,
                    format!("or{n}_1"),
                    vec![(r, 1.0), (nodes[*right].r_var, -1.0), (z[1], m)],
                    RowOp::Le,
                    m,
                );
                add(&mut rows, format!("orsum{n}"), vec![(z[0], 1.0), (z[1], 1.0)], RowOp::Eq, 1.0);
            }
            NodeKind::Atom { atom, k_lo, k_hi, i_lo, i_hi, cand, z } => {
                if atom.op == TemporalOp::Globally {
                    for k in *k_lo..=*k_hi {
                        for i in *i_lo..=*i_hi {
                            margin_rows(&mut rows, "g", n, r, atom, k, i);
                        }
                    }
                } else {
                    let m = node.big_m;
                    for (c, k) in cand.iter().zip(*k_lo..=*k_hi) {
                        for i in *i_lo..=*i_hi {
                            margin_rows(&mut rows, "f", n, *c, atom, k, i);
                        }
                    }
                    for ((c, zk), k) in cand.iter().zip(z).zip(*k_lo..=*k_hi) {
                        add(
                            &mut rows,
                            format!("sel{n}_{k}"),
                            vec![(r, 1.0), (*c, -1.0), (*zk, m)],
                            RowOp::Le,
                            m,
                        );
                    }
                    add(
                        &mut rows,
                        format!("fsum{n}"),
                        z.iter().map(|&zk| (zk, 1.0)).collect(),
                        RowOp::Eq,
                        1.0,
                    );
                }
            }
        }
    }

    Ok(MilpModel {
        system: sys.clone(),
        disc: *disc,
        formula: formula.clone(),
        objective_var: nodes[0].r_var,
        vars,
        rows,
        nodes,
        q_vars,
        u_vars,
        v_vars,
    })
}
