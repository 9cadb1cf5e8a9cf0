//! Newton refinement of a jammed packing on its contact equality system:
//! bonded pairs at distance exactly `m`, wall-bonded centers exactly on the
//! centers-square edge, with solid-disk coordinates and `m` as unknowns and
//! rattlers frozen.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::analysis::{ContactGraph, DiskClass};
use crate::core::{CoreError, Packing, Point, Wall};

#[derive(Debug, Error)]
pub enum PolishError {
    #[error("contact system is singular (rank {rank} of {vars} unknowns): the graph is not rigid")]
    SingularSystem { rank: usize, vars: usize },
    #[error("contact graph inconsistent with the geometry: {0}")]
    ContactMismatch(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

const MAX_ITERS: usize = 60;
/// Convergence target on the largest constraint residual, relative to m.
const RESIDUAL_REL_TOL: f64 = 1e-14;
/// The polish may only nudge m; a larger change means the graph did not
/// describe this packing.
const MAX_M_SHIFT: f64 = 1e-9;

/// Refines `p` so that every bond of `contacts` is satisfied exactly,
/// to a residual below `1e-14 * m`.
pub fn polish(p: &Packing, contacts: &ContactGraph) -> Result<Packing, PolishError> {
    let n = p.n();
    let solid: Vec<bool> = contacts.classes.iter().map(|c| *c == DiskClass::Solid).collect();
    // Variable layout: (x, y) per solid disk, then m.
    let mut var_of = vec![usize::MAX; n];
    let mut n_solid = 0usize;
    for i in 0..n {
        if solid[i] {
            var_of[i] = 2 * n_solid;
            n_solid += 1;
        }
    }
    let n_vars = 2 * n_solid + 1;
    let m_var = n_vars - 1;

    // Bonds touching a rattler are dropped along with the rattler itself.
    let dd: Vec<(usize, usize)> = contacts
        .dd
        .iter()
        .filter(|b| solid[b.i] && solid[b.j])
        .map(|b| (b.i, b.j))
        .collect();
    let dw: Vec<(usize, Wall)> = contacts
        .dw
        .iter()
        .filter(|b| solid[b.disk])
        .map(|b| (b.disk, b.wall))
        .collect();
    let n_eqs = dd.len() + dw.len();
    if n_eqs < n_vars {
        return Err(PolishError::SingularSystem { rank: n_eqs, vars: n_vars });
    }

    let mut centers: Vec<Point> = p.centers().to_vec();
    let mut m = p.m();

    let mut converged = false;
    for iter in 0..MAX_ITERS {
        let mut jac = DMatrix::<f64>::zeros(n_eqs, n_vars);
        let mut res = DVector::<f64>::zeros(n_eqs);
        for (row, &(i, j)) in dd.iter().enumerate() {
            let delta = centers[j] - centers[i];
            let dist = delta.norm();
            if dist <= 0.0 {
                return Err(PolishError::ContactMismatch(format!(
                    "bonded disks {i} and {j} coincide"
                )));
            }
            res[row] = dist - m;
            let nx = delta.x / dist;
            let ny = delta.y / dist;
            let (vi, vj) = (var_of[i], var_of[j]);
            jac[(row, vi)] = -nx;
            jac[(row, vi + 1)] = -ny;
            jac[(row, vj)] = nx;
            jac[(row, vj + 1)] = ny;
            jac[(row, m_var)] = -1.0;
        }
        for (row0, &(i, wall)) in dw.iter().enumerate() {
            let row = dd.len() + row0;
            let vi = var_of[i];
            match wall {
                Wall::Left => {
                    res[row] = centers[i].x;
                    jac[(row, vi)] = 1.0;
                }
                Wall::Right => {
                    res[row] = centers[i].x - 1.0;
                    jac[(row, vi)] = 1.0;
                }
                Wall::Bottom => {
                    res[row] = centers[i].y;
                    jac[(row, vi + 1)] = 1.0;
                }
                Wall::Top => {
                    res[row] = centers[i].y - 1.0;
                    jac[(row, vi + 1)] = 1.0;
                }
            }
        }

        let max_res = res.amax();
        if max_res < RESIDUAL_REL_TOL * m {
            converged = true;
            break;
        }

        let svd = jac.clone().svd(true, true);
        let rank = svd.rank(1e-10 * svd.singular_values.max());
        if rank < n_vars {
            if iter == 0 {
                return Err(PolishError::SingularSystem { rank, vars: n_vars });
            }
            return Err(PolishError::ContactMismatch(format!(
                "system lost rank ({rank}/{n_vars}) during refinement"
            )));
        }
        let step = svd
            .solve(&(-res), 1e-14)
            .map_err(|e| PolishError::ContactMismatch(e.to_string()))?;
        for i in 0..n {
            if solid[i] {
                centers[i].x += step[var_of[i]];
                centers[i].y += step[var_of[i] + 1];
            }
        }
        m += step[m_var];
        if !m.is_finite() || m <= 0.0 {
            return Err(PolishError::ContactMismatch("diameter diverged".into()));
        }
    }
    if !converged {
        return Err(PolishError::ContactMismatch(format!(
            "did not reach residual {RESIDUAL_REL_TOL} * m in {MAX_ITERS} iterations"
        )));
    }
    if (m - p.m()).abs() > MAX_M_SHIFT {
        return Err(PolishError::ContactMismatch(format!(
            "m moved by {} which exceeds {MAX_M_SHIFT}",
            (m - p.m()).abs()
        )));
    }
    Ok(Packing::new(m, centers, p.provenance().clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{contact_graph, BOND_REL_TOL};
    use crate::core::SeriesId;
    use crate::patterns::build_pattern;

    #[test]
    fn polish_is_a_fixed_point_on_exact_patterns() {
        let p = build_pattern(SeriesId::Square, 5, None).unwrap();
        let g = contact_graph(&p, BOND_REL_TOL * p.m());
        let q = polish(&p, &g).unwrap();
        assert_eq!(q.m(), p.m());
        for (a, b) in p.centers().iter().zip(q.centers()) {
            assert!((a.x - b.x).abs() < 1e-15 && (a.y - b.y).abs() < 1e-15);
        }
    }

    #[test]
    fn polish_restores_perturbed_pattern() {
        let p = build_pattern(SeriesId::SquareMinus1, 5, None).unwrap();
        let g = contact_graph(&p, BOND_REL_TOL * p.m());
        // Kick the coordinates by ~1e-10 and let the polish pull them back.
        let mut centers = p.centers().to_vec();
        for (i, c) in centers.iter_mut().enumerate() {
            let wiggle = 1e-10 * ((i * 37 % 11) as f64 - 5.0) / 5.0;
            c.x = (c.x + wiggle).clamp(0.0, 1.0);
            c.y = (c.y - wiggle).clamp(0.0, 1.0);
        }
        let perturbed = Packing::new(p.m(), centers, p.provenance().clone()).unwrap();
        let q = polish(&perturbed, &g).unwrap();
        assert!((q.m() - p.m()).abs() < 1e-13);
        for (a, b) in p.centers().iter().zip(q.centers()) {
            assert!(a.dist(*b) < 1e-12);
        }
    }

    #[test]
    fn polish_rejects_bogus_extra_bond() {
        let p = build_pattern(SeriesId::Square, 4, None).unwrap();
        let mut g = contact_graph(&p, BOND_REL_TOL * p.m());
        // Claim a contact between two disks a full diagonal apart.
        let delta = p.centers()[5] - p.centers()[0];
        g.dd.push(crate::analysis::DiskDiskBond {
            i: 0,
            j: 5,
            gap: delta.norm() - p.m(),
            normal: delta * (1.0 / delta.norm()),
        });
        assert!(matches!(polish(&p, &g), Err(PolishError::ContactMismatch(_))));
    }

    #[test]
    fn polish_rejects_floppy_graph() {
        let p = build_pattern(SeriesId::Square, 4, None).unwrap();
        let mut g = contact_graph(&p, BOND_REL_TOL * p.m());
        // Drop every wall bond: the grid can translate, the system is
        // underdetermined.
        g.dw.clear();
        assert!(matches!(polish(&p, &g), Err(PolishError::SingularSystem { .. })));
    }
}
