//! Realizability of a decorated diagram as a Legendrian knot projection.
//!
//! A pair `(Γ+, n)` on the sphere is the diagram of a Legendrian knot iff the
//! open polyhedron `{ q > 0, v < 0, Σ v = e(E), Ψ(q) = n - v }` is nonempty,
//! in units where a full fiber is 1. Since each column of Ψ sums to zero,
//! substituting `v = n - Ψ q` makes the equality `Σ v = e(E)` equivalent to
//! the defect-sum law `Σ n_i = e(E)`, leaving the strict system
//! `q > 0`, `(Ψ q)_i > n_i`, solved here by exact rational Fourier-Motzkin
//! elimination.

use crate::diagram::Diagram;
use crate::Rat;
use num_traits::Zero;

/// The linear data of the realizability test.
#[derive(Clone, Debug)]
pub struct RealizabilityProblem {
    /// `psi[region][crossing]`: (+ quadrants) - (- quadrants) incidence,
    /// counted with multiplicity; entries lie in -2..=2.
    pub psi: Vec<Vec<i64>>,
    /// Region defects in canonical order.
    pub target: Vec<i64>,
    pub euler: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realizability {
    Feasible {
        /// Interior rational point: chord lengths per crossing and curvature
        /// masses per region, in full-fiber units.
        q: Vec<Rat>,
        v: Vec<Rat>,
    },
    Infeasible {
        reason: String,
    },
}

impl Realizability {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Realizability::Feasible { .. })
    }
}

#[derive(thiserror::Error, Debug)]
pub enum RealizabilityError {
    #[error("realizability is stated for genus 0; pass the null-homologous assertion for genus {0}")]
    GenusPrecondition(u32),
}

pub fn problem(d: &Diagram) -> RealizabilityProblem {
    let mut psi = vec![vec![0i64; d.num_crossings()]; d.regions.len()];
    for x in 0..d.num_crossings() {
        for q in 0..4 {
            let r = d.quadrant_region(x, q);
            if d.is_plus(x, q) {
                psi[r][x] += 1;
            } else {
                psi[r][x] -= 1;
            }
        }
    }
    RealizabilityProblem {
        psi,
        target: d.regions.iter().map(|r| r.defect).collect(),
        euler: d.euler,
    }
}

/// Decide realizability of the diagram. For genus > 0 the caller must assert
/// that the projection is null-homologous.
pub fn check(d: &Diagram, assert_null_homologous: bool) -> Result<Realizability, RealizabilityError> {
    if d.genus > 0 && !assert_null_homologous {
        return Err(RealizabilityError::GenusPrecondition(d.genus));
    }
    let p = problem(d);
    Ok(solve(&p))
}

pub fn solve(p: &RealizabilityProblem) -> Realizability {
    let defect_sum: i64 = p.target.iter().sum();
    if defect_sum != p.euler {
        return Realizability::Infeasible {
            reason: format!(
                "defect sum {} differs from euler number {}",
                defect_sum, p.euler
            ),
        };
    }
    if p.euler >= 0 {
        return Realizability::Infeasible {
            reason: "curvature masses are negative and must sum to the euler number, \
                     so e(E) >= 0 is impossible"
                .to_string(),
        };
    }
    let n = p.psi.first().map(|r| r.len()).unwrap_or(0);
    // Strict system over q: rows `coeffs . q > rhs`.
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for j in 0..n {
        let mut coeffs = vec![Rat::zero(); n];
        coeffs[j] = Rat::from_integer(1);
        rows.push((coeffs, Rat::zero()));
    }
    for (i, psi_row) in p.psi.iter().enumerate() {
        let coeffs: Vec<Rat> = psi_row.iter().map(|&c| Rat::from_integer(c)).collect();
        rows.push((coeffs, Rat::from_integer(p.target[i])));
    }
    match fourier_motzkin(rows, n) {
        Some(q) => {
            let v: Vec<Rat> = p
                .psi
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    Rat::from_integer(p.target[i])
                        - row
                            .iter()
                            .zip(&q)
                            .map(|(&c, qj)| Rat::from_integer(c) * qj)
                            .sum::<Rat>()
                })
                .collect();
            debug_assert!(q.iter().all(|x| *x > Rat::zero()));
            debug_assert!(v.iter().all(|x| *x < Rat::zero()));
            debug_assert_eq!(v.iter().sum::<Rat>(), Rat::from_integer(p.euler));
            Realizability::Feasible { q, v }
        }
        None => Realizability::Infeasible {
            reason: "chord-length polyhedron is empty".to_string(),
        },
    }
}

/// Solve a system of strict inequalities `coeffs . x > rhs` by eliminating
/// variables one at a time; returns an interior point on success.
pub fn fourier_motzkin(rows: Vec<(Vec<Rat>, Rat)>, n: usize) -> Option<Vec<Rat>> {
    if n == 0 {
        return if rows.iter().all(|(_, rhs)| Rat::zero() > *rhs) {
            Some(Vec::new())
        } else {
            None
        };
    }
    // Eliminate the last variable.
    let var = n - 1;
    let mut lower: Vec<(Vec<Rat>, Rat)> = Vec::new(); // x_var > bound(x')
    let mut upper: Vec<(Vec<Rat>, Rat)> = Vec::new(); // x_var < bound(x')
    let mut rest: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (coeffs, rhs) in rows {
        let c = coeffs[var];
        if c.is_zero() {
            rest.push((coeffs[..var].to_vec(), rhs));
        } else {
            // c * x_var + a . x' > rhs  =>  x_var >/< (rhs - a . x') / c
            let a: Vec<Rat> = coeffs[..var].iter().map(|x| -*x / c).collect();
            let b = rhs / c;
            if c > Rat::zero() {
                lower.push((a, b));
            } else {
                upper.push((a, b));
            }
        }
    }
    // Every lower bound must be less than every upper bound:
    // lb(x') < ub(x')  <=>  (ub - lb)(x') > 0.
    for (la, lb) in &lower {
        for (ua, ub) in &upper {
            let coeffs: Vec<Rat> = ua.iter().zip(la).map(|(u, l)| *u - *l).collect();
            let rhs = *lb - *ub;
            rest.push((coeffs, rhs));
        }
    }
    let x_rest = fourier_motzkin(rest, var)?;
    let eval = |(a, b): &(Vec<Rat>, Rat)| -> Rat {
        *b + a
            .iter()
            .zip(&x_rest)
            .map(|(c, x)| *c * x)
            .sum::<Rat>()
    };
    let max_lower = lower.iter().map(eval).max();
    let min_upper = upper.iter().map(eval).min();
    let x_var = match (max_lower, min_upper) {
        (Some(lo), Some(hi)) => (lo + hi) / Rat::from_integer(2),
        (Some(lo), None) => lo + Rat::from_integer(1),
        (None, Some(hi)) => hi - Rat::from_integer(1),
        (None, None) => Rat::zero(),
    };
    let mut x = x_rest;
    x.push(x_var);
    Some(x)
}

/// Independent feasibility route for property tests: same strict system, but
/// eliminating the variables in the opposite order, so the elimination path
/// and the generated intermediate constraints differ from `solve`.
pub fn oracle_solve(p: &RealizabilityProblem) -> bool {
    let defect_sum: i64 = p.target.iter().sum();
    if defect_sum != p.euler || p.euler >= 0 {
        return false;
    }
    let n = p.psi.first().map(|r| r.len()).unwrap_or(0);
    let one = Rat::from_integer(1);
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for j in 0..n {
        let mut c = vec![Rat::zero(); n];
        c[j] = one;
        rows.push((c, Rat::zero()));
    }
    for i in 0..p.target.len() {
        let c: Vec<Rat> = p.psi[i].iter().map(|&x| Rat::from_integer(x)).collect();
        rows.push((c, Rat::from_integer(p.target[i])));
    }
    let reversed: Vec<(Vec<Rat>, Rat)> = rows
        .into_iter()
        .map(|(mut c, b)| {
            c.reverse();
            (c, b)
        })
        .collect();
    fourier_motzkin(reversed, n).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Crossing, Diagram};
    use std::collections::BTreeMap;

    fn figure_eight(euler: i64, defects: [i64; 3], plus_pair: u8) -> Diagram {
        Diagram::build(
            0,
            euler,
            vec![1, 1],
            vec![Crossing {
                id: 1,
                sign: -1,
                plus_pair,
                anchor: 1,
            }],
            1,
            BTreeMap::new(),
            Vec::new(),
            defects.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn psi_columns_sum_to_zero() {
        let d = figure_eight(-3, [0, -3, 0], 0);
        let p = problem(&d);
        for j in 0..d.num_crossings() {
            let col: i64 = p.psi.iter().map(|row| row[j]).sum();
            assert_eq!(col, 0);
        }
    }

    #[test]
    fn unknot_feasible_for_small_p() {
        for p in 1..=6 {
            let d = figure_eight(-p, [0, -p, 0], 0);
            let r = check(&d, false).unwrap();
            assert!(r.is_feasible(), "unknot with e = -{p} must be feasible");
            if let Realizability::Feasible { q, v } = r {
                assert!(q.iter().all(|x| *x > Rat::from_integer(0)));
                assert!(v.iter().all(|x| *x < Rat::from_integer(0)));
                assert_eq!(v.iter().sum::<Rat>(), Rat::from_integer(-p));
            }
        }
    }

    #[test]
    fn euler_zero_infeasible() {
        let d = figure_eight(0, [0, 0, 0], 0);
        let r = check(&d, false).unwrap();
        assert!(!r.is_feasible());
    }

    #[test]
    fn whitehead_double_feasible_for_p_at_least_three() {
        // Lobe defects -1, outer 2 - p, `+` on the lobe pair.
        for p in 3..=8 {
            let d = figure_eight(-p, [-1, 2 - p, -1], 0);
            assert!(check(&d, false).unwrap().is_feasible(), "p = {p}");
        }
        // p = 2 leaves no room for the outer curvature mass.
        let d = figure_eight(-2, [-1, 0, -1], 0);
        assert!(!check(&d, false).unwrap().is_feasible());
    }

    #[test]
    fn oracle_agrees_on_figure_eight_family() {
        for p in 0..=6 {
            for lobes in -2..=1 {
                let outer = -p - 2 * lobes;
                let d = figure_eight(-p, [lobes, outer, lobes], 0);
                let main = solve(&problem(&d)).is_feasible();
                let oracle = oracle_solve(&problem(&d));
                assert_eq!(main, oracle, "p={p} lobes={lobes}");
            }
        }
    }
}
