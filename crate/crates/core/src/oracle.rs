//! Independent brute-force verifier: the coupled forward/backward affine
//! system over the whole horizon, stacked into one dense linear system and
//! solved by LU factorization with partial pivoting.
//!
//! This route shares only the reaction chain with the sweep solver; the
//! factorization is deliberately hand-rolled rather than delegated, so the
//! two paths have no linear-algebra machinery in common.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::foc::{reaction_chain, CostateTriple};
use crate::hmatrix::{derive_matrices, GameMatrices};
use crate::model::ModelParams;
use crate::sweep::Trajectory;
use crate::{lit, Error, Result, Scalar};

/// The stacked linear system `M v = r` over the unknowns
/// `{x~_t, P~_t : t = 1..=T+1}`.
#[derive(Debug, Clone)]
pub struct StackedSystem<T> {
    pub m: DMatrix<T>,
    pub r: DVector<T>,
    horizon: usize,
}

impl<T> StackedSystem<T> {
    /// Column of component `i` of `x~_t`.
    pub fn col_x(&self, t: usize, i: usize) -> usize {
        debug_assert!(t >= 1 && t <= self.horizon + 1 && i < 3);
        6 * (t - 1) + i
    }

    /// Column of component `i` of `P~_t`.
    pub fn col_p(&self, t: usize, i: usize) -> usize {
        debug_assert!(t >= 1 && t <= self.horizon + 1 && i < 3);
        6 * (t - 1) + 3 + i
    }

    pub fn dim(&self) -> usize {
        6 * (self.horizon + 1)
    }
}

/// Builds the `6(T+1)`-dimensional system: 3 rows pin `x~_1`, `3T` rows
/// encode the state equations, `3T` rows the costate equations, and the
/// final 3 rows pin `P~_{T+1} = 0`.
pub fn assemble<T: Scalar>(gm: &GameMatrices<T>, params: &ModelParams<T>) -> StackedSystem<T> {
    let horizon = params.t;
    let n = 6 * (horizon + 1);
    let mut sys = StackedSystem {
        m: DMatrix::zeros(n, n),
        r: DVector::zeros(n),
        horizon,
    };

    let cx = |t: usize, i: usize| 6 * (t - 1) + i;
    let cp = |t: usize, i: usize| 6 * (t - 1) + 3 + i;

    let mut row = 0;
    // x~_1 = (x1, 0, 0)
    let x1 = Vector3::new(params.x1, T::zero(), T::zero());
    for i in 0..3 {
        sys.m[(row, cx(1, i))] = T::one();
        sys.r[row] = x1[i];
        row += 1;
    }
    // x~_{t+1} - A x~_t - B P~_{t+1} = D
    for t in 1..=horizon {
        for i in 0..3 {
            sys.m[(row, cx(t + 1, i))] = T::one();
            for j in 0..3 {
                sys.m[(row, cx(t, j))] -= gm.a[(i, j)];
                sys.m[(row, cp(t + 1, j))] -= gm.b[(i, j)];
            }
            sys.r[row] = gm.d[i];
            row += 1;
        }
    }
    // P~_t - C x~_t - A P~_{t+1} = E
    for t in 1..=horizon {
        for i in 0..3 {
            sys.m[(row, cp(t, i))] = T::one();
            for j in 0..3 {
                sys.m[(row, cx(t, j))] -= gm.c[(i, j)];
                sys.m[(row, cp(t + 1, j))] -= gm.a[(i, j)];
            }
            sys.r[row] = gm.e[i];
            row += 1;
        }
    }
    // P~_{T+1} = 0
    for i in 0..3 {
        sys.m[(row, cp(horizon + 1, i))] = T::one();
        row += 1;
    }
    debug_assert_eq!(row, n);
    sys
}

/// In-place LU solve with partial pivoting. Fails when a pivot falls below
/// `1e-12` of the matrix scale.
fn lu_solve<T: Scalar>(mut m: DMatrix<T>, mut r: DVector<T>) -> Result<DVector<T>> {
    let n = m.nrows();
    let scale = m.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let tol = lit::<T>(1e-12) * scale;

    for col in 0..n {
        // pivot selection
        let mut pivot_row = col;
        let mut pivot_mag = m[(col, col)].abs();
        for row in col + 1..n {
            let mag = m[(row, col)].abs();
            if mag > pivot_mag {
                pivot_row = row;
                pivot_mag = mag;
            }
        }
        if pivot_mag < tol {
            return Err(Error::SingularSystem(col));
        }
        if pivot_row != col {
            m.swap_rows(pivot_row, col);
            r.swap_rows(pivot_row, col);
        }
        let pivot = m[(col, col)];
        for row in col + 1..n {
            let factor = m[(row, col)] / pivot;
            if factor == T::zero() {
                continue;
            }
            m[(row, col)] = T::zero();
            for k in col + 1..n {
                let sub = factor * m[(col, k)];
                m[(row, k)] -= sub;
            }
            let sub = factor * r[col];
            r[row] -= sub;
        }
    }
    // back substitution
    for col in (0..n).rev() {
        let mut acc = r[col];
        for k in col + 1..n {
            acc -= m[(col, k)] * r[k];
        }
        r[col] = acc / m[(col, col)];
    }
    Ok(r)
}

/// Solves the whole-horizon system directly and unpacks a [`Trajectory`],
/// recovering investments through the reaction chain.
pub fn solve_direct<T: Scalar>(params: &ModelParams<T>) -> Result<Trajectory<T>> {
    let gm = derive_matrices(params)?;
    let sys = assemble(&gm, params);
    let v = lu_solve(sys.m.clone(), sys.r.clone())?;

    let horizon = params.t;
    let states: Vec<Vector3<T>> = (1..=horizon + 1)
        .map(|t| Vector3::new(v[sys.col_x(t, 0)], v[sys.col_x(t, 1)], v[sys.col_x(t, 2)]))
        .collect();
    let costates: Vec<Vector3<T>> = (1..=horizon + 1)
        .map(|t| Vector3::new(v[sys.col_p(t, 0)], v[sys.col_p(t, 1)], v[sys.col_p(t, 2)]))
        .collect();
    let investments = (1..=horizon)
        .map(|t| {
            let p = costates[t];
            reaction_chain(
                &CostateTriple {
                    p_s: p[0],
                    p_m: p[1],
                    p_r: p[2],
                },
                params,
            )
        })
        .collect();

    Ok(Trajectory {
        states,
        costates,
        investments,
    })
}

/// Worst relative deviation between two trajectories:
/// `max |a - b| / (1 + |a| + |b|)` over every field and period.
pub fn compare<T: Scalar>(a: &Trajectory<T>, b: &Trajectory<T>) -> Result<T> {
    if a.horizon() != b.horizon() {
        return Err(Error::DimensionMismatch {
            expected: a.horizon(),
            actual: b.horizon(),
        });
    }
    let mut worst = T::zero();
    let mut meas = |x: T, y: T| {
        let rel = (x - y).abs() / (T::one() + x.abs() + y.abs());
        worst = worst.max(rel);
    };
    for t in 0..=a.horizon() {
        for i in 0..3 {
            meas(a.states[t][i], b.states[t][i]);
            meas(a.costates[t][i], b.costates[t][i]);
        }
    }
    for t in 0..a.horizon() {
        meas(a.investments[t].i_s, b.investments[t].i_s);
        meas(a.investments[t].i_m, b.investments[t].i_m);
        meas(a.investments[t].i_r, b.investments[t].i_r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_params;
    use crate::sweep;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimensions() {
        let p = ModelParams {
            t: 1,
            ..example_params::<f64>()
        };
        let gm = derive_matrices(&p).unwrap();
        assert_eq!(assemble(&gm, &p).dim(), 12);
        let p10 = example_params::<f64>();
        let gm10 = derive_matrices(&p10).unwrap();
        assert_eq!(assemble(&gm10, &p10).dim(), 66);
    }

    #[test]
    fn boundary_rows_are_unit() {
        let p = example_params::<f64>();
        let gm = derive_matrices(&p).unwrap();
        let sys = assemble(&gm, &p);
        for i in 0..3 {
            let row = sys.m.row(i);
            assert_eq!(row.iter().filter(|v| **v != 0.0).count(), 1);
            assert_eq!(sys.m[(i, sys.col_x(1, i))], 1.0);
        }
        assert_eq!(sys.r[0], p.x1);
        assert_eq!(sys.r[1], 0.0);
        assert_eq!(sys.r[2], 0.0);
    }

    #[test]
    fn t1_matches_hand_chain() {
        let p = ModelParams {
            t: 1,
            ..example_params::<f64>()
        };
        let traj = solve_direct(&p).unwrap();
        assert_relative_eq!(traj.investments[0].i_s, 700.0, epsilon = 1e-9);
        assert_relative_eq!(traj.investments[0].i_m, -50.0, epsilon = 1e-9);
        assert_relative_eq!(traj.investments[0].i_r, -125.0, epsilon = 1e-9);
    }

    #[test]
    fn decoupled_decay() {
        let p = ModelParams {
            beta1: 0.0,
            beta2: 0.0,
            beta3: 0.0,
            delta: 0.0,
            delta_hat: 0.0,
            delta_hathat: 0.0,
            ..example_params::<f64>()
        };
        let traj = solve_direct(&p).unwrap();
        for t in 1..=p.t + 1 {
            assert_relative_eq!(traj.x(t), p.alpha.powi(t as i32 - 1), epsilon = 1e-12);
            assert!(traj.costates[t - 1].abs().max() <= 1e-14);
        }
    }

    #[test]
    fn oracle_satisfies_residual_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = ModelParams {
                alpha: rng.gen_range(0.1..0.95),
                beta1: rng.gen_range(0.0..1.0),
                beta2: rng.gen_range(0.0..1.0),
                beta3: rng.gen_range(0.0..1.0),
                delta: rng.gen_range(0.0..0.5),
                delta_hat: rng.gen_range(0.0..0.5),
                delta_hathat: rng.gen_range(0.0..0.5),
                tau: rng.gen_range(0.05..0.5),
                theta: rng.gen_range(0.001..0.05),
                d: rng.gen_range(0.0..1.0),
                d_hat: rng.gen_range(0.0..1.0),
                t: 5,
                ..example_params::<f64>()
            };
            let gm = derive_matrices(&p).unwrap();
            let traj = solve_direct(&p).unwrap();
            let scale = gm.coefficient_scale()
                * traj
                    .states
                    .iter()
                    .chain(traj.costates.iter())
                    .fold(1.0f64, |acc, v| acc.max(v.abs().max()));
            assert!(sweep::residual_norm(&traj, &gm, &p) <= 1e-9 * scale);
        }
    }

    #[test]
    fn compare_properties() {
        let p = example_params::<f64>();
        let a = solve_direct(&p).unwrap();
        assert_eq!(compare(&a, &a).unwrap(), 0.0);

        let mut b = a.clone();
        b.states[3][0] += 1e-6;
        let dev = compare(&a, &b).unwrap();
        let expect = 1e-6 / (1.0 + a.states[3][0].abs() + b.states[3][0].abs());
        assert_relative_eq!(dev, expect, epsilon = 1e-12);
        assert_eq!(compare(&a, &b).unwrap(), compare(&b, &a).unwrap());

        let short = ModelParams {
            t: 3,
            ..example_params::<f64>()
        };
        let c = solve_direct(&short).unwrap();
        assert!(matches!(
            compare(&a, &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sweep_and_oracle_agree_on_example() {
        let p = example_params::<f64>();
        let a = sweep::solve(&p).unwrap();
        let b = solve_direct(&p).unwrap();
        assert!(compare(&a, &b).unwrap() <= 1e-8);
    }
}
