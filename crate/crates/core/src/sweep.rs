//! Sweep-method solution of the two-point boundary value problem.
//!
//! Backward Riccati recursion for the pair `(S_k, g_k)` of the linear
//! ansatz `P~_k = S_k x~_k - g_k`, seeded by `S_{T+1} = 0`, `g_{T+1} = 0`:
//!
//! ```text
//! S_k = C + A S_{k+1} (I - B S_{k+1})^-1 A
//! g_k = A S_{k+1} (I - B S_{k+1})^-1 (B g_{k+1} - D) + A g_{k+1} - E
//! ```
//!
//! then a forward pass reconstructs `x~_t`, `P~_t` and recovers investments
//! through the reaction chain. No regularization is applied: a singular
//! `I - B S_{k+1}` fails loudly.

use nalgebra::{Matrix3, Vector3};

use crate::foc::{reaction_chain, stationarity_residuals, CostateTriple, PeriodDecision};
use crate::hmatrix::GameMatrices;
use crate::model::ModelParams;
use crate::{lit, Error, Result, Scalar};

/// One step of the backward recursion: the Riccati pair at period `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepState<T> {
    pub s: Matrix3<T>,
    pub g: Vector3<T>,
    pub k: usize,
}

/// The full open-loop solution.
///
/// `states[t-1]` is `x~_t = (x_t, mu_t, u_t)` and `costates[t-1]` is
/// `P~_t = (pS_t, pM_t, pR_t)` for `t = 1..=T+1`; `investments[t-1]` covers
/// `t = 1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub states: Vec<Vector3<T>>,
    pub costates: Vec<Vector3<T>>,
    pub investments: Vec<PeriodDecision<T>>,
}

impl<T: Scalar> Trajectory<T> {
    /// Number of decision periods `T`.
    pub fn horizon(&self) -> usize {
        self.investments.len()
    }

    pub fn x(&self, t: usize) -> T {
        self.states[t - 1][0]
    }

    pub fn mu(&self, t: usize) -> T {
        self.states[t - 1][1]
    }

    pub fn u(&self, t: usize) -> T {
        self.states[t - 1][2]
    }

    pub fn costate(&self, t: usize) -> CostateTriple<T> {
        let p = self.costates[t - 1];
        CostateTriple {
            p_s: p[0],
            p_m: p[1],
            p_r: p[2],
        }
    }
}

fn invert_step<T: Scalar>(m: &GameMatrices<T>, s_next: &Matrix3<T>, k: usize) -> Result<Matrix3<T>> {
    let lhs = Matrix3::identity() - m.b * s_next;
    let scale = lhs.abs().max().max(T::one());
    let det = lhs.determinant();
    if det.abs() < lit::<T>(1e-12) * scale * scale * scale {
        return Err(Error::SingularSweep(k));
    }
    lhs.try_inverse().ok_or(Error::SingularSweep(k))
}

/// Backward Riccati recursion. Returns the sweep states for
/// `k = 1..=T+1` (index `k-1`), terminal pair last.
pub fn backward_pass<T: Scalar>(m: &GameMatrices<T>, horizon: usize) -> Result<Vec<SweepState<T>>> {
    let mut states = vec![
        SweepState {
            s: Matrix3::zeros(),
            g: Vector3::zeros(),
            k: horizon + 1,
        };
        horizon + 1
    ];
    for k in (1..=horizon).rev() {
        let next = &states[k]; // index k holds period k+1
        let inv = invert_step(m, &next.s, k)?;
        let s = m.c + m.a * next.s * inv * m.a;
        let g = m.a * next.s * inv * (m.b * next.g - m.d) + m.a * next.g - m.e;
        states[k - 1] = SweepState { s, g, k };
    }
    Ok(states)
}

/// Forward reconstruction of the trajectory from a completed backward pass.
pub fn forward_pass<T: Scalar>(
    m: &GameMatrices<T>,
    states: &[SweepState<T>],
    x1: T,
    params: &ModelParams<T>,
) -> Result<Trajectory<T>> {
    let horizon = states.len() - 1;
    let mut xs = Vec::with_capacity(horizon + 1);
    xs.push(Vector3::new(x1, T::zero(), T::zero()));
    for k in 1..=horizon {
        let next = &states[k];
        let inv = invert_step(m, &next.s, k)?;
        let x_next = inv * (m.a * xs[k - 1] - m.b * next.g + m.d);
        xs.push(x_next);
    }

    let mut ps = Vec::with_capacity(horizon + 1);
    for k in 1..=horizon {
        ps.push(states[k - 1].s * xs[k - 1] - states[k - 1].g);
    }
    ps.push(Vector3::zeros());

    let investments = (1..=horizon)
        .map(|t| {
            let p_next = ps[t];
            reaction_chain(
                &CostateTriple {
                    p_s: p_next[0],
                    p_m: p_next[1],
                    p_r: p_next[2],
                },
                params,
            )
        })
        .collect();

    Ok(Trajectory {
        states: xs,
        costates: ps,
        investments,
    })
}

/// Convenience wrapper: derive matrices, sweep backward, pass forward.
pub fn solve<T: Scalar>(params: &ModelParams<T>) -> Result<Trajectory<T>> {
    let m = crate::hmatrix::derive_matrices(params)?;
    let states = backward_pass(&m, params.t)?;
    forward_pass(&m, &states, params.x1, params)
}

/// Max-norm defect of a trajectory against the affine system, the
/// stationarity conditions and the boundary conditions. Zero (to rounding)
/// for a genuine solution; measures the size of any perturbation.
pub fn residual_norm<T: Scalar>(
    traj: &Trajectory<T>,
    m: &GameMatrices<T>,
    params: &ModelParams<T>,
) -> T {
    let horizon = traj.horizon();
    let mut worst = T::zero();
    let mut push = |v: T| worst = worst.max(v.abs());

    for t in 1..=horizon {
        let xt = traj.states[t - 1];
        let pn = traj.costates[t];
        let state_defect = traj.states[t] - (m.a * xt + m.b * pn + m.d);
        let costate_defect = traj.costates[t - 1] - (m.c * xt + m.a * pn + m.e);
        push(state_defect.abs().max());
        push(costate_defect.abs().max());

        let (rs, rm, rr) = stationarity_residuals(
            &traj.investments[t - 1],
            &traj.costate(t + 1),
            params,
        );
        push(rs);
        push(rm);
        push(rr);
    }

    push(traj.x(1) - params.x1);
    push(traj.mu(1));
    push(traj.u(1));
    push(traj.costates[horizon].abs().max());
    worst
}
