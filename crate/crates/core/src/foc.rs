//! First-order conditions of both Stackelberg levels: reaction functions,
//! costate recursions, auxiliary-multiplier recursions, the state recursion
//! and stationarity residuals.
//!
//! All functions are pure and affine in their numeric arguments. The
//! convention throughout: costates carry the *next*-period index (each
//! Hamiltonian adjoins `P_{t+1}` times the state transition), multipliers
//! the current one.

use crate::{lit, model::ModelParams, Scalar};

/// Per-period investments of the three members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodDecision<T> {
    pub i_s: T,
    pub i_m: T,
    pub i_r: T,
}

/// Shadow prices of the CSR state for the three members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostateTriple<T> {
    pub p_s: T,
    pub p_m: T,
    pub p_r: T,
}

impl<T: Scalar> CostateTriple<T> {
    pub fn zero() -> Self {
        Self {
            p_s: T::zero(),
            p_m: T::zero(),
            p_r: T::zero(),
        }
    }
}

/// The leader-side multipliers adjoined to the followers' costate
/// equations: `mu` on the manufacturer's, `u` on the retailer's.
/// Both start at exactly zero in period one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierPair<T> {
    pub mu: T,
    pub u: T,
}

impl<T: Scalar> MultiplierPair<T> {
    pub fn zero() -> Self {
        Self {
            mu: T::zero(),
            u: T::zero(),
        }
    }
}

/// Retailer's best response to the other members' investments and its own
/// next-period costate:
/// `iR = (1 - p_r*beta3 - tau*theta*(i_m + i_s) - tau) / (2*tau*theta)`.
pub fn retailer_reaction<T: Scalar>(i_s: T, i_m: T, p_r_next: T, p: &ModelParams<T>) -> T {
    let tt = p.tau * p.theta;
    (T::one() - p_r_next * p.beta3 - tt * (i_m + i_s) - p.tau) / (lit::<T>(2.0) * tt)
}

/// Manufacturer's best response with the retailer's reaction substituted.
pub fn manufacturer_reaction<T: Scalar>(i_s: T, p_m_next: T, p_r_next: T, p: &ModelParams<T>) -> T {
    let tt = p.tau * p.theta;
    let two = lit::<T>(2.0);
    (-tt * i_s + p.beta3 * p_r_next + (T::one() + p.d_hat - p.tau)) / (two * tt)
        - (p.beta2 - p.beta3 / two) * p_m_next / tt
}

/// Supplier's best response with both followers' reactions substituted.
pub fn supplier_reaction<T: Scalar>(p_next: &CostateTriple<T>, p: &ModelParams<T>) -> T {
    let tt = p.tau * p.theta;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    (p.beta3 / two + p.beta2 - two * p.beta1) / tt * p_next.p_s
        + (p.beta2 - p.beta3 / two) / tt * p_next.p_m
        + p.beta3 / (two * tt) * p_next.p_r
        + (three - three * p.tau - p.d_hat + two * p.d) / (two * tt)
}

/// Chains the three reaction functions for a given next-period costate
/// triple, leader first.
pub fn reaction_chain<T: Scalar>(p_next: &CostateTriple<T>, p: &ModelParams<T>) -> PeriodDecision<T> {
    let i_s = supplier_reaction(p_next, p);
    let i_m = manufacturer_reaction(i_s, p_next.p_m, p_next.p_r, p);
    let i_r = retailer_reaction(i_s, i_m, p_next.p_r, p);
    PeriodDecision { i_s, i_m, i_r }
}

/// CSR accumulation: `x' = alpha*x + beta1*iS + beta2*iM + beta3*iR`.
pub fn state_step<T: Scalar>(x: T, dec: &PeriodDecision<T>, p: &ModelParams<T>) -> T {
    p.alpha * x + p.beta1 * dec.i_s + p.beta2 * dec.i_m + p.beta3 * dec.i_r
}

/// One backward costate step, `P_t = dH_t/dx_t` for the three Hamiltonians:
///
/// ```text
/// pR = 2*dhh*x + alpha*pR'
/// pM = 2*dh*x  + alpha*pM' + 2*dhh*u
/// pS = 2*d*x   + alpha*pS' + 2*dh*mu + 2*dhh*u
/// ```
pub fn adjoint_step<T: Scalar>(
    x: T,
    mul: &MultiplierPair<T>,
    p_next: &CostateTriple<T>,
    p: &ModelParams<T>,
) -> CostateTriple<T> {
    let two = lit::<T>(2.0);
    CostateTriple {
        p_s: two * p.delta * x + p.alpha * p_next.p_s + two * p.delta_hat * mul.mu
            + two * p.delta_hathat * mul.u,
        p_m: two * p.delta_hat * x + p.alpha * p_next.p_m + two * p.delta_hathat * mul.u,
        p_r: two * p.delta_hathat * x + p.alpha * p_next.p_r,
    }
}

/// Forward recursions of the leader-side multipliers,
/// `u_{t+1} = dH_t^M/dP_{t+1}^R` and `mu_{t+1} = dH_t^S/dP_{t+1}^M`.
pub fn multiplier_step<T: Scalar>(
    mul: &MultiplierPair<T>,
    dec: &PeriodDecision<T>,
    p_next: &CostateTriple<T>,
    p: &ModelParams<T>,
) -> MultiplierPair<T> {
    let tt = p.tau * p.theta;
    let two = lit::<T>(2.0);
    let b23 = p.beta2 - p.beta3 / two;
    let u_next = -(p.beta3 / two) * dec.i_m - p.d_hat * p.beta3 / (two * tt)
        - p_next.p_m * p.beta3 * p.beta3 / (two * tt)
        + p.alpha * mul.u;
    let mu_next = p.alpha * mul.mu - b23 / two * dec.i_s
        + b23 * (p.beta3 - two * p.beta2) / (two * tt) * p_next.p_s
        - b23 * p.d / tt;
    MultiplierPair {
        mu: mu_next,
        u: u_next,
    }
}

/// Stationarity defects `(dH^S/dI^S, dH^M/dI^M, dH^R/dI^R)` at the given
/// point, each written so its unique root is the matching reaction
/// function. The retailer's defect, for example, is
/// `1 - tau - tau*theta*(iS + iM + 2 iR) - beta3*pR'`.
pub fn stationarity_residuals<T: Scalar>(
    dec: &PeriodDecision<T>,
    p_next: &CostateTriple<T>,
    p: &ModelParams<T>,
) -> (T, T, T) {
    let tt = p.tau * p.theta;
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let b23 = p.beta2 - p.beta3 / two;

    let res_r =
        one - p.tau - tt * (dec.i_s + dec.i_m) - p.beta3 * p_next.p_r - two * tt * dec.i_r;
    let res_m = one + p.d_hat - p.tau - tt * dec.i_s + p.beta3 * p_next.p_r
        - two * b23 * p_next.p_m
        - two * tt * dec.i_m;
    let res_s = two * (p.beta3 / two + p.beta2 - two * p.beta1) * p_next.p_s
        + two * b23 * p_next.p_m
        + p.beta3 * p_next.p_r
        + (three - three * p.tau - p.d_hat + two * p.d)
        - two * tt * dec.i_s;
    (res_s, res_m, res_r)
}

/// Second derivative of each Hamiltonian in its own control, `2*tau*theta`.
/// Positive for valid parameters; reported as a diagnostic.
pub fn own_curvature<T: Scalar>(p: &ModelParams<T>) -> T {
    lit::<T>(2.0) * p.tau * p.theta
}
