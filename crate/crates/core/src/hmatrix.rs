//! Assembly of the augmented discrete Hamiltonian system
//!
//! ```text
//! x~_{t+1} = A x~_t + B P~_{t+1} + D
//! P~_t     = C x~_t + A P~_{t+1} + E
//! ```
//!
//! with the stacked vectors `x~ = (x, mu, u)` and `P~ = (pS, pM, pR)`.
//!
//! The canonical blocks come from [`derive_matrices`], which probes the
//! first-order-condition chain at basis vectors. A transcribed closed-form
//! version of the entries, several of which are garbled, is evaluated by
//! [`printed_matrices`] and only used for the entrywise
//! [`discrepancy_report`].

use nalgebra::{Matrix3, Vector3};

use crate::foc::{
    adjoint_step, multiplier_step, reaction_chain, state_step, CostateTriple, MultiplierPair,
};
use crate::model::ModelParams;
use crate::{lit, Error, Result, Scalar};

/// The blocks of the augmented affine system.
#[derive(Debug, Clone, PartialEq)]
pub struct GameMatrices<T> {
    pub a: Matrix3<T>,
    pub b: Matrix3<T>,
    pub c: Matrix3<T>,
    pub d: Vector3<T>,
    pub e: Vector3<T>,
}

impl<T: Scalar> GameMatrices<T> {
    /// Largest entry magnitude across all blocks; used to scale tolerances.
    pub fn coefficient_scale(&self) -> T {
        let mut s = T::one();
        for v in self.a.iter().chain(self.b.iter()).chain(self.c.iter()) {
            s = s.max(v.abs());
        }
        for v in self.d.iter().chain(self.e.iter()) {
            s = s.max(v.abs());
        }
        s
    }
}

/// One period of the forward map `(x~_t, P~_{t+1}) -> x~_{t+1}`, via the
/// reaction chain, the state recursion and the multiplier recursions.
pub fn forward_map<T: Scalar>(
    xt: &Vector3<T>,
    p_next: &Vector3<T>,
    params: &ModelParams<T>,
) -> Vector3<T> {
    let costate = CostateTriple {
        p_s: p_next[0],
        p_m: p_next[1],
        p_r: p_next[2],
    };
    let mul = MultiplierPair {
        mu: xt[1],
        u: xt[2],
    };
    let dec = reaction_chain(&costate, params);
    let x = state_step(xt[0], &dec, params);
    let mul_next = multiplier_step(&mul, &dec, &costate, params);
    Vector3::new(x, mul_next.mu, mul_next.u)
}

/// One period of the backward map `(x~_t, P~_{t+1}) -> P~_t`.
pub fn backward_map<T: Scalar>(
    xt: &Vector3<T>,
    p_next: &Vector3<T>,
    params: &ModelParams<T>,
) -> Vector3<T> {
    let costate = CostateTriple {
        p_s: p_next[0],
        p_m: p_next[1],
        p_r: p_next[2],
    };
    let mul = MultiplierPair {
        mu: xt[1],
        u: xt[2],
    };
    let p = adjoint_step(xt[0], &mul, &costate, params);
    Vector3::new(p.p_s, p.p_m, p.p_r)
}

/// Extracts `A, B, C, D, E` by affine probing: the offsets from the zero
/// vector, the columns from unit basis vectors. Both maps must share the
/// same `A` block; a disagreement signals a broken composition.
pub fn derive_matrices<T: Scalar>(params: &ModelParams<T>) -> Result<GameMatrices<T>> {
    let zero = Vector3::zeros();
    let d = forward_map(&zero, &zero, params);
    let e = backward_map(&zero, &zero, params);

    // The backward map has a zero offset, so its probes are exact: A comes
    // out as alpha*I and C as the 2*delta pattern bit for bit. The forward
    // probes are contaminated by cancellation against the offset D; its A
    // copy is only used for the consistency check below.
    let mut a = Matrix3::zeros();
    let mut b = Matrix3::zeros();
    let mut c = Matrix3::zeros();
    let mut a_fwd = Matrix3::zeros();
    for j in 0..3 {
        let mut basis = Vector3::zeros();
        basis[j] = T::one();
        a.set_column(j, &(backward_map(&zero, &basis, params) - e));
        c.set_column(j, &(backward_map(&basis, &zero, params) - e));
        a_fwd.set_column(j, &(forward_map(&basis, &zero, params) - d));
        b.set_column(j, &(forward_map(&zero, &basis, params) - d));
    }

    let offset_scale = d.abs().max().max(T::one());
    let tol = lit::<T>(1e-12).max(T::default_epsilon() * lit::<T>(64.0)) * offset_scale;
    let diff = (a - a_fwd).abs().max();
    if diff > tol {
        return Err(Error::Ansatz(format!(
            "max |A_fwd - A_bwd| = {diff:?} exceeds tolerance"
        )));
    }
    Ok(GameMatrices { a, b, c, d, e })
}

/// Evaluates the transcribed closed-form entries verbatim, garbles included.
pub fn printed_matrices<T: Scalar>(params: &ModelParams<T>) -> GameMatrices<T> {
    let p = params;
    let tt = p.tau * p.theta;
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let eight = lit::<T>(8.0);
    let (b1, b2, b3) = (p.beta1, p.beta2, p.beta3);

    let a = Matrix3::from_diagonal_element(p.alpha);

    let b11 = (b1 - b2 / two - b3 / four) * (-two * b1 + b2 + b3 / two) / tt;
    let b12 = (b1 - b2 / two - b3 / four) * (b2 - b3 / two) / tt
        + (b2 - b3 / two) * (-two * b2 + b3) / (two * tt);
    let b13 = (b1 - b2 / two - b3 / four) * b3 / (two * tt)
        + (two * b2 * b3) * (-three * b3 * b3) / (four * tt);
    let b21 = (b2 - b3 / two) * (two * b1 - three * b2 + b3 / two) / (two * tt);
    let b22 = -(b2 - b3 / two) * (b2 - b3 / two) / (two * tt);
    let b23 = -b3 * (b2 - b3 / two) / (four * tt);
    let b31 = -b3 * (-two * b1 + b2 + b3 / two) / (four * tt);
    let b32 = (-b3 * b3 + three / two * b3 * (b2 - b3 / two)) / (two * tt);
    let b33 = -b3 * b3 / (eight * tt);
    let b = Matrix3::new(b11, b12, b13, b21, b22, b23, b31, b32, b33);

    let dl = p.delta;
    let dh = p.delta_hat;
    let dhh = p.delta_hathat;
    let c = Matrix3::new(
        two * dl,
        two * dh,
        two * dhh,
        two * dh,
        T::zero(),
        two * dhh,
        two * dhh,
        T::zero(),
        T::zero(),
    );

    let d1 = (b1 - b2 / two - b3 / four) * (three - three * p.tau - p.d_hat + two * p.d)
        / (two * tt)
        + ((two * b2 - b3) * (one - p.tau + p.d_hat) + two * b3 * (one - p.tau)) / (four * tt);
    let d2 = (-b2 - b3 / two) * (lit::<T>(6.0) * p.d - p.d_hat - three * p.tau + three)
        / (four * tt);
    let d3 = -b3 * (-lit::<T>(7.0) * p.d_hat + two * p.d - p.tau + one) / (eight * tt);
    let d = Vector3::new(d1, d2, d3);

    GameMatrices {
        a,
        b,
        c,
        d,
        e: Vector3::zeros(),
    }
}

/// One line of the derived-versus-printed comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy<T> {
    pub entry: String,
    pub derived: T,
    pub printed: T,
    pub abs_diff: T,
}

/// Entry-by-entry comparison of the derived and printed blocks. Entries
/// agreeing within `1e-9` (scaled by entry magnitude) are omitted; output
/// is sorted by entry name.
pub fn discrepancy_report<T: Scalar>(params: &ModelParams<T>) -> Result<Vec<Discrepancy<T>>> {
    let derived = derive_matrices(params)?;
    let printed = printed_matrices(params);

    let mut entries: Vec<(String, T, T)> = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            entries.push((format!("a{}{}", i + 1, j + 1), derived.a[(i, j)], printed.a[(i, j)]));
            entries.push((format!("b{}{}", i + 1, j + 1), derived.b[(i, j)], printed.b[(i, j)]));
            entries.push((format!("c{}{}", i + 1, j + 1), derived.c[(i, j)], printed.c[(i, j)]));
        }
        entries.push((format!("d{}", i + 1), derived.d[i], printed.d[i]));
        entries.push((format!("e{}", i + 1), derived.e[i], printed.e[i]));
    }
    entries.sort_by(|x, y| x.0.cmp(&y.0));

    let tol = lit::<T>(1e-9);
    let mut report = Vec::new();
    for (entry, dv, pv) in entries {
        let diff = (dv - pv).abs();
        if diff > tol * (T::one() + dv.abs().max(pv.abs())) {
            report.push(Discrepancy {
                entry,
                derived: dv,
                printed: pv,
                abs_diff: diff,
            });
        }
    }
    Ok(report)
}
