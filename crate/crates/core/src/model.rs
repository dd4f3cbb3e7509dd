//! Model parameters and the canonical example parameterization.

use serde::{Deserialize, Serialize};

use crate::{lit, Error, Result, Scalar};

/// All economic, tax and dynamics parameters of the game, plus the horizon
/// and the initial CSR level.
///
/// The CSR state evolves as `x_{t+1} = alpha*x_t + beta1*iS + beta2*iM +
/// beta3*iR`; every reaction function divides by `2*tau*theta`, hence the
/// positivity requirements checked by [`ModelParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<T> {
    /// Market potential (currency per unit).
    pub a: T,
    /// Price sensitivity of the inverse demand (currency per unit^2).
    pub b: T,
    /// Supplier unit production cost.
    pub c: T,
    /// Raw-material price charged by the supplier.
    pub w: T,
    /// Retail sale price.
    pub z: T,
    /// Per-period demand quantity (exogenous constant, units).
    pub q: T,
    /// Supplier's share of the manufacturer's investment.
    pub d: T,
    /// Manufacturer's share of the retailer's investment.
    pub d_hat: T,
    /// Social-benefit coefficient of the supplier.
    pub delta: T,
    /// Social-benefit coefficient of the manufacturer.
    pub delta_hat: T,
    /// Social-benefit coefficient of the retailer.
    pub delta_hathat: T,
    /// Individual post-tax ROI rate.
    pub tau: T,
    /// Supply-chain post-tax ROI rate.
    pub theta: T,
    /// CSR retention rate (complement of the deterioration rate).
    pub alpha: T,
    /// Investment-to-CSR conversion rate of the supplier.
    pub beta1: T,
    /// Investment-to-CSR conversion rate of the manufacturer.
    pub beta2: T,
    /// Investment-to-CSR conversion rate of the retailer.
    pub beta3: T,
    /// Planning horizon (number of periods).
    pub t: usize,
    /// Initial CSR level.
    pub x1: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Checks every invariant, returning the parameters unchanged when all
    /// hold. The error message names each violated invariant.
    pub fn validate(self) -> Result<Self> {
        let mut faults: Vec<String> = Vec::new();
        let zero = T::zero();
        let one = T::one();

        let finite = [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("w", self.w),
            ("z", self.z),
            ("q", self.q),
            ("d", self.d),
            ("d_hat", self.d_hat),
            ("delta", self.delta),
            ("delta_hat", self.delta_hat),
            ("delta_hathat", self.delta_hathat),
            ("tau", self.tau),
            ("theta", self.theta),
            ("alpha", self.alpha),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta3", self.beta3),
            ("x1", self.x1),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                faults.push(format!("{name} must be finite"));
            }
        }
        if !(self.tau > zero) {
            faults.push("tau must be > 0".into());
        }
        if !(self.theta > zero) {
            faults.push("theta must be > 0".into());
        }
        if !(self.alpha > zero && self.alpha < one) {
            faults.push("alpha must lie in (0,1)".into());
        }
        if self.t < 1 {
            faults.push("t must be >= 1".into());
        }
        if !(self.q > zero) {
            faults.push("q must be > 0".into());
        }
        if !(self.beta1 >= zero) {
            faults.push("beta1 must be >= 0".into());
        }
        if !(self.beta2 >= zero) {
            faults.push("beta2 must be >= 0".into());
        }
        if !(self.beta3 >= zero) {
            faults.push("beta3 must be >= 0".into());
        }

        if faults.is_empty() {
            Ok(self)
        } else {
            Err(Error::Domain(faults.join("; ")))
        }
    }
}

/// The numerical-example parameterization.
///
/// The price sensitivity is `b = 0.00001`, making `a - b q = 5`, a retail
/// price between `w = 3.8` and `z = 6`; the retention rate is
/// `alpha = 0.8`.
pub fn example_params<T: Scalar>() -> ModelParams<T> {
    ModelParams {
        a: lit(6.0),
        b: lit(1.0e-5),
        c: lit(2.4),
        w: lit(3.8),
        z: lit(6.0),
        q: lit(100_000.0),
        d: lit(0.4),
        d_hat: lit(0.4),
        delta: lit(0.2),
        delta_hat: lit(0.2),
        delta_hathat: lit(0.2),
        tau: lit(0.2),
        theta: lit(0.01),
        alpha: lit(0.8),
        beta1: lit(0.3),
        beta2: lit(0.5),
        beta3: lit(0.8),
        t: 10,
        x1: lit(1.0),
    }
}
