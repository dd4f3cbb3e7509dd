//! Per-period and cumulative profits along a trajectory, and the
//! no-investment baseline each member is measured against.
//!
//! "Not playing the game" means zero CSR investment by every member with
//! the state decaying as `x_{t+1} = alpha x_t`; it is the minimal
//! non-strategic benchmark consistent with the state equation.

use crate::foc::PeriodDecision;
use crate::model::ModelParams;
use crate::sweep::{self, Trajectory};
use crate::{Error, Result, Scalar};

/// Per-period profits `(js, jm, jr)` and their running sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitSeries<T> {
    pub js: Vec<T>,
    pub jm: Vec<T>,
    pub jr: Vec<T>,
    pub cum_js: Vec<T>,
    pub cum_jm: Vec<T>,
    pub cum_jr: Vec<T>,
}

impl<T: Scalar> ProfitSeries<T> {
    fn from_periods(periods: Vec<(T, T, T)>) -> Self {
        let n = periods.len();
        let mut out = ProfitSeries {
            js: Vec::with_capacity(n),
            jm: Vec::with_capacity(n),
            jr: Vec::with_capacity(n),
            cum_js: Vec::with_capacity(n),
            cum_jm: Vec::with_capacity(n),
            cum_jr: Vec::with_capacity(n),
        };
        let (mut s, mut m, mut r) = (T::zero(), T::zero(), T::zero());
        for (js, jm, jr) in periods {
            s += js;
            m += jm;
            r += jr;
            out.js.push(js);
            out.jm.push(jm);
            out.jr.push(jr);
            out.cum_js.push(s);
            out.cum_jm.push(m);
            out.cum_jr.push(r);
        }
        out
    }

    pub fn horizon(&self) -> usize {
        self.js.len()
    }

    /// Entrywise difference `self - other`.
    fn minus(&self, other: &Self) -> Self {
        let diff = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x - *y).collect();
        ProfitSeries {
            js: diff(&self.js, &other.js),
            jm: diff(&self.jm, &other.jm),
            jr: diff(&self.jr, &other.jr),
            cum_js: diff(&self.cum_js, &other.cum_js),
            cum_jm: diff(&self.cum_jm, &other.cum_jm),
            cum_jr: diff(&self.cum_jr, &other.cum_jr),
        }
    }
}

/// Equilibrium profits against the no-game baseline, with per-member gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison<T> {
    pub game: ProfitSeries<T>,
    pub baseline: ProfitSeries<T>,
    pub gain: ProfitSeries<T>,
}

/// One period's profits:
///
/// ```text
/// js = (w - c) q + delta x^2 + tau iS (1 + theta S) - iS + d iM
/// jm = (a - b q) q - w q + dh x^2 + tau iM (1 + theta S) - iM + dhat iR
/// jr = z q - (a - b q) q + dhh x^2 + tau iR (1 + theta S) - iR
/// ```
///
/// where `S = iS + iM + iR`.
pub fn period_profits<T: Scalar>(x: T, dec: &PeriodDecision<T>, p: &ModelParams<T>) -> (T, T, T) {
    let total = dec.i_s + dec.i_m + dec.i_r;
    let tax = |own: T| p.tau * own * (T::one() + p.theta * total);
    let js = p.w * p.q - p.c * p.q + p.delta * x * x + tax(dec.i_s) - dec.i_s + p.d * dec.i_m;
    let jm = (p.a - p.b * p.q) * p.q - p.w * p.q + p.delta_hat * x * x + tax(dec.i_m) - dec.i_m
        + p.d_hat * dec.i_r;
    let jr = p.z * p.q - (p.a - p.b * p.q) * p.q + p.delta_hathat * x * x + tax(dec.i_r)
        - dec.i_r;
    (js, jm, jr)
}

/// Profit series along a trajectory.
pub fn evaluate<T: Scalar>(traj: &Trajectory<T>, p: &ModelParams<T>) -> Result<ProfitSeries<T>> {
    if traj.horizon() != p.t {
        return Err(Error::DimensionMismatch {
            expected: p.t,
            actual: traj.horizon(),
        });
    }
    let periods = (1..=p.t)
        .map(|t| period_profits(traj.x(t), &traj.investments[t - 1], p))
        .collect();
    Ok(ProfitSeries::from_periods(periods))
}

/// Profits when nobody invests and the state decays from `x1`.
pub fn baseline_no_game<T: Scalar>(p: &ModelParams<T>) -> ProfitSeries<T> {
    let rest = PeriodDecision {
        i_s: T::zero(),
        i_m: T::zero(),
        i_r: T::zero(),
    };
    let mut x = p.x1;
    let mut periods = Vec::with_capacity(p.t);
    for _ in 0..p.t {
        periods.push(period_profits(x, &rest, p));
        x *= p.alpha;
    }
    ProfitSeries::from_periods(periods)
}

/// Solves the game by the sweep, evaluates it, and compares against the
/// no-game baseline.
pub fn compare_scenarios<T: Scalar>(p: &ModelParams<T>) -> Result<ScenarioComparison<T>> {
    let traj = sweep::solve(p)?;
    let game = evaluate(&traj, p)?;
    let baseline = baseline_no_game(p);
    let gain = game.minus(&baseline);
    Ok(ScenarioComparison {
        game,
        baseline,
        gain,
    })
}
