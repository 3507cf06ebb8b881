//! The per-decision-point proximal problem
//!
//!   max_π ⟨Q, π⟩ − Σ_τ α_τ D_φ(π, π_τ)  over the simplex,
//!
//! reduced to one dual variable λ: π(a) = (ψ′)⁻¹((A(a) − λ)/B) with Σₐ π(a) = 1.

use crate::bregman::ConvexFamily;
use crate::error::{Error, Result};

/// Bisection steps allowed after the Newton budget is spent.
const BISECTION_STEPS: usize = 200;
/// Derivatives smaller than this in magnitude are treated as flat.
const MIN_SLOPE: f64 = 1e-14;

/// Builds the KKT coefficients A(a) = Q(a) + Σ_τ α_τ ψ′(π_τ(a)) (+ α_ρ ψ′(ρ(a))) and
/// B = Σ_τ α_τ (+ α_ρ).
pub fn assemble_kkt(
    q: &[f64],
    history: &[&[f64]],
    alpha: &[f64],
    magnet: Option<(&[f64], f64)>,
    family: &ConvexFamily,
) -> Result<(Vec<f64>, f64)> {
    if history.is_empty() {
        return Err(Error::Config(
            "KKT assembly needs at least one policy".into(),
        ));
    }
    if history.len() != alpha.len() {
        return Err(Error::Config(format!(
            "{} history policies but {} weights",
            history.len(),
            alpha.len()
        )));
    }
    let mut a = q.to_vec();
    let mut b = 0.0;
    let terms = history
        .iter()
        .zip(alpha)
        .map(|(p, &w)| (*p, w))
        .chain(magnet);
    for (policy, weight) in terms {
        if policy.len() != q.len() {
            return Err(Error::Config(format!(
                "policy has {} entries for {} actions",
                policy.len(),
                q.len()
            )));
        }
        for (ai, &p) in a.iter_mut().zip(policy) {
            *ai += weight * family.psi_prime(p)?;
        }
        b += weight;
    }
    if !(b > 0.0) {
        return Err(Error::Config(format!(
            "total divergence weight {b} is not positive"
        )));
    }
    Ok((a, b))
}

/// The inverse slope extended by 0 below ψ′(0): this is the stationarity condition with the
/// nonnegativity multipliers folded in, so the solve returns the exact simplex maximizer
/// even when the unconstrained optimum would leave the simplex. Returns (value, derivative);
/// arguments outside a family's range map to +∞.
fn extended_inverse(family: &ConvexFamily, y: f64) -> (f64, f64) {
    if y <= family.psi_prime_at_zero() {
        return (0.0, 0.0);
    }
    match (family.psi_prime_inv(y), family.psi_prime_inv_deriv(y)) {
        (Ok(v), Ok(d)) => (v, d),
        (Ok(v), Err(_)) => (v, f64::INFINITY),
        _ => (f64::INFINITY, f64::INFINITY),
    }
}

/// Where the dual iteration starts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Start {
    /// λ₀ = max A − B ψ′(1/|A|): the best action starts at probability 1/|A|.
    Default,
    /// A previous solution; ignored if it falls outside the bracket.
    Warm(f64),
    /// A point at the given fraction (0..1) of the bracket.
    Fraction(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Newton steps before switching to pure bisection (C).
    pub max_iters: usize,
    /// Target |g(λ)|.
    pub tol: f64,
    /// Probability floor ε; fixes the upper end of the bracket.
    pub epsilon: f64,
    pub start: Start,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol: 1e-8,
            epsilon: 1e-10,
            start: Start::Default,
        }
    }
}

/// A solved dual variable with the policy it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    pub lambda: f64,
    /// (ψ′)⁻¹((A(a) − λ)/B) evaluated in shifted coordinates for accuracy.
    pub policy: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub bisected: bool,
}

/// Solves g(λ) = Σₐ (ψ′)⁻¹((A(a) − λ)/B) − 1 = 0 with safeguarded Newton steps.
///
/// g is decreasing, the bracket [max A − Bψ′(1), max A − Bψ′(ε)] always contains the root,
/// and any Newton step that leaves the bracket or meets a flat slope is replaced by
/// bisection. Internally A is shifted by its maximum so that λ stays O(B).
pub fn solve_dual(
    a: &[f64],
    b: f64,
    family: &ConvexFamily,
    opts: &NewtonOptions,
) -> Result<DualSolution> {
    let n = a.len();
    if n == 0 {
        return Err(Error::Config("empty action set".into()));
    }
    if !(b > 0.0 && b.is_finite()) || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver(format!(
            "non-finite KKT coefficients (B = {b})"
        )));
    }
    let top = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = a.iter().map(|v| v - top).collect();
    let floor = opts.epsilon.min(0.5 / n as f64);
    let mut lo = -b * family.psi_prime(1.0)?;
    let mut hi = -b * family.psi_prime(floor)?;

    let eval = |lam: f64| {
        let mut g = -1.0;
        let mut dg = 0.0;
        for &ai in &shifted {
            let (v, d) = extended_inverse(family, (ai - lam) / b);
            g += v;
            dg -= d / b;
        }
        (g, dg)
    };

    let default = (-b * family.psi_prime(1.0 / n as f64)?).clamp(lo, hi);
    let mut lam = match opts.start {
        Start::Default => default,
        Start::Warm(l) if l - top > lo && l - top < hi => l - top,
        Start::Warm(_) => default,
        Start::Fraction(f) => lo + f.clamp(0.0, 1.0) * (hi - lo),
    };

    let mut bisected = false;
    for it in 0..opts.max_iters + BISECTION_STEPS {
        let (g, dg) = eval(lam);
        if g.abs() <= opts.tol {
            let policy = shifted
                .iter()
                .map(|&ai| extended_inverse(family, (ai - lam) / b).0)
                .collect();
            return Ok(DualSolution {
                lambda: lam + top,
                policy,
                residual: g,
                iterations: it + 1,
                bisected,
            });
        }
        if g > 0.0 {
            lo = lam;
        } else {
            hi = lam;
        }
        let newton = lam - g / dg;
        lam = if it < opts.max_iters
            && dg.is_finite()
            && dg.abs() >= MIN_SLOPE
            && newton > lo
            && newton < hi
        {
            newton
        } else {
            bisected = true;
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            mid
        };
    }
    let (g, _) = eval(lam);
    Err(Error::Solver(format!(
        "dual solve for {family} did not reach |g| <= {} (|g| = {:e}, lambda = {}, B = {b}, A = {a:?})",
        opts.tol,
        g.abs(),
        lam + top
    )))
}

/// Dual variable with the default start and C Newton steps.
pub fn newton_lambda(a: &[f64], b: f64, family: &ConvexFamily, c: usize) -> Result<f64> {
    let opts = NewtonOptions {
        max_iters: c,
        ..Default::default()
    };
    Ok(solve_dual(a, b, family, &opts)?.lambda)
}

/// π(a) = (ψ′)⁻¹((A(a) − λ)/B), with entries below ψ′(0) mapped to 0 for the families
/// whose slope is bounded at 0 (power, exp).
pub fn raw_policy(a: &[f64], b: f64, lambda: f64, family: &ConvexFamily) -> Result<Vec<f64>> {
    a.iter()
        .map(|&ai| {
            let y = (ai - lambda) / b;
            if y <= family.psi_prime_at_zero() {
                Ok(0.0)
            } else {
                family.psi_prime_inv(y)
            }
        })
        .collect()
}

/// π(a) = max{ε, π(a)} / Σ max{ε, π(a′)}.
pub fn project(raw: &[f64], epsilon: f64) -> Vec<f64> {
    let floored: Vec<f64> = raw.iter().map(|&x| x.max(epsilon)).collect();
    let sum: f64 = floored.iter().sum();
    floored.into_iter().map(|x| x / sum).collect()
}
