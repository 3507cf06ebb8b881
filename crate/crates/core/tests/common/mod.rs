//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;

/// ψ written out directly, independent of the library's evaluators.
#[derive(Clone, Copy, Debug)]
pub enum Psi {
    Power(f64),
    Entropy,
    NegPower(f64),
    Exp(f64),
}

impl Psi {
    pub const DEFAULTS: [Psi; 4] = [
        Psi::Entropy,
        Psi::Power(2.0),
        Psi::NegPower(0.1),
        Psi::Exp(1.0),
    ];

    pub fn f(&self, x: f64) -> f64 {
        match *self {
            Psi::Power(n) => x.powf(n),
            Psi::Entropy => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
            Psi::NegPower(n) => -x.powf(n),
            Psi::Exp(k) => (k * x).exp(),
        }
    }

    pub fn df(&self, x: f64) -> f64 {
        match *self {
            Psi::Power(n) => n * x.powf(n - 1.0),
            Psi::Entropy => x.ln() + 1.0,
            Psi::NegPower(n) => -n * x.powf(n - 1.0),
            Psi::Exp(k) => k * (k * x).exp(),
        }
    }

    /// Per-coordinate Bregman divergence ψ(x) − ψ(y) − ψ′(y)(x − y).
    pub fn div(&self, x: f64, y: f64) -> f64 {
        self.f(x) - self.f(y) - self.df(y) * (x - y)
    }

    pub fn library(&self) -> cmd_core::bregman::ConvexFamily {
        use cmd_core::bregman::ConvexFamily as F;
        match *self {
            Psi::Power(n) => F::Power { n },
            Psi::Entropy => F::Entropy,
            Psi::NegPower(n) => F::NegPower { n },
            Psi::Exp(k) => F::Exp { k },
        }
    }
}

/// The proximal objective ⟨Q, π⟩ − Σ_τ w_τ D(π, y_τ) for anchors `(weight, policy)`.
pub fn objective(psi: Psi, q: &[f64], anchors: &[(f64, Vec<f64>)], pi: &[f64]) -> f64 {
    let mut v: f64 = q.iter().zip(pi).map(|(a, b)| a * b).sum();
    for (w, y) in anchors {
        v -= w * pi
            .iter()
            .zip(y)
            .map(|(&x, &yy)| psi.div(x, yy))
            .sum::<f64>();
    }
    v
}

/// Maximizes a separable concave objective over {π ≥ lo, Σπ = 1} by repeatedly moving
/// mass between pairs of coordinates with a golden-section line search.
pub fn pairwise_maximize(n: usize, lo: f64, term: &dyn Fn(usize, f64) -> f64) -> Vec<f64> {
    let mut pi = vec![1.0 / n as f64; n];
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _sweep in 0..400 {
        let mut moved = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let total = pi[i] + pi[j];
                let (mut a, mut b) = (lo, total - lo);
                if b <= a {
                    continue;
                }
                let g = |x: f64| term(i, x) + term(j, total - x);
                let mut c = b - gr * (b - a);
                let mut d = a + gr * (b - a);
                let (mut gc, mut gd) = (g(c), g(d));
                for _ in 0..200 {
                    if (b - a) < 1e-15 {
                        break;
                    }
                    if gc > gd {
                        b = d;
                        d = c;
                        gd = gc;
                        c = b - gr * (b - a);
                        gc = g(c);
                    } else {
                        a = c;
                        c = d;
                        gc = gd;
                        d = a + gr * (b - a);
                        gd = g(d);
                    }
                }
                let x = 0.5 * (a + b);
                moved = moved.max((x - pi[i]).abs());
                pi[i] = x;
                pi[j] = total - x;
            }
        }
        if moved < 1e-13 {
            break;
        }
    }
    pi
}

/// Constrained maximizer of [`objective`] on {π ≥ lo, Σπ = 1}.
pub fn prox_oracle(psi: Psi, q: &[f64], anchors: &[(f64, Vec<f64>)], lo: f64) -> Vec<f64> {
    let term = |a: usize, x: f64| {
        q[a] * x
            - anchors
                .iter()
                .map(|(w, y)| w * psi.div(x, y[a]))
                .sum::<f64>()
    };
    pairwise_maximize(q.len(), lo, &term)
}

pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// A random point of the simplex with every entry at least `floor`.
pub fn random_interior<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Vec<f64> {
    let p = random_simplex(rng, n);
    let scale = 1.0 - n as f64 * floor;
    p.into_iter().map(|x| floor + scale * x).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A random joint policy with every probability in the interior.
pub fn random_joint<R: Rng>(
    rng: &mut R,
    tree: &cmd_core::game::GameTree,
) -> cmd_core::game::JointPolicy {
    let mut joint = cmd_core::game::JointPolicy::uniform(tree);
    for p in 0..tree.num_players() {
        for s in 0..tree.infostates(p).len() {
            let n = tree.infostates(p)[s].num_actions();
            joint.set(p, s, random_interior(rng, n, 1e-3));
        }
    }
    joint
}
