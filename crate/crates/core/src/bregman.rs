//! Separable convex mirror maps φ(π) = Σₐ ψ(π(a)) and their Bregman divergences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The per-coordinate convex function ψ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ConvexFamily {
    /// ψ(x) = xⁿ with n > 1; n = 2 gives the Euclidean geometry.
    Power { n: f64 },
    /// ψ(x) = x ln x, giving the KL divergence.
    Entropy,
    /// ψ(x) = −xⁿ with 0 < n < 1.
    NegPower { n: f64 },
    /// ψ(x) = e^{kx} with k > 0.
    Exp { k: f64 },
}

impl ConvexFamily {
    pub fn power(n: f64) -> Result<Self> {
        Self::Power { n }.validated()
    }

    pub fn neg_power(n: f64) -> Result<Self> {
        Self::NegPower { n }.validated()
    }

    pub fn exp(k: f64) -> Result<Self> {
        Self::Exp { k }.validated()
    }

    /// The families with their default parameters.
    pub fn defaults() -> [Self; 4] {
        [
            Self::Entropy,
            Self::Power { n: 2.0 },
            Self::NegPower { n: 0.1 },
            Self::Exp { k: 1.0 },
        ]
    }

    fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Power { n } => n.is_finite() && n > 1.0,
            Self::Entropy => true,
            Self::NegPower { n } => n > 0.0 && n < 1.0,
            Self::Exp { k } => k.is_finite() && k > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Config(format!(
                "invalid convex family parameters: {self}"
            )))
        }
    }

    fn domain(&self, arg: f64) -> Error {
        Error::Domain {
            family: self.to_string(),
            arg,
        }
    }

    /// ψ(x) for x ≥ 0 (0·ln 0 = 0 for the entropy).
    pub fn psi(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(self.domain(x));
        }
        Ok(match *self {
            Self::Power { n } => x.powf(n),
            Self::Entropy if x == 0.0 => 0.0,
            Self::Entropy => x * x.ln(),
            Self::NegPower { n } => -x.powf(n),
            Self::Exp { k } => (k * x).exp(),
        })
    }

    /// ψ′(x); x > 0 for the entropy and negative power, x ≥ 0 otherwise.
    pub fn psi_prime(&self, x: f64) -> Result<f64> {
        let strict = matches!(self, Self::Entropy | Self::NegPower { .. });
        if !x.is_finite() || x < 0.0 || (strict && x == 0.0) {
            return Err(self.domain(x));
        }
        Ok(match *self {
            Self::Power { n } => n * x.powf(n - 1.0),
            Self::Entropy => x.ln() + 1.0,
            Self::NegPower { n } => -n * x.powf(n - 1.0),
            Self::Exp { k } => k * (k * x).exp(),
        })
    }

    /// (ψ′)⁻¹(y). Domains: y ≥ 0 (power), y < 0 (negative power), y > 0 (exp), any finite y
    /// (entropy).
    pub fn psi_prime_inv(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(self.domain(y));
        }
        match *self {
            Self::Power { n } if y >= 0.0 => Ok((y / n).powf(1.0 / (n - 1.0))),
            Self::Entropy => Ok((y - 1.0).exp()),
            Self::NegPower { n } if y < 0.0 => Ok((-y / n).powf(1.0 / (n - 1.0))),
            Self::Exp { k } if y > 0.0 => Ok((y / k).ln() / k),
            _ => Err(self.domain(y)),
        }
    }

    /// d/dy (ψ′)⁻¹(y), on the open interior of the inverse's domain.
    pub fn psi_prime_inv_deriv(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(self.domain(y));
        }
        let d = match *self {
            Self::Power { n } if y > 0.0 || (n == 2.0 && y == 0.0) => {
                (y / n).powf((2.0 - n) / (n - 1.0)) / (n * (n - 1.0))
            }
            Self::Entropy => (y - 1.0).exp(),
            Self::NegPower { n } if y < 0.0 => {
                (-y / n).powf((2.0 - n) / (n - 1.0)) / (n * (1.0 - n))
            }
            Self::Exp { k } if y > 0.0 => 1.0 / (k * y),
            _ => return Err(self.domain(y)),
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(self.domain(y))
        }
    }

    /// lim_{x→0⁺} ψ′(x): the smallest slope the map can take on the simplex.
    pub fn psi_prime_at_zero(&self) -> f64 {
        match *self {
            Self::Power { .. } => 0.0,
            Self::Entropy | Self::NegPower { .. } => f64::NEG_INFINITY,
            Self::Exp { k } => k,
        }
    }

    /// φ(x) = Σₐ ψ(x(a)).
    pub fn phi(&self, x: &[f64]) -> Result<f64> {
        x.iter().map(|&v| self.psi(v)).sum()
    }
}

impl fmt::Display for ConvexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { n } => write!(f, "power:n={n}"),
            Self::Entropy => write!(f, "entropy"),
            Self::NegPower { n } => write!(f, "negpower:n={n}"),
            Self::Exp { k } => write!(f, "exp:k={k}"),
        }
    }
}

impl FromStr for ConvexFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((name, p)) => (name.trim(), Some(p.trim())),
            None => (s, None),
        };
        let value = |key: &str, default: f64| -> Result<f64> {
            match param {
                None => Ok(default),
                Some(p) => {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("malformed family {s:?}")))?;
                    if k.trim() != key {
                        return Err(Error::Config(format!(
                            "family {name} takes parameter {key}, got {k:?}"
                        )));
                    }
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad number in family {s:?}")))
                }
            }
        };
        match name {
            "power" => Self::power(value("n", 2.0)?),
            "entropy" if param.is_none() => Ok(Self::Entropy),
            "negpower" => Self::neg_power(value("n", 0.1)?),
            "exp" => Self::exp(value("k", 1.0)?),
            _ => Err(Error::Config(format!(
                "unknown convex family {s:?} (expected power:n=.., entropy, negpower:n=.., exp:k=..)"
            ))),
        }
    }
}

impl TryFrom<String> for ConvexFamily {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ConvexFamily> for String {
    fn from(f: ConvexFamily) -> String {
        f.to_string()
    }
}

/// D_φ(x, y) = φ(x) − φ(y) − ⟨∇φ(y), x − y⟩.
pub fn bregman_div(family: &ConvexFamily, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Config(format!(
            "bregman divergence of vectors with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::Domain {
            family: family.to_string(),
            arg: bad,
        });
    }
    let mut d = 0.0;
    for (&xa, &ya) in x.iter().zip(y) {
        d += family.psi(xa)? - family.psi(ya)? - family.psi_prime(ya)? * (xa - ya);
    }
    Ok(d)
}
