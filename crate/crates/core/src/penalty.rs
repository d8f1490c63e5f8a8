//! Group penalties on input-group norms and their thresholding operators.
//!
//! For a group `z`, the thresholding operator returns the minimizer of
//! `0.5 * |x - z|^2 + rho(|x|)`. Every solution is colinear with `z`, so the
//! operators are expressed as a scale factor applied to `z`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_SCAD_A: f64 = 3.7;
pub const DEFAULT_MCP_A: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PenaltyFamily {
    #[serde(rename = "group-lasso")]
    GroupLasso,
    #[serde(rename = "group-mcp")]
    GroupMcp,
    #[serde(rename = "group-scad")]
    GroupScad,
}

impl PenaltyFamily {
    pub fn default_a(self) -> f64 {
        match self {
            PenaltyFamily::GroupLasso => 0.0,
            PenaltyFamily::GroupMcp => DEFAULT_MCP_A,
            PenaltyFamily::GroupScad => DEFAULT_SCAD_A,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PenaltyFamily::GroupLasso => "group-lasso",
            PenaltyFamily::GroupMcp => "group-mcp",
            PenaltyFamily::GroupScad => "group-scad",
        }
    }
}

impl std::str::FromStr for PenaltyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "group-lasso" | "glasso" | "lasso" => Ok(PenaltyFamily::GroupLasso),
            "group-mcp" | "gmcp" | "mcp" => Ok(PenaltyFamily::GroupMcp),
            "group-scad" | "gscad" | "scad" => Ok(PenaltyFamily::GroupScad),
            other => Err(Error::InvalidConfig(format!("unknown penalty family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub family: PenaltyFamily,
    pub lambda: f64,
    /// Concavity parameter; ignored by the group lasso.
    pub a: f64,
}

impl PenaltySpec {
    pub fn new(family: PenaltyFamily, lambda: f64) -> Self {
        Self {
            family,
            lambda,
            a: family.default_a(),
        }
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// MCP needs `a > 1` for its thresholding operator to exist.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        match self.family {
            PenaltyFamily::GroupLasso => {}
            PenaltyFamily::GroupMcp if !(self.a > 1.0 && self.a.is_finite()) => {
                return Err(Error::InvalidConfig(format!("MCP requires a > 1, got {}", self.a)));
            }
            PenaltyFamily::GroupScad if !(self.a > 2.0 && self.a.is_finite()) => {
                return Err(Error::InvalidConfig(format!("SCAD requires a > 2, got {}", self.a)));
            }
            _ => {}
        }
        Ok(())
    }

    /// `rho_lambda(t)` for a group norm `t >= 0`.
    pub fn value(&self, t: f64) -> f64 {
        let (lam, a) = (self.lambda, self.a);
        match self.family {
            PenaltyFamily::GroupLasso => lam * t,
            PenaltyFamily::GroupScad => {
                if t <= lam {
                    lam * t
                } else if t <= a * lam {
                    -(t * t - 2.0 * a * lam * t + lam * lam) / (2.0 * (a - 1.0))
                } else {
                    (a + 1.0) * lam * lam / 2.0
                }
            }
            PenaltyFamily::GroupMcp => {
                if t <= a * lam {
                    lam * t - t * t / (2.0 * a)
                } else {
                    a * lam * lam / 2.0
                }
            }
        }
    }

    /// Factor `c` such that the thresholding operator maps `z` to `c * z`
    /// for any group with Euclidean norm `norm`.
    pub fn prox_scale(&self, norm: f64) -> f64 {
        if norm == 0.0 {
            return 0.0;
        }
        let (lam, a) = (self.lambda, self.a);
        match self.family {
            PenaltyFamily::GroupLasso => soft_scale(norm, lam),
            PenaltyFamily::GroupScad => {
                if norm <= 2.0 * lam {
                    soft_scale(norm, lam)
                } else if norm <= a * lam {
                    (a - 1.0) / (a - 2.0) * soft_scale(norm, a * lam / (a - 1.0))
                } else {
                    1.0
                }
            }
            PenaltyFamily::GroupMcp => {
                if norm <= a * lam {
                    a / (a - 1.0) * soft_scale(norm, lam)
                } else {
                    1.0
                }
            }
        }
    }

    pub fn prox(&self, z: &[f64]) -> Vec<f64> {
        let mut out = z.to_vec();
        self.prox_in_place(&mut out);
        out
    }

    /// Applies the operator in place; returns true when the group became zero.
    pub fn prox_in_place(&self, z: &mut [f64]) -> bool {
        let c = self.prox_scale(norm(z));
        if c == 0.0 {
            z.fill(0.0);
            true
        } else {
            if c != 1.0 {
                z.iter_mut().for_each(|v| *v *= c);
            }
            false
        }
    }
}

/// `rho_lambda(t)` as a free function.
pub fn penalty_value(spec: &PenaltySpec, t: f64) -> f64 {
    spec.value(t)
}

/// The closed-form thresholding operator of `spec` applied to `z`.
pub fn prox(spec: &PenaltySpec, z: &[f64]) -> Vec<f64> {
    spec.prox(z)
}

/// Group soft-thresholding `(1 - lambda / |z|)_+ z`.
pub fn group_soft_threshold(z: &[f64], lambda: f64) -> Vec<f64> {
    let c = soft_scale(norm(z), lambda);
    z.iter().map(|v| v * c).collect()
}

#[inline]
fn soft_scale(norm: f64, thr: f64) -> f64 {
    if norm <= thr || norm == 0.0 {
        0.0
    } else {
        1.0 - thr / norm
    }
}

#[inline]
pub(crate) fn norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>().sqrt()
}
