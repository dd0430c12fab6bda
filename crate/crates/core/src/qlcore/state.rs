//! QL states and the four tuning branches.
//!
//! A state `a|+⟩ + b|−⟩` with `a^2 + b^2 = 1` is carried by the block
//! amplitudes `ω₁ = (a+b)/√2`, `ω₂ = (a−b)/√2` of the composite eigenvector
//! `ψ = (ω₁ V_A; ω₂ V_B)`. Each tuning branch maps states to a scalar ratio
//! realizable by integer graph regularities:
//!
//! - `Δ      = (ω₂² − ω₁²) / (2 ω₁ ω₂) = 2ab / (b² − a²)`, realized by
//!   `(k_A − k_B) / (2l)`; diverges as `|a| → |b|`.
//! - `Δ⁻¹`, the reciprocal; diverges as `a → 0` or `b → 0`.
//! - `Δ_C   = ω₁² / ω₂²`, realized by `l_A / l_B` with `k_A = k_B`;
//!   diverges as `a → b` (`ω₂ → 0`).
//! - `Δ_C⁻¹ = ω₂² / ω₁²`; diverges as `a → −b`.
//!
//! Switching rules pick the branch whose ratio stays in `[−1, 1]`
//! (symmetric) or `[0, 1]` (asymmetric), so every state on the unit circle
//! has a finite, bounded representative.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::QlError;
use crate::graphgen::Sign;

/// `½ √(2 + √2)`: the amplitude magnitude where `|Δ| = |Δ⁻¹| = 1`, i.e. the
/// crossover between the symmetric branches.
pub const SWITCH_THRESHOLD: f64 = 0.923_879_532_511_286_7;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Target amplitudes `(a, b)` in the `|±⟩` basis together with the derived
/// block weights `(ω₁, ω₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlState {
    pub a: f64,
    pub b: f64,
    pub omega1: f64,
    pub omega2: f64,
    /// True when the input amplitudes were silently renormalized onto the
    /// unit circle (permitted drift is 1e-9).
    pub renormalized: bool,
}

impl QlState {
    /// Ratio `ω₂ / ω₁` of the block weights; infinite at the `ω₁ = 0` pole.
    pub fn weight_ratio(&self) -> f64 {
        self.omega2 / self.omega1
    }
}

/// Builds a state from `|±⟩`-basis amplitudes. Inputs within 1e-9 of the
/// unit circle are renormalized; anything further off is rejected.
pub fn state_from_amplitudes(a: f64, b: f64) -> Result<QlState, QlError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(QlError::InvalidState("non-finite amplitude".into()));
    }
    let norm_sq = a * a + b * b;
    if norm_sq == 0.0 {
        return Err(QlError::InvalidState("a = b = 0".into()));
    }
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(QlError::OffCircle { norm: norm_sq });
    }
    let scale = norm_sq.sqrt();
    let (a, b) = (a / scale, b / scale);
    Ok(QlState {
        a,
        b,
        omega1: (a + b) / SQRT_2,
        omega2: (a - b) / SQRT_2,
        renormalized: norm_sq != 1.0,
    })
}

/// Builds a state from block weights `(ω₁, ω₂)`.
pub fn state_from_omegas(omega1: f64, omega2: f64) -> Result<QlState, QlError> {
    let a = (omega1 + omega2) / SQRT_2;
    let b = (omega1 - omega2) / SQRT_2;
    state_from_amplitudes(a, b)
}

/// The four tuning branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Delta,
    DeltaInv,
    DeltaC,
    DeltaCInv,
}

impl Branch {
    pub fn is_symmetric(self) -> bool {
        matches!(self, Branch::Delta | Branch::DeltaInv)
    }

    pub fn inverse(self) -> Branch {
        match self {
            Branch::Delta => Branch::DeltaInv,
            Branch::DeltaInv => Branch::Delta,
            Branch::DeltaC => Branch::DeltaCInv,
            Branch::DeltaCInv => Branch::DeltaC,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Delta => "delta",
            Branch::DeltaInv => "delta_inv",
            Branch::DeltaC => "delta_c",
            Branch::DeltaCInv => "delta_c_inv",
        }
    }

    pub fn parse(s: &str) -> Option<Branch> {
        match s {
            "delta" => Some(Branch::Delta),
            "delta_inv" => Some(Branch::DeltaInv),
            "delta_c" => Some(Branch::DeltaC),
            "delta_c_inv" => Some(Branch::DeltaCInv),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Quadrant selector resolving which of the (up to four) states sharing a
/// branch ratio is meant.
///
/// `rel_sign` is the sign of `ω₂/ω₁` (positive means `|a| > |b|`); `a_sign`
/// is the overall orientation, the sign of `a` (of `b` when `a = 0`). The
/// two bits enumerate exactly the sign combinations attached to the
/// closed-form amplitude expressions of each branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrant {
    pub a_sign: Sign,
    pub rel_sign: Sign,
}

impl Quadrant {
    pub fn new(a_sign: Sign, rel_sign: Sign) -> Quadrant {
        Quadrant { a_sign, rel_sign }
    }

    /// The selector that reproduces `state` from its branch ratio.
    pub fn for_state(state: &QlState) -> Quadrant {
        let prod = state.omega1 * state.omega2;
        let rel_sign = if prod > 0.0 || state.omega1 == 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let a_sign = if state.a > 0.0 {
            Sign::Plus
        } else if state.a < 0.0 {
            Sign::Minus
        } else if state.b > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        Quadrant { a_sign, rel_sign }
    }
}

/// Branch ratio of a state. Errors at the branch pole and names the
/// branch to use instead.
pub fn ratio_for_state(branch: Branch, state: &QlState) -> Result<f64, QlError> {
    let (w1, w2) = (state.omega1, state.omega2);
    let pole = |b: Branch| QlError::Pole {
        branch: b,
        use_instead: b.inverse(),
    };
    match branch {
        Branch::Delta => {
            let den = 2.0 * w1 * w2;
            if den == 0.0 {
                return Err(pole(branch));
            }
            Ok((w2 * w2 - w1 * w1) / den)
        }
        Branch::DeltaInv => {
            let den = w2 * w2 - w1 * w1;
            if den == 0.0 {
                return Err(pole(branch));
            }
            Ok(2.0 * w1 * w2 / den)
        }
        Branch::DeltaC => {
            if w2 == 0.0 {
                return Err(pole(branch));
            }
            Ok((w1 * w1) / (w2 * w2))
        }
        Branch::DeltaCInv => {
            if w1 == 0.0 {
                return Err(pole(branch));
            }
            Ok((w2 * w2) / (w1 * w1))
        }
    }
}

/// Detuning ratio `Δ = 2ab/(b² − a²)`; pole at `|a| = |b|`.
pub fn delta_for_state(state: &QlState) -> Result<f64, QlError> {
    ratio_for_state(Branch::Delta, state)
}

/// Inverse detuning `Δ⁻¹`; pole at `a = 0` or `b = 0`.
pub fn delta_inv_for_state(state: &QlState) -> Result<f64, QlError> {
    ratio_for_state(Branch::DeltaInv, state)
}

/// Asymmetric coupling ratio `Δ_C = ω₁²/ω₂² = l_A/l_B`; pole at `a = b`.
pub fn delta_c_for_state(state: &QlState) -> Result<f64, QlError> {
    ratio_for_state(Branch::DeltaC, state)
}

/// Inverse asymmetric ratio `Δ_C⁻¹ = ω₂²/ω₁²`; pole at `a = −b`.
pub fn delta_c_inv_for_state(state: &QlState) -> Result<f64, QlError> {
    ratio_for_state(Branch::DeltaCInv, state)
}

/// Symmetric branch selection: `Δ` when either amplitude magnitude reaches
/// `½√(2+√2)` (which is exactly where `|Δ| ≤ 1`), `Δ⁻¹` otherwise. At the
/// crossover both ratios equal ±1 and `Δ` is chosen.
pub fn select_branch_sym(state: &QlState) -> Branch {
    if state.a.abs() >= SWITCH_THRESHOLD || state.b.abs() >= SWITCH_THRESHOLD {
        Branch::Delta
    } else {
        Branch::DeltaInv
    }
}

/// Asymmetric branch selection by the sign rule: `Δ_C` for opposite-sign
/// amplitudes, `Δ_C⁻¹` for same-sign. When `a = 0` or `b = 0` both branches
/// give ratio 1 and `Δ_C` is chosen.
pub fn select_branch_asym(state: &QlState) -> Branch {
    let zero_amplitude = state.a == 0.0 || state.b == 0.0;
    if zero_amplitude || (state.a > 0.0) != (state.b > 0.0) {
        Branch::DeltaC
    } else {
        Branch::DeltaCInv
    }
}

/// Reconstructs the state a branch ratio stands for.
///
/// Internally the two candidate states of a ratio are the roots `u` of the
/// branch's quadratic in `u = ω₂/ω₁`; `quadrant.rel_sign` picks the root by
/// its sign and `quadrant.a_sign` fixes the global orientation. Round-trips
/// with [`ratio_for_state`] under [`Quadrant::for_state`] recover the state
/// exactly (up to floating error).
pub fn amplitudes_from_ratio(
    branch: Branch,
    ratio: f64,
    quadrant: Quadrant,
) -> Result<QlState, QlError> {
    if !ratio.is_finite() {
        return Err(QlError::InvalidRatio(format!(
            "ratio must be finite, got {ratio}"
        )));
    }
    let rel = quadrant.rel_sign;
    // Block-weight ratio u = ω₂/ω₁, with u = ±∞ encoded as ω = (0, ±1).
    let omegas = match branch {
        Branch::Delta => {
            // u² - 2ru - 1 = 0, roots u₊ > 0 > u₋ with u₊·u₋ = -1
            let u_plus = if ratio >= 0.0 {
                ratio + ratio.hypot(1.0)
            } else {
                1.0 / (ratio.hypot(1.0) - ratio)
            };
            let u = match rel {
                Sign::Plus => u_plus,
                Sign::Minus => -1.0 / u_plus,
            };
            omegas_from_u(u)
        }
        Branch::DeltaInv => {
            // r'u² - 2u - r' = 0; as r' → 0 the roots run to 0 and ±∞
            if ratio == 0.0 {
                match rel {
                    Sign::Plus => (0.0, 1.0),
                    Sign::Minus => (1.0, 0.0),
                }
            } else {
                let big = (1.0 + ratio.hypot(1.0)) / ratio;
                let u_plus = if ratio > 0.0 { big } else { -1.0 / big };
                let u = match rel {
                    Sign::Plus => u_plus,
                    Sign::Minus => -1.0 / u_plus,
                };
                omegas_from_u(u)
            }
        }
        Branch::DeltaC | Branch::DeltaCInv => {
            if ratio < 0.0 {
                return Err(QlError::InvalidRatio(format!(
                    "{branch} is a ratio of squared weights and cannot be negative, got {ratio}"
                )));
            }
            // Δ_C = 1/u², Δ_C⁻¹ = u²
            let u_abs = match branch {
                Branch::DeltaC => {
                    if ratio == 0.0 {
                        f64::INFINITY
                    } else {
                        1.0 / ratio.sqrt()
                    }
                }
                _ => ratio.sqrt(),
            };
            if u_abs.is_infinite() {
                (0.0, 1.0)
            } else {
                omegas_from_u(u_abs * rel.value())
            }
        }
    };

    let (mut w1, mut w2) = omegas;
    let mut a = (w1 + w2) / SQRT_2;
    let mut b = (w1 - w2) / SQRT_2;
    let oriented = if a != 0.0 { a } else { b };
    if (oriented > 0.0) != (quadrant.a_sign == Sign::Plus) {
        a = -a;
        b = -b;
        w1 = -w1;
        w2 = -w2;
    }
    Ok(QlState {
        a,
        b,
        omega1: w1,
        omega2: w2,
        renormalized: false,
    })
}

fn omegas_from_u(u: f64) -> (f64, f64) {
    let w1 = 1.0 / u.hypot(1.0);
    (w1, u * w1)
}
