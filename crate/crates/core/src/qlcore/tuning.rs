//! Integer rationalization of target ratios under graph constraints, tuning
//! plans, predicted eigenvalues, and the general characteristic equation.

use serde::{Deserialize, Serialize};

use super::state::{amplitudes_from_ratio, Branch, QlState, Quadrant};
use super::QlError;
use crate::graphgen::Sign;

/// Reduced rational with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let s = if den < 0 { -1 } else { 1 };
        Ratio {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// A resolved construction: branch, integer (or real) regularities, the
/// achieved ratio and its distance from the target, and the predicted
/// composite eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningPlan {
    pub branch: Branch,
    /// Target branch ratio (state side, negative-coupling convention).
    pub target: f64,
    /// Achieved grid ratio as a reduced rational; `None` for continuous-l
    /// plans, where the ratio is hit exactly by a real coupling regularity.
    pub achieved: Option<Ratio>,
    pub k_a: usize,
    pub k_b: usize,
    pub l_a: f64,
    pub l_b: f64,
    pub sign: Sign,
    /// Predicted eigenvalue for the canonical `(+, +)` quadrant; pipelines
    /// override it via [`predicted_lambda`] once the target quadrant is known.
    pub lambda_pred: f64,
    pub abs_error: f64,
}

impl TuningPlan {
    /// Achieved ratio in grid convention: `(k_A − k_B)/(2l)` for `Δ`,
    /// `2l/(k_A − k_B)` for `Δ⁻¹`, `l_A/l_B` for `Δ_C`, `l_B/l_A` for `Δ_C⁻¹`.
    pub fn achieved_ratio(&self) -> f64 {
        if let Some(r) = self.achieved {
            return r.value();
        }
        let d = self.k_a as f64 - self.k_b as f64;
        match self.branch {
            Branch::Delta => d / (2.0 * self.l_a),
            Branch::DeltaInv => 2.0 * self.l_a / d,
            Branch::DeltaC => self.l_a / self.l_b,
            Branch::DeltaCInv => self.l_b / self.l_a,
        }
    }

    /// Achieved ratio in state convention. With positive coupling the
    /// symmetric grid ratio flips sign (`l ↦ −l` in the detuning definition);
    /// the asymmetric ratio is sign-independent.
    pub fn state_side_ratio(&self) -> f64 {
        let g = self.achieved_ratio();
        if self.branch.is_symmetric() && self.sign == Sign::Plus {
            -g
        } else {
            g
        }
    }

    /// Recomputes the state actually realized by this plan.
    pub fn achieved_state(&self, quadrant: Quadrant) -> Result<QlState, QlError> {
        amplitudes_from_ratio(self.branch, self.state_side_ratio(), quadrant)
    }

    pub fn is_continuous(&self) -> bool {
        self.achieved.is_none()
    }
}

/// Largest feasible subgraph degree below `n`; for odd `n` the handshake
/// forces even degrees.
fn max_degree(n: usize) -> usize {
    debug_assert!(n >= 2);
    if n % 2 == 0 || (n - 1) % 2 == 0 {
        n - 1
    } else {
        n - 2
    }
}

fn degree_step(n: usize) -> usize {
    if n % 2 == 0 {
        1
    } else {
        2
    }
}

/// Integer plan minimizing `|target − achieved|` over the feasible grid.
///
/// Symmetric branches scan `(d, l)` with `d = k_A − k_B`, `|d| ≤ k_max −
/// floor`, `floor ≤ l ≤ n−1` and realize `k_A, k_B` at the top of the
/// feasible range. Asymmetric branches scan `(l_A, l_B)` in `[floor, n−1]`
/// plus the admitted zero-coupling pole rows, with `k_A = k_B` maximal. Ties
/// break toward larger coupling regularity (better separation from the
/// spectral bulk), then toward the positive/larger ratio.
pub fn rationalize(
    branch: Branch,
    target: f64,
    n: usize,
    floor: usize,
    sign: Sign,
) -> Result<TuningPlan, QlError> {
    if !target.is_finite() {
        return Err(QlError::InvalidRatio(format!(
            "target must be finite, got {target}"
        )));
    }
    if n < 2 {
        return Err(QlError::Infeasible {
            constraint: format!("subgraph order must be at least 2, got n={n}"),
        });
    }
    if floor < 1 {
        return Err(QlError::Infeasible {
            constraint: "minimum degree floor must be at least 1".into(),
        });
    }
    let k_max = max_degree(n);
    if floor > k_max {
        return Err(QlError::Infeasible {
            constraint: format!(
                "degree floor {floor} exceeds the largest feasible degree {k_max} for n={n}"
            ),
        });
    }

    match branch {
        Branch::Delta | Branch::DeltaInv => rationalize_sym(branch, target, n, floor, sign, k_max),
        Branch::DeltaC | Branch::DeltaCInv => {
            rationalize_asym(branch, target, n, floor, sign, k_max)
        }
    }
}

fn rationalize_sym(
    branch: Branch,
    target: f64,
    n: usize,
    floor: usize,
    sign: Sign,
    k_max: usize,
) -> Result<TuningPlan, QlError> {
    // With positive coupling the realizable state ratio is the negated grid
    // ratio, so aim the grid at the negated target.
    let grid_target = if sign == Sign::Minus { target } else { -target };
    let step = degree_step(n) as i64;
    let floor_k = {
        let mut f = floor;
        if n % 2 != 0 && f % 2 != 0 {
            f += 1;
        }
        f
    };
    if floor_k > k_max {
        return Err(QlError::Infeasible {
            constraint: format!("degree floor {floor} infeasible for odd n={n}"),
        });
    }
    let d_max = (k_max - floor_k) as i64;
    let l_max = n - 1;
    if floor > l_max {
        return Err(QlError::Infeasible {
            constraint: format!("coupling floor {floor} exceeds l_max={l_max}"),
        });
    }

    // (err, -l, -d) lexicographic minimum
    let mut best: Option<(f64, usize, i64)> = None;
    for l in floor..=l_max {
        let mut d = -d_max;
        while d <= d_max {
            if branch == Branch::DeltaInv && d == 0 {
                d += step;
                continue;
            }
            let ratio = match branch {
                Branch::Delta => d as f64 / (2.0 * l as f64),
                _ => 2.0 * l as f64 / d as f64,
            };
            let err = (grid_target - ratio).abs();
            let better = match best {
                None => true,
                Some((be, bl, bd)) => err < be || (err == be && (l > bl || (l == bl && d > bd))),
            };
            if better {
                best = Some((err, l, d));
            }
            d += step;
        }
    }
    let (err, l, d) = best.ok_or_else(|| QlError::Infeasible {
        constraint: "empty feasible grid".into(),
    })?;

    let (k_a, k_b) = if d >= 0 {
        (k_max, k_max - d as usize)
    } else {
        (k_max - (-d) as usize, k_max)
    };
    let achieved = match branch {
        Branch::Delta => Ratio::new(d, 2 * l as i64),
        _ => Ratio::new(2 * l as i64, d),
    };
    let mut plan = TuningPlan {
        branch,
        target,
        achieved: Some(achieved),
        k_a,
        k_b,
        l_a: l as f64,
        l_b: l as f64,
        sign,
        lambda_pred: f64::NAN,
        abs_error: err,
    };
    plan.lambda_pred = canonical_lambda(&plan)?;
    Ok(plan)
}

fn rationalize_asym(
    branch: Branch,
    target: f64,
    n: usize,
    floor: usize,
    sign: Sign,
    k_max: usize,
) -> Result<TuningPlan, QlError> {
    if target < 0.0 {
        return Err(QlError::InvalidRatio(format!(
            "{branch} is a ratio of coupling regularities and cannot be negative, got {target}"
        )));
    }
    let l_max = n - 1;
    if floor > l_max {
        return Err(QlError::Infeasible {
            constraint: format!("coupling floor {floor} exceeds l_max={l_max}"),
        });
    }

    // Scan (numerator degree, denominator degree) of the branch ratio; the
    // numerator side admits the zero-coupling pole row.
    let mut best: Option<(f64, usize, usize)> = None; // (err, num_l, den_l)
    for den in floor..=l_max {
        for num in std::iter::once(0).chain(floor..=l_max) {
            let ratio = num as f64 / den as f64;
            let err = (target - ratio).abs();
            let better = match best {
                None => true,
                Some((be, bn, bd)) => {
                    let (mn, bmn) = (num.min(den), bn.min(bd));
                    let (sm, bsm) = (num + den, bn + bd);
                    err < be || (err == be && (mn > bmn || (mn == bmn && sm > bsm)))
                }
            };
            if better {
                best = Some((err, num, den));
            }
        }
    }
    let (err, num, den) = best.ok_or_else(|| QlError::Infeasible {
        constraint: "empty feasible grid".into(),
    })?;

    let (l_a, l_b) = match branch {
        Branch::DeltaC => (num, den),
        _ => (den, num),
    };
    let achieved = match branch {
        Branch::DeltaC => Ratio::new(l_a as i64, l_b as i64),
        _ => Ratio::new(l_b as i64, l_a as i64),
    };
    let mut plan = TuningPlan {
        branch,
        target,
        achieved: Some(achieved),
        k_a: k_max,
        k_b: k_max,
        l_a: l_a as f64,
        l_b: l_b as f64,
        sign,
        lambda_pred: f64::NAN,
        abs_error: err,
    };
    plan.lambda_pred = canonical_lambda(&plan)?;
    Ok(plan)
}

/// Continuous-l plan (real coupling weights): hits the symmetric target
/// ratio exactly with `l = (k_A − k_B) / (2Δ)` for the given subgraph
/// degrees.
pub fn continuous_plan(
    branch: Branch,
    target: f64,
    n: usize,
    k_a: usize,
    k_b: usize,
    sign: Sign,
) -> Result<TuningPlan, QlError> {
    if !branch.is_symmetric() {
        return Err(QlError::InvalidRatio(
            "continuous-l mode applies to the symmetric branches only".into(),
        ));
    }
    if !target.is_finite() || target == 0.0 && branch == Branch::Delta && k_a != k_b {
        return Err(QlError::InvalidRatio(format!("bad target {target}")));
    }
    if k_a == 0 || k_b == 0 || k_a >= n || k_b >= n {
        return Err(QlError::Infeasible {
            constraint: format!("need 0 < k_A, k_B < n, got k_A={k_a}, k_B={k_b}, n={n}"),
        });
    }
    let grid_target = if sign == Sign::Minus { target } else { -target };
    let delta = match branch {
        Branch::Delta => grid_target,
        _ => 1.0 / grid_target,
    };
    let d = k_a as f64 - k_b as f64;
    let l = d / (2.0 * delta);
    if !(l.is_finite() && l > 0.0 && l <= n as f64) {
        return Err(QlError::Infeasible {
            constraint: format!(
                "continuous coupling regularity l = (k_A - k_B)/(2Δ) = {l} is outside (0, n]; \
                 swap k_A and k_B or adjust the degrees"
            ),
        });
    }
    let mut plan = TuningPlan {
        branch,
        target,
        achieved: None,
        k_a,
        k_b,
        l_a: l,
        l_b: l,
        sign,
        lambda_pred: f64::NAN,
        abs_error: 0.0,
    };
    plan.lambda_pred = canonical_lambda(&plan)?;
    Ok(plan)
}

fn canonical_lambda(plan: &TuningPlan) -> Result<f64, QlError> {
    let state = plan.achieved_state(Quadrant::new(Sign::Plus, Sign::Plus))?;
    predicted_lambda(plan, &state)
}

/// Predicted composite eigenvalue `λ_R = k_A + c·(ω₂/ω₁)·l_A = k_B +
/// c·(ω₁/ω₂)·l_B` for coupling sign `c`. Both closed forms are evaluated and
/// must agree to 1e-10; at a pole (`ω₁ = 0` or `ω₂ = 0`) the single
/// well-defined form is used.
pub fn predicted_lambda(plan: &TuningPlan, state: &QlState) -> Result<f64, QlError> {
    let c = plan.sign.value();
    let (w1, w2) = (state.omega1, state.omega2);
    let form_a = if w1 != 0.0 {
        Some(plan.k_a as f64 + c * (w2 / w1) * plan.l_a)
    } else {
        None
    };
    let form_b = if w2 != 0.0 {
        Some(plan.k_b as f64 + c * (w1 / w2) * plan.l_b)
    } else {
        None
    };
    match (form_a, form_b) {
        (Some(x), Some(y)) => {
            let scale = 1.0 + x.abs().max(y.abs());
            if (x - y).abs() > 1e-10 * scale {
                return Err(QlError::InconsistentState(format!(
                    "eigenvalue forms disagree ({x} vs {y}); \
                     recompute the state from the plan's achieved ratio"
                )));
            }
            Ok(x)
        }
        (Some(x), None) => Ok(x),
        (None, Some(y)) => Ok(y),
        (None, None) => unreachable!("omega1 and omega2 cannot both vanish"),
    }
}

/// Left side of the general characteristic equation
/// `ω₂²·l_A − ω₁²·l_B + ω₁ω₂·(k_B − k_A) = 0` (negative-coupling
/// convention). For exact-regular blocks this value equals the minimal
/// eigenvector residual of `ψ`, so zero is equivalent to `ψ` being an
/// eigenvector of the assembled composite.
pub fn characteristic_residual(k_a: f64, k_b: f64, l_a: f64, l_b: f64, state: &QlState) -> f64 {
    let (w1, w2) = (state.omega1, state.omega2);
    w2 * w2 * l_a - w1 * w1 * l_b + w1 * w2 * (k_b - k_a)
}
