//! Classical random-walk view of a composite: transition matrices and
//! stationary distributions, in closed form and by left power iteration.
//!
//! The walk lives on the unsigned support (`P = D⁻¹|R|`): with signed
//! entries the transition matrix could not be stochastic. For undirected
//! composites the stationary distribution is degree-proportional. For
//! directed couplings that also requires per-vertex flow balance, so the
//! closed form below balances the block-to-block flows instead:
//! `π_A ∝ l_B (k_A + l_A)`, `π_B ∝ l_A (k_B + l_B)`, which reduces to the
//! degree-proportional form when `l_A = l_B`. Blockwise-constant stationary
//! vectors exist only when both coupling blocks are marginal-regular
//! (row and column sums fixed).

use thiserror::Error;

use crate::graphgen;
use crate::matrix::Matrix;
use crate::qlcore::{BlockNetwork, TuningPlan};

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("vertex {0} has zero degree; the walk is undefined")]
    IsolatedVertex(usize),
    #[error("chain is reducible: vertex {0} is not on a strongly connected support")]
    Reducible(usize),
    #[error("both couplings are zero; the composite is decoupled")]
    Decoupled,
    #[error("closed form needs positive degrees, got k_A={k_a}, k_B={k_b}")]
    DegenerateDegrees { k_a: f64, k_b: f64 },
}

/// Row-stochastic transition matrix `P = D⁻¹|R|` of the unsigned support.
pub fn transition_matrix(network: &BlockNetwork) -> Result<Matrix, WalkError> {
    transition_of(&network.r)
}

/// As [`transition_matrix`] for a raw square matrix.
pub fn transition_of(r: &Matrix) -> Result<Matrix, WalkError> {
    let n = r.rows();
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        let deg = r.abs_row_sum(i);
        if deg == 0.0 {
            return Err(WalkError::IsolatedVertex(i));
        }
        for j in 0..n {
            let w = r.get(i, j).abs();
            if w != 0.0 {
                p.set(i, j, w / deg);
            }
        }
    }
    Ok(p)
}

/// Blockwise stationary values `(π_A, π_B)` for a plan's composite, each
/// computed along two algebraic routes (degree/flow form and the
/// scale-parameter form in `X = k_A/l` resp. `X = l_A/k`) which must agree
/// to 1e-12.
pub fn stationary_closed_form(plan: &TuningPlan, n: usize) -> Result<(f64, f64), WalkError> {
    closed_form_from_degrees(plan.k_a as f64, plan.k_b as f64, plan.l_a, plan.l_b, n)
}

pub fn closed_form_from_degrees(
    k_a: f64,
    k_b: f64,
    l_a: f64,
    l_b: f64,
    n: usize,
) -> Result<(f64, f64), WalkError> {
    if k_a <= 0.0 || k_b <= 0.0 {
        return Err(WalkError::DegenerateDegrees { k_a, k_b });
    }
    if l_a == 0.0 && l_b == 0.0 {
        return Err(WalkError::Decoupled);
    }
    let nf = n as f64;

    // flow-balance route
    let wa = l_b * (k_a + l_a);
    let wb = l_a * (k_b + l_b);
    let pi_a = wa / (nf * (wa + wb));
    let pi_b = wb / (nf * (wa + wb));

    // scale-parameter route, where the parameterization is defined
    let cross_check = if l_a == l_b {
        // undirected: X = k_A/l, Y = k_B/l, Δ = (k_A − k_B)/(2l)
        let l = l_a;
        let x = k_a / l;
        let y = k_b / l;
        let delta = (k_a - k_b) / (2.0 * l);
        Some((
            (x + 1.0) / (2.0 * nf * (x + 1.0 - delta)),
            (y + 1.0) / (2.0 * nf * (y + 1.0 + delta)),
        ))
    } else if k_a == k_b {
        // directed: X = l_A/k, Y = l_B/k
        let k = k_a;
        let x = l_a / k;
        let y = l_b / k;
        let ua = y * (1.0 + x);
        let ub = x * (1.0 + y);
        Some((ua / (nf * (ua + ub)), ub / (nf * (ua + ub))))
    } else {
        None
    };
    if let Some((qa, qb)) = cross_check {
        assert!(
            (pi_a - qa).abs() <= 1e-12 && (pi_b - qb).abs() <= 1e-12,
            "closed-form routes disagree: ({pi_a}, {pi_b}) vs ({qa}, {qb})"
        );
    }
    Ok((pi_a, pi_b))
}

/// Left fixed point of `P` by (lazy) power iteration: stops when
/// `‖πP − π‖_∞ ≤ 1e-12` or after 1e5 steps, normalized to `Σπ = 1`.
/// The lazy half-step keeps periodic (bipartite-like) supports converging
/// without changing the fixed point.
pub fn stationary_iterative(p: &Matrix) -> Result<Vec<f64>, WalkError> {
    let n = p.rows();
    if !graphgen::directed_support_strongly_connected(p) {
        let vertex = first_unreachable(p);
        return Err(WalkError::Reducible(vertex));
    }
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let stepped = p.vec_mat(&pi);
        let res = pi
            .iter()
            .zip(&stepped)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let sum: f64 = stepped.iter().sum();
        for i in 0..n {
            pi[i] = 0.5 * (pi[i] + stepped[i] / sum);
        }
        if res <= 1e-12 {
            break;
        }
    }
    let sum: f64 = pi.iter().sum();
    for x in pi.iter_mut() {
        *x /= sum;
    }
    Ok(pi)
}

fn first_unreachable(p: &Matrix) -> usize {
    let n = p.rows();
    let mut seen = vec![false; n];
    let mut queue = vec![0usize];
    seen[0] = true;
    while let Some(u) = queue.pop() {
        for v in 0..n {
            if !seen[v] && p.get(u, v) != 0.0 {
                seen[v] = true;
                queue.push(v);
            }
        }
    }
    seen.iter().position(|&s| !s).unwrap_or(0)
}

/// Stationary summary for one composite.
#[derive(Debug, Clone)]
pub struct StationaryReport {
    pub pi: Vec<f64>,
    /// Measured block means of `pi`.
    pub pi_a: f64,
    pub pi_b: f64,
    /// Closed-form block values.
    pub closed_a: f64,
    pub closed_b: f64,
    /// Free scale parameters: `k_A/l` (undirected) or `l_A/k` (directed).
    pub x: f64,
    pub y: f64,
    pub delta: Option<f64>,
    pub max_residual: f64,
}

/// Runs the iterative walk on a composite and cross-checks the closed form.
pub fn walk_report(network: &BlockNetwork) -> Result<StationaryReport, WalkError> {
    let p = transition_matrix(network)?;
    let pi = stationary_iterative(&p)?;
    let n = network.n;
    let pi_a = pi[..n].iter().sum::<f64>() / n as f64;
    let pi_b = pi[n..].iter().sum::<f64>() / n as f64;

    let meta = &network.meta;
    let (closed_a, closed_b) =
        closed_form_from_degrees(meta.k_a as f64, meta.k_b as f64, meta.l_a, meta.l_b, n)?;
    let stepped = p.vec_mat(&pi);
    let max_residual = pi
        .iter()
        .zip(&stepped)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let (x, y, delta) = if meta.l_a == meta.l_b {
        let l = meta.l_a;
        (
            meta.k_a as f64 / l,
            meta.k_b as f64 / l,
            Some((meta.k_a as f64 - meta.k_b as f64) / (2.0 * l)),
        )
    } else {
        (meta.l_a / meta.k_a as f64, meta.l_b / meta.k_b as f64, None)
    };
    Ok(StationaryReport {
        pi,
        pi_a,
        pi_b,
        closed_a,
        closed_b,
        x,
        y,
        delta,
        max_residual,
    })
}
