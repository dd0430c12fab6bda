//! Dense eigensolvers and spectral diagnostics.
//!
//! Composite sizes stay in the hundreds of vertices, so a cyclic Jacobi
//! sweep handles full symmetric spectra and shifted inverse iteration
//! refines the single targeted eigenpair of directed (nonsymmetric)
//! composites. The Erdős–Rényi feasibility formulas close out the module.

use thiserror::Error;

use crate::graphgen::{self, derive_seed, GraphGenError};
use crate::matrix::{dot, norm2, normalize, Lu, Matrix};
use crate::qlcore::{predicted_lambda, psi_target, BlockNetwork, QlError, QlState, TuningPlan};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asym})")]
    NotSymmetric { max_asym: f64 },
    #[error("Jacobi sweep did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("gap feasibility needs n >= a > 0, got n={n}, a={a}")]
    InfeasibleGap { n: f64, a: f64 },
    #[error("no graph exists for p = 0")]
    ZeroProbability,
    #[error(transparent)]
    Ql(#[from] QlError),
    #[error(transparent)]
    Generation(#[from] GraphGenError),
}

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_REL_TOL: f64 = 1e-11;
const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with the matching eigenvectors as
/// columns of the second result.
pub fn symmetric_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix), SpectralError> {
    let max_asym = m.max_asymmetry();
    if max_asym > SYMMETRY_TOL {
        return Err(SpectralError::NotSymmetric { max_asym });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_REL_TOL * m.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a.get(j, p);
                    let ajq = a.get(j, q);
                    let njp = ajp - s * (ajq + tau * ajp);
                    let njq = ajq + s * (ajp - tau * ajq);
                    a.set(j, p, njp);
                    a.set(p, j, njp);
                    a.set(j, q, njq);
                    a.set(q, j, njq);
                }
                for j in 0..n {
                    let vjp = v.get(j, p);
                    let vjq = v.get(j, q);
                    v.set(j, p, vjp - s * (vjq + tau * vjp));
                    v.set(j, q, vjq + s * (vjp - tau * vjq));
                }
            }
        }
    }
    if !converged {
        return Err(SpectralError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok((values, vectors))
}

/// Descending eigenvalues of a symmetric matrix.
pub fn full_spectrum_symmetric(m: &Matrix) -> Result<Vec<f64>, SpectralError> {
    symmetric_eigen(m).map(|(vals, _)| vals)
}

/// Refined eigenpair from shifted inverse iteration.
#[derive(Debug, Clone)]
pub struct TargetedEigenpair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
}

fn rayleigh(m: &Matrix, v: &[f64]) -> f64 {
    dot(v, &m.matvec(v)) / dot(v, v)
}

fn eig_residual(m: &Matrix, v: &[f64], lambda: f64) -> f64 {
    let mv = m.matvec(v);
    let mut acc = 0.0;
    for i in 0..v.len() {
        let d = mv[i] - lambda * v[i];
        acc += d * d;
    }
    acc.sqrt()
}

/// Inverse iteration with shift `lambda_hint + 1e-6` (the offset avoids an
/// exactly singular solve when the hint is exact), starting from `v_hint`.
/// Converged when the residual drops to 1e-10, capped at 200 iterations; if
/// the linear solves degenerate the hint's own Rayleigh pair is reported
/// with `converged = false`.
pub fn targeted_eigenpair(m: &Matrix, lambda_hint: f64, v_hint: &[f64]) -> TargetedEigenpair {
    const RESIDUAL_TOL: f64 = 1e-10;
    const MAX_ITER: usize = 200;

    let n = m.rows();
    let mut v = v_hint.to_vec();
    normalize(&mut v);
    let lam0 = rayleigh(m, &v);
    let fallback = TargetedEigenpair {
        lambda: lam0,
        vector: v.clone(),
        residual: eig_residual(m, &v, lam0),
        converged: false,
    };

    let mut lu = None;
    for attempt in 0..4 {
        let mu = lambda_hint + 1e-6 * 10f64.powi(attempt);
        let mut shifted = m.clone();
        for i in 0..n {
            shifted.set(i, i, shifted.get(i, i) - mu);
        }
        if let Some(f) = Lu::factor(&shifted) {
            lu = Some(f);
            break;
        }
    }

    let mut best = fallback;
    if let Some(lu) = lu {
        for _ in 0..MAX_ITER {
            let mut x = lu.solve(&v);
            let nx = norm2(&x);
            if !nx.is_finite() || nx == 0.0 {
                break;
            }
            for xi in x.iter_mut() {
                *xi /= nx;
            }
            v = x;
            let lam = rayleigh(m, &v);
            let res = eig_residual(m, &v, lam);
            if res < best.residual {
                best = TargetedEigenpair {
                    lambda: lam,
                    vector: v.clone(),
                    residual: res,
                    converged: false,
                };
            }
            if best.residual <= RESIDUAL_TOL {
                break;
            }
        }
    }
    best.converged = best.residual <= RESIDUAL_TOL;
    if dot(&best.vector, v_hint) < 0.0 {
        for x in best.vector.iter_mut() {
            *x = -*x;
        }
    }
    best
}

/// Verification record for one constructed state.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Full descending spectrum for symmetric composites; for directed ones,
    /// just the targeted eigenvalue.
    pub eigenvalues: Vec<f64>,
    pub lambda_pred: f64,
    /// Refined eigenvalue from inverse iteration.
    pub lambda: f64,
    /// Unit target eigenvector `ψ`.
    pub target_vector: Vec<f64>,
    /// `‖Rψ − λ_pred ψ‖₂` evaluated directly on the target.
    pub direct_residual: f64,
    /// Residual of the refined eigenpair.
    pub residual: f64,
    /// `|⟨ψ, v⟩|` between target and refined vector.
    pub fidelity: f64,
    /// `λ₁ − λ₂`; absent for directed composites (full nonsymmetric spectra
    /// are out of contract).
    pub spectral_gap: Option<f64>,
    pub converged: bool,
}

/// Builds `ψ` from the state, checks `Rψ = λ_pred ψ` directly, refines the
/// pair by inverse iteration, and reports sign-agnostic fidelity. The state
/// must be the one recomputed from the plan's achieved ratio.
pub fn verify_state(
    network: &BlockNetwork,
    state: &QlState,
    plan: &TuningPlan,
) -> Result<SpectralReport, SpectralError> {
    let lambda_pred = predicted_lambda(plan, state)?;
    let psi = psi_target(state, network.n);
    let direct_residual = eig_residual(&network.r, &psi, lambda_pred);
    let refined = targeted_eigenpair(&network.r, lambda_pred, &psi);
    let fidelity = dot(&psi, &refined.vector).abs();

    let (eigenvalues, spectral_gap) = if network.symmetric {
        let vals = full_spectrum_symmetric(&network.r)?;
        let gap = if vals.len() >= 2 {
            Some(vals[0] - vals[1])
        } else {
            None
        };
        (vals, gap)
    } else {
        (vec![refined.lambda], None)
    };

    Ok(SpectralReport {
        eigenvalues,
        lambda_pred,
        lambda: refined.lambda,
        target_vector: psi,
        direct_residual,
        residual: refined.residual,
        fidelity,
        spectral_gap,
        converged: refined.converged,
    })
}

/// Feasibility summary for a requested spectral gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapFeasibility {
    pub gap: f64,
    pub n: Option<f64>,
    pub p: Option<f64>,
    pub min_p: Option<f64>,
    pub min_n: Option<f64>,
    pub min_regularity: Option<f64>,
}

/// Smallest edge probability giving `λ₁ − λ₂ ≥ a` on G(n, p):
/// `p ≥ 2√((−a² + an + n)/(n(n+4)²)) + (a+2)/(n+4)`.
pub fn er_min_p(n: f64, a: f64) -> Result<f64, SpectralError> {
    if !(a > 0.0 && n >= a) {
        return Err(SpectralError::InfeasibleGap { n, a });
    }
    let num = -a * a + a * n + n;
    let p = 2.0 * (num / (n * (n + 4.0) * (n + 4.0))).sqrt() + (a + 2.0) / (n + 4.0);
    Ok(p.min(1.0))
}

/// Smallest order with `λ₁ − λ₂ ≥ 1` at edge probability `p`:
/// `n ≥ (6 + 2√(p² − 3p + 2))/p − 2`.
pub fn er_min_n(p: f64) -> Result<f64, SpectralError> {
    if p <= 0.0 {
        return Err(SpectralError::ZeroProbability);
    }
    let p = p.min(1.0);
    Ok((6.0 + 2.0 * (p * p - 3.0 * p + 2.0).max(0.0).sqrt()) / p - 2.0)
}

/// Asymptotic minimum average regularity `lim n·p = 2 + a + 2√(1+a)` needed
/// for a gap of `a`; constant in the graph size.
pub fn min_regularity_limit(a: f64) -> f64 {
    2.0 + a + 2.0 * (1.0 + a).sqrt()
}

/// One seeded Erdős–Rényi draw with its top two adjacency eigenvalues.
#[derive(Debug, Clone)]
pub struct GapSample {
    pub trial: usize,
    pub seed: u64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl GapSample {
    pub fn gap(&self) -> f64 {
        self.lambda1 - self.lambda2
    }
}

/// Seeded ensemble of ER samples for empirical gap statistics; per-trial
/// seeds derive from `base_seed`.
pub fn er_gap_samples(
    n: usize,
    p: f64,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<GapSample>, SpectralError> {
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let seed = derive_seed(base_seed, &format!("er-trial-{trial}"));
        let g = graphgen::gen_er_graph(n, p, seed)?;
        let vals = full_spectrum_symmetric(&g.adjacency)?;
        out.push(GapSample {
            trial,
            seed,
            lambda1: vals[0],
            lambda2: vals[1],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{gen_biregular_bipartite, gen_random_regular, Sign};
    use crate::qlcore::assemble;

    fn cycle4() -> Matrix {
        Matrix::from_rows(&[
            vec![0.0, 1.0, 0.0, 1.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![1.0, 0.0, 1.0, 0.0],
        ])
    }

    #[test]
    fn cycle_spectrum() {
        let vals = full_spectrum_symmetric(&cycle4()).unwrap();
        let want = [2.0, 0.0, 0.0, -2.0];
        for (got, want) in vals.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn complete_graph_spectrum() {
        let mut k10 = Matrix::zeros(10, 10);
        for i in 0..10 {
            for j in 0..10 {
                if i != j {
                    k10.set(i, j, 1.0);
                }
            }
        }
        let vals = full_spectrum_symmetric(&k10).unwrap();
        assert!((vals[0] - 9.0).abs() < 1e-10);
        for v in &vals[1..] {
            assert!((v + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_reconstruct() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, -2.0, 2.0],
            vec![0.5, 2.0, 0.0],
        ]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        for k in 0..3 {
            let v: Vec<f64> = (0..3).map(|r| vecs.get(r, k)).collect();
            assert!(eig_residual(&a, &v, vals[k]) < 1e-10);
        }
        // power sums match traces of A^k: an independent check that the
        // multiset is the true spectrum
        let a2 = a.mul(&a);
        let a3 = a2.mul(&a);
        for (k, m) in [(1, &a), (2, &a2), (3, &a3)] {
            let power_sum: f64 = vals.iter().map(|v| v.powi(k)).sum();
            assert!((power_sum - m.trace()).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(
            full_spectrum_symmetric(&m),
            Err(SpectralError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn lemma_network_has_emergent_pair() {
        let a = gen_random_regular(30, 20, 1).unwrap();
        let b = gen_random_regular(30, 20, 2).unwrap();
        let c = gen_biregular_bipartite(30, 3, Sign::Minus, 3).unwrap();
        let net = assemble(a, b, c, None, None).unwrap();
        let vals = full_spectrum_symmetric(&net.r).unwrap();
        assert!((vals[0] - 23.0).abs() < 1e-9, "λ1 = {}", vals[0]);
        assert!((vals[1] - 17.0).abs() < 1e-9, "λ2 = {}", vals[1]);
        // zero diagonal: eigenvalues sum to zero
        let sum: f64 = vals.iter().sum();
        assert!(sum.abs() <= 1e-8 * net.r.frobenius_norm());
    }

    #[test]
    fn inverse_iteration_refines_hint() {
        let m = cycle4();
        let hint = vec![0.5, 0.48, 0.52, 0.5];
        let pair = targeted_eigenpair(&m, 1.9, &hint);
        assert!(pair.converged);
        assert!((pair.lambda - 2.0).abs() < 1e-9);
        assert!(pair.residual <= 1e-10);
    }

    #[test]
    fn decoupled_target_stays_on_one_block() {
        // l = 0: block-diagonal composite; hinting at k with a block-A
        // vector keeps the refined eigenvector supported there
        let a = gen_random_regular(8, 3, 1).unwrap();
        let b = gen_random_regular(8, 3, 2).unwrap();
        let z = crate::graphgen::BipartiteCoupling::zero(8, Sign::Minus);
        let net = assemble(a, b, z, None, None).unwrap();
        let mut hint = vec![1.0 / (8.0f64).sqrt(); 8];
        hint.extend(std::iter::repeat_n(0.0, 8));
        let pair = targeted_eigenpair(&net.r, 3.0, &hint);
        assert!(pair.converged);
        assert!((pair.lambda - 3.0).abs() < 1e-10);
        let tail: f64 = pair.vector[8..].iter().map(|x| x.abs()).sum();
        assert!(tail < 1e-9, "support leaked across the zero coupling");
    }

    #[test]
    fn er_formula_values() {
        // p_min at n = 1 collapses to certainty
        assert!((er_min_p(1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // closed form for a = 1 matches the specialized expression
        let n = 50.0f64;
        let want = 2.0 * ((2.0 * n - 1.0) / (n * (n + 4.0) * (n + 4.0))).sqrt() + 3.0 / (n + 4.0);
        assert!((er_min_p(n, 1.0).unwrap() - want).abs() < 1e-15);
        // n·p_min approaches 3 + 2√2 from above
        let big = 1e9;
        assert!((big * er_min_p(big, 1.0).unwrap() - min_regularity_limit(1.0)).abs() < 1e-3);

        assert!((er_min_n(1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((er_min_n(0.5).unwrap() - (10.0 + 2.0 * 3.0f64.sqrt())).abs() < 1e-12);
        assert!(er_min_n(1e-12).unwrap() > 1e10);
        assert!(er_min_n(0.0).is_err());

        assert!((min_regularity_limit(1.0) - (3.0 + 2.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
        assert_eq!(min_regularity_limit(1.0).ceil(), 6.0);
        assert!((min_regularity_limit(3.0) - 9.0).abs() < 1e-12);
        assert!((min_regularity_limit(1e-12) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn gap_samples_are_seeded() {
        let a = er_gap_samples(20, 0.5, 3, 7).unwrap();
        let b = er_gap_samples(20, 0.5, 3, 7).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.lambda1, y.lambda1);
            assert_eq!(x.seed, y.seed);
        }
    }
}
