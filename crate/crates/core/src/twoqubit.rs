//! Two-bit composite: four regular subgraphs `A, B, D, E`, internal
//! couplings `C` (A↔B) and `F` (D↔E), and four cross couplings joining the
//! two bit halves. The four product-basis sign patterns
//!
//! ```text
//!   ψ_{++} = ½(V; V; V; V)     ψ_{+−} = ½(V; V; −V; −V)
//!   ψ_{−+} = ½(V; −V; V; −V)   ψ_{−−} = ½(V; −V; −V; V)
//! ```
//!
//! are tested against the proposed eigenvalues `(k±l) ± (j₁±j₂)`. The
//! construction is a proposal rather than a theorem, so the verifier reports
//! residuals and eigenspace fidelities as findings instead of failing.

use crate::graphgen::{self, derive_seed, BipartiteCoupling, GraphGenError, Sign, SimpleGraph};
use crate::matrix::{dot, norm2, Matrix};
use crate::spectral::{symmetric_eigen, SpectralError};

/// Composite `4n x 4n` network of two coupled bits.
#[derive(Debug, Clone)]
pub struct TwoQubitNetwork {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub j1: usize,
    pub j2: usize,
    pub block_a: SimpleGraph,
    pub block_b: SimpleGraph,
    pub block_d: SimpleGraph,
    pub block_e: SimpleGraph,
    pub coupling_c: BipartiteCoupling,
    pub coupling_f: BipartiteCoupling,
    pub x_ad: BipartiteCoupling,
    pub x_ae: BipartiteCoupling,
    pub x_bd: BipartiteCoupling,
    pub x_be: BipartiteCoupling,
    pub r: Matrix,
}

/// Assembles the exact-regular two-bit composite with the sign pattern
/// negative on A↔B, A↔D, B↔E, D↔E and positive on A↔E, B↔D. Cross blocks
/// `X_AD`/`X_BE` are `j₁`-biregular and `X_AE`/`X_BD` are `j₂`-biregular,
/// so every row of the cross coupling sums to `j₁ + j₂` in magnitude.
pub fn assemble_two_qubit(
    n: usize,
    k: usize,
    l: usize,
    j1: usize,
    j2: usize,
    seed: u64,
) -> Result<TwoQubitNetwork, GraphGenError> {
    if l == 0 || l > n {
        return Err(GraphGenError::InvalidParameter(format!(
            "internal coupling needs 0 < l <= n, got l={l}, n={n}"
        )));
    }
    if j1 > n || j2 > n {
        return Err(GraphGenError::InvalidParameter(format!(
            "cross couplings need j <= n, got j1={j1}, j2={j2}, n={n}"
        )));
    }
    let block_a = graphgen::gen_random_regular(n, k, derive_seed(seed, "A"))?;
    let block_b = graphgen::gen_random_regular(n, k, derive_seed(seed, "B"))?;
    let block_d = graphgen::gen_random_regular(n, k, derive_seed(seed, "D"))?;
    let block_e = graphgen::gen_random_regular(n, k, derive_seed(seed, "E"))?;
    let coupling_c = graphgen::gen_biregular_bipartite(n, l, Sign::Minus, derive_seed(seed, "C"))?;
    let coupling_f = graphgen::gen_biregular_bipartite(n, l, Sign::Minus, derive_seed(seed, "F"))?;
    let cross = |label: &str, j: usize, sign: Sign| -> Result<BipartiteCoupling, GraphGenError> {
        if j == 0 {
            Ok(BipartiteCoupling::zero(n, sign))
        } else {
            graphgen::gen_biregular_bipartite(n, j, sign, derive_seed(seed, label))
        }
    };
    let x_ad = cross("X_AD", j1, Sign::Minus)?;
    let x_ae = cross("X_AE", j2, Sign::Plus)?;
    let x_bd = cross("X_BD", j2, Sign::Plus)?;
    let x_be = cross("X_BE", j1, Sign::Minus)?;

    let mut r = Matrix::zeros(4 * n, 4 * n);
    let blocks: [[&Matrix; 4]; 4] = [
        [
            &block_a.adjacency,
            &coupling_c.matrix,
            &x_ad.matrix,
            &x_ae.matrix,
        ],
        [
            &coupling_c.matrix.transpose(),
            &block_b.adjacency,
            &x_bd.matrix,
            &x_be.matrix,
        ],
        [
            &x_ad.matrix.transpose(),
            &x_bd.matrix.transpose(),
            &block_d.adjacency,
            &coupling_f.matrix,
        ],
        [
            &x_ae.matrix.transpose(),
            &x_be.matrix.transpose(),
            &coupling_f.matrix.transpose(),
            &block_e.adjacency,
        ],
    ];
    for (br, row) in blocks.iter().enumerate() {
        for (bc, blk) in row.iter().enumerate() {
            r.insert_block(br * n, bc * n, blk);
        }
    }
    debug_assert!(r.is_symmetric(0.0));

    Ok(TwoQubitNetwork {
        n,
        k,
        l,
        j1,
        j2,
        block_a,
        block_b,
        block_d,
        block_e,
        coupling_c,
        coupling_f,
        x_ad,
        x_ae,
        x_bd,
        x_be,
        r,
    })
}

pub const TWO_QUBIT_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];

/// Proposed eigenvalues in pattern order `(++, +−, −+, −−)`:
/// `(k+l)+(j₁+j₂), (k+l)−(j₁+j₂), (k−l)+(j₁−j₂), (k−l)−(j₁−j₂)`.
pub fn predicted_two_qubit_eigs(k: f64, l: f64, j1: f64, j2: f64) -> [f64; 4] {
    [
        (k + l) + (j1 + j2),
        (k + l) - (j1 + j2),
        (k - l) + (j1 - j2),
        (k - l) - (j1 - j2),
    ]
}

/// The four half-weighted sign patterns as unit vectors of length `4n`, in
/// the order `(++, +−, −+, −−)`.
pub fn two_qubit_patterns(n: usize) -> [Vec<f64>; 4] {
    let signs: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    let w = 0.5 / (n as f64).sqrt();
    signs.map(|pattern| {
        let mut v = Vec::with_capacity(4 * n);
        for s in pattern {
            v.extend(std::iter::repeat_n(s * w, n));
        }
        v
    })
}

/// Verification findings for the four proposed eigenpairs.
#[derive(Debug, Clone)]
pub struct TwoQubitBasisReport {
    pub predicted: [f64; 4],
    /// `‖Rψ − λ_pred ψ‖₂` per pattern.
    pub residuals: [f64; 4],
    /// Norm of the projection of each pattern onto the eigenspace of the
    /// predicted eigenvalue (all eigenvalues within `1e-6` of it); zero when
    /// the composite has no eigenvalue there.
    pub fidelities: [f64; 4],
    /// Rayleigh quotient `ψᵀRψ`: the eigenvalue each pattern actually
    /// carries when its residual vanishes.
    pub rayleigh: [f64; 4],
}

impl TwoQubitBasisReport {
    pub fn all_confirmed(&self, tol: f64) -> bool {
        self.residuals.iter().all(|r| *r <= tol)
    }
}

/// Checks the four proposed eigenpairs against the assembled composite.
/// Degenerate predicted eigenvalues are handled by projecting onto the full
/// eigenspace rather than a single eigenvector.
pub fn verify_two_qubit_basis(
    network: &TwoQubitNetwork,
) -> Result<TwoQubitBasisReport, SpectralError> {
    let predicted = predicted_two_qubit_eigs(
        network.k as f64,
        network.l as f64,
        network.j1 as f64,
        network.j2 as f64,
    );
    let patterns = two_qubit_patterns(network.n);
    let (eigvals, eigvecs) = symmetric_eigen(&network.r)?;
    let dim = network.r.rows();

    let mut residuals = [0.0f64; 4];
    let mut fidelities = [0.0f64; 4];
    let mut rayleigh = [0.0f64; 4];
    for (idx, psi) in patterns.iter().enumerate() {
        let lambda = predicted[idx];
        let r_psi = network.r.matvec(psi);
        let mut diff = 0.0;
        for i in 0..dim {
            let d = r_psi[i] - lambda * psi[i];
            diff += d * d;
        }
        residuals[idx] = diff.sqrt();
        rayleigh[idx] = dot(psi, &r_psi);

        // eigenspace projection for the predicted eigenvalue
        let mut proj_sq = 0.0;
        for (col, &val) in eigvals.iter().enumerate() {
            if (val - lambda).abs() <= 1e-6 {
                let comp: f64 = (0..dim).map(|r| eigvecs.get(r, col) * psi[r]).sum();
                proj_sq += comp * comp;
            }
        }
        fidelities[idx] = proj_sq.sqrt().min(1.0);
    }
    Ok(TwoQubitBasisReport {
        predicted,
        residuals,
        fidelities,
        rayleigh,
    })
}

/// Convenience: unit-norm check plus mutual orthogonality of the patterns.
pub fn patterns_orthonormal(n: usize, tol: f64) -> bool {
    let patterns = two_qubit_patterns(n);
    for i in 0..4 {
        if (norm2(&patterns[i]) - 1.0).abs() > tol {
            return false;
        }
        for j in (i + 1)..4 {
            if dot(&patterns[i], &patterns[j]).abs() > tol {
                return false;
            }
        }
    }
    true
}
