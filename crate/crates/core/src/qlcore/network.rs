//! Composite block network `R = [[A, C_A], [C_B, B]]` and its assembly from
//! tuning plans.

use super::state::QlState;
use super::tuning::TuningPlan;
use super::QlError;
use crate::graphgen::{self, derive_seed, BipartiteCoupling, Sign, SimpleGraph};
use crate::matrix::Matrix;

/// Metadata describing how a composite was built; serialized alongside the
/// blocks in the graph JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMeta {
    pub k_a: usize,
    pub k_b: usize,
    pub l_a: f64,
    pub l_b: f64,
    pub sign: Sign,
    pub seed: Option<u64>,
}

/// Composite signed adjacency matrix with its block structure.
#[derive(Debug, Clone)]
pub struct BlockNetwork {
    /// Vertices per subgraph; the composite has `2n`.
    pub n: usize,
    pub block_a: SimpleGraph,
    pub block_b: SimpleGraph,
    pub coupling_a: BipartiteCoupling,
    pub coupling_b: BipartiteCoupling,
    pub r: Matrix,
    /// True exactly when `R = Rᵀ` elementwise (`C_B = C_Aᵀ`).
    pub symmetric: bool,
    pub meta: NetworkMeta,
}

impl BlockNetwork {
    /// Connectivity of the unsigned support (undirected view).
    pub fn is_connected(&self) -> bool {
        graphgen::undirected_support_connected(&self.r)
    }

    pub fn is_strongly_connected(&self) -> bool {
        graphgen::directed_support_strongly_connected(&self.r)
    }
}

/// Assembles `R = [[A, C_A], [C_B, B]]`. Passing `None` for `c_b` uses the
/// transpose of `c_a` (the undirected case).
pub fn assemble(
    a: SimpleGraph,
    b: SimpleGraph,
    c_a: BipartiteCoupling,
    c_b: Option<BipartiteCoupling>,
    seed: Option<u64>,
) -> Result<BlockNetwork, QlError> {
    let n = a.n;
    let c_b = c_b.unwrap_or_else(|| c_a.transposed());
    if b.n != n || c_a.rows != n || c_a.cols != n || c_b.rows != n || c_b.cols != n {
        return Err(QlError::DimensionMismatch(format!(
            "blocks must all be {n}x{n}: B is {}x{}, C_A {}x{}, C_B {}x{}",
            b.n, b.n, c_a.rows, c_a.cols, c_b.rows, c_b.cols
        )));
    }

    let mut r = Matrix::zeros(2 * n, 2 * n);
    r.insert_block(0, 0, &a.adjacency);
    r.insert_block(0, n, &c_a.matrix);
    r.insert_block(n, 0, &c_b.matrix);
    r.insert_block(n, n, &b.adjacency);
    let symmetric = r.is_symmetric(0.0);

    let meta = NetworkMeta {
        k_a: a.regularity.unwrap_or(0),
        k_b: b.regularity.unwrap_or(0),
        l_a: c_a.mode.degree(),
        l_b: c_b.mode.degree(),
        sign: c_a.sign,
        seed,
    };
    Ok(BlockNetwork {
        n,
        block_a: a,
        block_b: b,
        coupling_a: c_a,
        coupling_b: c_b,
        r,
        symmetric,
        meta,
    })
}

/// Generates the blocks a plan prescribes and assembles the composite.
/// All randomness is derived from the single `seed`.
pub fn build_network_from_plan(
    plan: &TuningPlan,
    n: usize,
    seed: u64,
) -> Result<BlockNetwork, QlError> {
    let a = graphgen::gen_random_regular(n, plan.k_a, derive_seed(seed, "A"))?;
    let b = graphgen::gen_random_regular(n, plan.k_b, derive_seed(seed, "B"))?;

    let (c_a, c_b) = if plan.branch.is_symmetric() {
        let c = if plan.is_continuous() {
            graphgen::gen_real_biregular(n, plan.l_a, plan.sign, derive_seed(seed, "C"))?
        } else {
            graphgen::gen_biregular_bipartite(
                n,
                plan.l_a as usize,
                plan.sign,
                derive_seed(seed, "C"),
            )?
        };
        (c, None)
    } else {
        let c_a = gen_directed(n, plan.l_a, plan.sign, derive_seed(seed, "C_A"))?;
        let c_b = gen_directed(n, plan.l_b, plan.sign, derive_seed(seed, "C_B"))?;
        (c_a, Some(c_b))
    };
    assemble(a, b, c_a, c_b, Some(seed))
}

fn gen_directed(n: usize, l: f64, sign: Sign, seed: u64) -> Result<BipartiteCoupling, QlError> {
    let l = l as usize;
    if l == 0 {
        Ok(BipartiteCoupling::zero(n, sign))
    } else {
        Ok(graphgen::gen_row_regular_directed(n, l, sign, seed)?)
    }
}

/// Target eigenvector `ψ = (ω₁ V_A; ω₂ V_B)` of unit Euclidean norm.
pub fn psi_target(state: &QlState, n: usize) -> Vec<f64> {
    let scale = 1.0 / (n as f64).sqrt();
    let mut v = Vec::with_capacity(2 * n);
    v.extend(std::iter::repeat_n(state.omega1 * scale, n));
    v.extend(std::iter::repeat_n(state.omega2 * scale, n));
    v
}

/// Block means of a composite vector, rescaled to weight space: the inverse
/// of [`psi_target`] for vectors of the exact block-constant form.
pub fn block_weights(v: &[f64], n: usize) -> (f64, f64) {
    let scale = (n as f64).sqrt();
    let w1: f64 = v[..n].iter().sum::<f64>() / n as f64 * scale;
    let w2: f64 = v[n..].iter().sum::<f64>() / n as f64 * scale;
    (w1, w2)
}
