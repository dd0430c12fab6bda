//! Seeded generation of the combinatorial building blocks: random k-regular
//! simple graphs, l-biregular bipartite couplings, row-regular directed
//! couplings, and Erdős–Rényi samples.
//!
//! Every generator is deterministic for a fixed `(parameters, seed)` pair and
//! validates its regularity contract before returning; a repair loop that
//! fails to converge within its budget reports an error instead of silently
//! emitting a non-regular block.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

/// Edge-weight sign carried by a coupling block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphGenError {
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("n*k must be even (handshake): n={n}, k={k}")]
    OddHandshake { n: usize, k: usize },
    #[error("repair did not converge within {attempts} attempts; retry with a different seed")]
    RepairFailed { attempts: usize },
}

/// Simple undirected graph stored as a dense 0/1 adjacency matrix.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    pub n: usize,
    pub adjacency: Matrix,
    /// Present when every vertex has exactly this degree.
    pub regularity: Option<usize>,
}

impl SimpleGraph {
    pub fn edge_count(&self) -> usize {
        let mut e = 0usize;
        for r in 0..self.n {
            for c in (r + 1)..self.n {
                if self.adjacency.get(r, c) != 0.0 {
                    e += 1;
                }
            }
        }
        e
    }

    /// BFS connectivity on the undirected support.
    pub fn is_connected(&self) -> bool {
        undirected_support_connected(&self.adjacency)
    }
}

/// Bipartite coupling block between the two subgraphs.
#[derive(Debug, Clone)]
pub struct BipartiteCoupling {
    pub rows: usize,
    pub cols: usize,
    pub matrix: Matrix,
    pub sign: Sign,
    pub mode: CouplingMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingMode {
    /// All row sums and all column sums of |entries| equal `l`.
    UndirectedBiregular { l: usize },
    /// Every row sum of |entries| equals `l_out`; column sums unconstrained.
    RowRegularDirected { l_out: usize },
    /// Fractional weights; all row and column sums of |entries| equal the real `l`.
    RealBiregular { l: f64 },
}

impl CouplingMode {
    pub fn degree(&self) -> f64 {
        match *self {
            CouplingMode::UndirectedBiregular { l } => l as f64,
            CouplingMode::RowRegularDirected { l_out } => l_out as f64,
            CouplingMode::RealBiregular { l } => l,
        }
    }
}

impl BipartiteCoupling {
    /// Transpose of the block. Only marginal-regular modes survive
    /// transposition with their mode intact.
    pub fn transposed(&self) -> BipartiteCoupling {
        BipartiteCoupling {
            rows: self.cols,
            cols: self.rows,
            matrix: self.matrix.transpose(),
            sign: self.sign,
            mode: self.mode,
        }
    }

    /// All-zero coupling (the `l = 0` pole case).
    pub fn zero(n: usize, sign: Sign) -> BipartiteCoupling {
        BipartiteCoupling {
            rows: n,
            cols: n,
            matrix: Matrix::zeros(n, n),
            sign,
            mode: CouplingMode::RowRegularDirected { l_out: 0 },
        }
    }
}

/// Seeded Erdős–Rényi sample G(n, p).
#[derive(Debug, Clone)]
pub struct ErGraphSample {
    pub n: usize,
    pub p: f64,
    pub adjacency: Matrix,
    pub seed: u64,
    pub edge_count: usize,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a per-block seed from a master seed, so one config seed drives
/// every generator in a pipeline reproducibly.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(base ^ h)
}

fn rng_for(seed: u64) -> Pcg64Mcg {
    Pcg64Mcg::seed_from_u64(seed)
}

/// Random k-regular simple graph via the configuration model with edge-swap
/// repair. Dense degrees (k > (n-1)/2) are generated as the complement of a
/// sparse regular graph, which keeps the repair loop in its fast regime.
pub fn gen_random_regular(n: usize, k: usize, seed: u64) -> Result<SimpleGraph, GraphGenError> {
    gen_random_regular_with_budget(n, k, seed, None)
}

/// As [`gen_random_regular`] with an explicit swap-attempt budget
/// (default `100 * n * k`).
pub fn gen_random_regular_with_budget(
    n: usize,
    k: usize,
    seed: u64,
    budget: Option<usize>,
) -> Result<SimpleGraph, GraphGenError> {
    if k == 0 || k >= n {
        return Err(GraphGenError::InvalidParameter(format!(
            "need 0 < k < n, got n={n}, k={k}"
        )));
    }
    if (n * k) % 2 != 0 {
        return Err(GraphGenError::OddHandshake { n, k });
    }

    let complement = k > (n - 1) / 2;
    let gen_k = if complement { n - 1 - k } else { k };

    let adjacency = if gen_k == 0 {
        // complement of the empty graph: complete
        debug_assert!(complement);
        Matrix::zeros(n, n)
    } else {
        configuration_model(n, gen_k, seed, budget.unwrap_or(100 * n * gen_k.max(1)))?
    };

    let mut adj = adjacency;
    if complement {
        let mut full = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    full.set(r, c, 1.0 - adj.get(r, c));
                }
            }
        }
        adj = full;
    }

    let g = SimpleGraph {
        n,
        adjacency: adj,
        regularity: Some(k),
    };
    validate_regular(&g, k);
    Ok(g)
}

fn configuration_model(
    n: usize,
    k: usize,
    seed: u64,
    budget: usize,
) -> Result<Matrix, GraphGenError> {
    let mut rng = rng_for(seed);
    let mut stubs: Vec<usize> = Vec::with_capacity(n * k);
    for v in 0..n {
        for _ in 0..k {
            stubs.push(v);
        }
    }
    stubs.shuffle(&mut rng);

    let m = stubs.len() / 2;
    let mut edges: Vec<(usize, usize)> = (0..m).map(|t| (stubs[2 * t], stubs[2 * t + 1])).collect();

    let mut count = vec![0u32; n * n];
    let bump = |cnt: &mut Vec<u32>, u: usize, v: usize, d: i32| {
        let idx = u.min(v) * n + u.max(v);
        if d > 0 {
            cnt[idx] += 1;
        } else {
            cnt[idx] -= 1;
        }
    };
    for &(u, v) in &edges {
        bump(&mut count, u, v, 1);
    }
    let is_bad = |cnt: &[u32], (u, v): (usize, usize)| u == v || cnt[u.min(v) * n + u.max(v)] > 1;

    let mut attempts = 0usize;
    loop {
        let bad: Vec<usize> = (0..edges.len())
            .filter(|&i| is_bad(&count, edges[i]))
            .collect();
        if bad.is_empty() {
            break;
        }
        let mut progressed = false;
        'repair: for &i in &bad {
            if !is_bad(&count, edges[i]) {
                continue; // fixed by an earlier swap this round
            }
            for _ in 0..16 {
                attempts += 1;
                if attempts > budget {
                    return Err(GraphGenError::RepairFailed { attempts });
                }
                let j = rng.random_range(0..edges.len());
                if j == i {
                    continue;
                }
                let (u, v) = edges[i];
                let (mut x, mut y) = edges[j];
                if rng.random::<bool>() {
                    std::mem::swap(&mut x, &mut y);
                }
                // propose (u,v),(x,y) -> (u,x),(v,y)
                let e1 = (u, x);
                let e2 = (v, y);
                if u == x || v == y {
                    continue;
                }
                if (e1.0.min(e1.1), e1.0.max(e1.1)) == (e2.0.min(e2.1), e2.0.max(e2.1)) {
                    continue;
                }
                if count[e1.0.min(e1.1) * n + e1.0.max(e1.1)] > 0
                    || count[e2.0.min(e2.1) * n + e2.0.max(e2.1)] > 0
                {
                    continue;
                }
                bump(&mut count, u, v, -1);
                bump(&mut count, x, y, -1);
                bump(&mut count, e1.0, e1.1, 1);
                bump(&mut count, e2.0, e2.1, 1);
                edges[i] = e1;
                edges[j] = e2;
                progressed = true;
                continue 'repair;
            }
        }
        if !progressed {
            attempts += bad.len().max(1);
            if attempts > budget {
                return Err(GraphGenError::RepairFailed { attempts });
            }
        }
    }

    let mut adj = Matrix::zeros(n, n);
    for &(u, v) in &edges {
        adj.set(u, v, 1.0);
        adj.set(v, u, 1.0);
    }
    Ok(adj)
}

fn validate_regular(g: &SimpleGraph, k: usize) {
    assert!(g.adjacency.is_symmetric(0.0), "adjacency must be symmetric");
    for i in 0..g.n {
        assert_eq!(g.adjacency.get(i, i), 0.0, "zero diagonal violated");
        assert_eq!(
            g.adjacency.row_sum(i) as usize,
            k,
            "row {i} is not {k}-regular"
        );
    }
}

/// l-biregular bipartite block: the union of `l` disjoint random permutation
/// supports, repaired by 2x2 transpositions (each repair preserves all
/// marginal sums). `l > n/2` is generated by complementing the
/// `(n-l)`-biregular support.
pub fn gen_biregular_bipartite(
    n: usize,
    l: usize,
    sign: Sign,
    seed: u64,
) -> Result<BipartiteCoupling, GraphGenError> {
    if l == 0 || l > n {
        return Err(GraphGenError::InvalidParameter(format!(
            "need 0 < l <= n, got n={n}, l={l}"
        )));
    }
    let complement = l > n / 2;
    let gen_l = if complement { n - l } else { l };
    let support = if gen_l == 0 {
        vec![false; n * n] // complement of empty: complete bipartite
    } else {
        permutation_support(n, gen_l, seed, 100 * n * gen_l)?
    };

    let mut m = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let present = support[r * n + c] != complement;
            if present {
                m.set(r, c, sign.value());
            }
        }
    }
    let coupling = BipartiteCoupling {
        rows: n,
        cols: n,
        matrix: m,
        sign,
        mode: CouplingMode::UndirectedBiregular { l },
    };
    validate_biregular(&coupling, l as f64);
    Ok(coupling)
}

/// Occupancy mask for `l` superimposed disjoint permutations on an n x n grid.
fn permutation_support(
    n: usize,
    l: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<bool>, GraphGenError> {
    let mut rng = rng_for(seed);
    let mut occ = vec![false; n * n];
    let mut attempts = 0usize;

    for _ in 0..l {
        'draw: loop {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut scan: Vec<usize> = (0..n).collect();
            loop {
                let colliding: Vec<usize> = (0..n).filter(|&i| occ[i * n + perm[i]]).collect();
                if colliding.is_empty() {
                    for i in 0..n {
                        occ[i * n + perm[i]] = true;
                    }
                    break 'draw;
                }
                attempts += 1;
                if attempts > budget {
                    return Err(GraphGenError::RepairFailed { attempts });
                }
                let i = colliding[rng.random_range(0..colliding.len())];
                scan.shuffle(&mut rng);
                let mut swapped = false;
                for &j in &scan {
                    if j == i {
                        continue;
                    }
                    if !occ[i * n + perm[j]] && !occ[j * n + perm[i]] {
                        perm.swap(i, j);
                        swapped = true;
                        break;
                    }
                }
                if !swapped {
                    continue 'draw; // stuck permutation, redraw
                }
            }
        }
    }
    Ok(occ)
}

fn validate_biregular(c: &BipartiteCoupling, l: f64) {
    for r in 0..c.rows {
        let s = c.matrix.abs_row_sum(r);
        assert!((s - l).abs() < 1e-9, "row {r} sums to {s}, want {l}");
    }
    for col in 0..c.cols {
        let s = c.matrix.abs_col_sum(col);
        assert!((s - l).abs() < 1e-9, "col {col} sums to {s}, want {l}");
    }
}

/// Directed coupling: each row independently selects `l_out` target columns
/// uniformly; column sums are left unconstrained. `l_out = 0` yields the zero
/// block used by the pole states.
pub fn gen_row_regular_directed(
    n: usize,
    l_out: usize,
    sign: Sign,
    seed: u64,
) -> Result<BipartiteCoupling, GraphGenError> {
    if l_out > n {
        return Err(GraphGenError::InvalidParameter(format!(
            "need l_out <= n, got n={n}, l_out={l_out}"
        )));
    }
    let mut rng = rng_for(seed);
    let mut m = Matrix::zeros(n, n);
    let mut cols: Vec<usize> = (0..n).collect();
    for r in 0..n {
        cols.shuffle(&mut rng);
        for &c in cols.iter().take(l_out) {
            m.set(r, c, sign.value());
        }
    }
    let coupling = BipartiteCoupling {
        rows: n,
        cols: n,
        matrix: m,
        sign,
        mode: CouplingMode::RowRegularDirected { l_out },
    };
    for r in 0..n {
        assert_eq!(coupling.matrix.abs_row_sum(r) as usize, l_out);
    }
    Ok(coupling)
}

/// Directed but marginal-regular coupling: same support construction as the
/// undirected biregular block, drawn independently of its partner block.
/// Random-walk stationary distributions are blockwise-constant only when both
/// directed blocks are marginal-regular, so the walk pipeline uses this.
pub fn gen_biregular_directed(
    n: usize,
    l: usize,
    sign: Sign,
    seed: u64,
) -> Result<BipartiteCoupling, GraphGenError> {
    if l == 0 {
        return Ok(BipartiteCoupling::zero(n, sign));
    }
    let mut c = gen_biregular_bipartite(n, l, sign, seed)?;
    c.mode = CouplingMode::RowRegularDirected { l_out: l };
    Ok(c)
}

/// Real-valued coupling (continuous-l mode): the support of ceil(l)
/// superimposed permutations, each entry weighted `l / ceil(l)`, so that all
/// row and column sums of |entries| equal the real `l` exactly.
pub fn gen_real_biregular(
    n: usize,
    l: f64,
    sign: Sign,
    seed: u64,
) -> Result<BipartiteCoupling, GraphGenError> {
    if !(0.0..=n as f64).contains(&l) || !l.is_finite() {
        return Err(GraphGenError::InvalidParameter(format!(
            "need 0 <= l <= n, got n={n}, l={l}"
        )));
    }
    if l == 0.0 {
        let mut z = BipartiteCoupling::zero(n, sign);
        z.mode = CouplingMode::RealBiregular { l: 0.0 };
        return Ok(z);
    }
    let c = l.ceil() as usize;
    let w = l / c as f64;
    let support = permutation_support(n, c, seed, 100 * n * c)?;
    let mut m = Matrix::zeros(n, n);
    for r in 0..n {
        for col in 0..n {
            if support[r * n + col] {
                m.set(r, col, sign.value() * w);
            }
        }
    }
    let coupling = BipartiteCoupling {
        rows: n,
        cols: n,
        matrix: m,
        sign,
        mode: CouplingMode::RealBiregular { l },
    };
    validate_biregular(&coupling, l);
    Ok(coupling)
}

/// Erdős–Rényi sample: each off-diagonal pair present independently with
/// probability `p`.
pub fn gen_er_graph(n: usize, p: f64, seed: u64) -> Result<ErGraphSample, GraphGenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphGenError::InvalidParameter(format!(
            "need 0 <= p <= 1, got {p}"
        )));
    }
    let mut rng = rng_for(seed);
    let mut adj = Matrix::zeros(n, n);
    let mut edges = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                adj.set(i, j, 1.0);
                adj.set(j, i, 1.0);
                edges += 1;
            }
        }
    }
    Ok(ErGraphSample {
        n,
        p,
        adjacency: adj,
        seed,
        edge_count: edges,
    })
}

/// Connectivity of an undirected support (edges taken as |entries| > 0).
pub fn undirected_support_connected(adj: &Matrix) -> bool {
    let n = adj.rows();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = vec![0usize];
    seen[0] = true;
    while let Some(u) = queue.pop() {
        for v in 0..n {
            if !seen[v] && (adj.get(u, v) != 0.0 || adj.get(v, u) != 0.0) {
                seen[v] = true;
                queue.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Strong connectivity of a directed support: every vertex reachable from 0
/// and 0 reachable from every vertex.
pub fn directed_support_strongly_connected(adj: &Matrix) -> bool {
    let n = adj.rows();
    if n == 0 {
        return true;
    }
    let reach = |reverse: bool| {
        let mut seen = vec![false; n];
        let mut queue = vec![0usize];
        seen[0] = true;
        while let Some(u) = queue.pop() {
            for v in 0..n {
                let w = if reverse {
                    adj.get(v, u)
                } else {
                    adj.get(u, v)
                };
                if !seen[v] && w != 0.0 {
                    seen[v] = true;
                    queue.push(v);
                }
            }
        }
        seen
    };
    reach(false).iter().all(|&s| s) && reach(true).iter().all(|&s| s)
}
