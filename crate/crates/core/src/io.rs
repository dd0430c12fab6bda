//! JSON and CSV wire formats.
//!
//! Graph JSON carries the block structure in COO form with integer weights
//! (reals in continuous-l mode) plus the construction metadata, so a
//! composite can be re-ingested and re-verified bit-for-bit. Plans and
//! reports serialize flat. CSV emitters cover spectra, stationary vectors,
//! feasibility curves, and Monte-Carlo gap tables.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::graphgen::{BipartiteCoupling, CouplingMode, Sign, SimpleGraph};
use crate::matrix::Matrix;
use crate::qlcore::{assemble, BlockNetwork, Branch, QlError, Ratio, TuningPlan};
use crate::randwalk::StationaryReport;
use crate::spectral::{GapFeasibility, GapSample, SpectralReport};
use crate::twoqubit::{TwoQubitBasisReport, TwoQubitNetwork, TWO_QUBIT_LABELS};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Assembly(#[from] QlError),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Schema(msg.into())
}

/// Integer JSON number when the weight is integral, float otherwise.
fn weight_value(w: f64) -> Value {
    if w.fract() == 0.0 && w.abs() < 9e15 {
        json!(w as i64)
    } else {
        json!(w)
    }
}

fn coo_list(m: &Matrix) -> Value {
    let mut entries = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let w = m.get(r, c);
            if w != 0.0 {
                entries.push(json!([r, c, weight_value(w)]));
            }
        }
    }
    Value::Array(entries)
}

fn matrix_from_coo(v: &Value, rows: usize, cols: usize) -> Result<Matrix, IoError> {
    let list = v
        .as_array()
        .ok_or_else(|| bad("coo block must be an array"))?;
    let mut m = Matrix::zeros(rows, cols);
    for entry in list {
        let triple = entry
            .as_array()
            .filter(|t| t.len() == 3)
            .ok_or_else(|| bad("coo entry must be [row, col, weight]"))?;
        let r = triple[0]
            .as_u64()
            .ok_or_else(|| bad("row index must be a nonnegative integer"))?
            as usize;
        let c = triple[1]
            .as_u64()
            .ok_or_else(|| bad("col index must be a nonnegative integer"))?
            as usize;
        let w = triple[2]
            .as_f64()
            .ok_or_else(|| bad("weight must be numeric"))?;
        if r >= rows || c >= cols {
            return Err(bad(format!(
                "index ({r}, {c}) out of range for {rows}x{cols}"
            )));
        }
        m.set(r, c, w);
    }
    Ok(m)
}

pub fn network_to_json(net: &BlockNetwork) -> Value {
    let meta = &net.meta;
    json!({
        "n": net.n,
        "blocks": {
            "A": coo_list(&net.block_a.adjacency),
            "B": coo_list(&net.block_b.adjacency),
            "C_A": coo_list(&net.coupling_a.matrix),
            "C_B": coo_list(&net.coupling_b.matrix),
        },
        "meta": {
            "k_A": meta.k_a,
            "k_B": meta.k_b,
            "l_A": weight_value(meta.l_a),
            "l_B": weight_value(meta.l_b),
            "sign": meta.sign.as_i64(),
            "seed": meta.seed,
        },
    })
}

pub fn network_from_json(doc: &Value) -> Result<BlockNetwork, IoError> {
    let n = doc
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing n"))? as usize;
    let blocks = doc.get("blocks").ok_or_else(|| bad("missing blocks"))?;
    let meta = doc.get("meta").ok_or_else(|| bad("missing meta"))?;
    let get_block = |name: &str| -> Result<Matrix, IoError> {
        matrix_from_coo(
            blocks
                .get(name)
                .ok_or_else(|| bad(format!("missing block {name}")))?,
            n,
            n,
        )
    };
    let a = get_block("A")?;
    let b = get_block("B")?;
    let c_a = get_block("C_A")?;
    let c_b = get_block("C_B")?;

    let meta_f = |name: &str| -> Result<f64, IoError> {
        meta.get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| bad(format!("missing meta.{name}")))
    };
    let l_a = meta_f("l_A")?;
    let l_b = meta_f("l_B")?;
    let sign = Sign::from_i64(
        meta.get("sign")
            .and_then(Value::as_i64)
            .ok_or_else(|| bad("missing meta.sign"))?,
    )
    .ok_or_else(|| bad("meta.sign must be 1 or -1"))?;
    let seed = meta.get("seed").and_then(Value::as_u64);

    let graph = |adj: Matrix| -> SimpleGraph {
        let regular = (0..adj.rows()).map(|r| adj.row_sum(r)).collect::<Vec<_>>();
        let regularity = if regular.iter().all(|&s| s == regular[0] && s.fract() == 0.0) {
            Some(regular[0] as usize)
        } else {
            None
        };
        SimpleGraph {
            n: adj.rows(),
            adjacency: adj,
            regularity,
        }
    };

    let undirected = c_b == c_a.transpose();
    let coupling = |m: Matrix, l: f64| -> BipartiteCoupling {
        let mode = if undirected {
            if l.fract() == 0.0 {
                CouplingMode::UndirectedBiregular { l: l as usize }
            } else {
                CouplingMode::RealBiregular { l }
            }
        } else {
            CouplingMode::RowRegularDirected { l_out: l as usize }
        };
        BipartiteCoupling {
            rows: m.rows(),
            cols: m.cols(),
            matrix: m,
            sign,
            mode,
        }
    };

    Ok(assemble(
        graph(a),
        graph(b),
        coupling(c_a, l_a),
        Some(coupling(c_b, l_b)),
        seed,
    )?)
}

pub fn plan_to_json(plan: &TuningPlan) -> Value {
    let mut map = Map::new();
    map.insert("branch".into(), json!(plan.branch.as_str()));
    map.insert("target".into(), json!(plan.target));
    if let Some(r) = plan.achieved {
        map.insert("achieved_num".into(), json!(r.num));
        map.insert("achieved_den".into(), json!(r.den));
    }
    map.insert("k_A".into(), json!(plan.k_a));
    map.insert("k_B".into(), json!(plan.k_b));
    map.insert("l_A".into(), weight_value(plan.l_a));
    map.insert("l_B".into(), weight_value(plan.l_b));
    map.insert("sign".into(), json!(plan.sign.as_i64()));
    map.insert("lambda_pred".into(), json!(plan.lambda_pred));
    map.insert("abs_error".into(), json!(plan.abs_error));
    Value::Object(map)
}

pub fn plan_from_json(doc: &Value) -> Result<TuningPlan, IoError> {
    let branch = doc
        .get("branch")
        .and_then(Value::as_str)
        .and_then(Branch::parse)
        .ok_or_else(|| bad("missing or unknown branch"))?;
    let num_f = |name: &str| -> Result<f64, IoError> {
        doc.get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| bad(format!("missing {name}")))
    };
    let num_u = |name: &str| -> Result<usize, IoError> {
        doc.get(name)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| bad(format!("missing {name}")))
    };
    let achieved = match (doc.get("achieved_num"), doc.get("achieved_den")) {
        (Some(n), Some(d)) => {
            let num = n
                .as_i64()
                .ok_or_else(|| bad("achieved_num must be integer"))?;
            let den = d
                .as_i64()
                .ok_or_else(|| bad("achieved_den must be integer"))?;
            if den == 0 {
                return Err(bad("achieved_den must be nonzero"));
            }
            Some(Ratio::new(num, den))
        }
        _ => None,
    };
    let sign = Sign::from_i64(
        doc.get("sign")
            .and_then(Value::as_i64)
            .ok_or_else(|| bad("missing sign"))?,
    )
    .ok_or_else(|| bad("sign must be 1 or -1"))?;
    Ok(TuningPlan {
        branch,
        target: num_f("target")?,
        achieved,
        k_a: num_u("k_A")?,
        k_b: num_u("k_B")?,
        l_a: num_f("l_A")?,
        l_b: num_f("l_B")?,
        sign,
        lambda_pred: num_f("lambda_pred")?,
        abs_error: num_f("abs_error")?,
    })
}

pub fn report_to_json(report: &SpectralReport) -> Value {
    json!({
        "eigenvalues": report.eigenvalues,
        "lambda_pred": report.lambda_pred,
        "lambda": report.lambda,
        "target_vector": report.target_vector,
        "direct_residual": report.direct_residual,
        "residual": report.residual,
        "fidelity": report.fidelity,
        "spectral_gap": report.spectral_gap,
        "converged": report.converged,
    })
}

/// One row per eigenvalue: `index,eigenvalue`.
pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

pub fn stationary_summary_json(report: &StationaryReport) -> Value {
    json!({
        "pi_A": report.pi_a,
        "pi_B": report.pi_b,
        "closed_form_pi_A": report.closed_a,
        "closed_form_pi_B": report.closed_b,
        "X": report.x,
        "Y": report.y,
        "delta": report.delta,
        "max_residual": report.max_residual,
    })
}

/// One row per vertex: `vertex,block,pi`.
pub fn stationary_csv(report: &StationaryReport, n: usize) -> String {
    let mut out = String::from("vertex,block,pi\n");
    for (i, x) in report.pi.iter().enumerate() {
        let block = if i < n { "A" } else { "B" };
        out.push_str(&format!("{i},{block},{x}\n"));
    }
    out
}

/// Feasible-line samples: `a,b,ratio` triples.
pub fn curves_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("a,b,ratio\n");
    for (a, b, ratio) in rows {
        out.push_str(&format!("{a},{b},{ratio}\n"));
    }
    out
}

pub fn gap_feasibility_json(g: &GapFeasibility) -> Value {
    json!({
        "gap": g.gap,
        "n": g.n,
        "p": g.p,
        "min_p": g.min_p,
        "min_n": g.min_n,
        "min_regularity": g.min_regularity,
    })
}

/// Monte-Carlo table: `trial,seed,lambda1,lambda2,gap,pass`.
pub fn gap_table_csv(samples: &[GapSample], threshold: f64) -> String {
    let mut out = String::from("trial,seed,lambda1,lambda2,gap,pass\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.trial,
            s.seed,
            s.lambda1,
            s.lambda2,
            s.gap(),
            s.gap() >= threshold
        ));
    }
    out
}

pub fn two_qubit_report_json(report: &TwoQubitBasisReport) -> Value {
    let mut patterns = Vec::new();
    for idx in 0..4 {
        patterns.push(json!({
            "pattern": TWO_QUBIT_LABELS[idx],
            "lambda_pred": report.predicted[idx],
            "residual": report.residuals[idx],
            "fidelity": report.fidelities[idx],
            "rayleigh": report.rayleigh[idx],
        }));
    }
    json!({
        "patterns": patterns,
        "all_confirmed_1e9": report.all_confirmed(1e-9),
    })
}

/// Graph JSON extended with the second bit's blocks and the cross couplings.
pub fn two_qubit_network_to_json(net: &TwoQubitNetwork) -> Value {
    json!({
        "n": net.n,
        "blocks": {
            "A": coo_list(&net.block_a.adjacency),
            "B": coo_list(&net.block_b.adjacency),
            "C_A": coo_list(&net.coupling_c.matrix),
            "C_B": coo_list(&net.coupling_c.matrix.transpose()),
            "D": coo_list(&net.block_d.adjacency),
            "E": coo_list(&net.block_e.adjacency),
            "F": coo_list(&net.coupling_f.matrix),
            "X_AD": coo_list(&net.x_ad.matrix),
            "X_AE": coo_list(&net.x_ae.matrix),
            "X_BD": coo_list(&net.x_bd.matrix),
            "X_BE": coo_list(&net.x_be.matrix),
        },
        "meta": {
            "k": net.k,
            "l": net.l,
            "j1": net.j1,
            "j2": net.j2,
        },
    })
}
