use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use qlgraph::graphgen::{self, derive_seed, Sign};
use qlgraph::io;
use qlgraph::qlcore::{
    amplitudes_from_ratio, assemble, build_network_from_plan, continuous_plan, predicted_lambda,
    ratio_for_state, rationalize, select_branch_asym, select_branch_sym, state_from_amplitudes,
    Branch, QlState, Quadrant, TuningPlan,
};
use qlgraph::randwalk;
use qlgraph::spectral::{
    er_gap_samples, er_min_n, er_min_p, full_spectrum_symmetric, min_regularity_limit,
    verify_state, GapFeasibility,
};
use qlgraph::twoqubit::{assemble_two_qubit, verify_two_qubit_basis};

use crate::{Format, Mode};

const RESIDUAL_GATE: f64 = 1e-8;
const FIDELITY_GATE: f64 = 1.0 - 1e-8;

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

fn parse_sign(raw: i64) -> Result<Sign> {
    Sign::from_i64(raw).context("--sign must be 1 or -1")
}

fn quadrant_json(q: Quadrant) -> Value {
    json!({"a_sign": q.a_sign.as_i64(), "rel_sign": q.rel_sign.as_i64()})
}

fn quadrant_from_json(doc: Option<&Value>) -> Quadrant {
    let default = Quadrant::new(Sign::Plus, Sign::Plus);
    let Some(doc) = doc else {
        return default;
    };
    let sign_of = |key: &str| {
        doc.get(key)
            .and_then(Value::as_i64)
            .and_then(Sign::from_i64)
            .unwrap_or(Sign::Plus)
    };
    Quadrant::new(sign_of("a_sign"), sign_of("rel_sign"))
}

pub struct ConstructArgs {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub ratio: Option<f64>,
    pub branch: Option<Branch>,
    pub mode: Mode,
    pub n: usize,
    pub floor: usize,
    pub sign: i64,
    pub k_a: Option<usize>,
    pub k_b: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn target_state(args: &ConstructArgs) -> Result<(QlState, Branch)> {
    if let Some(ratio) = args.ratio {
        let branch = args.branch.context("--ratio requires --branch")?;
        let state = amplitudes_from_ratio(branch, ratio, Quadrant::new(Sign::Plus, Sign::Plus))?;
        return Ok((state, branch));
    }
    let (a, b) = (args.a.unwrap(), args.b.context("--a requires --b")?);
    let norm = (a * a + b * b).sqrt();
    if norm == 0.0 {
        bail!("amplitudes cannot both be zero");
    }
    let state = state_from_amplitudes(a / norm, b / norm)?;
    let branch = match args.mode {
        Mode::Asymmetric => select_branch_asym(&state),
        _ => select_branch_sym(&state),
    };
    Ok((state, branch))
}

pub fn construct(args: ConstructArgs) -> Result<bool> {
    let sign = parse_sign(args.sign)?;
    let (state, branch) = target_state(&args)?;
    match args.mode {
        Mode::Asymmetric if branch.is_symmetric() => {
            bail!("asymmetric mode needs a delta_c branch, got {branch}")
        }
        Mode::Symmetric | Mode::ContinuousL if !branch.is_symmetric() => {
            bail!(
                "{} mode needs a symmetric branch, got {branch}",
                if args.mode == Mode::Symmetric {
                    "symmetric"
                } else {
                    "continuous-l"
                }
            )
        }
        _ => {}
    }

    let quadrant = Quadrant::for_state(&state);
    let ratio = ratio_for_state(branch, &state)?;
    let mut plan = match args.mode {
        Mode::ContinuousL => {
            let k_a = args
                .k_a
                .context("continuous-l mode requires --kA and --kB")?;
            let k_b = args
                .k_b
                .context("continuous-l mode requires --kA and --kB")?;
            continuous_plan(branch, ratio, args.n, k_a, k_b, sign)?
        }
        _ => rationalize(branch, ratio, args.n, args.floor, sign)?,
    };
    let achieved = plan.achieved_state(quadrant)?;
    plan.lambda_pred = predicted_lambda(&plan, &achieved)?;

    let network = build_network_from_plan(&plan, args.n, args.seed)?;
    if !network.is_connected() {
        eprintln!(
            "warning: composite support is disconnected; eigenvector uniqueness \
             arguments assume a connected composite"
        );
    }
    let report = verify_state(&network, &achieved, &plan)?;

    let mut plan_doc = io::plan_to_json(&plan);
    plan_doc
        .as_object_mut()
        .expect("object")
        .insert("quadrant".into(), quadrant_json(quadrant));
    let graph_doc = io::network_to_json(&network);
    let report_doc = io::report_to_json(&report);

    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            fs::write(dir.join("plan.json"), pretty(&plan_doc))?;
            fs::write(dir.join("graph.json"), pretty(&graph_doc))?;
            fs::write(dir.join("report.json"), pretty(&report_doc))?;
        }
        None => {
            let combined = json!({"plan": plan_doc, "graph": graph_doc, "report": report_doc});
            print!("{}", pretty(&combined));
        }
    }

    let ok = report.residual <= RESIDUAL_GATE && report.fidelity >= FIDELITY_GATE;
    if !ok {
        eprintln!(
            "verification failed: residual {} (gate {RESIDUAL_GATE}), fidelity {} (gate {FIDELITY_GATE})",
            report.residual, report.fidelity
        );
    }
    Ok(ok)
}

pub fn verify(graph: &Path, plan: &Path, out: Option<&Path>) -> Result<bool> {
    let graph_doc: Value = serde_json::from_str(
        &fs::read_to_string(graph).with_context(|| format!("reading {}", graph.display()))?,
    )?;
    let plan_doc: Value = serde_json::from_str(
        &fs::read_to_string(plan).with_context(|| format!("reading {}", plan.display()))?,
    )?;
    let network = io::network_from_json(&graph_doc)?;
    let plan = io::plan_from_json(&plan_doc)?;
    let quadrant = quadrant_from_json(plan_doc.get("quadrant"));
    let state = plan.achieved_state(quadrant)?;
    let report = verify_state(&network, &state, &plan)?;
    emit(&pretty(&io::report_to_json(&report)), out)?;
    Ok(report.residual <= RESIDUAL_GATE && report.fidelity >= FIDELITY_GATE)
}

#[allow(clippy::too_many_arguments)]
pub fn gap(
    min_gap: f64,
    p: Option<f64>,
    n: Option<usize>,
    limit: bool,
    trials: Option<usize>,
    seed: u64,
    format: Format,
    out: Option<&Path>,
) -> Result<bool> {
    let mut feas = GapFeasibility {
        gap: min_gap,
        n: n.map(|v| v as f64),
        p,
        min_p: None,
        min_n: None,
        min_regularity: Some(min_regularity_limit(min_gap)),
    };
    if !limit {
        if let Some(p) = p {
            // the closed form for the minimum order applies to gap 1
            feas.min_n = Some(er_min_n(p)?);
        }
        if let Some(n) = n {
            feas.min_p = Some(er_min_p(n as f64, min_gap)?);
        }
    }

    let mut doc = io::gap_feasibility_json(&feas);
    if let Some(trials) = trials {
        let n = n.context("--trials requires --n")?;
        let p_used = p
            .unwrap_or_else(|| feas.min_p.unwrap_or(1.0) + 0.05)
            .min(1.0);
        let samples = er_gap_samples(n, p_used, trials, seed)?;
        let passed = samples.iter().filter(|s| s.gap() >= min_gap).count();
        if format == Format::Csv {
            emit(&io::gap_table_csv(&samples, min_gap), out)?;
            eprintln!("pass rate: {passed}/{trials} at p = {p_used}");
            return Ok(true);
        }
        let table: Vec<Value> = samples
            .iter()
            .map(|s| {
                json!({
                    "trial": s.trial,
                    "seed": s.seed,
                    "lambda1": s.lambda1,
                    "lambda2": s.lambda2,
                    "gap": s.gap(),
                    "pass": s.gap() >= min_gap,
                })
            })
            .collect();
        doc.as_object_mut().expect("object").insert(
            "trials".into(),
            json!({"p": p_used, "passed": passed, "total": trials, "samples": table}),
        );
    }
    emit(&pretty(&doc), out)?;
    Ok(true)
}

pub struct WalkArgs {
    pub delta: Option<f64>,
    pub x: Option<f64>,
    pub n: usize,
    pub mode: Mode,
    pub k: Option<usize>,
    pub l_a: Option<usize>,
    pub l_b: Option<usize>,
    pub graph: Option<PathBuf>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Smallest coupling regularity realizing (Δ, X) with integer degrees.
fn scale_plan(delta: f64, x: f64, n: usize) -> Result<TuningPlan> {
    for l in 1..n {
        let k_a = x * l as f64;
        let diff = 2.0 * delta * l as f64;
        if k_a.fract().abs() > 1e-9 || diff.fract().abs() > 1e-9 {
            continue;
        }
        let k_a = k_a.round() as i64;
        let k_b = k_a - diff.round() as i64;
        if k_a <= 0 || k_b <= 0 || k_a >= n as i64 || k_b >= n as i64 {
            continue;
        }
        let (k_a, k_b) = (k_a as usize, k_b as usize);
        if (n * k_a) % 2 != 0 || (n * k_b) % 2 != 0 {
            continue;
        }
        return Ok(TuningPlan {
            branch: Branch::Delta,
            target: delta,
            achieved: Some(qlgraph::qlcore::Ratio::new(
                k_a as i64 - k_b as i64,
                2 * l as i64,
            )),
            k_a,
            k_b,
            l_a: l as f64,
            l_b: l as f64,
            sign: Sign::Minus,
            lambda_pred: 0.0,
            abs_error: 0.0,
        });
    }
    bail!("no integer realization of delta = {delta}, X = {x} below n = {n}")
}

pub fn walk(args: WalkArgs) -> Result<bool> {
    let network = if let Some(path) = &args.graph {
        let doc: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
        io::network_from_json(&doc)?
    } else if args.mode == Mode::Asymmetric {
        let k = args.k.context("asymmetric walk requires --k, --lA, --lB")?;
        let l_a = args.l_a.context("asymmetric walk requires --lA")?;
        let l_b = args.l_b.context("asymmetric walk requires --lB")?;
        let n = args.n;
        let a = graphgen::gen_random_regular(n, k, derive_seed(args.seed, "A"))?;
        let b = graphgen::gen_random_regular(n, k, derive_seed(args.seed, "B"))?;
        // marginal-regular directed blocks keep the stationary vector
        // blockwise constant
        let c_a =
            graphgen::gen_biregular_directed(n, l_a, Sign::Minus, derive_seed(args.seed, "C_A"))?;
        let c_b =
            graphgen::gen_biregular_directed(n, l_b, Sign::Minus, derive_seed(args.seed, "C_B"))?;
        assemble(a, b, c_a, Some(c_b), Some(args.seed))?
    } else {
        let delta = args
            .delta
            .context("symmetric walk requires --delta and --X")?;
        let x = args.x.context("symmetric walk requires --X")?;
        let plan = scale_plan(delta, x, args.n)?;
        build_network_from_plan(&plan, args.n, args.seed)?
    };

    let report = randwalk::walk_report(&network)?;
    match args.format {
        Format::Json => emit(
            &pretty(&io::stationary_summary_json(&report)),
            args.out.as_deref(),
        )?,
        Format::Csv => emit(&io::stationary_csv(&report, network.n), args.out.as_deref())?,
    }
    Ok(true)
}

pub fn curves(
    branch: Branch,
    min: f64,
    max: f64,
    samples: usize,
    out: Option<&Path>,
) -> Result<bool> {
    if samples < 2 || max <= min {
        bail!("need at least two samples and max > min");
    }
    let quadrants = [
        Quadrant::new(Sign::Plus, Sign::Plus),
        Quadrant::new(Sign::Plus, Sign::Minus),
        Quadrant::new(Sign::Minus, Sign::Plus),
        Quadrant::new(Sign::Minus, Sign::Minus),
    ];
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for i in 0..samples {
        let ratio = min + (max - min) * i as f64 / (samples - 1) as f64;
        for q in quadrants {
            match amplitudes_from_ratio(branch, ratio, q) {
                Ok(s) => rows.push((s.a, s.b, ratio)),
                Err(_) => skipped += 1,
            }
        }
    }
    if skipped > 0 {
        eprintln!(
            "note: {skipped} samples were outside the domain of {branch} \
             (squared-weight branches admit nonnegative ratios only)"
        );
    }
    emit(&io::curves_csv(&rows), out)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
pub fn twoqubit(
    n: usize,
    k: usize,
    l: usize,
    j1: usize,
    j2: usize,
    seed: u64,
    out: Option<&Path>,
    graph_out: Option<&Path>,
) -> Result<bool> {
    let network = assemble_two_qubit(n, k, l, j1, j2, seed)?;
    let report = verify_two_qubit_basis(&network)?;
    if let Some(path) = graph_out {
        fs::write(path, pretty(&io::two_qubit_network_to_json(&network)))?;
    }
    emit(&pretty(&io::two_qubit_report_json(&report)), out)?;
    Ok(true)
}

pub fn spectrum(graph: &Path, format: Format, out: Option<&Path>) -> Result<bool> {
    let doc: Value = serde_json::from_str(&fs::read_to_string(graph)?)?;
    let network = io::network_from_json(&doc)?;
    if !network.symmetric {
        bail!("full spectra are computed for symmetric composites only");
    }
    let values = full_spectrum_symmetric(&network.r)?;
    match format {
        Format::Csv => emit(&io::spectrum_csv(&values), out)?,
        Format::Json => emit(&pretty(&json!({ "eigenvalues": values })), out)?,
    }
    Ok(true)
}
