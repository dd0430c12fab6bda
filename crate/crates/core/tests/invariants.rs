//! Cross-module property suite: round trips, branch totality, the
//! characteristic-equation/eigenvector equivalence, rationalizer optimality
//! against a brute-force oracle, sign-convention duality, and the
//! free-scaling property of stationary distributions.

#![allow(clippy::manual_is_multiple_of)]

use proptest::prelude::*;

use qlgraph::graphgen::{self, Sign};
use qlgraph::matrix::{dot, norm2, Matrix};
use qlgraph::qlcore::{
    self, amplitudes_from_ratio, assemble, build_network_from_plan, characteristic_residual,
    psi_target, ratio_for_state, rationalize, select_branch_asym, select_branch_sym,
    state_from_amplitudes, Branch, QlState, Quadrant, Ratio, TuningPlan,
};
use qlgraph::randwalk;
use qlgraph::spectral::{self, full_spectrum_symmetric, verify_state};

fn state_at(theta: f64) -> QlState {
    state_from_amplitudes(theta.cos(), theta.sin()).unwrap()
}

proptest! {
    #[test]
    fn states_stay_on_the_circle(theta in 0.0..std::f64::consts::TAU) {
        let s = state_at(theta);
        prop_assert!((s.a * s.a + s.b * s.b - 1.0).abs() <= 1e-12);
        prop_assert!((s.omega1 * s.omega1 + s.omega2 * s.omega2 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn branch_totality_and_bounded_selection(theta in 0.0..std::f64::consts::TAU) {
        let s = state_at(theta);
        // at least one branch of each family is finite
        let sym_ok = ratio_for_state(Branch::Delta, &s).is_ok()
            || ratio_for_state(Branch::DeltaInv, &s).is_ok();
        let asym_ok = ratio_for_state(Branch::DeltaC, &s).is_ok()
            || ratio_for_state(Branch::DeltaCInv, &s).is_ok();
        prop_assert!(sym_ok && asym_ok);

        // the selected branch is finite with ratio within the crossover bound
        let sym = select_branch_sym(&s);
        let r = ratio_for_state(sym, &s).unwrap();
        prop_assert!(r.is_finite() && r.abs() <= 1.0 + 1e-12, "{sym}: {r}");
        let asym = select_branch_asym(&s);
        let d = ratio_for_state(asym, &s).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d), "{asym}: {d}");
    }

    #[test]
    fn round_trip_recovers_amplitudes(theta in 0.0..std::f64::consts::TAU) {
        let s = state_at(theta);
        let q = Quadrant::for_state(&s);
        for branch in [Branch::Delta, Branch::DeltaInv, Branch::DeltaC, Branch::DeltaCInv] {
            if let Ok(r) = ratio_for_state(branch, &s) {
                let back = amplitudes_from_ratio(branch, r, q).unwrap();
                prop_assert!(
                    (back.a - s.a).abs() <= 1e-10 && (back.b - s.b).abs() <= 1e-10,
                    "{branch}: ({}, {}) -> {r} -> ({}, {})", s.a, s.b, back.a, back.b
                );
            }
        }
    }

    #[test]
    fn rationalize_matches_brute_force_sym(target in -3.0..3.0f64, n in 5usize..32) {
        let plan = rationalize(Branch::Delta, target, n, 1, Sign::Minus).unwrap();
        // independent oracle: scan realizable (k_a, k_b, l) triples
        let mut best = f64::INFINITY;
        for k_a in 1..n {
            if n % 2 != 0 && k_a % 2 != 0 { continue; }
            for k_b in 1..n {
                if n % 2 != 0 && k_b % 2 != 0 { continue; }
                for l in 1..n {
                    let ratio = (k_a as f64 - k_b as f64) / (2.0 * l as f64);
                    best = best.min((target - ratio).abs());
                }
            }
        }
        prop_assert!((plan.abs_error - best).abs() <= 1e-15,
            "plan err {} vs oracle {}", plan.abs_error, best);
    }

    #[test]
    fn rationalize_matches_brute_force_asym(target in 0.0..1.5f64, n in 5usize..32) {
        let plan = rationalize(Branch::DeltaC, target, n, 1, Sign::Minus).unwrap();
        let mut best = f64::INFINITY;
        for l_b in 1..n {
            for l_a in 0..n {
                let ratio = l_a as f64 / l_b as f64;
                best = best.min((target - ratio).abs());
            }
        }
        prop_assert!((plan.abs_error - best).abs() <= 1e-15);
    }

    #[test]
    fn jacobi_moments_match_traces(
        n in 2usize..10,
        raw in prop::collection::vec(-5.0..5.0f64, 100)
    ) {
        let mut m = Matrix::zeros(n, n);
        let mut it = raw.into_iter();
        for i in 0..n {
            for j in i..n {
                let v = it.next().unwrap_or(0.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let vals = full_spectrum_symmetric(&m).unwrap();
        let mut power = Matrix::identity(n);
        for k in 1..=n.min(4) {
            power = power.mul(&m);
            let sum: f64 = vals.iter().map(|v| v.powi(k as i32)).sum();
            let scale = 1.0 + vals[0].abs().powi(k as i32) * n as f64;
            prop_assert!((sum - power.trace()).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn regular_generator_contract(n in 4usize..20, k in 1usize..19, seed in 0u64..50) {
        prop_assume!(k < n && (n * k) % 2 == 0);
        let g = graphgen::gen_random_regular(n, k, seed).unwrap();
        prop_assert!(g.adjacency.is_symmetric(0.0));
        for i in 0..n {
            prop_assert_eq!(g.adjacency.get(i, i), 0.0);
            prop_assert_eq!(g.adjacency.row_sum(i), k as f64);
        }
    }

    #[test]
    fn biregular_generator_contract(n in 2usize..16, l in 1usize..16, seed in 0u64..50) {
        prop_assume!(l <= n);
        let c = graphgen::gen_biregular_bipartite(n, l, Sign::Minus, seed).unwrap();
        for i in 0..n {
            prop_assert_eq!(c.matrix.abs_row_sum(i), l as f64);
            prop_assert_eq!(c.matrix.abs_col_sum(i), l as f64);
        }
    }
}

/// On exact-regular blocks the minimal eigenvector residual of ψ equals
/// |characteristic residual| identically, which is the two-way equivalence
/// between the characteristic equation and eigenvector-ness.
#[test]
fn characteristic_residual_equals_eigen_residual() {
    let mut rng_state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        rng_state
    };
    for trial in 0..60 {
        let n = 4 + (next() % 5) as usize; // 4..8
        let mut k_a = 1 + (next() % (n as u64 - 1)) as usize;
        let mut k_b = 1 + (next() % (n as u64 - 1)) as usize;
        if (n * k_a) % 2 != 0 {
            k_a = if k_a > 1 { k_a - 1 } else { 2 };
        }
        if (n * k_b) % 2 != 0 {
            k_b = if k_b > 1 { k_b - 1 } else { 2 };
        }
        let l_a = (next() % (n as u64 + 1)) as usize;
        let l_b = (next() % (n as u64 + 1)) as usize;
        if l_a == 0 && l_b == 0 {
            continue;
        }
        let theta = (trial as f64) * 0.37 + 0.11;
        let state = state_at(theta);

        let a = graphgen::gen_random_regular(n, k_a, next()).unwrap();
        let b = graphgen::gen_random_regular(n, k_b, next()).unwrap();
        let c_a = if l_a == 0 {
            graphgen::BipartiteCoupling::zero(n, Sign::Minus)
        } else {
            graphgen::gen_row_regular_directed(n, l_a, Sign::Minus, next()).unwrap()
        };
        let c_b = if l_b == 0 {
            graphgen::BipartiteCoupling::zero(n, Sign::Minus)
        } else {
            graphgen::gen_row_regular_directed(n, l_b, Sign::Minus, next()).unwrap()
        };
        let net = assemble(a, b, c_a, Some(c_b), None).unwrap();

        let char_res =
            characteristic_residual(k_a as f64, k_b as f64, l_a as f64, l_b as f64, &state);
        let psi = psi_target(&state, n);
        let r_psi = net.r.matvec(&psi);
        let rayleigh = dot(&psi, &r_psi);
        let eig_res = {
            let mut acc = 0.0;
            for i in 0..2 * n {
                let d = r_psi[i] - rayleigh * psi[i];
                acc += d * d;
            }
            acc.sqrt()
        };
        assert!(
            (eig_res - char_res.abs()).abs() <= 1e-9,
            "trial {trial}: eigen residual {eig_res} vs |char| {}",
            char_res.abs()
        );
    }
}

/// Flipping the coupling sign swaps the emergent pair (`l ↦ −l`): the
/// rel-plus state of the positive-sign network carries the eigenvalue the
/// rel-minus state carried on the negative-sign network, and vice versa.
#[test]
fn sign_convention_duality() {
    let n = 16;
    // Lemma-1 case: k_A = k_B, the |±⟩ eigenvalues swap between k±l
    for (sign, want_minus, want_plus) in [(Sign::Minus, 11.0, 5.0), (Sign::Plus, 5.0, 11.0)] {
        let a = graphgen::gen_random_regular(n, 8, 1).unwrap();
        let b = graphgen::gen_random_regular(n, 8, 2).unwrap();
        let c = graphgen::gen_biregular_bipartite(n, 3, sign, 3).unwrap();
        let net = assemble(a, b, c, None, None).unwrap();
        let minus = psi_pattern(n, -1.0);
        let plus = psi_pattern(n, 1.0);
        assert!((rayleigh_of(&net.r, &minus) - want_minus).abs() < 1e-12);
        assert!((rayleigh_of(&net.r, &plus) - want_plus).abs() < 1e-12);
    }

    // detuned case: verified eigenvalues cross-match under the sign flip
    let target = 1.25;
    let plan_neg = rationalize(Branch::Delta, target, n, 1, Sign::Minus).unwrap();
    let plan_pos = TuningPlan {
        sign: Sign::Plus,
        ..plan_neg.clone()
    };
    let seed = 77;
    let net_neg = build_network_from_plan(&plan_neg, n, seed).unwrap();
    let net_pos = build_network_from_plan(&plan_pos, n, seed).unwrap();
    let q = Quadrant::new(Sign::Plus, Sign::Plus);
    let q_minus = Quadrant::new(Sign::Plus, Sign::Minus);

    let s_neg = plan_neg.achieved_state(q).unwrap();
    let s_pos = plan_pos.achieved_state(q).unwrap();
    let s_neg_alt = plan_neg.achieved_state(q_minus).unwrap();

    let rep_neg = verify_state(&net_neg, &s_neg, &plan_neg).unwrap();
    let rep_pos = verify_state(&net_pos, &s_pos, &plan_pos).unwrap();
    assert!(rep_neg.direct_residual <= 1e-9);
    assert!(rep_pos.direct_residual <= 1e-9);
    let lambda_neg_alt = qlcore::predicted_lambda(&plan_neg, &s_neg_alt).unwrap();
    assert!(
        (rep_pos.lambda_pred - lambda_neg_alt).abs() <= 1e-10,
        "sign flip should map the eigenvalue to the mirrored branch root"
    );
}

fn psi_pattern(n: usize, b_sign: f64) -> Vec<f64> {
    let w = 1.0 / ((2 * n) as f64).sqrt();
    let mut v = vec![w; n];
    v.extend(std::iter::repeat_n(b_sign * w, n));
    v
}

fn rayleigh_of(m: &Matrix, v: &[f64]) -> f64 {
    dot(v, &m.matvec(v)) / dot(v, v)
}

/// Fixing Δ pins the state, but the absolute scale X = k_A/l remains free
/// and moves the stationary distribution: π carries information beyond ψ.
#[test]
fn free_scaling_moves_pi_but_not_the_state() {
    let n = 44;
    let seed = 5;
    let scalings = [(10usize, 9usize, 1usize), (20, 19, 1), (30, 29, 1)];
    let mut pis = Vec::new();
    let mut amplitudes = Vec::new();
    for (idx, (k_a, k_b, l)) in scalings.iter().enumerate() {
        let plan = TuningPlan {
            branch: Branch::Delta,
            target: 0.5,
            achieved: Some(Ratio::new((k_a - k_b) as i64, 2 * *l as i64)),
            k_a: *k_a,
            k_b: *k_b,
            l_a: *l as f64,
            l_b: *l as f64,
            sign: Sign::Minus,
            lambda_pred: 0.0,
            abs_error: 0.0,
        };
        let net = build_network_from_plan(&plan, n, seed + idx as u64).unwrap();
        let state = plan
            .achieved_state(Quadrant::new(Sign::Plus, Sign::Plus))
            .unwrap();
        let report = verify_state(&net, &state, &plan).unwrap();
        assert!(report.direct_residual <= 1e-9);
        assert!(report.fidelity >= 1.0 - 1e-9);
        let (w1, w2) = qlcore::block_weights(&report.target_vector, n);
        let norm = (w1 * w1 + w2 * w2).sqrt();
        amplitudes.push(((w1 + w2) / norm, (w1 - w2) / norm));

        let walk = randwalk::walk_report(&net).unwrap();
        pis.push(walk.pi_a);
    }
    for i in 0..scalings.len() {
        for j in (i + 1)..scalings.len() {
            assert!(
                (pis[i] - pis[j]).abs() > 1e-6,
                "π_A should move with the free scale: {} vs {}",
                pis[i],
                pis[j]
            );
            let da = (amplitudes[i].0 / SQRT_2 - amplitudes[j].0 / SQRT_2).abs();
            let db = (amplitudes[i].1 / SQRT_2 - amplitudes[j].1 / SQRT_2).abs();
            assert!(
                da <= 1e-9 && db <= 1e-9,
                "state must not move with the free scale"
            );
        }
    }
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Full spectrum of an exact-regular symmetric composite keeps the emergent
/// pair at k ± l with unit-fidelity eigenvectors.
#[test]
fn emergent_pair_is_exact_on_regular_composites() {
    for seed in [3u64, 4, 5] {
        let n = 20;
        let (k, l) = (9, 4);
        let a = graphgen::gen_random_regular(n, k, seed).unwrap();
        let b = graphgen::gen_random_regular(n, k, seed + 100).unwrap();
        let c = graphgen::gen_biregular_bipartite(n, l, Sign::Minus, seed + 200).unwrap();
        let net = assemble(a, b, c, None, None).unwrap();
        let (vals, vecs) = spectral::symmetric_eigen(&net.r).unwrap();
        assert!((vals[0] - (k + l) as f64).abs() <= 1e-9);
        assert!((vals[1] - (k - l) as f64).abs() <= 1e-9);
        let col = |c: usize| -> Vec<f64> { (0..2 * n).map(|r| vecs.get(r, c)).collect() };
        assert!(dot(&col(0), &psi_pattern(n, -1.0)).abs() >= 1.0 - 1e-9);
        assert!(dot(&col(1), &psi_pattern(n, 1.0)).abs() >= 1.0 - 1e-9);
        // trace is preserved by the spectrum
        let sum: f64 = vals.iter().sum();
        assert!(sum.abs() <= 1e-8 * net.r.frobenius_norm());
    }
}

/// The walk's stationary vector is a genuine fixed point and blockwise flat.
#[test]
fn stationary_vector_is_fixed_point() {
    let n = 24;
    let a = graphgen::gen_random_regular(n, 13, 8).unwrap();
    let b = graphgen::gen_random_regular(n, 9, 9).unwrap();
    let c = graphgen::gen_biregular_bipartite(n, 4, Sign::Minus, 10).unwrap();
    let net = assemble(a, b, c, None, None).unwrap();
    let p = randwalk::transition_matrix(&net).unwrap();
    let pi = randwalk::stationary_iterative(&p).unwrap();
    let stepped = p.vec_mat(&pi);
    for (x, y) in pi.iter().zip(&stepped) {
        assert!((x - y).abs() <= 1e-10);
    }
    assert!((pi.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    for i in 1..n {
        assert!((pi[i] - pi[0]).abs() <= 1e-12);
        assert!((pi[n + i] - pi[n]).abs() <= 1e-12);
    }
    assert!(norm2(&pi) > 0.0);
}
