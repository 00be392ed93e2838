//! Worked examples run through the binary against the files in `data/`.
#![allow(dead_code)]

use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_qbets"))
        .args(args)
        .current_dir(data_dir())
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad JSON from {args:?}: {e}\n{text}"));
    (out.status.code().unwrap(), v)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn close(v: &Value, x: f64, tol: f64) {
    assert!((num(v) - x).abs() <= tol, "{v} vs {x}");
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect()
}

/// Real parts of a `[[[re, im], ...], ...]` matrix.
fn real_matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|z| num(&z[0])).collect())
        .collect()
}

fn assert_diag(v: &Value, diag: &[f64], tol: f64) {
    for (i, row) in real_matrix(v).iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let want = if i == j { diag[i] } else { 0.0 };
            assert!((x - want).abs() <= tol, "entry ({i},{j}) = {x}, want {want}");
        }
    }
    for row in v.as_array().unwrap() {
        for z in row.as_array().unwrap() {
            assert!(num(&z[1]).abs() <= tol);
        }
    }
}

pub fn sample_spaces() {
    let (code, v) = run(&["events", "space", "1", "2", "3", "4", "5", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["size"], 6);
    let (code, v) = run(&["events", "space", "H", "T"]);
    assert_eq!(code, 0);
    assert_eq!(strings(&v["space"]), ["H", "T"]);
    let (code, v) = run(&["events", "space"]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
}

pub fn boolean_combinations() {
    let dice = "1,2,3,4,5,6";
    let (_, v) = run(&["events", "combine", "--space", dice, "--op", "and", "--e1", "1,3,5", "--e2", "1,2"]);
    assert_eq!(strings(&v["event"]), ["1"]);
    let (_, v) = run(&["events", "combine", "--space", dice, "--op", "not", "--e1", "1,3,5"]);
    assert_eq!(strings(&v["event"]), ["2", "4", "6"]);
    let (_, v) = run(&["events", "combine", "--space", dice, "--op", "or", "--e1", "2,4", "--e2", "1,3,5,6"]);
    assert_eq!(v["is_full"], true);
    assert_eq!(strings(&v["event"]), ["1", "2", "3", "4", "5", "6"]);
    let (_, v) = run(&["events", "combine", "--space", dice, "--op", "and", "--e1", "1", "--e2", "2"]);
    assert_eq!(v["is_empty"], true);
    assert!(v["event"].as_array().unwrap().is_empty());
}

pub fn incoherent_dice_book() {
    let (code, v) = run(&["coherence", "check", "dice_book.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["coherent"], false);
    assert_eq!(v["guaranteed_loss"], "1/10");
    let stakes = v["witness"]["stakes"].as_array().unwrap();
    assert_eq!(stakes.len(), 2);
    assert!(stakes.iter().all(|s| s["stake"] == "1/1"));
    let settlement = v["settlement"].as_array().unwrap();
    assert_eq!(settlement.len(), 6);
    assert!(settlement.iter().all(|s| s["payoff"] == "-1/10"));
}

pub fn witness_settles_to_loss() {
    for outcome in ["1", "2", "3", "4", "5", "6"] {
        let (code, v) = run(&["coherence", "settle", "dice_book.json", "dice_witness.json", "--outcome", outcome]);
        assert_eq!(code, 0);
        assert_eq!(v["payoff"], "-1/10");
    }
}

pub fn axiom_violations() {
    let (code, v) = run(&["coherence", "check", "negative_price.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["guaranteed_loss"], "1/5");
    let (code, v) = run(&["coherence", "check", "short_certainty.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["guaranteed_loss"], "1/10");
    let (code, v) = run(&["coherence", "extend", "short_certainty.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["coherent"], false);
}

pub fn coherent_extensions() {
    let (code, v) = run(&["coherence", "check", "uniform_pair.json"]);
    assert_eq!(code, 0);
    let probs: Vec<&str> = v["extension"].as_array().unwrap().iter().map(|a| a["prob"].as_str().unwrap()).collect();
    assert_eq!(probs, ["1/2", "1/2"]);

    let (code, v) = run(&["coherence", "extend", "coin_heads.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["measure"][0]["prob"], "3/10");
    assert_eq!(v["measure"][1]["prob"], "7/10");

    let (_, v) = run(&["coherence", "extend", "dice_odd.json"]);
    let probs: Vec<&str> = v["measure"].as_array().unwrap().iter().map(|a| a["prob"].as_str().unwrap()).collect();
    assert_eq!(probs, ["0/1", "0/1", "0/1", "0/1", "1/2", "1/2"]);
}

pub fn single_ticket_settlement() {
    let (_, v) = run(&["coherence", "settle", "coin_half.json", "buy_heads.json", "--outcome", "H"]);
    assert_eq!(v["payoff"], "1/2");
    let (_, v) = run(&["coherence", "settle", "coin_half.json", "buy_heads.json", "--outcome", "T"]);
    assert_eq!(v["payoff"], "-1/2");
}

pub fn projectors() {
    let (_, v) = run(&["hilbert", "projector", "ket0_d3.json"]);
    assert_diag(&v["matrix"], &[1.0, 0.0, 0.0], 1e-12);
    let (_, v) = run(&["hilbert", "projector", "ket01_d3.json"]);
    assert_diag(&v["matrix"], &[1.0, 1.0, 0.0], 1e-12);
    assert_eq!(v["rank"], 2);
    let (_, v) = run(&["hilbert", "projector", "plus_d3.json"]);
    let m = real_matrix(&v["matrix"]);
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        assert!((m[i][j] - 0.5).abs() <= 1e-12);
    }
    assert!(m[2].iter().all(|x| x.abs() <= 1e-12));
}

pub fn commutation() {
    let (_, v) = run(&["hilbert", "commute", "ket0_d2.json", "ket1_d2.json"]);
    assert_eq!(v["commute"], true);
    let (_, v) = run(&["hilbert", "commute", "ket0_d2.json", "plus_d2.json"]);
    assert_eq!(v["commute"], false);
    let (_, v) = run(&["hilbert", "commute", "plus_d2.json", "identity_d2.json"]);
    assert_eq!(v["commute"], true);
}

pub fn refinement() {
    let (code, v) = run(&["hilbert", "refine", "pvm_01_2.json", "pvm_0_12.json"]);
    assert_eq!(code, 0);
    let elems = v["elements"].as_array().unwrap();
    assert_eq!(elems.len(), 3);
    let mut diags: Vec<Vec<f64>> = elems
        .iter()
        .map(|e| real_matrix(&e["matrix"]).iter().enumerate().map(|(i, r)| r[i]).collect())
        .collect();
    diags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert_eq!(diags, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    let (_, v) = run(&["hilbert", "refine", "pvm_01_2.json", "pvm_01_2.json"]);
    assert_eq!(v["elements"].as_array().unwrap().len(), 2);
    let (_, v) = run(&["hilbert", "refine", "pvm_01_2.json", "pvm_trivial_d3.json"]);
    let elems = v["elements"].as_array().unwrap();
    assert_eq!(elems.len(), 2);
    assert_diag(&elems[0]["matrix"], &[1.0, 1.0, 0.0], 1e-12);
    assert_diag(&elems[1]["matrix"], &[0.0, 0.0, 1.0], 1e-12);
}

pub fn spectral() {
    let (_, v) = run(&["hilbert", "spectral", "pauli_z.json"]);
    assert_eq!(v["eigenvalues"], serde_json::json!([1.0, -1.0]));
    assert_diag(&v["projectors"][0], &[1.0, 0.0], 1e-12);
    assert_diag(&v["projectors"][1], &[0.0, 1.0], 1e-12);
    let (_, v) = run(&["hilbert", "spectral", "identity_d3.json"]);
    assert_eq!(v["eigenvalues"], serde_json::json!([1.0]));
    assert_diag(&v["projectors"][0], &[1.0, 1.0, 1.0], 1e-12);
    let (_, v) = run(&["hilbert", "spectral", "random_d4.json"]);
    assert!(num(&v["reconstruction_error"]) <= 1e-8);
}

pub fn born_rule() {
    let (_, v) = run(&["born", "pure0_d2.json", "plus_d2.json"]);
    close(&v["probability"], 0.5, 1e-12);
    for p in ["ket0_d3.json", "ket2_d3.json", "plus_d3.json"] {
        let (_, v) = run(&["born", "mixed_d3.json", p]);
        close(&v["probability"], 1.0 / 3.0, 1e-12);
    }
    let (_, v) = run(&["born", "pure0_d3.json", "ket2_d3.json"]);
    close(&v["probability"], 0.0, 1e-15);
}

pub fn density_validation() {
    let (code, v) = run(&["hilbert", "validate", "mixed_d2.json"]);
    assert_eq!((code, &v["valid"]), (0, &Value::Bool(true)));
    let (code, v) = run(&["hilbert", "validate", "bad_negative.json"]);
    assert_eq!(code, 1);
    let kinds: Vec<&str> = v["violations"].as_array().unwrap().iter().map(|x| x["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"negative_eigenvalue"), "{kinds:?}");
    let (code, v) = run(&["hilbert", "validate", "bad_trace.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["violations"][0]["kind"], "trace");
    close(&v["violations"][0]["value"], 1.2, 1e-12);
}

fn frame_prob(v: &Value, ctx: &str, atom: &str) -> f64 {
    let a = v["assignments"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["context"] == ctx && a["atoms"][0] == atom)
        .unwrap();
    num(&a["prob"])
}

pub fn born_frames() {
    let (code, v) = run(&["frames", "born", "pure0_d3.json", "plus_minus_contexts.json"]);
    assert_eq!(code, 0);
    assert!(frame_prob(&v, "B", "2").abs() <= 1e-12);
    assert!(frame_prob(&v, "B'", "2").abs() <= 1e-12);
    close(&Value::from(frame_prob(&v, "B", "0") + frame_prob(&v, "B", "1")), 1.0, 1e-12);
    close(&Value::from(frame_prob(&v, "B'", "+") + frame_prob(&v, "B'", "-")), 1.0, 1e-12);

    let (_, v) = run(&["frames", "born", "mixed_d3.json", "plus_minus_contexts.json"]);
    for a in v["assignments"].as_array().unwrap() {
        close(&a["prob"], 1.0 / 3.0, 1e-12);
    }
}

pub fn incomplete_context_is_rejected() {
    let dir = std::env::temp_dir().join("qbets-golden-incomplete.json");
    std::fs::write(&dir, r#"{"contexts":[{"id":"B","basis":[[1,0,0],[0,1,0]]}]}"#).unwrap();
    let (code, v) = run(&["frames", "born", "mixed_d3.json", dir.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
}

pub fn noncontextuality() {
    let tmp = std::env::temp_dir().join("qbets-golden-born-frame.json");
    let out = Command::new(env!("CARGO_BIN_EXE_qbets"))
        .args(["frames", "born", "mixed_d3.json", "plus_minus_contexts.json"])
        .current_dir(data_dir())
        .output()
        .unwrap();
    std::fs::write(&tmp, out.stdout).unwrap();
    let (code, v) = run(&["frames", "check", tmp.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["noncontextual"], true);

    let (code, v) = run(&["frames", "check", "contextual_frame.json"]);
    assert_eq!(code, 1);
    let viol = v["violations"].as_array().unwrap();
    let on_two = viol.iter().find(|x| strings(&x["event_a"]) == ["2"]).unwrap();
    close(&on_two["delta"], 0.1, 1e-12);
    close(&on_two["prob_a"], 0.2, 1e-12);
    close(&on_two["prob_b"], 0.3, 1e-12);

    let (code, v) = run(&["frames", "check", "disjoint_frame.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["noncontextual"], true);
}

pub fn gleason_fits() {
    let tmp = std::env::temp_dir().join("qbets-golden-mixed-frame.json");
    let out = Command::new(env!("CARGO_BIN_EXE_qbets"))
        .args(["frames", "born", "mixed_d3.json", "plus_minus_contexts.json"])
        .current_dir(data_dir())
        .output()
        .unwrap();
    std::fs::write(&tmp, out.stdout).unwrap();
    let (_, v) = run(&["frames", "fit", tmp.to_str().unwrap()]);
    assert!(num(&v["residual"]) <= 1e-9);
    assert_diag(&v["rho_hat"], &[1.0 / 3.0; 3], 1e-9);

    let (_, v) = run(&["frames", "fit", "contextual_frame.json"]);
    assert!(num(&v["residual"]) >= 0.01);
}

pub fn cross_context_book() {
    let (code, v) = run(&["frames", "book", "priced_frame.json", "--event", "B:2", "--against", "B':2"]);
    assert_eq!(code, 0);
    close(&v["sure_loss_per_unit"], 0.2, 1e-12);
    close(&v["bookie_buys"]["price"], 0.4, 1e-12);
    close(&v["bookie_sells"]["price"], 0.6, 1e-12);
    assert_eq!(v["conditional_on"], "conditional on counterfactual equivalence");
}

pub fn kochen_specker_instances() {
    let (code, v) = run(&["ks", "search", "single_basis.json"]);
    assert_eq!(code, 0);
    assert_eq!((v["rays"].as_u64(), v["bases"].as_u64()), (Some(3), Some(1)));
    assert_eq!(v["assignment"], serde_json::json!([1, 0, 0]));

    let (code, v) = run(&["ks", "search", "shared_ray_pair.json"]);
    assert_eq!(code, 0);
    assert_eq!((v["rays"].as_u64(), v["bases"].as_u64()), (Some(5), Some(2)));
    let a: Vec<String> = v["assignment"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
    let (code, check) = run(&["ks", "verify", "shared_ray_pair.json", &a.join(",")]);
    assert_eq!(code, 0);
    assert_eq!(check["valid"], true);

    let (code, v) = run(&["ks", "search", "cabello18.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["satisfiable"], false);
    assert_eq!(v["parity_obstruction"]["basis_count"], 9);
    assert!(v["parity_obstruction"]["multiplicities"].as_array().unwrap().iter().all(|m| m == 2));
    let (_, p) = run(&["ks", "search", "cabello18.json", "--parallel"]);
    assert_eq!(p["nodes_explored"], v["nodes_explored"]);
}

pub fn gleason_demo() {
    let (code, v) = run(&["ks", "demo", "pure0_d3.json"]);
    assert_eq!(code, 0);
    let p = num(&v["probability"]);
    assert!((0.05..=0.95).contains(&p));
    let (_, v) = run(&["ks", "demo", "mixed_d3.json"]);
    close(&v["probability"], 1.0 / 3.0, 1e-12);
    assert_eq!(v["draws"], 1);
    let (code, _) = run(&["ks", "demo", "mixed_d2.json"]);
    assert_eq!(code, 2);
}

pub fn entropies() {
    let (_, v) = run(&["entropy", "shannon", "1,0,0"]);
    close(&v["nats"], 0.0, 0.0);
    let (_, v) = run(&["entropy", "shannon", "1/2,1/2"]);
    close(&v["bits"], 1.0, 1e-12);
    let (_, v) = run(&["entropy", "shannon", "3/4,1/4"]);
    close(&v["nats"], 0.5623, 1e-4);
    let (code, v) = run(&["entropy", "vn", "pure0_d2.json"]);
    assert_eq!(code, 0);
    close(&v["nats"], 0.0, 1e-12);
    let (_, v) = run(&["entropy", "vn", "mixed_d2.json"]);
    close(&v["bits"], 1.0, 1e-12);
    let (_, v) = run(&["entropy", "vn", "three_quarters.json"]);
    close(&v["nats"], 0.5623, 1e-4);
}

pub fn minimal_context_entropy() {
    let (_, v) = run(&["entropy", "min-context", "pure0_d3.json"]);
    close(&v["nats"], 0.0, 1e-12);
    assert_eq!(v["is_eigenbasis"], true);
    let (_, v) = run(&["entropy", "min-context", "mixed_d3.json"]);
    close(&v["nats"], 3f64.ln(), 1e-9);
    close(&v["min_sampled_nats"], 3f64.ln(), 1e-9);
    let (_, v) = run(&["entropy", "min-context", "three_quarters.json", "--samples", "200"]);
    close(&v["nats"], 0.5623, 1e-4);
    assert_eq!(v["samples"], 200);
    assert!(num(&v["min_sampled_nats"]) >= num(&v["nats"]) - 1e-9);
}

pub fn dove_and_cloud() {
    let (code, v) = run(&["game", "run", "--lexicon", "birds.json", "--script", "dove_script.json"]);
    assert_eq!(code, 0);
    let bets = v["bets"].as_array().unwrap();
    assert_eq!(bets[0]["proposition"]["word"], "dove");
    assert_eq!(bets[0]["status"], "void");
    assert_eq!(bets[0]["payoff"], "0/1");
    assert_eq!(bets[1]["status"], "won");
    assert_eq!(bets[2]["status"], "lost");
    assert_eq!(v["respondents"][4]["departed"], true);
}

pub fn forced_answers_and_departures() {
    let (code, v) = run(&["game", "run", "--lexicon", "birds.json", "--script", "forced_only_script.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["transcript"][1]["forced"], true);
    assert_eq!(v["transcript"][1]["answer"], true);
    for r in &v["respondents"].as_array().unwrap()[2..] {
        assert_eq!(strings(&r["compatible_words"]).len(), 4);
    }
    let (code, v) = run(&["game", "run", "--lexicon", "birds.json", "--script", "forced_script.json"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("left"));
}

pub fn game_input_errors() {
    let (code, _) = run(&["game", "run", "--lexicon", "birds.json", "--script", "no_respondents_script.json"]);
    assert_eq!(code, 2);
    let (code, v) = run(&["game", "run", "--lexicon", "birds.json", "--script", "bad_price_script.json"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("3/2"));
}

pub fn replays_are_identical() {
    let args = ["--seed", "9", "game", "run", "--lexicon", "birds.json", "--script", "forced_only_script.json"];
    assert_eq!(run(&args), run(&args));
}

pub fn context_adversary() {
    let (_, v) = run(&["game", "adversary", "prices_skewed.json", "--rounds", "10"]);
    assert_eq!(v["total_loss"], "6/1");
    assert!(v["rounds"].as_array().unwrap().iter().all(|r| r["chosen"] == "B2"));
    let (_, v) = run(&["game", "adversary", "prices_zero.json"]);
    assert_eq!(v["total_loss"], "0/1");
    let (_, v) = run(&["game", "adversary", "prices_even.json", "--rounds", "10"]);
    assert_eq!(v["total_loss"], "5/1");
    let (code, _) = run(&["game", "adversary", "prices_single.json"]);
    assert_eq!(code, 2);
}

pub fn malformed_input_exits_two() {
    let (code, v) = run(&["coherence", "check", "does_not_exist.json"]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
    let (code, _) = run(&["nonsense"]);
    assert_eq!(code, 2);
}

pub const ALL: &[(&str, fn())] = &[
    ("sample_spaces", sample_spaces),
    ("boolean_combinations", boolean_combinations),
    ("incoherent_dice_book", incoherent_dice_book),
    ("witness_settles_to_loss", witness_settles_to_loss),
    ("axiom_violations", axiom_violations),
    ("coherent_extensions", coherent_extensions),
    ("single_ticket_settlement", single_ticket_settlement),
    ("projectors", projectors),
    ("commutation", commutation),
    ("refinement", refinement),
    ("spectral", spectral),
    ("born_rule", born_rule),
    ("density_validation", density_validation),
    ("born_frames", born_frames),
    ("incomplete_context_is_rejected", incomplete_context_is_rejected),
    ("noncontextuality", noncontextuality),
    ("gleason_fits", gleason_fits),
    ("cross_context_book", cross_context_book),
    ("kochen_specker_instances", kochen_specker_instances),
    ("gleason_demo", gleason_demo),
    ("entropies", entropies),
    ("minimal_context_entropy", minimal_context_entropy),
    ("dove_and_cloud", dove_and_cloud),
    ("forced_answers_and_departures", forced_answers_and_departures),
    ("game_input_errors", game_input_errors),
    ("replays_are_identical", replays_are_identical),
    ("context_adversary", context_adversary),
    ("malformed_input_exits_two", malformed_input_exits_two),
];
