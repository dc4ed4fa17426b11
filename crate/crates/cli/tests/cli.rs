use std::path::{Path, PathBuf};
use std::process::Command;

use entropic_cli::autoscale::auto_scale;
use entropic_cli::certificate::{Certificate, Input};
use entropic_cli::commands::{
    generate_cmd, parse_family, realize_cmd, sim_cmd, Format, SimRequest,
};
use entropic_cli::document::SpecDocument;
use entropic_cli::verify::{verify, Stage, Status, VerifyOptions};
use entropic_core::generate::Family;
use entropic_core::rational::{frac, int, Exact, Rational};
use entropic_core::{Mask, SetFunction};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn json_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

fn load(path: &Path) -> SpecDocument {
    SpecDocument::parse(
        &std::fs::read_to_string(path).unwrap(),
        &path.display().to_string(),
    )
    .unwrap()
}

fn all_stages(samples: usize) -> VerifyOptions {
    VerifyOptions {
        stages: [
            Stage::Tabulate,
            Stage::Polymatroid,
            Stage::Realize,
            Stage::Symbolic,
            Stage::Concretize,
            Stage::Sim,
        ]
        .into_iter()
        .collect(),
        sim_samples: samples,
        ..VerifyOptions::default()
    }
}

fn entropic(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_entropic"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn certificates_round_trip_through_verify() {
    for path in json_files(&corpus()) {
        let cert_text = Certificate::build(&load(&path)).unwrap().to_text().unwrap();
        let input = Input::parse(&cert_text, "cert").unwrap();
        assert!(matches!(input, Input::Certificate(_)));
        let report = verify(&input, &all_stages(256)).unwrap();
        assert!(report.passed, "{}: {}", path.display(), report.to_text());
        assert_eq!(report.exit_code(), 0);
        // re-verifying the spec itself gives the same verdict
        let direct = verify(&Input::Spec(load(&path)), &all_stages(256)).unwrap();
        assert_eq!(direct.stages.len(), report.stages.len());
        assert!(direct.passed);
    }
}

#[test]
fn tampered_certificate_fails_symbolic_stage() {
    let doc = load(&corpus().join("coverage.json"));
    let text = Certificate::build(&doc).unwrap().to_text().unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["realization"]["body"]["atoms"][1]["weight"] = serde_json::json!({"num": 5, "den": 1});
    let input = Input::parse(&value.to_string(), "tampered").unwrap();
    let report = verify(&input, &VerifyOptions::default()).unwrap();
    assert!(!report.passed);
    assert_eq!(report.exit_code(), 1);
    let failure = report.symbolic.unwrap().first_failure.unwrap();
    // element 1 is covered by both items, so the singleton {0} is the first to change
    assert_eq!(failure.mask, 0b01);
    assert_eq!(failure.expected, Exact(int(3)));
    assert_eq!(failure.realized, Exact(int(6)));
}

#[test]
fn certificate_with_wrong_units_is_rejected() {
    let doc = load(&corpus().join("truncation.json"));
    let text = Certificate::build(&doc).unwrap().to_text().unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["units"] = serde_json::json!({"value_unit": "bits"});
    let report = verify(
        &Input::parse(&value.to_string(), "c").unwrap(),
        &VerifyOptions::default(),
    )
    .unwrap();
    let realize = report
        .stages
        .iter()
        .find(|s| s.stage == Stage::Realize)
        .unwrap();
    assert_eq!(realize.status, Status::Fail);
}

#[test]
fn realize_is_deterministic_and_linear_truncation_uses_q5() {
    let doc = load(&corpus().join("truncation.json"));
    let a = realize_cmd(&doc).unwrap().output;
    let b = realize_cmd(&doc).unwrap().output;
    assert_eq!(a, b);
    let value: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(value["realization"]["kind"], "linear");
    assert_eq!(value["realization"]["body"]["q"], 5);

    let cov: serde_json::Value = serde_json::from_str(
        &realize_cmd(&load(&corpus().join("coverage.json")))
            .unwrap()
            .output,
    )
    .unwrap();
    assert_eq!(
        cov["realization"]["body"]["atoms"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
}

/// Original function values of the unscaled corpus specs, computed directly.
fn unscaled_oracle(doc: &SpecDocument, mask: Mask) -> Rational {
    let weights_of = |w: &[Exact]| -> Vec<Rational> { w.iter().map(|e| e.0).collect() };
    match doc {
        SpecDocument::SaturatedCoverage {
            weights,
            covers,
            kappa,
        } => {
            let w = weights_of(weights);
            let mut seen = vec![false; w.len()];
            for (i, cover) in covers.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for &u in cover {
                        seen[u] = true;
                    }
                }
            }
            let total: Rational = w
                .iter()
                .zip(&seen)
                .filter(|(_, s)| **s)
                .map(|(x, _)| *x)
                .sum();
            total.min(kappa.0)
        }
        SpecDocument::ConcaveOverModular { weights, g } => {
            let w = weights_of(weights);
            let x: Rational = w
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| *x)
                .sum();
            // piecewise-linear reading of g between integer points
            let lo = x.floor().to_integer() as usize;
            let t = x - x.floor();
            if t == int(0) {
                g[lo].0
            } else {
                g[lo].0 + t * (g[lo + 1].0 - g[lo].0)
            }
        }
        _ => unreachable!("only rational-weight families are shipped unscaled"),
    }
}

#[test]
fn auto_scale_is_sound() {
    for path in json_files(&corpus().join("unscaled")) {
        let original = load(&path);
        assert!(
            original.to_spec().is_err(),
            "unscaled spec should need scaling"
        );
        let (scaled, factor) = auto_scale(&original).unwrap();
        assert!(factor > 1);
        let report = verify(&Input::Spec(scaled.clone()), &all_stages(64)).unwrap();
        assert!(report.passed, "{}", report.to_text());
        let table = scaled.to_spec().unwrap().tabulate();
        for mask in 0..(1 as Mask) << table.ground().len() {
            assert_eq!(
                table.at(mask) / int(factor),
                unscaled_oracle(&original, mask),
                "{} at {mask:b}",
                path.display()
            );
        }
    }
}

#[test]
fn auto_scale_matches_the_six_fold_example() {
    let doc = SpecDocument::parse(
        r#"{"family": "saturated_coverage", "weights": ["1/2", "1/3"], "covers": [[0], [1]], "kappa": 1}"#,
        "inline",
    )
    .unwrap();
    let (scaled, factor) = auto_scale(&doc).unwrap();
    assert_eq!(factor, 6);
    match scaled {
        SpecDocument::SaturatedCoverage { weights, kappa, .. } => {
            assert_eq!(weights, vec![Exact(int(3)), Exact(int(2))]);
            assert_eq!(kappa, Exact(int(6)));
        }
        other => panic!("unexpected family {other:?}"),
    }
}

#[test]
fn sim_on_coverage_example() {
    let doc = load(&corpus().join("coverage.json"));
    // union sums: f({0}) = 1+2, f({1}) = 2+3, f({0,1}) = 1+2+3
    let f = |m: Mask| match m {
        0 => 0,
        1 => 3,
        2 => 5,
        _ => 6,
    };
    let expected = f(1) + f(2) - f(3);
    let req = SimRequest {
        a: &[0],
        b: &[1],
        c: &[],
        concretize: true,
        cap: 1 << 20,
    };
    let out = sim_cmd(&doc, &req, Format::Json).unwrap().output;
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["smi"], expected.to_string());
    assert_eq!(value["cond_gain"], (f(3) - f(2)).to_string());
    assert_eq!(value["scmi"], value["smi"]);
    let mi = value["shannon"]["mutual_information_bits"]
        .as_f64()
        .unwrap();
    assert!((mi - expected as f64).abs() <= 1e-9);
}

#[test]
fn sim_on_mixture_reports_function_units() {
    let doc = load(&corpus().join("concave_over_modular.json"));
    let req = SimRequest {
        a: &[0],
        b: &[1],
        c: &[2],
        concretize: true,
        cap: 1 << 20,
    };
    let value: serde_json::Value =
        serde_json::from_str(&sim_cmd(&doc, &req, Format::Json).unwrap().output).unwrap();
    // g = (0, 2, 3, 7/2): I(0;1|2) = g(2) + g(2) - g(1) - g(3)
    let expected = int(3) + int(3) - int(2) - frac(7, 2);
    assert_eq!(expected, frac(1, 2));
    assert_eq!(value["scmi"], "1/2");
    let cmi = value["shannon"]["conditional_mutual_information_bits"]
        .as_f64()
        .unwrap();
    assert!((cmi - 0.5).abs() <= 1e-9, "{cmi}");
}

#[test]
fn generated_specs_are_reproducible_and_verify() {
    for family in Family::ALL {
        let parsed = parse_family(family.name()).unwrap();
        let a = generate_cmd(parsed, 11, true).unwrap().output;
        assert_eq!(a, generate_cmd(parsed, 11, true).unwrap().output);
        let doc = SpecDocument::parse(&a, "generated").unwrap();
        let report = verify(&Input::Spec(doc), &all_stages(128)).unwrap();
        assert!(report.passed, "{}: {}", family.name(), report.to_text());
    }
    assert!(parse_family("matroid").is_err());
}

#[test]
fn binary_exit_codes() {
    let c = corpus();
    let p = |name: &str| c.join(name).display().to_string();

    let (code, out, _) = entropic(&[
        "verify",
        &p("coverage.json"),
        "--concretize",
        "--sim-samples",
        "100",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS"));

    let (code, out, _) = entropic(&["verify", &p("negative/non_submodular.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("Submodularity"));

    let (code, _, err) = entropic(&["realize", &p("negative/graph_cut_lambda_0.75.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("lambda"), "{err}");

    let (code, out, _) = entropic(&[
        "verify",
        &p("graph_cut.json"),
        "--concretize",
        "--cap",
        "64",
        "--format",
        "json",
    ]);
    assert_eq!(code, 3);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    // symbolic stages are still reported
    assert_eq!(report["symbolic"]["matched"], 8);

    let (code, _, err) = entropic(&["sim", &p("coverage.json"), "--a", "0", "--b", "0,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("disjoint"), "{err}");

    let (code, _, _) = entropic(&["verify", &p("coverage.json"), "--stages", "tabulate,bogus"]);
    assert_eq!(code, 2);

    let (code, _, _) = entropic(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn malformed_documents_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"family\": \"coverage\",\n \"weights\": [1, 2,\n").unwrap();
    let (code, _, err) = entropic(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line"), "{err}");

    let unknown = dir.path().join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"family": "coverage", "weights": [1], "covers": [[0]], "extra": 1}"#,
    )
    .unwrap();
    let (code, _, err) = entropic(&["realize", unknown.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("extra"), "{err}");
}

#[test]
fn realize_writes_output_file_and_verify_reads_it_back() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let spec = corpus().join("saturated_coverage.json");
    let (code, _, _) = entropic(&[
        "realize",
        spec.to_str().unwrap(),
        "-o",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report_path = dir.path().join("report.json");
    let (code, _, _) = entropic(&[
        "verify",
        cert.to_str().unwrap(),
        "--concretize",
        "--format",
        "json",
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report_path).unwrap()).unwrap();
    assert_eq!(report["source"], "certificate");
    assert_eq!(report["passed"], true);
}
