use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asmsynth::data::DataDir;
use asmsynth::formats;
use asmsynth::toy_arm;

fn asmsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asmsynth")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    asmsynth(args).status.code().unwrap()
}

fn toy_data(dir: &Path) -> String {
    DataDir::new(dir).write_catalog(&toy_arm::catalog()).unwrap();
    fs::write(dir.join("arm.json"), toy_arm::ARM_REQUEST).unwrap();
    dir.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["synth", "--help"]), 0);
    assert_eq!(code(&["--unknown-flag"]), 2);
    assert_eq!(code(&["synth", "--data", "x", "--request", "y", "--out", "z", "--bogus"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    let usage = asmsynth(&["synth"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());
    assert_eq!(code(&["taxonomy", "validate", "/nonexistent/dir"]), 1);
}

#[test]
fn validate_commands() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    assert_eq!(code(&["taxonomy", "validate", &data]), 0);
    assert_eq!(code(&["catalog", "validate", &data]), 0);
    let show = asmsynth(&["taxonomy", "show", &data]);
    assert_eq!(show.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&show.stdout).contains("ArmBase"));

    let mut part = toy_arm::catalog().part("gripper").unwrap().clone();
    part.part_types = [asmsynth_core::Atom::parts("Hovercraft")].into_iter().collect();
    fs::write(dir.path().join("parts/gripper.json"), formats::save_part(&part)).unwrap();
    let out = asmsynth(&["catalog", "validate", &data]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hovercraft"));

    fs::write(dir.path().join("taxonomies.json"), "[{\"hierarchy\": \"parts\", \"nodes\": [\"A\", \"A\"]}]").unwrap();
    assert_eq!(code(&["taxonomy", "validate", &data]), 1);
}

#[test]
fn synth_assemble_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    let request = dir.path().join("arm.json");
    let out = dir.path().join("out");
    let run = asmsynth(&["synth", "--data", &data, "--request", request.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(run.stdout.is_empty());

    let results = formats::load_results(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert!((1..=100).contains(&results.len()));
    assert!(out.join(format!("program-{}.json", results.len() - 1)).is_file());
    assert!(out.join(format!("bom-{}.json", results.len() - 1)).is_file());

    // Flag overrides the request's limit.
    let limited = dir.path().join("limited");
    let r = asmsynth(&[
        "synth", "--data", &data, "--request", request.to_str().unwrap(), "--out", limited.to_str().unwrap(), "--limit", "3",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(formats::load_results(&fs::read_to_string(limited.join("results.json")).unwrap()).unwrap().len(), 3);

    // The scene has one entry per BOM unit.
    let i = results.iter().position(|r| r.part_count == 5).unwrap();
    let program = out.join(format!("program-{i}.json"));
    let scene = dir.path().join("scene.json");
    let args = ["assemble", "--program", program.to_str().unwrap(), "--data", &data, "--out", scene.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    let entries = formats::load_scene(&fs::read_to_string(&scene).unwrap()).unwrap();
    let bom: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join(format!("bom-{i}.json"))).unwrap()).unwrap();
    let units: u64 = bom["rows"].as_array().unwrap().iter().map(|r| r["quantity"].as_u64().unwrap()).sum();
    assert_eq!(entries.len() as u64, units);
    let zero = fs::read_to_string(&scene).unwrap();
    assert_eq!(formats::save_scene(&entries), zero);

    let dof = formats::load_program(&fs::read_to_string(&program).unwrap())
        .unwrap()
        .joints
        .iter()
        .filter(|j| j.kind == asmsynth_core::JointKind::Revolute)
        .count();
    let angles = vec!["0.3"; dof].join(",");
    let mut with_angles = args.to_vec();
    with_angles.extend(["--angles", &angles]);
    assert_eq!(code(&with_angles), 0);
    assert_ne!(fs::read_to_string(&scene).unwrap(), zero);
    let too_many = format!("{angles},1");
    let mut bad = args.to_vec();
    bad.extend(["--angles", &too_many]);
    assert_eq!(code(&bad), 1);

    let urdf = dir.path().join("arm.urdf");
    let results_file = out.join("results.json");
    let export = [
        "export-urdf", "--data", &data, "--results", results_file.to_str().unwrap(), "--result", "0", "--out",
        urdf.to_str().unwrap(),
    ];
    assert_eq!(code(&export), 0);
    let text = fs::read_to_string(&urdf).unwrap();
    assert_eq!(text.matches("<link name=").count(), 2);
    assert_eq!(text.matches("<joint name=").count(), 1);
    let mut again = export.to_vec();
    again[6] = "999";
    assert_eq!(code(&again), 1);
}

#[test]
fn demo_writes_a_complete_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo");
    let run = asmsynth(&["demo", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["results.json", "program-0.json", "bom-0.json", "scene-0.json", "result-0.urdf", "request.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert_eq!(DataDir::new(out.join("data")).load_catalog().unwrap(), toy_arm::catalog());
}
