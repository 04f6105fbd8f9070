use std::process::Command;

use nathom::cli::run;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn nathom(args: &[&str]) -> (String, i32) {
    run(std::iter::once("nathom").chain(args.iter().copied()))
}

#[test]
fn tracespace_reports() {
    let m = fixture("matchbox");
    assert_eq!(
        nathom(&["tracespace", "--from", "O", "--to", "P", &m]),
        ("vertices: 6, swaps: 5, components: 1, b1: 0".into(), 0)
    );
    let (left, _) = nathom(&["tracespace", &fixture("fig1-left")]);
    assert!(left.contains("components: 3"), "{left}");
    let (right, _) = nathom(&["tracespace", &fixture("fig1-right")]);
    assert!(right.contains("components: 4"), "{right}");
    let dir = std::env::temp_dir().join(format!("nathom-point-{}", std::process::id()));
    std::fs::write(&dir, "vertices: a\n").unwrap();
    assert_eq!(nathom(&["tracespace", dir.to_str().unwrap()]), ("vertices: 1, components: 1".into(), 0));
    std::fs::remove_file(dir).unwrap();
}

#[test]
fn persistence_barcodes() {
    let m = fixture("matchbox");
    assert_eq!(nathom(&["persistence", "--trace", "O>X>XY>P", &m]), ("[0, inf)\n[2, 3)".into(), 0));
    assert_eq!(nathom(&["persistence", "--trace", "O>X>XZ>P", &m]), ("[0, inf)".into(), 0));
    assert_eq!(nathom(&["persistence", "--trace", "O", &m]), ("[0, inf)".into(), 0));
    // a coarser chain skips the stage where the second component lives
    let (out, code) = nathom(&["persistence", "--trace", "O>X>XY>P", "--chain", "O,O>X,O>X>XY>P", &m]);
    assert_eq!((out.as_str(), code), ("[0, inf)", 0));
    let (err, code) = nathom(&["persistence", "--trace", "O>Q", &m]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn natural_upset_lists_dimensions() {
    let (out, code) = nathom(&["natural", "--upset", "O", &fixture("matchbox")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("field: Q\nnodes:\n  O: 1\n"));
    assert!(out.contains("  O>X>XY: 2\n") && out.contains("  O>Y>XY: 2\n"));
    let twos = out.lines().filter(|l| l.ends_with(": 2")).count();
    assert_eq!(twos, 2);
    let back = nathom::diagram::VectDiagram::parse(&out).unwrap();
    assert_eq!(back.len(), 16);
}

#[test]
fn colimit_verdicts() {
    let m = fixture("matchbox");
    for flavor in ["all", "quasi", "pullback"] {
        let (out, code) = nathom(&["colimit", "--theorem1", "--anchor", "O", "--flavor", flavor, &m]);
        assert_eq!(out.lines().next(), Some("isomorphic"));
        assert_eq!(code, 0);
    }
    let (out, code) = nathom(&["colimit", "--flavor", "maximal", "unit-square"]);
    assert!(out.starts_with("differs"), "{out}");
    assert_eq!(code, 1);
    let (out, code) = nathom(&["colimit", "--flavor", "quasi", "unit-square"]);
    assert!(out.starts_with("reproduces"), "{out}");
    assert_eq!(code, 0);
}

#[test]
fn bisim_verdicts() {
    let (out, code) = nathom(&["bisim", &fixture("fig1-left"), &fixture("fig1-right")]);
    assert!(out.starts_with("no bisimulation within discipline signed-perm\ndefinitive:"), "{out}");
    assert_eq!(code, 1);
    let (out, code) = nathom(&["bisim", "--anchor", "O", "matchbox", "matchbox"]);
    assert!(out.starts_with("bisimulation found"));
    assert_eq!(code, 0);
    let (_, code) = nathom(&["bisim", "--anchor", "O", "--cap", "20", "matchbox", "matchbox"]);
    assert_eq!(code, 2);
    let path = std::env::temp_dir().join(format!("nathom-rel-{}", std::process::id()));
    std::fs::write(&path, "O ~ O: [1]\n").unwrap();
    let (out, code) = nathom(&["bisim", "--anchor", "O", "--relation", path.to_str().unwrap(), "matchbox", "matchbox"]);
    assert!(out.starts_with("not a bisimulation"), "{out}");
    assert_eq!(code, 1);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn validate_and_poset() {
    assert_eq!(nathom(&["validate", "matchbox"]), ("valid, cells per dimension: 8 12 5".into(), 0));
    let path = std::env::temp_dir().join(format!("nathom-bad-{}", std::process::id()));
    std::fs::write(&path, "vertices: a, b\nedges:\n  e: a -> b\n  f: b -> a\n").unwrap();
    let (out, code) = nathom(&["validate", path.to_str().unwrap()]);
    assert_ne!(code, 0, "{out}");
    std::fs::remove_file(path).unwrap();
    let (out, code) = nathom(&["poset", "unit-square"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("traces: 10, covers: 12\n"), "{out}");
}

#[test]
fn options_and_errors() {
    let (_, code) = nathom(&["tracespace", "--field", "4", "matchbox"]);
    assert_eq!(code, 3);
    let (_, code) = nathom(&["tracespace", "no-such-file"]);
    assert_eq!(code, 3);
    let (_, code) = nathom(&["frobnicate"]);
    assert_eq!(code, 3);
    let out = std::env::temp_dir().join(format!("nathom-out-{}", std::process::id()));
    let (text, code) = nathom(&["persistence", "--trace", "O>Y>XY>P", "--out", out.to_str().unwrap(), "matchbox"]);
    assert_eq!((text.as_str(), code), ("", 0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "[0, inf)\n[2, 3)\n");
    std::fs::remove_file(out).unwrap();
    let (gf2, _) = nathom(&["persistence", "--field", "2", "--trace", "O>Y>XY>P", "matchbox"]);
    assert_eq!(gf2, "[0, inf)\n[2, 3)");
}

#[test]
fn binary_is_deterministic() {
    let exe = env!("CARGO_BIN_EXE_nathom");
    let args = ["natural", "--upset", "O", "matchbox"];
    let a = Command::new(exe).args(args).output().unwrap();
    let b = Command::new(exe).args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(exe).args(["bisim", "fig1-left", "fig1-right"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stdout).unwrap().starts_with("no bisimulation within discipline signed-perm"));
}
