use std::fs;
use std::process::Command;

use torus_orbits_cli::dispatch;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("torbit").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("orbit"));
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("torbit "));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["orbit"]).0, 1);
    assert_eq!(run(&["orbit", "--start", "1/2,1/3", "--bogus"]).0, 1);
}

#[test]
fn preconditions_exit_two() {
    let (code, _, err) = run(&["lemma235", "--r", "1/3", "--N", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("r = 1/3, N = 3"), "{err}");
    assert_eq!(run(&["orbit", "--start", "1/2", "--smax", "10"]).0, 2);
    assert_eq!(run(&["ppcheck", "--delta", "0.5", "--N", "3"]).0, 2);
    assert_eq!(run(&["render", "--grid", "4"]).0, 2);
}

#[test]
fn precision_exhaustion_exits_three() {
    let (code, _, err) = run(&["orbit", "--start", "sqrt(2),sqrt(3)", "--smax", "1e9", "--bits", "20"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn orbit_lists_samples_in_multiplier_order() {
    let (code, out, _) = run(&["orbit", "--start", "1/7,2/7", "--smax", "3"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "k2,k3,k5,multiplier,x,y,errbound\n0,0,0,1,1/7,2/7,0e0\n1,0,0,2,2/7,4/7,0e0\n0,1,0,3,3/7,6/7,0e0\n"
    );
}

#[test]
fn closure_of_half_third_has_six_points() {
    let (code, out, _) = run(&["closure", "--start", "1/2,1/3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 7);
    assert!(out.lines().any(|l| l == "1/2,2/3"));
}

#[test]
fn classify_reports_each_kind() {
    let (_, out, _) = run(&["classify", "--start", "1/2,1/3"]);
    assert!(out.contains("Finite"), "{out}");
    let (_, out, _) = run(&["classify", "--start", "sqrt(2),sqrt(2)+1/3"]);
    assert!(out.contains("LineUnion") && out.contains("3,-3"), "{out}");
    let (_, out, _) = run(&["classify", "--start", "sqrt(2),sqrt(3)"]);
    assert!(out.contains("Dense"), "{out}");
}

#[test]
fn gaps_and_threshold() {
    let (code, out, _) = run(&["gaps", "--gens", "2,3", "--M", "10,100"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "M,count,max_gap,generators");
    assert!(rows[1].starts_with("10,15,0.1177"));
    let (code, out, _) = run(&["threshold", "--delta", "0.01"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("M="));
}

#[test]
fn lemma_prints_a_witness() {
    let (code, out, _) = run(&["lemma235", "--r", "1/2", "--N", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("pair=3,5"), "{out}");
}

#[test]
fn line_and_change_of_coordinates() {
    let (code, out, _) = run(&["line", "--line", "1,-1,0", "--point", "1/3,1/3"]);
    assert_eq!(code, 0);
    assert!(out.contains("contains=true"));
    let (code, out, _) = run(&["chcoords", "--direction", "1,1", "--point", "1/2,1/3"]);
    assert_eq!(code, 0);
    assert!(out.contains("matrix=[[0,1],[-1,1]]"));
}

#[test]
fn dirset_density_approx_littlewood() {
    let (code, out, _) = run(&["dirset", "--start", "0,sqrt(2)", "--smax", "1e6", "--qmax", "2", "--eps", "0.05"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("anchor_x,anchor_y,cluster_angle"));
    let (code, out, _) = run(&["density", "--start", "1/2,1/3", "--grid", "8"]);
    assert_eq!(code, 0);
    assert!(out.contains("8,507,0.09375,58,"));
    assert!(out.contains("# covering_radius_bound="));
    let (code, out, _) = run(&["approx", "--start", "sqrt(2),sqrt(3)", "--target", "1/2,1/2", "--smax", "1e3"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("1000,0.0537"));
    let (code, out, _) = run(&["littlewood", "--start", "sqrt(2),sqrt(3)", "--smax", "20"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("k2,k3,k5,product,running_min"));
}

#[test]
fn ppcheck_and_track() {
    let (code, out, _) = run(&["ppcheck", "--N", "1,3", "--samples", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(5) == Some("0")));
    let (code, out, _) = run(&["track", "--start", "1/2,1/3", "--triple", "1,1,0", "--delta", "1e-5", "--N", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn out_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let (code, out, _) = run(&["orbit", "--start", "1/7,2/7", "--smax", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("k2,k3,k5"));
    let manifest = fs::read_to_string(dir.path().join("orbit.csv.manifest")).unwrap();
    assert!(manifest.contains("subcommand = orbit"), "{manifest}");
    assert!(manifest.contains("backend = exact"), "{manifest}");
}

#[test]
fn unwritable_out_exits_two() {
    let (code, _, err) = run(&["orbit", "--start", "1/7,2/7", "--smax", "3", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot write"));
}

#[test]
fn render_writes_a_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.pgm");
    let (code, _, err) = run(&["render", "--grid", "16", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let bytes = fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5\n"));
    assert_eq!(bytes.len(), "P5\n# row 0 is y=1, column 0 is x=0\n16 16\n255\n".len() + 256);
    assert!(dir.path().join("e.pgm.manifest").exists());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_torbit");
    let ok = Command::new(bin).args(["closure", "--start", "1/2,1/3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["lemma235", "--r", "1/3", "--N", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
