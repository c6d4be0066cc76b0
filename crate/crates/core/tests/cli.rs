use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mcde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcde")).args(args).output().expect("run mcde")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn small_fig1(dir: &Path) -> PathBuf {
    let text = std::fs::read_to_string(config("fig1.cfg")).unwrap();
    let text = text
        .lines()
        .filter(|l| !["x_min", "x_max", "t_min", "t_max", "nx", "nt"].iter().any(|k| l.starts_with(k)))
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.join("fig1_small.cfg");
    std::fs::write(&path, format!("{text}\nx_min = -4\nx_max = 4\nt_min = -4\nt_max = 4\nnx = 41\nnt = 41\n")).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn transform_writes_one_grid_per_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_fig1(dir.path());
    let out = dir.path().join("out");
    let o = mcde(&["transform", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("abs_v: 41x41, masked 0"), "{s}");
    for f in ["transform_abs_v.csv", "transform_ln_abs_rho.csv", "transform_abs_v.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_fig1(dir.path());
    let cfg = cfg.to_str().unwrap();
    let ok = mcde(&["verify", "--config", cfg]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    let faulty = mcde(&["verify", "--config", cfg, "--inject-fault", "s:1e-4", "--checks", "identities"]);
    assert_eq!(faulty.status.code(), Some(1));
    assert!(stdout(&faulty).contains("FAIL"));

    let local = config("local_p0.cfg");
    let ode = mcde(&["verify", "--config", local.to_str().unwrap(), "--checks", "identities", "--ode-check"]);
    assert_eq!(ode.status.code(), Some(0));
    assert!(stdout(&ode).contains("mode: Sylvester vs ODE S"), "{}", stdout(&ode));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "case = ccde\na = 0.7-0.4j\npi = [[1, 0.3]]\nseed_r = [1.3, 1.3]\nnx = 1\n").unwrap();
    let o = mcde(&["transform", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nx"));

    let o = mcde(&["verify", "--config", config("ex42.cfg").to_str().unwrap(), "--checks", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));

    let o = mcde(&["transform", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

// With Π = 0 the Sylvester identity forces S = 0 unless the spectra overlap,
// so this runs with A1 = A2 and the ODE mode.
#[test]
fn zero_pi_gives_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.cfg");
    std::fs::write(
        &cfg,
        "case = general\np = 0\nm1 = 1\nm2 = 1\na1 = 0.5\na2 = 0.5\npi1 = [[0, 0]]\npi2 = [[0, 0]]\ns0 = 1\nseed_r = [1, 1]\nnx = 5\nnt = 5\nfields = abs_v\nmode = ode\n",
    )
    .unwrap();
    let o = mcde(&["transform", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("|.| in [0.000000e0, 0.000000e0]"), "{}", stdout(&o));
}

#[test]
fn darboux_and_reflect_tables() {
    let cfg = config("local_p0.cfg");
    let o = mcde(&["darboux", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("lambda_re,lambda_im,matrix,row,col,re,im\n"));
    assert!(s.contains(",w_A,") && s.contains(",w~,"));

    let o = mcde(&["darboux", "--config", cfg.to_str().unwrap(), "--seed-only"]);
    assert!(stdout(&o).contains(",w,"));

    let o = mcde(&["reflect", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);

    // Reflection needs the local p = 0 reduction.
    let o = mcde(&["reflect", "--config", config("ex42.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
