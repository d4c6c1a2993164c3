use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kerrjunction::propagator::read_checkpoint;
use kerrjunction::scattering::single_amplitudes;
use kerrjunction::CavityParams;
use tempfile::TempDir;

const PULSED: &str = r#""omega_c":0,"u":4,"gamma_L":1,"gamma_R":1,"omega_0":0,"tau":7,"envelope":"uncorr_gauss""#;
const DRIVEN: &str = r#""omega_c":0,"u":4,"gamma_L":1,"gamma_R":1,"omega_0":-4,"tau":1,"envelope":"mono""#;

fn config(dir: &Path, name: &str, model: &str, controls: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!(r#"{{"model":{{{model}}},"controls":{{{controls}}}}}"#)).unwrap();
    path
}

fn run(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrjunction"))
        .arg(cmd)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("KERRJ_THREADS")
        .output()
        .unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().to_string();
    let data = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, data)
}

#[test]
fn amplitudes_repeat_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "c.json", PULSED, "");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&run("amplitudes", &cfg, &a, &[]));
    ok(&run("amplitudes", &cfg, &b, &[]));
    let x = std::fs::read(a.join("amplitudes.csv")).unwrap();
    assert_eq!(x, std::fs::read(b.join("amplitudes.csv")).unwrap());
    let (header, data) = rows(&a.join("amplitudes.csv"));
    assert_eq!(header, "omega0,|aLL|^2,|aRR|^2,|aLR|^2");
    assert_eq!(data.len(), 49);
    let centre = data.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((centre[2] - 1.0 / 17.0).abs() < 1e-12);
}

#[test]
fn linear_cavity_amplitudes_factorize() {
    let tmp = TempDir::new().unwrap();
    let model = PULSED.replace(r#""u":4"#, r#""u":0"#);
    let cfg = config(tmp.path(), "c.json", &model, r#""omega0":{"min":-3,"max":3,"points":13}"#);
    ok(&run("amplitudes", &cfg, tmp.path(), &[]));
    let p = CavityParams::symmetric(0.0, 0.0, 1.0);
    for r in rows(&tmp.path().join("amplitudes.csv")).1 {
        let c = single_amplitudes(&p, r[0]);
        assert!((r[3] - (c.c_l * c.c_r).norm_sqr()).abs() < 1e-14);
    }
}

#[test]
fn scans_do_not_depend_on_worker_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "c.json", DRIVEN, r#""detuning":{"min":-2,"max":10,"points":25},"drive_re":0.02"#);
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let out = tmp.path().join(w);
        ok(&run("gn", &cfg, &out, &["--workers", w]));
        outputs.push(std::fs::read(out.join("gn.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let env = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_kerrjunction"))
        .args(["gn", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&env)
        .env("KERRJ_THREADS", "2")
        .output()
        .unwrap();
    ok(&o);
    assert_eq!(outputs[0], std::fs::read(env.join("gn.csv")).unwrap());
    let (header, data) = rows(&tmp.path().join("1/gn.csv"));
    assert_eq!(header, "detuning,g2,g3,g4");
    let at4 = data.iter().find(|r| r[0] == 4.0).unwrap();
    assert!((at4[1] / 17.0 - 1.0).abs() < 0.02, "{}", at4[1]);
}

#[test]
fn emission_reports_delta_weight() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "c.json", DRIVEN, r#""target_population":5.9e-4"#);
    ok(&run("emission", &cfg, tmp.path(), &["--cutoff", "6"]));
    let text = std::fs::read_to_string(tmp.path().join("emission.csv")).unwrap();
    let w: f64 = text.lines().find_map(|l| l.strip_prefix("# delta_weight=")).unwrap().parse().unwrap();
    assert!((w / 5.9e-4 - 1.0).abs() < 0.02);
    assert!(text.contains("\"cutoff\":6"));
    let (header, data) = rows(&tmp.path().join("emission.csv"));
    assert_eq!(header, "omega,S_continuous");
    assert_eq!(data.len(), 2001);
}

#[test]
fn langevin_writes_roots() {
    let tmp = TempDir::new().unwrap();
    let model = DRIVEN.replace(r#""omega_0":-4"#, r#""omega_0":4"#);
    let cfg = config(tmp.path(), "c.json", &model, r#""drive_re":0.9486832980505138"#);
    ok(&run("langevin", &cfg, tmp.path(), &[]));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("roots.json")).unwrap()).unwrap();
    assert_eq!(v["roots"].as_array().unwrap().len(), 3);
    assert_eq!(v["multistable"], true);
    assert_eq!(rows(&tmp.path().join("langevin_spectrum.csv")).0, "omega,S_continuous");
}

#[test]
fn pulse_writes_cut_and_checkpoint() {
    let tmp = TempDir::new().unwrap();
    let model = PULSED.replace(r#""tau":7"#, r#""tau":2"#);
    let cfg = config(tmp.path(), "c.json", &model, r#""h":0.1,"max_d":3"#);
    ok(&run("pulse", &cfg, tmp.path(), &[]));
    let (header, data) = rows(&tmp.path().join("pulse_cut.csv"));
    assert_eq!(header, "d,|a_LL|^2,|a_RR|^2,|a_LR|^2");
    assert!(data.first().unwrap()[0] >= -3.0 - 1e-12 && data.last().unwrap()[0] <= 3.0 + 1e-12);
    let file = std::fs::File::open(tmp.path().join("checkpoint.kjcp")).unwrap();
    let field = read_checkpoint::<f64, _>(std::io::BufReader::new(file)).unwrap();
    assert_eq!(field.steps, field.n());
    assert!((field.norm() - 1.0).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let code = |o: Output| o.status.code().unwrap();
    let out = tmp.path().join("out");

    let empty = config(tmp.path(), "empty.json", PULSED, r#""omega0":{"min":0,"max":1,"points":0}"#);
    assert_eq!(code(run("amplitudes", &empty, &out, &[])), 2);

    let unknown = tmp.path().join("unknown.json");
    std::fs::write(&unknown, format!(r#"{{"model":{{{PULSED},"kappa":1}}}}"#)).unwrap();
    assert_eq!(code(run("amplitudes", &unknown, &out, &[])), 2);

    let negative = config(tmp.path(), "neg.json", &PULSED.replace(r#""gamma_L":1"#, r#""gamma_L":-1"#), "");
    assert_eq!(code(run("amplitudes", &negative, &out, &[])), 2);

    let mono = config(tmp.path(), "mono.json", DRIVEN, "");
    assert_eq!(code(run("pulse", &mono, &out, &[])), 2);

    let bad_step = config(tmp.path(), "h.json", PULSED, r#""h":-0.1"#);
    assert_eq!(code(run("pulse", &bad_step, &out, &[])), 2);

    let short = config(tmp.path(), "short.json", DRIVEN, r#""target_population":5.9e-4,"t_max":10,"dt":0.05"#);
    assert_eq!(code(run("emission", &short, &out, &[])), 3);

    assert_eq!(code(run("amplitudes", &tmp.path().join("missing.json"), &out, &[])), 4);
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let good = config(tmp.path(), "good.json", PULSED, "");
    assert_eq!(code(run("amplitudes", &good, &blocker.join("sub"), &[])), 4);

    let o = Command::new(env!("CARGO_BIN_EXE_kerrjunction")).arg("amplitudes").output().unwrap();
    assert_eq!(code(o), 2);
}
