//! End-to-end runs of the command line in scratch directories.

use std::fs;
use std::path::Path;

use fssdome::cli::{run, EXIT_DATA, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE};
use tempfile::TempDir;

fn fss(args: &[&str]) -> i32 {
    run(std::iter::once("fssdome").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Data rows of a CSV written by the tool, header comment and column row skipped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn tessellate_and_artwork_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "small.toml", "[tessellation]\nm = 6\n");
    let mut dirs = Vec::new();
    for run_id in 0..2 {
        let out = tmp.path().join(format!("run{run_id}"));
        let o = out.to_str().unwrap();
        assert_eq!(fss(&["tessellate", "--config", &cfg, "--out", o]), EXIT_OK);
        for format in ["json", "svg", "mesh"] {
            assert_eq!(fss(&["artwork", "--config", &cfg, "--out", o, "--format", format]), EXIT_OK);
        }
        dirs.push(out);
    }
    let mut names: Vec<_> = fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let compared: Vec<_> = names.iter().filter(|n| !n.to_string_lossy().ends_with(".run.json")).collect();
    assert!(compared.len() >= 12);
    for n in compared {
        assert_eq!(fs::read(dirs[0].join(n)).unwrap(), fs::read(dirs[1].join(n)).unwrap(), "{n:?} differs");
    }
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dirs[0].join("artwork.run.json")).unwrap()).unwrap();
    assert_eq!(side["schema"], "fssdome.run/1");
    assert_eq!(side["config"]["tessellation"]["m"], 6);
    assert_eq!(side["summary"]["drc_violations"], 0);
}

#[test]
fn exit_code_contract() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("out");
    let o = o.to_str().unwrap();
    assert_eq!(fss(&["synth", "--config", "/no/such/config.toml", "--out", o]), EXIT_USAGE);
    let bad_units = write(tmp.path(), "units.toml", "[stack]\ncapacitance_f = 78.0\n");
    assert_eq!(fss(&["response", "--config", &bad_units, "--out", o]), EXIT_USAGE);
    let strict = write(
        tmp.path(),
        "strict.toml",
        "[synth.target]\npass_lo = 2e9\npass_hi = 18e9\nmin_pass_db = -0.01\nstop_freqs = [20e9]\nmax_stop_db = -80.0\n\
         [synth.c_axis]\nmin = 20e-15\nmax = 200e-15\nsteps = 10\n[synth.l_axis]\nmin = 0.5e-9\nmax = 4e-9\nsteps = 10\n",
    );
    assert_eq!(fss(&["synth", "--config", &strict, "--out", o]), EXIT_INFEASIBLE);
    let garbled = write(tmp.path(), "horn.csv", "freq_hz,gain_dbi,beamwidth_deg\n8e9,ten,40\n");
    assert_eq!(fss(&["feedfit", "--horn", &garbled, "--out", o]), EXIT_DATA);
    let broken = write(tmp.path(), "broken.toml", "[stack\n");
    assert_eq!(fss(&["response", "--config", &broken, "--out", o]), EXIT_DATA);
    assert_eq!(fss(&["timegate", "--input", "/no/such/trace.csv", "--out", o]), EXIT_USAGE);
}

#[test]
fn default_synth_includes_reference_cell() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().to_str().unwrap();
    assert_eq!(fss(&["synth", "--out", o]), EXIT_OK);
    let near = rows(&tmp.path().join("synth.csv")).into_iter().any(|r| {
        let (c, l): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        (c - 78e-15).abs() < 1e-16 && (l - 1.66e-9).abs() < 1e-12 && r[3] == "true"
    });
    assert!(near);
}

#[test]
fn response_and_estimate_agree_at_boresight() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().to_str().unwrap();
    let grid = ["--freq-min", "5e9", "--freq-max", "25e9", "--freq-step", "0.5e9"];
    let with = |cmd: &'static str| [&[cmd, "--out", o][..], &grid[..]].concat();
    assert_eq!(fss(&with("response")), EXIT_OK);
    assert_eq!(fss(&with("estimate")), EXIT_OK);
    let resp = rows(&tmp.path().join("response.csv"));
    let est = rows(&tmp.path().join("estimate_boresight.csv"));
    assert_eq!(resp.len(), 41);
    for (r, e) in resp.iter().zip(&est) {
        let s21 = r[3].parse::<f64>().unwrap().hypot(r[4].parse().unwrap());
        let db: f64 = e[1].parse().unwrap();
        assert!((20.0 * s21.log10() - db).abs() < 1e-9);
    }
    let probe = rows(&tmp.path().join("estimate_probe_30deg.csv"));
    assert_eq!(probe.len(), 41);
}

#[test]
fn feedfit_timegate_gaussproc_files() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("out");
    let os = o.to_str().unwrap();

    // cos^2 horn: D = 10, beamwidth from the exact half-power angle.
    let half = (0.5f64.powf(1.0 / 4.0)).acos().to_degrees();
    let horn = write(tmp.path(), "horn.csv", &format!("freq_hz,gain_dbi,beamwidth_deg\n8e9,10,{}\n12e9,10,{}\n", 2.0 * half, 2.0 * half));
    assert_eq!(fss(&["feedfit", "--horn", &horn, "--out", os]), EXIT_OK);
    for r in rows(&o.join("horn_q.csv")) {
        assert!((r[3].parse::<f64>().unwrap() / 2.0 - 1.0).abs() < 0.02);
    }

    let mut trace = String::from("freq_hz,re_s21,im_s21\n");
    for i in 0..201 {
        let f = 2e9 + i as f64 * 0.1e9;
        let ph = -2.0 * std::f64::consts::PI * f * 0.1e-9;
        trace.push_str(&format!("{f},{},{}\n", ph.cos(), ph.sin()));
    }
    let tr = write(tmp.path(), "sweep.csv", &trace);
    assert_eq!(fss(&["timegate", "--input", &tr, "--out", os, "--gate-ns", "0.5"]), EXIT_OK);
    let gated = rows(&o.join("sweep_gated.csv"));
    let mid = &gated[100];
    let mag = mid[1].parse::<f64>().unwrap().hypot(mid[2].parse().unwrap());
    assert!((20.0 * mag.log10()).abs() < 0.1);

    let mut ff = String::from("freq_hz,theta_deg,phi_deg,re_s21,im_s21\n");
    for f in [9e9, 10e9] {
        for t in 0..=18 {
            for p in 0..8 {
                let theta = (t as f64 * 5.0).to_radians();
                ff.push_str(&format!("{f},{},{},{},0\n", t * 5, p * 45, theta.cos()));
            }
        }
    }
    let scan = write(tmp.path(), "scan.csv", &ff);
    assert_eq!(fss(&["gaussproc", "--input", &scan, "--reference", &scan, "--out", os, "--w0-mm", "30"]), EXIT_OK);
    let norm = rows(&o.join("scan_normalized.csv"));
    assert_eq!(norm.len(), 2);
    for r in norm {
        assert!(r[1].parse::<f64>().unwrap().abs() < 1e-12);
    }
    assert!(o.join("scan_gaussian.csv").exists() && o.join("gaussproc.run.json").exists());
}
