use std::path::Path;
use std::process::Command;
use std::time::Instant;

use poroelastic::config::RunConfig;
use poroelastic::output::{plot_script, write_comparison, write_study};
use poroelastic::study::{run_scheme_comparison, run_single, run_spatial_study, run_temporal_study, StudyResult};
use poroelastic::{CliError, StudyKind};
use poroelastic_core::analysis::{ConvergenceTable, Field, Norm};

fn cfg(text: &str) -> RunConfig {
    RunConfig::from_toml(text).unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

// data lines of a CSV or grid file, comments and blank lines dropped
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).collect()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_poroelastic"))
}

#[test]
fn single_run_takes_t_over_tau_steps() {
    let c = cfg("example = \"ex41\"\nn = 8\ntau = 0.25\nT_final = 1.0\n");
    let r = run_single(&c, 1).unwrap();
    assert_eq!(r.levels.len(), 1);
    let l = &r.levels[0];
    assert_eq!(l.steps, 4);
    assert_eq!(l.diagnostics.len(), 5);
    assert_eq!(l.diagnostics.last().unwrap().n, 4);
    for t in &r.tables {
        assert!(t.rows[0].error.is_finite() && t.rows[0].error > 0.0);
        assert_eq!(t.rows[0].order, None);
    }
}

#[test]
fn smoke_run_is_fast() {
    let c = cfg("example = \"ex41\"\nn = 4\ntau = 0.5\nT_final = 1.0\n");
    let start = Instant::now();
    run_single(&c, 1).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn fractional_step_count_is_a_config_error() {
    let err = RunConfig::from_toml("example = \"ex41\"\nn = 4\ntau = 0.3\nT_final = 1.0\n").unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn zero_solution_reports_undefined_orders() {
    let c = cfg("example = \"custom\"\nn_list = [8, 16]\ntau = 0.5\nT_final = 1.0\n\
                 [custom]\nu_coeffs = [[0.0, 0.0], [0.0, 0.0]]\np_coeff = 0.0\n");
    let r = run_spatial_study(&c, 1).unwrap();
    for t in &r.tables {
        assert!(t.rows.iter().all(|row| row.error == 0.0));
        assert_eq!(t.last_order(), None);
    }
    let dir = tempfile::tempdir().unwrap();
    write_study(dir.path(), &r, false).unwrap();
    let csv = read(&dir.path().join("spatial_cn.csv"));
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "h,tau,field,norm,error,order");
    assert_eq!(rows.len(), 1 + 4 * 2);
    assert!(rows[1..].iter().all(|l| l.ends_with(",n/a")));
}

#[test]
fn temporal_study_needs_two_steps_sizes() {
    let c = cfg("example = \"ex41\"\nn = 4\ntau_list = [0.5]\nT_final = 1.0\n");
    assert!(matches!(run_temporal_study(&c, 1), Err(CliError::Config(_))));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let c = cfg("example = \"ex41\"\nn_list = [2, 4, 6]\ntau = 0.25\nT_final = 1.0\nemit_plots = true\nsnapshots = true\n");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let files = write_study(a.path(), &run_spatial_study(&c, 1).unwrap(), true).unwrap();
    write_study(b.path(), &run_spatial_study(&c, 3).unwrap(), true).unwrap();
    let mut compared = 0;
    for f in files {
        let name = f.file_name().unwrap();
        if name == "timings.txt" {
            continue;
        }
        assert_eq!(read(&f), read(&b.path().join(name)), "{name:?}");
        compared += 1;
    }
    // table, plot, 3 diagnostics, 3 snapshots
    assert_eq!(compared, 8);
}

#[test]
fn comparison_reproduces_the_spatial_study() {
    let text = "example = \"ex42\"\nn_list = [2, 4]\ntau = 0.25\nT_final = 0.5\n";
    let cmp = run_scheme_comparison(&cfg(text), 2).unwrap();
    let spatial = run_spatial_study(&cfg(text), 1).unwrap();
    for (a, b) in cmp.cn.tables.iter().zip(&spatial.tables) {
        assert_eq!(a.rows, b.rows);
    }
    let dir = tempfile::tempdir().unwrap();
    write_comparison(dir.path(), &cmp, true).unwrap();
    let text = read(&dir.path().join("compare.csv"));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "h,tau,field,norm,cn_error,cn_order,be_error,be_order");
    let cn_csv = read(&dir.path().join("compare_cn.csv"));
    let cn_rows = data_lines(&cn_csv);
    for (full, cn) in rows[1..].iter().zip(&cn_rows[1..]) {
        let f: Vec<&str> = full.split(',').collect();
        let c: Vec<&str> = cn.split(',').collect();
        assert_eq!(&f[..6], &c[..]);
    }
    assert!(dir.path().join("compare_be.gp").exists());
    // ex42 only
    let not42 = cfg("example = \"ex41\"\nn_list = [2, 4]\ntau = 0.25\nT_final = 0.5\n");
    assert!(matches!(run_scheme_comparison(&not42, 1), Err(CliError::Config(_))));
}

#[test]
fn plot_script_has_slope_guides_and_references_the_csv() {
    let r = run_spatial_study(&cfg("example = \"ex41\"\nn_list = [2, 4]\ntau = 0.5\nT_final = 1.0\n"), 1).unwrap();
    let s = plot_script(&r, "spatial_cn.csv").unwrap();
    for rate in 1..=3 {
        assert!(s.contains(&format!("slope{rate}(x) = e0 * (x / x0)**{rate}")));
        assert!(s.contains(&format!("title \"rate {rate}\"")));
    }
    assert!(s.contains("\"spatial_cn.csv\" using 1:"));
    assert!(s.contains("set logscale xy"));
    let t = run_temporal_study(&cfg("example = \"ex41\"\nn = 2\ntau_list = [0.5, 0.25]\nT_final = 1.0\n"), 1).unwrap();
    assert!(plot_script(&t, "temporal_cn.csv").unwrap().contains("\"temporal_cn.csv\" using 2:"));

    let empty = StudyResult {
        kind: StudyKind::Spatial,
        scheme: r.scheme,
        levels: Vec::new(),
        tables: vec![ConvergenceTable::new(Field::U, Norm::L2, &[])],
        echo: String::new(),
    };
    assert!(plot_script(&empty, "x.csv").is_err());
}

#[test]
fn snapshot_has_one_row_per_vertex() {
    let n = 5;
    let c = cfg(&format!("example = \"ex41\"\nn = {n}\ntau = 0.5\nT_final = 1.0\nsnapshots = true\n"));
    let r = run_single(&c, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_study(dir.path(), &r, false).unwrap();
    let text = read(&dir.path().join("snapshot_cn_n5_steps2.dat"));
    let rows = data_lines(&text);
    assert_eq!(rows.len(), (n + 1) * (n + 1));
    assert!(rows.iter().all(|l| l.split(' ').count() == 7));
    // u vanishes on the clamped right side x = 1 (Dirichlet data of ex41 is zero there)
    let last: Vec<f64> = rows[n].split(' ').map(|v| v.parse().unwrap()).collect();
    assert_eq!((last[0], last[1]), (1.0, 0.0));
}

#[test]
fn every_output_carries_the_config_echo() {
    let c = cfg("example = \"ex41\"\nn = 2\ntau = 0.5\nT_final = 1.0\nsnapshots = true\n[params]\nyoung = 3e7\n");
    let dir = tempfile::tempdir().unwrap();
    let files = write_study(dir.path(), &run_single(&c, 1).unwrap(), true).unwrap();
    for f in files.iter().filter(|f| f.file_name().unwrap() != "timings.txt") {
        let text = read(f);
        assert!(text.contains("# example = \"ex41\""), "{f:?}");
        assert!(text.contains("# young = 30000000"), "{f:?}");
    }
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ok = write_config(dir.path(), "example = \"ex41\"\nn = 2\ntau = 0.5\nT_final = 1.0\n");
    let status = bin().args(["run", "--config"]).arg(&ok).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    assert!(out.join("run_cn.csv").exists());

    let status = bin().args(["spatial", "--config"]).arg(&ok).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(2));

    let bad = write_config(dir.path(), "example = \"ex41\"\nn = 2\ntau = 0.3\nT_final = 1.0\n");
    let o = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"));

    let o = bin().args(["run", "--config"]).arg(dir.path().join("missing.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(5));

    let o = bin().args(["run", "--quad", "40", "--config"]).arg(&ok).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = bin().args(["run", "--threads", "0", "--config"]).arg(&ok).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_failures_keep_the_level_and_the_echo() {
    use poroelastic_core::Error;
    let echo = cfg("example = \"ex41\"\nn = 2\ntau = 0.5\nT_final = 1.0\n").echo();
    let d = CliError::from_core(Error::Divergence { step: 7 }, 16, 0.5, &echo);
    assert!(matches!(d, CliError::Divergence { step: 7, n: 16, .. }));
    assert_eq!(d.exit_code(), 4);
    let text = d.to_string();
    assert!(text.contains("step 7") && text.contains("example = \"ex41\""));
    let s = CliError::from_core(Error::SingularMatrix { column: 3 }, 16, 0.5, &echo);
    assert_eq!(s.exit_code(), 3);
    assert!(s.to_string().contains("n = 16") && s.to_string().contains("T_final"));
    let c = CliError::from_core(Error::Config("bad".into()), 16, 0.5, &echo);
    assert_eq!(c.exit_code(), 2);
    assert_eq!(c.to_string(), "configuration error: bad");
    let codes = [2, 3, 4, 5];
    assert!(codes.windows(2).all(|w| w[0] != w[1]));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        let c = RunConfig::load(&p).unwrap_or_else(|e| panic!("{p:?}: {e}"));
        let study = match p.file_stem().unwrap().to_str().unwrap() {
            s if s.ends_with("_run") => StudyKind::Single,
            s if s.ends_with("_temporal") => StudyKind::Temporal,
            s if s.ends_with("_compare") => StudyKind::Comparison,
            _ => StudyKind::Spatial,
        };
        c.validate_for(study).unwrap();
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn custom_config_converges() {
    let text = read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/custom.toml"));
    let r = run_spatial_study(&cfg(&text), 1).unwrap();
    let o = r.table(Field::U, Norm::H1).last_order().unwrap();
    assert!(o > 1.7, "u H1 order {o}");
}
