//! CSV tables, diagnostics, plot scripts and snapshot grids.
//!
//! Every file starts with the configuration echo as `# ` comment lines.
//! Numbers are written with the shortest representation that reads back to
//! the same `f64`, so identical runs give identical bytes.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use poroelastic_core::analysis::{ConvergenceTable, Field, Norm};
use poroelastic_core::fe::DofLayout;
use poroelastic_core::mesh::TriMesh;

use crate::config::StudyKind;
use crate::error::{CliError, Result};
use crate::study::{Comparison, LevelResult, StudyResult};

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

fn order(o: Option<f64>) -> String {
    o.map_or_else(|| "n/a".to_string(), num)
}

fn commented(echo: &str, extra: &str) -> String {
    let mut s = String::new();
    for line in extra.lines().chain(echo.lines()) {
        let _ = writeln!(s, "# {line}");
    }
    s
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn csv_file(path: &Path, header: &str) -> Result<csv::Writer<File>> {
    let mut f = create(path)?;
    f.write_all(header.as_bytes()).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn with_path(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn study_stem(result: &StudyResult) -> String {
    format!("{}_{}", result.kind.label(), result.scheme.label())
}

/// Convergence table with columns h, tau, field, norm, error, order.
pub fn write_convergence_csv(path: &Path, result: &StudyResult) -> Result<()> {
    let mut w = csv_file(path, &commented(&result.echo, ""))?;
    let e = with_path(path);
    w.write_record(["h", "tau", "field", "norm", "error", "order"]).map_err(&e)?;
    for table in &result.tables {
        for row in &table.rows {
            w.write_record([
                num(row.h),
                num(row.tau),
                table.field.label().to_string(),
                table.norm.label().to_string(),
                num(row.error),
                order(row.order),
            ])
            .map_err(&e)?;
        }
    }
    finish(w, path)
}

/// CN and BE side by side.
pub fn write_comparison_csv(path: &Path, cmp: &Comparison) -> Result<()> {
    let mut w = csv_file(path, &commented(&cmp.cn.echo, ""))?;
    let e = with_path(path);
    w.write_record(["h", "tau", "field", "norm", "cn_error", "cn_order", "be_error", "be_order"]).map_err(&e)?;
    for (a, b) in cmp.cn.tables.iter().zip(&cmp.be.tables) {
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            w.write_record([
                num(ra.h),
                num(ra.tau),
                a.field.label().to_string(),
                a.norm.label().to_string(),
                num(ra.error),
                order(ra.order),
                num(rb.error),
                order(rb.order),
            ])
            .map_err(&e)?;
        }
    }
    finish(w, path)
}

/// Per-step energy, field norms and errors of one level.
pub fn write_diagnostics_csv(path: &Path, level: &LevelResult, echo: &str) -> Result<()> {
    let extra = format!("scheme = {}, n = {}, tau = {}", level.level.scheme.label(), level.level.n, num(level.level.tau));
    let mut w = csv_file(path, &commented(echo, &extra))?;
    let e = with_path(path);
    w.write_record(["n", "t", "energy", "u_norm", "xi_norm", "eta_norm", "p_norm", "u_L2", "u_H1", "p_L2", "p_H1"])
        .map_err(&e)?;
    for d in &level.diagnostics {
        let mut rec = vec![d.n.to_string(), num(d.t), num(d.energy), num(d.u_norm), num(d.xi_norm), num(d.eta_norm), num(d.p_norm)];
        rec.extend(
            [(Field::U, Norm::L2), (Field::U, Norm::H1), (Field::P, Norm::L2), (Field::P, Norm::H1)]
                .iter()
                .map(|&(f, nm)| num(d.errors.get(f, nm))),
        );
        w.write_record(&rec).map_err(&e)?;
    }
    finish(w, path)
}

/// Gnuplot script drawing every table of `result` on log-log axes against
/// h (spatial studies) or τ (temporal studies), with reference slopes 1, 2, 3
/// through the first row of the first table. `csv_name` is relative to the script.
pub fn plot_script(result: &StudyResult, csv_name: &str) -> Result<String> {
    let first = result
        .tables
        .first()
        .and_then(|t| t.rows.first())
        .ok_or_else(|| CliError::Config("nothing to plot: the study has no levels".into()))?;
    let temporal = result.kind == StudyKind::Temporal;
    let (xcol, xname, x0) = if temporal { (2, "tau", first.tau) } else { (1, "h", first.h) };
    let png = csv_name.trim_end_matches(".csv");
    let mut s = commented(&result.echo, "");
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output \"{png}.png\"");
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set format y \"%.0e\"");
    let _ = writeln!(s, "set xlabel \"{xname}\"");
    let _ = writeln!(s, "set ylabel \"max-in-time error\"");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "x0 = {}", num(x0));
    let _ = writeln!(s, "e0 = {}", num(first.error));
    for r in 1..=3 {
        let _ = writeln!(s, "slope{r}(x) = e0 * (x / x0)**{r}");
    }
    let mut plots = Vec::new();
    for t in &result.tables {
        plots.push(format!(
            "\"{csv_name}\" using {xcol}:((strcol(3) eq \"{f}\" && strcol(4) eq \"{n}\") ? ${e} : NaN) with linespoints title \"{f} {n}\"",
            f = t.field.label(),
            n = t.norm.label(),
            e = 5,
        ));
    }
    for r in 1..=3 {
        plots.push(format!("slope{r}(x) with lines dashtype 2 title \"rate {r}\""));
    }
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    Ok(s)
}

/// Vertex values (x, y, u1, u2, ξ, η, p) of the final state of `level`, one
/// grid line per mesh row separated by blank lines.
pub fn snapshot_grid(level: &LevelResult, echo: &str) -> Result<String> {
    let state = level
        .final_state
        .as_ref()
        .ok_or_else(|| CliError::Config("snapshots were not requested for this run".into()))?;
    let n = NonZeroUsize::new(level.level.n).ok_or_else(|| CliError::Config("empty mesh".into()))?;
    let mesh = TriMesh::unit_square(n);
    let layout = DofLayout::new(&mesh, 1).map_err(|e| CliError::Config(e.to_string()))?;
    let extra = format!("scheme = {}, n = {}, tau = {}, t = {}", level.level.scheme.label(), n, num(level.level.tau), num(state.t));
    let mut s = commented(echo, &extra);
    let _ = writeln!(s, "# x y u1 u2 xi eta p");
    for (k, v) in mesh.vertices.iter().enumerate() {
        if k > 0 && k % (n.get() + 1) == 0 {
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {}",
            num(v[0]),
            num(v[1]),
            num(state.u[layout.u_dof(0, k)]),
            num(state.u[layout.u_dof(1, k)]),
            num(state.xi[k]),
            num(state.eta[k]),
            num(state.p[k]),
        );
    }
    Ok(s)
}

fn level_stem(level: &LevelResult) -> String {
    format!("{}_n{}_steps{}", level.level.scheme.label(), level.level.n, level.steps)
}

fn write_levels(dir: &Path, result: &StudyResult, written: &mut Vec<PathBuf>) -> Result<()> {
    for level in &result.levels {
        if !level.diagnostics.is_empty() {
            let p = dir.join(format!("diagnostics_{}.csv", level_stem(level)));
            write_diagnostics_csv(&p, level, &result.echo)?;
            written.push(p);
        }
        if level.final_state.is_some() {
            let p = dir.join(format!("snapshot_{}.dat", level_stem(level)));
            write_text(&p, &snapshot_grid(level, &result.echo)?)?;
            written.push(p);
        }
    }
    Ok(())
}

fn write_timings(dir: &Path, results: &[&StudyResult], written: &mut Vec<PathBuf>) -> Result<()> {
    let mut s = String::from("scheme n tau steps seconds\n");
    for r in results {
        for l in &r.levels {
            let _ = writeln!(s, "{} {} {} {} {:.3}", l.level.scheme.label(), l.level.n, num(l.level.tau), l.steps, l.wall.as_secs_f64());
        }
    }
    let p = dir.join("timings.txt");
    write_text(&p, &s)?;
    written.push(p);
    Ok(())
}

/// Writes all outputs of a study into `dir` and returns the paths written.
/// Wall-clock times go to `timings.txt` only, keeping the CSVs reproducible.
pub fn write_study(dir: &Path, result: &StudyResult, emit_plots: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let csv_name = format!("{}.csv", study_stem(result));
    let p = dir.join(&csv_name);
    write_convergence_csv(&p, result)?;
    written.push(p);
    if emit_plots && result.kind != StudyKind::Single {
        let p = dir.join(format!("{}.gp", study_stem(result)));
        write_text(&p, &plot_script(result, &csv_name)?)?;
        written.push(p);
    }
    write_levels(dir, result, &mut written)?;
    write_timings(dir, &[result], &mut written)?;
    Ok(written)
}

pub fn write_comparison(dir: &Path, cmp: &Comparison, emit_plots: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let p = dir.join("compare.csv");
    write_comparison_csv(&p, cmp)?;
    written.push(p);
    for r in [&cmp.cn, &cmp.be] {
        let csv_name = format!("{}.csv", study_stem(r));
        let p = dir.join(&csv_name);
        write_convergence_csv(&p, r)?;
        written.push(p);
        if emit_plots {
            let p = dir.join(format!("{}.gp", study_stem(r)));
            write_text(&p, &plot_script(r, &csv_name)?)?;
            written.push(p);
        }
        write_levels(dir, r, &mut written)?;
    }
    write_timings(dir, &[&cmp.cn, &cmp.be], &mut written)?;
    Ok(written)
}

/// Plain-text table for the terminal.
pub fn format_table(table: &ConvergenceTable) -> String {
    let mut s = format!("{} {}\n", table.field.label(), table.norm.label());
    let _ = writeln!(s, "  {:>12} {:>12} {:>14} {:>8}", "h", "tau", "error", "order");
    for r in &table.rows {
        let o = r.order.map_or_else(|| "n/a".to_string(), |o| format!("{o:.3}"));
        let _ = writeln!(s, "  {:>12.5e} {:>12.5e} {:>14.4e} {:>8}", r.h, r.tau, r.error, o);
    }
    s
}
