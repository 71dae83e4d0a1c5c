//! One function per subcommand.

use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use toric_core::hecke::{goldfeld_condition_for, scan, EigenformJson, ScanRow, Verdict};
use toric_core::quat::OrderJson;
use toric_core::stats::{clt_report, goldfeld_bound, stat_report, symmetry_table, StatReport};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{fingerprint, periods_csv, to_json_bytes, write_atomic, PeriodsSidecar, SCHEMA_VERSION};
use crate::pipeline::{self, PeriodRun};
use crate::svg::{clt_hist, counts_csv, scatter_1d, scatter_pair, value_counts, FigureKind};
use crate::verify::suite;
use crate::Command;

pub fn run(cmd: &Command) -> CliResult<()> {
    let cfg = cmd.common().resolve()?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    match cmd {
        Command::Algebra(_) => algebra(&cfg),
        Command::Classes(_) => classes(&cfg),
        Command::Eigenforms(_) => eigenforms(&cfg),
        Command::Periods(_) => periods(&cfg),
        Command::Stats(_) => stats(&cfg),
        Command::Scan { max_p, all, .. } => scanner(&cfg, *max_p, *all),
        Command::Verify(_) => verify(&cfg),
        Command::Figures { kind, .. } => figures(&cfg, kind.parse()?),
    }
}

fn out_path(cfg: &RunConfig, name: String) -> PathBuf {
    cfg.output_dir.join(name)
}

fn emit(path: &Path, bytes: &[u8]) -> CliResult<()> {
    write_atomic(path, bytes)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn print_json<T: Serialize>(v: &T) -> CliResult<()> {
    print!("{}", String::from_utf8_lossy(&to_json_bytes(v)?));
    Ok(())
}

#[derive(Serialize)]
struct AlgebraSummary {
    schema_version: String,
    disc_d: u64,
    level: u64,
    reduced_discriminant: u64,
    ramified_primes: Vec<u64>,
    mass: String,
    goldfeld_bound: String,
    order: OrderJson,
}

fn algebra(cfg: &RunConfig) -> CliResult<()> {
    let o = pipeline::order(cfg)?;
    let s = AlgebraSummary {
        schema_version: SCHEMA_VERSION.into(),
        disc_d: cfg.disc_d,
        level: cfg.level,
        reduced_discriminant: o.reduced_discriminant,
        ramified_primes: o.algebra.ramified_primes.clone(),
        mass: toric_core::ideals::mass_formula(&o).to_string(),
        goldfeld_bound: goldfeld_bound(&o).to_string(),
        order: o.to_json(),
    };
    emit(&out_path(cfg, format!("algebra_{}.json", cfg.stem())), &to_json_bytes(&s)?)?;
    print_json(&s)
}

#[derive(Serialize)]
struct ClassSummary {
    schema_version: String,
    disc_d: u64,
    level: u64,
    class_number: usize,
    type_number: usize,
    mass: String,
    weights: Vec<u64>,
    type_map: Vec<usize>,
    dim_sn: usize,
    dim_sn_new: usize,
    cond_a: Verdict,
    cond_b: bool,
    goldfeld_bound: String,
    class_fingerprint: String,
}

fn classes(cfg: &RunConfig) -> CliResult<()> {
    let cs = pipeline::classes(cfg)?;
    let g = goldfeld_condition_for(&cs)?;
    let s = ClassSummary {
        schema_version: SCHEMA_VERSION.into(),
        disc_d: cfg.disc_d,
        level: cfg.level,
        class_number: cs.h(),
        type_number: cs.type_count(),
        mass: cs.mass.to_string(),
        weights: cs.weights.clone(),
        type_map: cs.type_map.clone(),
        dim_sn: g.dim_sn,
        dim_sn_new: g.dim_sn_new,
        cond_a: g.a,
        cond_b: g.b,
        goldfeld_bound: goldfeld_bound(&cs.order).to_string(),
        class_fingerprint: fingerprint(&cs)?,
    };
    emit(&out_path(cfg, format!("classes_{}.json", cfg.stem())), &to_json_bytes(&cs.to_json())?)?;
    print_json(&s)
}

fn eigenforms(cfg: &RunConfig) -> CliResult<()> {
    let cs = pipeline::classes(cfg)?;
    let forms = pipeline::eigenform_orbits(&cs)?;
    let js: Vec<EigenformJson> = forms.iter().map(|f| f.to_json(cs.order.to_json())).collect();
    emit(&out_path(cfg, format!("eigenforms_{}.json", cfg.stem())), &to_json_bytes(&js)?)?;
    print_json(&js)
}

fn periods_stem(cfg: &RunConfig) -> String {
    format!("{}_b{}", cfg.stem(), cfg.bound)
}

pub fn write_periods(cfg: &RunConfig, run: &PeriodRun) -> CliResult<(PathBuf, PathBuf)> {
    let csv = out_path(cfg, format!("periods_{}.csv", periods_stem(cfg)));
    let side = out_path(cfg, format!("periods_{}.json", periods_stem(cfg)));
    emit(&csv, &periods_csv(&run.records)?)?;
    let sc = PeriodsSidecar {
        schema_version: SCHEMA_VERSION.into(),
        disc_d: cfg.disc_d,
        level: cfg.level,
        bound: cfg.bound,
        records: run.records.len(),
        in_y: run.records.iter().filter(|r| r.in_y).count(),
        class_fingerprint: fingerprint(&run.classes)?,
        order: run.classes.order.to_json(),
        eigenform: run.eigenform.to_json(run.classes.order.to_json()),
    };
    emit(&side, &to_json_bytes(&sc)?)?;
    Ok((csv, side))
}

fn periods(cfg: &RunConfig) -> CliResult<()> {
    let run = pipeline::periods(cfg)?;
    let (csv, side) = write_periods(cfg, &run)?;
    println!("records\t{}", run.records.len());
    println!("in_Y\t{}", run.records.iter().filter(|r| r.in_y).count());
    println!("csv\t{}", csv.display());
    println!("sidecar\t{}", side.display());
    Ok(())
}

#[derive(Serialize)]
struct StatsFile {
    schema_version: String,
    disc_d: u64,
    level: u64,
    bound: u64,
    goldfeld_bound: String,
    reports: Vec<StatReport>,
}

fn stats(cfg: &RunConfig) -> CliResult<()> {
    let xs = cfg.cutoffs()?;
    let run = pipeline::periods(cfg)?;
    let ds = run.dataset()?;
    let reports = xs.iter().map(|&x| stat_report(&ds, x)).collect::<Result<Vec<_>, _>>()?;
    for r in reports.iter().filter(|r| r.clt_unreliable) {
        log::warn!(
            "x = {}: fewer than {} nonzero periods, CLT diagnostic unreliable",
            r.x,
            toric_core::stats::CLT_MIN_SAMPLES
        );
    }
    let top = *xs.iter().max().unwrap_or(&cfg.bound);
    let clt = clt_report(&ds, top);
    let mut samples = String::from("statistic,sign\n");
    for (t, s) in &clt.samples {
        samples.push_str(&format!("{t:.12},{s}\n"));
    }
    let f = StatsFile {
        schema_version: SCHEMA_VERSION.into(),
        disc_d: cfg.disc_d,
        level: cfg.level,
        bound: cfg.bound,
        goldfeld_bound: goldfeld_bound(&run.classes.order).to_string(),
        reports,
    };
    emit(&out_path(cfg, format!("stats_{}.json", periods_stem(cfg))), &to_json_bytes(&f)?)?;
    emit(&out_path(cfg, format!("clt_{}.csv", periods_stem(cfg))), samples.as_bytes())?;
    print!("{}", symmetry_table(&f.reports));
    Ok(())
}

fn scanner(cfg: &RunConfig, max_p: u64, all: bool) -> CliResult<()> {
    info!("scan: primes up to {max_p}");
    let rows = scan(max_p, all)?;
    let mut text = format!("{}\n", ScanRow::HEADER);
    for r in &rows {
        text.push_str(&r.csv_line());
        text.push('\n');
    }
    emit(&out_path(cfg, format!("scan_p{max_p}{}.csv", if all { "_all" } else { "" })), text.as_bytes())?;
    print!("{text}");
    let both = rows.iter().filter(|r| r.both()).count();
    let unsure = rows.iter().filter(|r| r.cond_a == Some(Verdict::Uncertain)).count();
    info!("scan: {both} primes satisfy both conditions, {unsure} uncertain");
    Ok(())
}

fn verify(cfg: &RunConfig) -> CliResult<()> {
    let run = pipeline::periods(cfg)?;
    let forms = pipeline::eigenform_orbits(&run.classes)?;
    let table = pipeline::theta(cfg, &run.classes)?;
    let checks = suite(&run, &forms, &table)?;
    for c in &checks {
        println!("{}", c.line());
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}

fn figures(cfg: &RunConfig, kind: FigureKind) -> CliResult<()> {
    let run = pipeline::periods(cfg)?;
    let ds = run.dataset()?;
    let x = cfg.bound;
    let stem = periods_stem(cfg);
    let title = format!("periods, discriminant {} level {}, |Δ| < {x}", cfg.disc_d, cfg.level);
    let (counts, zeros) = value_counts(&ds, x);
    let deg = ds.field.degree;
    let mut written = Vec::new();
    match kind {
        FigureKind::Scatter1d => {
            if deg != 1 {
                return Err(CliError::domain(format!("scatter-1d needs a rational Hecke field, degree is {deg}")));
            }
            let p = out_path(cfg, format!("scatter-1d_{stem}.svg"));
            emit(&p, scatter_1d(&counts, zeros, &title)?.as_bytes())?;
            written.push(p);
        }
        FigureKind::Scatter2d => {
            let pairs: Vec<(usize, usize)> = match deg {
                2 => vec![(0, 1)],
                3 => vec![(0, 1), (0, 2), (1, 2)],
                _ => {
                    return Err(CliError::domain(format!(
                        "scatter-2d needs a quadratic or cubic Hecke field, degree is {deg}"
                    )))
                }
            };
            let names = ["a", "b", "c"];
            for (i, j) in pairs {
                let p = out_path(cfg, format!("scatter-2d_{stem}_{}{}.svg", names[i], names[j]));
                emit(&p, scatter_pair(&counts, zeros, i, j, &title).as_bytes())?;
                written.push(p);
            }
            if deg == 3 {
                let p = out_path(cfg, format!("scatter-2d_{stem}_counts.csv"));
                emit(&p, counts_csv(&counts).as_bytes())?;
                written.push(p);
            }
        }
        FigureKind::CltHist => {
            let p = out_path(cfg, format!("clt-hist_{stem}.svg"));
            emit(&p, clt_hist(&ds, x, &title).as_bytes())?;
            written.push(p);
        }
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}
