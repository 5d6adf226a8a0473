use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use sqg_core::fit::LineFit;
use sqg_core::littlewood_paley::{besov_norm, block_lp_norms};
use sqg_core::solver::{galerkin_sequence, picard_besov_sequence_with, simulate, sup_norm, Integrator, Scheme};
use sqg_core::spectral::io::{read_field, write_field};
use sqg_core::spectral::{inverse_transform, lp_norm, sobolev_norm};
use sqg_core::DyadicPartition;

use crate::config::{Overrides, RunConfig};
use crate::failure::Failure;
use crate::output::Outputs;
use crate::Global;

fn parse_integrator(s: &str) -> Result<Integrator, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown integrator '{s}', expected if_rk4 or etd_rk2"))
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML run configuration; defaults apply without one.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    /// if_rk4 or etd_rk2.
    #[arg(long, value_parser = parse_integrator)]
    pub integrator: Option<Integrator>,
    /// Gevrey diagnostic weight ε₀.
    #[arg(long)]
    pub epsilon0: Option<f64>,
}

fn load(g: &Global, path: Option<&std::path::Path>, extra: Overrides) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load_or_default(path)?;
    cfg.apply(&Overrides {
        seed: g.seed,
        grid: g.grid,
        gamma: g.gamma,
        ..extra
    });
    Ok(cfg)
}

pub fn cmd_simulate(g: &Global, a: &SimulateArgs) -> Result<(), Failure> {
    let cfg = load(
        g,
        a.config.as_deref(),
        Overrides {
            nu: a.nu,
            dt: a.dt,
            t_final: a.t_final,
            integrator: a.integrator,
            epsilon0: a.epsilon0,
            ..Default::default()
        },
    )?;
    let solver = cfg.solver_config()?;
    let theta0 = cfg.initial_field()?;
    let t = Instant::now();
    let (series, err) = match simulate(&theta0, &solver) {
        Ok(s) => (s, None),
        Err((Some(partial), e)) => (*partial, Some(e)),
        Err((None, e)) => return Err(e.into()),
    };
    let elapsed = t.elapsed().as_secs_f64();
    let mut out = Outputs::create(
        &g.out_dir,
        "simulate",
        "simulate",
        serde_json::to_value(&cfg)?,
        cfg.seed,
    )?;
    out.timing("run", elapsed);
    out.write_with("series.csv", |b| series.write_csv(b))?;
    out.write_with("steps.csv", |b| series.write_steps_csv(b))?;
    out.write_with("final_state.sqgf", |b| write_field(&series.final_state, b))?;
    if series.cfl_warnings > 0 {
        log::warn!("{} steps exceeded Courant number 1", series.cfl_warnings);
        out.note(format!("{} steps exceeded Courant number 1", series.cfl_warnings));
    }
    for n in &series.notes {
        out.note(n.clone());
    }
    let realized = series.final_time();
    match err {
        Some(e) => {
            out.note(format!("aborted after t = {realized}: {e}"));
            out.finish()?;
            Err(e.into())
        }
        None => {
            out.finish()?;
            println!(
                "simulate: reached t = {realized} in {} steps; wrote {}",
                series.steps.len().saturating_sub(1),
                g.out_dir.display()
            );
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Galerkin,
    Picard,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(value_enum)]
    pub scheme: SchemeArg,
    /// TOML run configuration; the [iterate] section applies.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Iterate indices, comma separated; overrides the file.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<i32>>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Every admissible index on the grid: Galerkin n with a resolved cutoff
/// block, Picard n with the data block n+2 resolved.
pub fn default_ns(scheme: Scheme, part: &DyadicPartition) -> Vec<i32> {
    match scheme {
        Scheme::Galerkin => ((part.j_low + 2).max(3)..=part.verified_j_max + 1).collect(),
        Scheme::Picard => (0..=part.verified_j_max - 2).collect(),
    }
}

#[derive(Debug, Serialize)]
struct RateSummary<'a> {
    scheme: Scheme,
    /// Difference norm the rate is fitted to.
    tracked: &'static str,
    ns: &'a [i32],
    t_final: f64,
    slope: Option<f64>,
    intercept: Option<f64>,
    r_squared: Option<f64>,
    rate: Option<LineFit>,
    ratios: &'a [f64],
    data_diffs: &'a [f64],
    data_rate: Option<LineFit>,
    support_defect: f64,
    notes: &'a [String],
}

pub fn cmd_iterate(g: &Global, a: &IterateArgs) -> Result<(), Failure> {
    let cfg = load(
        g,
        a.config.as_deref(),
        Overrides {
            t_final: a.t_final,
            dt: a.dt,
            ..Default::default()
        },
    )?;
    let solver = cfg.solver_config()?;
    let theta0 = cfg.initial_field()?;
    let scheme = match a.scheme {
        SchemeArg::Galerkin => Scheme::Galerkin,
        SchemeArg::Picard => Scheme::Picard,
    };
    let ns = match (&a.ns, &cfg.iterate.ns) {
        (Some(ns), _) | (None, Some(ns)) => ns.clone(),
        (None, None) => default_ns(scheme, &DyadicPartition::for_grid(&solver.grid)),
    };
    let it = &cfg.iterate;
    let t = Instant::now();
    let trace = match scheme {
        Scheme::Galerkin => galerkin_sequence(&theta0, &ns, &solver)?,
        Scheme::Picard => picard_besov_sequence_with(&theta0, &ns, it.p, it.q, it.s0, &solver)?,
    };
    let name = match scheme {
        Scheme::Galerkin => "galerkin",
        Scheme::Picard => "picard",
    };
    let mut out = Outputs::create(
        &g.out_dir,
        &format!("iterate_{name}"),
        "iterate",
        serde_json::json!({ "scheme": name, "ns": ns, "run": cfg }),
        cfg.seed,
    )?;
    out.timing("run", t.elapsed().as_secs_f64());
    out.write_with(&format!("{name}_trace.csv"), |b| trace.write_csv(b))?;
    let summary = RateSummary {
        scheme,
        tracked: match scheme {
            Scheme::Galerkin => "sup_t_l2",
            Scheme::Picard => "sup_t_besov_s0_p_inf",
        },
        ns: &trace.ns,
        t_final: trace.t_final,
        slope: trace.rate.map(|r| r.slope),
        intercept: trace.rate.map(|r| r.intercept),
        r_squared: trace.rate.map(|r| r.r_squared),
        rate: trace.rate,
        ratios: &trace.ratios,
        data_diffs: &trace.data_diffs,
        data_rate: trace.data_rate,
        support_defect: trace.support_defect,
        notes: &trace.notes,
    };
    out.write(
        &format!("{name}_rate.json"),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
    )?;
    out.finish()?;
    match trace.rate {
        Some(r) => println!(
            "iterate {name}: slope {:.4}, R² {:.4} over n = {ns:?}",
            r.slope, r.r_squared
        ),
        None => println!("iterate {name}: no rate fitted over n = {ns:?}"),
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    /// Field in the binary .sqgf container.
    pub field: PathBuf,
    /// Sobolev index r of the H^r norm; default 2-γ.
    #[arg(long)]
    pub sobolev: Option<f64>,
    /// Regularity s of the B^s_{p,q} norm; default 1-γ+2/p.
    #[arg(long)]
    pub besov_s: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
}

#[derive(Debug, Serialize)]
struct BlockNorm {
    j: i32,
    l2: f64,
}

#[derive(Debug, Serialize)]
struct NormReport {
    grid: usize,
    period: f64,
    mean: f64,
    l1: f64,
    l2: f64,
    l4: f64,
    linf: f64,
    h_minus_half: f64,
    sobolev_index: f64,
    sobolev: f64,
    besov_s: f64,
    besov_p: f64,
    besov_q: f64,
    besov: f64,
    blocks: Vec<BlockNorm>,
}

pub fn cmd_norms(g: &Global, a: &NormsArgs) -> Result<(), Failure> {
    let file = fs::File::open(&a.field).map_err(|e| Failure::Usage(format!("{}: {e}", a.field.display())))?;
    let f = read_field(std::io::BufReader::new(file))?;
    let grid = *f.grid();
    if let Some(n) = g.grid {
        if n != grid.n() {
            return Err(Failure::Usage(format!(
                "--grid {n} does not match the stored {}² field",
                grid.n()
            )));
        }
    }
    let gamma = g.gamma.unwrap_or(0.5);
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(Failure::Usage(format!("gamma must lie in (0,2], got {gamma}")));
    }
    let r = a.sobolev.unwrap_or(2.0 - gamma);
    let s = a.besov_s.unwrap_or(1.0 - gamma + 2.0 / a.p);
    let phys = inverse_transform(&f)?;
    let part = DyadicPartition::for_grid(&grid);
    let js: Vec<i32> = (part.j_low + 1..=part.j_max).collect();
    let blocks = block_lp_norms(&f, &js, 2.0)?;
    let report = NormReport {
        grid: grid.n(),
        period: grid.period(),
        mean: f.mean(),
        l1: lp_norm(&phys, &grid, 1.0)?,
        l2: f.l2_norm(),
        l4: lp_norm(&phys, &grid, 4.0)?,
        linf: sup_norm(&f, &phys),
        h_minus_half: sobolev_norm(&f, -0.5, true)?,
        sobolev_index: r,
        sobolev: sobolev_norm(&f, r, false)?,
        besov_s: s,
        besov_p: a.p,
        besov_q: a.q,
        besov: besov_norm(&f, s, a.p, a.q)?,
        blocks: js.iter().zip(blocks).map(|(&j, l2)| BlockNorm { j, l2 }).collect(),
    };
    let json = serde_json::to_string_pretty(&report)?;
    let config = serde_json::json!({
        "field": a.field, "gamma": gamma, "sobolev": r, "besov_s": s, "p": a.p, "q": a.q,
    });
    let mut out = Outputs::create(&g.out_dir, "norms", "norms", config, g.seed.unwrap_or(0))?;
    out.write("norms.json", json.as_bytes())?;
    out.finish()?;
    println!("{json}");
    Ok(())
}
