use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use archetypal_core::chain::simulate;
use archetypal_core::fourier::{charfn, default_s_values, fourier_iterate, SpectrumEstimate};
use archetypal_core::operator::{iterate, GridFunction};
use archetypal_core::presets::{preset, PresetParams};
use archetypal_core::rng::stream;
use archetypal_core::series::{canonical_cdf, CanonicalOptions, SeriesConfig, DEFAULT_DKW_DELTA};
use archetypal_core::verify::suites::run_suite;
use archetypal_core::verify::GridSpec;
use archetypal_core::{Complex64, MeasureSpec};
use serde_json::{json, Value};

use crate::args::{Cli, Command, Common, GridArgs, SeriesArgs};
use crate::output::{real, sibling, write_meta, write_text, Csv};

/// Returns `Ok(false)` when a verification suite fails.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Classify { common, tol } => classify(&common, tol).map(|_| true),
        Command::Solve {
            common,
            series,
            grid,
            allow_non_solution,
        } => solve(&common, &series, &grid, allow_non_solution).map(|_| true),
        Command::Iterate {
            common,
            f0,
            xmin,
            xmax,
            m,
            iterations,
            margin,
            grid_out,
        } => {
            init_workers(common.workers)?;
            let (spec, echo) = load_spec(&common)?;
            let start = GridFunction::from_fn(xmin, xmax, m, |x| f0.eval(x))?;
            let it = iterate(&spec, &start, iterations, margin)?;
            let mut hist = Csv::new("iter,range,residual");
            for r in &it.history {
                hist.row(&[r.iteration.to_string(), real(r.range), real(r.residual)]);
            }
            let mut grid = Csv::new("x,y");
            for (j, y) in it.f.values().iter().enumerate() {
                grid.row(&[real(it.f.node(j)), real(*y)]);
            }
            let grid_dest = grid_out.or_else(|| common.out.as_ref().map(|o| sibling(o, ".grid.csv")));
            match grid_dest {
                Some(g) => {
                    write_text(common.out.as_deref(), &hist.into_string())?;
                    write_text(Some(&g), &grid.into_string())?;
                }
                None => write_text(None, &(hist.into_string() + "\n" + &grid.into_string()))?,
            }
            let meta = metadata(
                "iterate",
                &common,
                echo,
                json!({
                    "f0": format!("{f0:?}").to_lowercase(),
                    "xmin": xmin, "xmax": xmax, "m": m,
                    "iterations": iterations, "margin": margin,
                    "extension": "clamp",
                }),
                json!({ "clampWarning": it.clamp_warning }),
            );
            write_meta(common.out.as_deref(), &meta)?;
            Ok(true)
        }
        Command::Charfn {
            common,
            series,
            s,
            depth,
        } => {
            init_workers(common.workers)?;
            let (spec, echo) = load_spec(&common)?;
            let s_values = s.unwrap_or_else(default_s_values);
            let cfg = series_config(&series);
            let (est, method): (SpectrumEstimate, String) = match depth {
                Some(n) => {
                    let it = fourier_iterate(&spec, |_| Complex64::new(1.0, 0.0), &s_values, n, series.n, common.seed)?;
                    (it.estimate, format!("{:?}", it.method))
                }
                None => (charfn(&spec, &s_values, series.n, cfg, common.seed)?, "Samples".into()),
            };
            let mut csv = Csv::new("s,re,im,abs");
            for (s, z) in est.grid.s_values.iter().zip(&est.grid.values) {
                csv.row(&[real(*s), real(z.re), real(z.im), real(z.norm())]);
            }
            write_text(common.out.as_deref(), &csv.into_string())?;
            let meta = metadata(
                "charfn",
                &common,
                echo,
                json!({ "N": series.n, "depth": depth, "series": cfg_json(&cfg), "frequencies": s_values.len() }),
                json!({ "method": method, "maxStderr": est.stderr.iter().cloned().fold(0.0, f64::max) }),
            );
            write_meta(common.out.as_deref(), &meta)?;
            Ok(true)
        }
        Command::Chain {
            common,
            x0,
            steps,
            path,
        } => {
            let (spec, echo) = load_spec(&common)?;
            let traj = simulate(&spec, x0, steps, &mut stream(common.seed, path))?;
            let mut csv = Csv::new("n,alpha,beta,X,A,B,D");
            for (i, st) in traj.steps.iter().enumerate() {
                csv.row(&[
                    (i + 1).to_string(),
                    real(st.alpha),
                    real(st.beta),
                    real(st.x),
                    real(st.a),
                    real(st.b),
                    real(st.d),
                ]);
            }
            write_text(common.out.as_deref(), &csv.into_string())?;
            let meta = metadata(
                "chain",
                &common,
                echo,
                json!({ "x0": x0, "steps": steps, "path": path }),
                json!({ "overflowed": traj.overflowed, "emitted": traj.steps.len() }),
            );
            write_meta(common.out.as_deref(), &meta)?;
            Ok(true)
        }
        Command::Verify {
            suite,
            seed,
            workers,
            out,
        } => {
            init_workers(workers)?;
            let checks = run_suite(&suite, seed)?;
            let pass = checks.iter().all(|c| c.pass);
            let report = json!({
                "suite": suite,
                "seed": seed,
                "pass": pass,
                "checks": checks,
            });
            write_text(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(pass)
        }
    }
}

fn classify(common: &Common, tol: f64) -> Result<()> {
    let (spec, echo) = load_spec(common)?;
    let report = spec.classify(tol)?;
    let out = json!({
        "spec": echo,
        "tolerance": tol,
        "report": report,
    });
    write_text(common.out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn solve(common: &Common, series: &SeriesArgs, grid: &GridArgs, allow_non_solution: bool) -> Result<()> {
    init_workers(common.workers)?;
    let (spec, echo) = load_spec(common)?;
    let cfg = series_config(series);
    let cdf = canonical_cdf(
        &spec,
        series.n,
        cfg,
        common.seed,
        CanonicalOptions { allow_non_solution },
    )?;
    let g = match (grid.xmin, grid.xmax) {
        (Some(xmin), Some(xmax)) => GridSpec { xmin, xmax, m: grid.m },
        (None, None) => {
            GridSpec::around_support(&spec, grid.m).unwrap_or_else(|| GridSpec::around_samples(cdf.samples(), grid.m))
        }
        _ => bail!("--xmin and --xmax must be given together"),
    };
    let f = g.sample(|x| cdf.eval(x))?;
    let mut csv = Csv::new("x,F");
    for (j, y) in f.values().iter().enumerate() {
        csv.row(&[real(f.node(j)), real(*y)]);
    }
    write_text(common.out.as_deref(), &csv.into_string())?;
    let meta = metadata(
        "solve",
        common,
        echo,
        json!({
            "N": series.n, "series": cfg_json(&cfg),
            "xmin": g.xmin, "xmax": g.xmax, "m": g.m,
            "allowNonSolution": allow_non_solution,
        }),
        json!({
            "N": cdf.len(),
            "meanDepth": cdf.diagnostics.mean_depth,
            "maxDepthHits": cdf.diagnostics.max_depth_hits,
            "dkwHalfwidth": cdf.dkw_halfwidth(DEFAULT_DKW_DELTA),
            "dkwDelta": DEFAULT_DKW_DELTA,
            "status": cdf.status,
        }),
    );
    write_meta(common.out.as_deref(), &meta)
}

fn init_workers(workers: Option<usize>) -> Result<()> {
    if let Some(n) = workers {
        if n == 0 {
            bail!("--workers must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }
    Ok(())
}

fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(|item| {
            let (v, p) = item
                .split_once(':')
                .with_context(|| format!("expected value:prob, got '{item}'"))?;
            Ok((v.trim().parse()?, p.trim().parse()?))
        })
        .collect()
}

fn load_spec(common: &Common) -> Result<(MeasureSpec, Value)> {
    let spec = match (&common.spec, &common.preset) {
        (Some(path), None) => read_spec(path)?,
        (None, Some(name)) => {
            let params = PresetParams {
                a: common.a,
                alpha: common.alpha,
                alpha_atoms: common.alphas.as_deref().map(parse_pairs).transpose()?,
                masks: common.masks.as_deref().map(parse_pairs).transpose()?,
            };
            preset(name, &params)?
        }
        _ => bail!("exactly one of --spec or --preset is required"),
    };
    spec.validate()?;
    let echo = serde_json::to_value(&spec)?;
    Ok((spec, echo))
}

fn read_spec(path: &Path) -> Result<MeasureSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn series_config(s: &SeriesArgs) -> SeriesConfig {
    SeriesConfig {
        tail_tolerance: s.tail_tol,
        min_depth: s.min_depth,
        max_depth: s.max_depth,
    }
}

fn cfg_json(cfg: &SeriesConfig) -> Value {
    json!({ "tailTolerance": cfg.tail_tolerance, "minDepth": cfg.min_depth, "maxDepth": cfg.max_depth })
}

fn metadata(command: &str, common: &Common, spec: Value, parameters: Value, diagnostics: Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": common.seed,
        "source": match (&common.preset, &common.spec) {
            (Some(p), _) => json!({ "preset": p }),
            (None, Some(path)) => json!({ "file": path.display().to_string() }),
            _ => Value::Null,
        },
        "spec": spec,
        "parameters": parameters,
        "diagnostics": diagnostics,
    })
}
