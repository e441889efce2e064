use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use permusmooth::dataset::{self, CsvOptions, Dataset};
use permusmooth::document::{save_result, ResultDocument};
use permusmooth::scaling::{run_bench, BenchGrid};
use permusmooth::selection::{auto_grid, sweep_parallel};
use permusmooth::synthetic::{generate_synthetic, SyntheticSpec};
use permusmooth::{
    fit_monotonic, fit_parallel, Boundary, Direction, FitConfig, FitResult, InitMode,
    MonotonicConfig,
};
use serde_json::json;

use crate::{
    BenchArgs, DescentArgs, FitArgs, Init, InputArgs, SortArgs, SortDirection, SweepArgs, SynthArgs,
};

fn load(args: &InputArgs, pin_column: Option<&str>) -> Result<Dataset> {
    if !args.delimiter.is_ascii() {
        bail!("delimiter must be a single ASCII character");
    }
    let options = CsvOptions {
        header: !args.no_header,
        delimiter: args.delimiter as u8,
        risk_column: pin_column.map(str::to_owned),
    };
    let ds = dataset::load_csv(&args.input, &options)?;
    if ds.data.rows() > args.max_rows {
        bail!(
            "{} has {} rows, above --max-rows {}",
            args.input.display(),
            ds.data.rows(),
            args.max_rows
        );
    }
    Ok(ds)
}

fn fit_config(epsilon: f64, d: &DescentArgs, ds: &Dataset) -> FitConfig {
    let mut cfg = FitConfig::new(epsilon)
        .with_seed(d.seed)
        .with_restarts(d.restarts)
        .with_init(match d.init {
            Init::Random => InitMode::RandomPermutation,
            Init::Identity => InitMode::Identity,
            Init::RandomWeights => InitMode::RandomPermutationAndWeights,
        })
        .with_boundary(if d.no_periodic {
            Boundary::Open
        } else {
            Boundary::Periodic
        });
    cfg.tol = d.tol;
    cfg.max_iters = d.max_iters;
    if let (Some(dim), Some(weight)) = (ds.risk_index, d.pin_weight) {
        cfg = cfg.with_pinned(dim, weight);
    }
    cfg
}

fn emit(doc: &ResultDocument, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            save_result(doc, path).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(doc.to_json()?.as_bytes())?,
    }
    Ok(())
}

fn summarize(label: &str, fit: &FitResult) {
    eprintln!(
        "{label}: objective {:.12e} after {} iterations (restart {}, converged {})",
        fit.f_total(),
        fit.iterations,
        fit.restart_index,
        fit.converged
    );
}

fn write_reordered(ds: &Dataset, fit: &FitResult, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        dataset::write_csv(path, &ds.data.permute_rows(&fit.sigma)?)?;
    }
    Ok(())
}

pub fn fit(args: FitArgs) -> Result<bool> {
    let start = Instant::now();
    let ds = load(&args.input, args.descent.pin_column.as_deref())?;
    let ingest = start.elapsed().as_secs_f64();
    let cfg = fit_config(args.epsilon, &args.descent, &ds);
    let t = Instant::now();
    let result = fit_parallel(&ds.data, &cfg)?;
    let fit_time = t.elapsed().as_secs_f64();
    summarize("fit", &result);
    let echo = json!({ "command": "fit", "input": args.input.input, "fit": cfg });
    let doc = ResultDocument::new(&ds.data, &echo, &result)?
        .with_timing("ingest", ingest)
        .with_timing("fit", fit_time);
    emit(&doc, args.output.as_deref())?;
    write_reordered(&ds, &result, args.reordered.as_deref())?;
    Ok(result.converged)
}

pub fn sweep(args: SweepArgs) -> Result<bool> {
    let start = Instant::now();
    let ds = load(&args.input, args.descent.pin_column.as_deref())?;
    let ingest = start.elapsed().as_secs_f64();
    let base = fit_config(1.0, &args.descent, &ds);
    let grid = match (&args.epsilon_grid, args.epsilon_auto) {
        (Some(grid), _) => grid.clone(),
        (None, Some(count)) => auto_grid(&ds.data, &base, count)?,
        (None, None) => bail!("one of --epsilon-grid or --epsilon-auto is required"),
    };
    let t = Instant::now();
    let result = sweep_parallel(&ds.data, &grid, &base)?;
    let sweep_time = t.elapsed().as_secs_f64();
    let elbow = result.elbow();
    eprintln!(
        "sweep: {} values, elbow at epsilon {} (entry {})",
        result.entries.len(),
        elbow.epsilon,
        result.elbow_index + 1
    );
    summarize("elbow fit", &elbow.fit);
    if let Some(curve) = &args.curve {
        dataset::write_curve(curve, &result)?;
    }
    let config = FitConfig {
        epsilon: elbow.epsilon,
        ..base
    };
    let grid: Vec<f64> = result.entries.iter().map(|e| e.epsilon).collect();
    let echo = json!({
        "command": "sweep",
        "input": args.input.input,
        "epsilon_grid": grid,
        "elbow_index": result.elbow_index,
        "fit": config,
    });
    let doc = ResultDocument::new(&ds.data, &echo, &elbow.fit)?
        .with_timing("ingest", ingest)
        .with_timing("sweep", sweep_time);
    emit(&doc, args.output.as_deref())?;
    Ok(result.entries.iter().all(|e| e.fit.converged))
}

pub fn synth(args: SynthArgs) -> Result<bool> {
    let spec = SyntheticSpec {
        rows: args.rows,
        dims: args.dims,
        periods: [args.periods[0], args.periods[1]],
        phases: [args.phases[0], args.phases[1]],
        seed: args.seed,
    };
    let data = generate_synthetic(&spec)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    dataset::write_csv(args.out_dir.join("smooth.csv"), &data.smooth)?;
    dataset::write_csv(args.out_dir.join("scrambled.csv"), &data.scrambled)?;
    dataset::write_permutation(args.out_dir.join("true_sigma.csv"), &data.true_sigma)?;
    eprintln!(
        "synth: {} rows, {} columns written to {}",
        spec.rows,
        spec.dims,
        args.out_dir.display()
    );
    Ok(true)
}

pub fn sort(args: SortArgs) -> Result<bool> {
    let start = Instant::now();
    let ds = load(&args.input, None)?;
    let ingest = start.elapsed().as_secs_f64();
    let mut cfg = MonotonicConfig::new(args.epsilon)
        .with_direction(match args.direction {
            SortDirection::Ascending => Direction::Ascending,
            SortDirection::Descending => Direction::Descending,
        })
        .with_seed(args.seed)
        .with_restarts(args.restarts);
    cfg.tol = args.tol;
    cfg.max_iters = args.max_iters;
    let t = Instant::now();
    let result = fit_monotonic(&ds.data, &cfg)?;
    let sort_time = t.elapsed().as_secs_f64();
    summarize("sort", &result);
    let echo = json!({ "command": "sort", "input": args.input.input, "sort": cfg });
    let doc = ResultDocument::new(&ds.data, &echo, &result)?
        .with_timing("ingest", ingest)
        .with_timing("sort", sort_time);
    emit(&doc, args.output.as_deref())?;
    write_reordered(&ds, &result, args.reordered.as_deref())?;
    Ok(result.converged)
}

pub fn bench(args: BenchArgs) -> Result<bool> {
    let grid = BenchGrid {
        fixed_rows: args.fixed_rows,
        dims: args.dims,
        fixed_dims: args.fixed_dims,
        rows: args.rows,
        repeats: args.repeats,
        min_repeat_seconds: args.min_repeat_seconds,
        seed: args.seed,
    };
    let report = run_bench(&grid)?;
    let (d, t) = (&report.slope_d, &report.slope_t);
    eprintln!(
        "bench: slope in D {:.3} (95% CI {:.3} to {:.3}), slope in T {:.3} (95% CI {:.3} to {:.3})",
        d.slope, d.ci_low, d.ci_high, t.slope, t.ci_low, t.ci_high
    );
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(true)
}
