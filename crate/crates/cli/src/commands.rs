use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use backflow_core::verify::{run_all, VerifyConfig};
use backflow_core::{
    boson_bound_with, build_kernel, fermion_bound_with, fermion_scan, fermion_sweep, fig1_table, fig2_tables,
    lambda_ring_with, observables_grid, single_scan, Alpha, BackflowError, Cell, CoefficientMatrix, CsvTable,
    FigureConfig, FigureId, ScanConfig, ScanResult, SolverConfig, SymmetryTag,
};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{BoundArgs, Cli, Command, FermionArgs, FiguresArgs, Format, KernelAction, ObservablesArgs, ReproduceArgs, VerifyArgs};
use crate::emit::{csv_document, document, json_document, write_output, Failure, Metadata};

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let config = json!({
        "format": cli.format,
        "command": serde_json::to_value(&cli.command).expect("arguments serialize"),
    });
    let ctx = Context {
        format: cli.format,
        out: cli.out.as_deref(),
        seed: cli.seed,
        config,
    };
    match &cli.command {
        Command::Kernel {
            action: KernelAction::Dump { alpha, n },
        } => kernel_dump(&ctx, *alpha, *n),
        Command::Single(args) => single(&ctx, args),
        Command::Boson(args) => boson(&ctx, args),
        Command::Fermion(args) => fermion(&ctx, args),
        Command::Observables(args) => observables(&ctx, args),
        Command::Figures(args) => figures(&ctx, args),
        Command::Verify(args) => verify(&ctx, args),
        Command::Reproduce(args) => reproduce(&ctx, args),
    }
}

struct Context<'a> {
    format: Format,
    out: Option<&'a Path>,
    seed: u64,
    config: Value,
}

impl Context<'_> {
    fn meta(&self, command: &str) -> Metadata {
        Metadata::new(command, self.seed, self.config.clone())
    }

    fn emit(&self, command: &str, summary: Value, table: &CsvTable, result: &Value) -> Result<(), Failure> {
        let meta = self.meta(command).with_summary(summary);
        write_output(self.out, &document(self.format, &meta, table, result))
    }
}

fn float_table(header: Vec<&'static str>, rows: impl IntoIterator<Item = Vec<Cell>>) -> CsvTable {
    let mut t = CsvTable::new(header);
    for r in rows {
        t.push(r);
    }
    t
}

fn kernel_dump(ctx: &Context, alpha: f64, n: usize) -> Result<(), Failure> {
    let k = build_kernel(Alpha::new(alpha)?, n);
    let d = k.dim();
    let mut table = CsvTable::new(vec!["m", "n", "value"]);
    for m in 0..d {
        for j in 0..d {
            table.push(vec![Cell::Int(m as i64), Cell::Int(j as i64), Cell::Float(k.get(m, j))]);
        }
    }
    let rows: Vec<&[f64]> = (0..d).map(|m| k.row(m)).collect();
    let result = json!({ "alpha": alpha, "n": n, "entries": rows });
    ctx.emit("kernel dump", Value::Null, &table, &result)
}

fn grid_table(scan: &ScanResult) -> CsvTable {
    float_table(
        vec!["n", "alpha", "min_lambda"],
        scan.grid
            .iter()
            .map(|&(a, v)| vec![Cell::Int(scan.n_max as i64), Cell::Float(a), Cell::Float(v)]),
    )
}

fn scan_result_json(scan: &ScanResult, key: &str) -> Value {
    json!({
        "n": scan.n_max,
        "alpha_star": scan.alpha_star,
        key: scan.q_min,
        "refinement_tolerance": scan.refinement_tolerance,
        "grid": scan.grid,
    })
}

fn single(ctx: &Context, args: &BoundArgs) -> Result<(), Failure> {
    let solver = args.solver.config(ctx.seed);
    let (alpha, mut result, table, summary) = if args.scan {
        let scan = single_scan(args.n, &args.scan_args.config(ScanConfig::single()), &solver)?;
        let summary = json!({ "alpha_star": scan.alpha_star, "lambda": scan.q_min });
        (scan.alpha_star, scan_result_json(&scan, "lambda"), grid_table(&scan), summary)
    } else {
        let a = args.alpha.expect("clap enforces --alpha or --scan");
        let b = lambda_ring_with(Alpha::new(a)?, args.n, &solver)?;
        let table = float_table(
            vec!["alpha", "n", "lambda", "residual"],
            [vec![Cell::Float(a), Cell::Int(args.n as i64), Cell::Float(b.lambda_ring), Cell::Float(b.residual)]],
        );
        let result = json!({ "alpha": a, "n": args.n, "lambda": b.lambda_ring, "residual": b.residual });
        (a, result.clone(), table, result)
    };
    if args.dump_state {
        let b = lambda_ring_with(Alpha::new(alpha)?, args.n, &solver)?;
        result["minimizer"] = json!(b.minimizer.values());
    }
    ctx.emit("single", summary, &table, &result)
}

fn boson(ctx: &Context, args: &BoundArgs) -> Result<(), Failure> {
    let solver = args.solver.config(ctx.seed);
    let (alpha, mut result, table, summary) = if args.scan {
        // Q_B = 2 λ_ring at every α, so the scan runs on the single-particle bound
        let scan = single_scan(args.n, &args.scan_args.config(ScanConfig::single()), &solver)?;
        let doubled = ScanResult {
            grid: scan.grid.iter().map(|&(a, v)| (a, 2.0 * v)).collect(),
            q_min: 2.0 * scan.q_min,
            ..scan
        };
        let summary = json!({ "alpha_star": doubled.alpha_star, "q_b": doubled.q_min });
        (doubled.alpha_star, scan_result_json(&doubled, "q_b"), grid_table(&doubled), summary)
    } else {
        let a = args.alpha.expect("clap enforces --alpha or --scan");
        let r = boson_bound_with(Alpha::new(a)?, args.n, &solver)?;
        let table = float_table(
            vec!["alpha", "n", "q_b", "residual"],
            [vec![Cell::Float(a), Cell::Int(args.n as i64), Cell::Float(r.q_b), Cell::Float(r.residual)]],
        );
        let result = json!({ "alpha": a, "n": args.n, "q_b": r.q_b, "residual": r.residual });
        (a, result.clone(), table, result)
    };
    if args.dump_state {
        let r = boson_bound_with(Alpha::new(alpha)?, args.n, &solver)?;
        result["state"] = json!(r.state.to_row_major());
    }
    ctx.emit("boson", summary, &table, &result)
}

fn fermion(ctx: &Context, args: &FermionArgs) -> Result<(), Failure> {
    let solver = args.solver.config(ctx.seed);
    let scan_cfg = args.scan_args.config(ScanConfig::fermion());

    if let Some(range) = args.n_range {
        return fermion_range(ctx, args, range.lo, range.hi, &scan_cfg, &solver);
    }
    let n = args.n.expect("clap enforces --n without --n-range");
    let (alpha, mut result, table, summary) = if args.scan {
        let scan = fermion_scan(n, &scan_cfg, &solver)?;
        let summary = json!({ "alpha_star": scan.alpha_star, "q_f": scan.q_min });
        (scan.alpha_star, scan_result_json(&scan, "q_f"), grid_table(&scan), summary)
    } else {
        let a = args.alpha.expect("clap enforces --alpha, --scan or --n-range");
        let r = fermion_bound_with(Alpha::new(a)?, n, &solver)?;
        let table = float_table(
            vec!["alpha", "n", "q_f", "residual"],
            [vec![Cell::Float(a), Cell::Int(n as i64), Cell::Float(r.q_f), Cell::Float(r.residual)]],
        );
        let result = json!({ "alpha": a, "n": n, "q_f": r.q_f, "residual": r.residual });
        (a, result.clone(), table, result)
    };
    if args.dump_state {
        let r = fermion_bound_with(Alpha::new(alpha)?, n, &solver)?;
        result["reduced_minimizer"] = json!(r.reduced_minimizer.values);
        result["state"] = json!(r.full_state.to_row_major());
    }
    ctx.emit("fermion", summary, &table, &result)
}

fn fermion_range(
    ctx: &Context,
    args: &FermionArgs,
    lo: usize,
    hi: usize,
    scan_cfg: &ScanConfig,
    solver: &SolverConfig,
) -> Result<(), Failure> {
    let header = vec!["n", "inv_n", "q_f", "alpha_star"];
    if args.extrapolate {
        let sweep = fermion_sweep(lo, hi, scan_cfg, solver)?;
        let mut table = CsvTable::new(header);
        for (n, q, a) in sweep.points() {
            table.push(vec![
                Cell::Int(n as i64),
                Cell::Float(1.0 / n as f64),
                Cell::Float(q),
                Cell::Float(a),
            ]);
        }
        let (q_tab, a_tab) = fig2_tables(&sweep, 2);
        for (q_row, a_row) in q_tab.rows.iter().zip(&a_tab.rows).filter(|(r, _)| r[0] == Cell::Int(-1)) {
            table.push(vec![Cell::Int(-1), q_row[1].clone(), q_row[2].clone(), a_row[2].clone()]);
        }
        let summary = json!({
            "q_f_intercept": sweep.q_f_fit.intercept,
            "alpha_star_intercept": sweep.alpha_star_fit.intercept,
        });
        let result = json!({
            "points": sweep.points().map(|(n, q, a)| json!({ "n": n, "q_f": q, "alpha_star": a })).collect::<Vec<_>>(),
            "q_f_fit": sweep.q_f_fit,
            "alpha_star_fit": sweep.alpha_star_fit,
        });
        return ctx.emit("fermion", summary, &table, &result);
    }
    if lo == 0 {
        return Err(BackflowError::NoAntisymmetricStates.into());
    }
    let scans: Vec<ScanResult> = (lo..=hi)
        .into_par_iter()
        .map(|n| fermion_scan(n, scan_cfg, solver))
        .collect::<Result<_, _>>()?;
    let table = float_table(
        header,
        scans.iter().map(|s| {
            vec![
                Cell::Int(s.n_max as i64),
                Cell::Float(1.0 / s.n_max as f64),
                Cell::Float(s.q_min),
                Cell::Float(s.alpha_star),
            ]
        }),
    );
    let result = json!({
        "points": scans.iter().map(|s| json!({ "n": s.n_max, "q_f": s.q_min, "alpha_star": s.alpha_star })).collect::<Vec<_>>(),
    });
    ctx.emit("fermion", Value::Null, &table, &result)
}

#[derive(Debug, Deserialize)]
struct StateFile {
    n_max: usize,
    sigma: Value,
    coefficients: Vec<f64>,
}

fn read_state(path: &Path) -> Result<CoefficientMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let state: StateFile =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let sigma = match &state.sigma {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let tag = SymmetryTag::parse(&sigma)?;
    Ok(CoefficientMatrix::from_row_major(state.n_max, &state.coefficients, tag)?)
}

fn observables(ctx: &Context, args: &ObservablesArgs) -> Result<(), Failure> {
    if args.theta_points == 0 || args.t_points == 0 {
        return Err(Failure::Input("grid sizes must be positive".into()));
    }
    let c = read_state(&args.state)?;
    let thetas: Vec<f64> = (0..args.theta_points)
        .map(|i| 2.0 * PI * i as f64 / args.theta_points as f64)
        .collect();
    let times: Vec<f64> = if args.t_points == 1 {
        vec![args.t_min]
    } else {
        (0..args.t_points)
            .map(|i| args.t_min + (args.t_max - args.t_min) * i as f64 / (args.t_points - 1) as f64)
            .collect()
    };
    let rows = observables_grid(&c, &thetas, &times)?;
    let table = float_table(
        vec!["theta", "t", "J", "rho"],
        rows.iter()
            .map(|&(th, t, j, rho)| vec![Cell::Float(th), Cell::Float(t), Cell::Float(j), Cell::Float(rho)]),
    );
    let result = json!({
        "rows": rows.iter().map(|&(th, t, j, rho)| json!({ "theta": th, "t": t, "J": j, "rho": rho })).collect::<Vec<_>>(),
    });
    ctx.emit("observables", Value::Null, &table, &result)
}

fn figure_config(args: &FiguresArgs, seed: u64) -> FigureConfig {
    let defaults = FigureConfig::default();
    FigureConfig {
        fig1a_grid: args.scan_args.config(defaults.fig1a_grid),
        fig1b_grid: args.scan_args.config(defaults.fig1b_grid),
        scan: args.scan_args.config(defaults.scan),
        n_lo: args.n_range.lo,
        n_hi: args.n_range.hi,
        fit_samples: args.fit_samples,
        solver: args.solver.config(seed),
        ..defaults
    }
}

fn figures(ctx: &Context, args: &FiguresArgs) -> Result<(), Failure> {
    let cfg = figure_config(args, ctx.seed);
    let table = backflow_core::emit_figure_data(args.id, &cfg)?;
    let meta = ctx.meta("figures").with_summary(json!({ "figure": args.id, "rows": table.rows.len() }));
    let text = match ctx.format {
        Format::Csv => csv_document(&meta, &table),
        Format::Json => json_document(&meta, &table_json(&table)),
    };
    write_output(ctx.out, &text)
}

fn table_json(table: &CsvTable) -> Value {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let mut obj = serde_json::Map::new();
            for (h, c) in table.header.iter().zip(r) {
                let v = match c {
                    Cell::Int(i) => json!(i),
                    Cell::Float(x) => json!(x),
                };
                obj.insert((*h).to_string(), v);
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "columns": table.header, "rows": rows })
}

fn verify(ctx: &Context, args: &VerifyArgs) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        seed: ctx.seed,
        quad_points: args.quad_points,
        random_states: args.random_states,
        appendix_trials: args.trials,
        ..VerifyConfig::default()
    };
    let outcomes = run_all(&cfg);
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.clone()).collect();
    let text = match ctx.format {
        Format::Json => json_document(&serde_json::to_value(ctx.meta("verify")).expect("serializes"), &json!(outcomes)),
        Format::Csv => {
            let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for o in &outcomes {
                let mark = if o.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark}  {:width$}  {}\n", o.name, o.detail));
            }
            s.push_str(&format!("{} of {} checks passed\n", outcomes.len() - failed.len(), outcomes.len()));
            s
        }
    };
    write_output(ctx.out, &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed))
    }
}

struct ReproducePlan {
    single_n: usize,
    n_lo: usize,
    n_hi: usize,
    fig1b_ns: Vec<usize>,
}

impl ReproducePlan {
    fn new(quick: bool) -> Self {
        if quick {
            ReproducePlan {
                single_n: 100,
                n_lo: 20,
                n_hi: 30,
                fig1b_ns: vec![10, 20, 30],
            }
        } else {
            ReproducePlan {
                single_n: 400,
                n_lo: 20,
                n_hi: 70,
                fig1b_ns: vec![10, 20, 30, 40, 50],
            }
        }
    }
}

fn reproduce(ctx: &Context, args: &ReproduceArgs) -> Result<(), Failure> {
    let dir: PathBuf = ctx.out.map_or_else(|| PathBuf::from("reproduce-out"), Path::to_path_buf);
    fs::create_dir_all(&dir).map_err(|e| Failure::io(&dir, e))?;
    let plan = ReproducePlan::new(args.quick);
    let solver = args.solver.config(ctx.seed);
    let figs = FigureConfig {
        fig1b_ns: plan.fig1b_ns.clone(),
        n_lo: plan.n_lo,
        n_hi: plan.n_hi,
        solver,
        ..FigureConfig::default()
    };

    let single = single_scan(plan.single_n, &ScanConfig::single(), &solver)?;
    let boson = boson_bound_with(Alpha::new(single.alpha_star)?, plan.single_n, &solver)?;
    let sweep = fermion_sweep(plan.n_lo, plan.n_hi, &figs.scan, &solver)?;
    let (fig2a, fig2b) = fig2_tables(&sweep, figs.fit_samples);
    let fig1a = fig1_table(FigureId::Fig1a, &figs.fig1a_ns, &figs.fig1a_grid, &solver)?;
    let fig1b = fig1_table(FigureId::Fig1b, &figs.fig1b_ns, &figs.fig1b_grid, &solver)?;

    let config = json!({
        "quick": args.quick,
        "single_n": plan.single_n,
        "single_scan": ScanConfig::single(),
        "figures": figs,
    });
    let meta = Metadata::new("reproduce", ctx.seed, config);
    for (id, table) in [
        (FigureId::Fig1a, &fig1a),
        (FigureId::Fig1b, &fig1b),
        (FigureId::Fig2a, &fig2a),
        (FigureId::Fig2b, &fig2b),
    ] {
        let m = meta.with_summary(json!({ "figure": id, "rows": table.rows.len() }));
        let path = dir.join(format!("{id}.csv"));
        fs::write(&path, csv_document(&m, table)).map_err(|e| Failure::io(&path, e))?;
    }

    let summary = json!({
        "c_ring": -single.q_min,
        "alpha_ring": single.alpha_star,
        "single_n": plan.single_n,
        "q_b": boson.q_b,
        "q_f": sweep.q_f_fit.intercept,
        "alpha_star": sweep.alpha_star_fit.intercept,
        "q_f_fit": sweep.q_f_fit,
        "alpha_star_fit": sweep.alpha_star_fit,
        "fermion_points": sweep.points().map(|(n, q, a)| json!({ "n": n, "q_f": q, "alpha_star": a })).collect::<Vec<_>>(),
    });
    let text = json_document(&serde_json::to_value(&meta).expect("serializes"), &summary);
    let path = dir.join("summary.json");
    fs::write(&path, &text).map_err(|e| Failure::io(&path, e))?;
    write_output(None, &text)
}
