use std::path::{Path, PathBuf};
use std::time::Instant;

use svm_admm::data::{self, scale_features};
use svm_admm::nystrom::NystromConfig;
use svm_admm::smo::{self, SmoConfig};
use svm_admm::svm::{self, TrainOptions};
use svm_admm::{AdmmConfig, Dataset, KernelParams, NonlinearModel, SolverPath, SplitSpec};

use crate::args::{Solver, TrainArgs};
use crate::input;
use crate::report::{self, Hyperparameters, Paths, Timings, TraceRow, TrainSummary, REPORT_SCHEMA};
use crate::{CliError, CliResult, Context};

pub(crate) const DEFAULT_RANK: usize = 64;

struct Fitted {
    model: NonlinearModel,
    trace: Vec<TraceRow>,
    converged: bool,
    train_accuracy: f64,
    c: Option<usize>,
    r: Option<usize>,
    effective_rank: Option<usize>,
    mse: Option<f64>,
    nystrom_ms: f64,
    solve_ms: f64,
}

pub(crate) fn sidecar(model: &Path, suffix: &str) -> PathBuf {
    let stem = model
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    model.with_file_name(format!("{stem}.{suffix}"))
}

/// `(c, r)` from the rank options; the rank defaults to `min(N, 64)`.
pub(crate) fn nystrom_sizes(
    n: usize,
    rank: Option<usize>,
    ratio: Option<f64>,
    columns: Option<usize>,
) -> CliResult<(usize, usize)> {
    let r = match (rank, ratio) {
        (Some(r), _) => r,
        (None, Some(q)) if q > 0.0 && q <= 1.0 => ((q * n as f64).round() as usize).max(1),
        (None, Some(q)) => {
            return Err(CliError::Usage(format!("--ratio must lie in (0, 1], got {q}")));
        }
        (None, None) => n.min(DEFAULT_RANK),
    };
    let c = columns.unwrap_or(r);
    NystromConfig { c, r, ..NystromConfig::square(r, 0) }.validate(n)?;
    Ok((c, r))
}

pub(crate) fn run(ctx: &Context, args: TrainArgs) -> CliResult<()> {
    let start = Instant::now();
    let kernel = input::kernel(&args.kernel)?;
    let data_path = ctx.resolve(&args.input.data);
    let full = input::load_labelled_path(&data_path, &args.input)?;
    let (train, test) = match args.train_fraction {
        Some(f) => {
            let spec = SplitSpec {
                train_fraction: f,
                seed: args.seed,
                stratified: !args.no_stratify,
            };
            let (tr, te) = data::split(&full, &spec)?;
            (tr, Some(te))
        }
        None => (full, None),
    };
    let mode = input::scaling_mode(args.scale);
    let (scaled, record) = scale_features(&train, mode);
    let load_ms = start.elapsed().as_secs_f64() * 1e3;

    let fitted = match args.solver {
        Solver::Smo => fit_smo(&scaled, &kernel, &args)?,
        Solver::Efficient | Solver::Reference => fit_admm(ctx, &scaled, &kernel, &args)?,
    };
    let mut model = fitted.model;
    if mode != svm_admm::ScalingMode::None {
        model.scaling = Some(record);
    }
    let test_accuracy = match &test {
        Some(te) => Some(svm::accuracy(&model, te.x().view(), te.y().view())?),
        None => None,
    };

    let keep_model = fitted.converged || args.allow_nonconverged;
    let report_path = args.report.clone().unwrap_or_else(|| sidecar(&args.model, "report.json"));
    let trace_path = args.trace.clone().unwrap_or_else(|| sidecar(&args.model, "trace.csv"));
    if keep_model {
        svm::save_model_to_path(&model, &args.model)?;
    }
    input::write_csv(&trace_path, &fitted.trace)?;
    let iterations = fitted.trace.len();
    let summary = TrainSummary {
        schema: REPORT_SCHEMA.into(),
        solver: solver_name(args.solver).into(),
        n_train: train.n(),
        n_test: test.as_ref().map_or(0, Dataset::n),
        p: train.p(),
        hyperparameters: Hyperparameters {
            gamma: kernel.gamma(),
            lambda: args.admm.lambda,
            rho: args.admm.rho,
            epsilon: args.admm.epsilon,
            max_iters: args.admm.max_iters,
            c_box: args.smo.c_box,
            kkt_tol: args.smo.kkt_tol,
            seed: args.seed,
            scale: format!("{:?}", args.scale).to_lowercase(),
        },
        c: fitted.c,
        r: fitted.r,
        effective_rank: fitted.effective_rank,
        iterations,
        converged: fitted.converged,
        train_accuracy: fitted.train_accuracy,
        test_accuracy,
        nonzero_alpha: model.nonzero_alpha(),
        mse: fitted.mse,
        timings: Timings {
            load_ms,
            nystrom_ms: fitted.nystrom_ms,
            solve_ms: fitted.solve_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        paths: Paths {
            data: data_path.display().to_string(),
            model: keep_model.then(|| args.model.display().to_string()),
            trace: trace_path.display().to_string(),
        },
    };
    report::write_json(&report_path, &summary)?;

    println!(
        "{} on {} samples: {} iterations, converged={}, train accuracy {:.4}{}, {} support vectors",
        summary.solver,
        summary.n_train,
        iterations,
        fitted.converged,
        fitted.train_accuracy,
        test_accuracy.map(|a| format!(", test accuracy {a:.4}")).unwrap_or_default(),
        summary.nonzero_alpha,
    );
    if !keep_model {
        return Err(CliError::NotConverged { iterations });
    }
    Ok(())
}

pub(crate) fn solver_name(s: Solver) -> &'static str {
    match s {
        Solver::Efficient => "efficient",
        Solver::Reference => "reference",
        Solver::Smo => "smo",
    }
}

fn fit_admm(ctx: &Context, ds: &Dataset, kernel: &KernelParams, args: &TrainArgs) -> CliResult<Fitted> {
    let (c, r) = nystrom_sizes(ds.n(), args.rank, args.ratio, args.columns)?;
    let nys = NystromConfig {
        c,
        r,
        ..NystromConfig::square(r, args.seed)
    };
    let cfg = AdmmConfig {
        lambda: args.admm.lambda,
        rho: args.admm.rho,
        epsilon: args.admm.epsilon,
        max_iters: args.admm.max_iters,
        path: if args.solver == Solver::Reference {
            SolverPath::Reference
        } else {
            SolverPath::Efficient
        },
        track_accuracy: true,
        target_accuracy: None,
    };
    let opts = TrainOptions {
        exec: ctx.exec,
        compute_mse: args.compute_mse,
    };
    let rep = svm::train_nonlinear_with(ds.x().view(), ds.y().view(), kernel, &nys, &cfg, opts)?;
    let trace = rep
        .trace
        .records
        .iter()
        .map(|rec| TraceRow {
            iteration: rec.iteration,
            u_residual: Some(rec.u_residual),
            beta_residual: Some(rec.beta_residual),
            train_accuracy: rec.train_accuracy,
            elapsed_ms: rec.elapsed_ms,
        })
        .collect();
    Ok(Fitted {
        trace,
        converged: rep.trace.converged,
        train_accuracy: rep.train_accuracy,
        c: Some(c),
        r: Some(r),
        effective_rank: Some(rep.factor.effective_rank),
        mse: rep.nystrom_mse,
        nystrom_ms: rep.nystrom_ms,
        solve_ms: rep.solve_ms,
        model: rep.model,
    })
}

fn fit_smo(ds: &Dataset, kernel: &KernelParams, args: &TrainArgs) -> CliResult<Fitted> {
    if args.compute_mse {
        log::warn!("--compute-mse has no effect with the SMO solver");
    }
    let cfg = SmoConfig {
        c_box: args.smo.c_box,
        kkt_tol: args.smo.kkt_tol,
        max_passes: args.smo.max_passes,
        seed: args.seed,
        ..SmoConfig::default()
    };
    let start = Instant::now();
    let res = smo::smo_train(ds.x().view(), ds.y().view(), kernel, &cfg)?;
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let trace = res
        .trace
        .records
        .iter()
        .map(|rec| TraceRow {
            iteration: rec.pass,
            u_residual: None,
            beta_residual: None,
            train_accuracy: Some(rec.train_accuracy),
            elapsed_ms: rec.elapsed_ms,
        })
        .collect();
    let converged = res.trace.converged;
    let model = res.into_model(ds.x().view(), ds.y().view(), *kernel);
    let train_accuracy = svm::accuracy(&model, ds.x().view(), ds.y().view())?;
    Ok(Fitted {
        model,
        trace,
        converged,
        train_accuracy,
        c: None,
        r: None,
        effective_rank: None,
        mse: None,
        nystrom_ms: 0.0,
        solve_ms,
    })
}
