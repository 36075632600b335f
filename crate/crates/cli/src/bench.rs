use std::time::Instant;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use svm_admm::data;
use svm_admm::nystrom::NystromConfig;
use svm_admm::smo::{self, SmoConfig};
use svm_admm::svm::{self, TrainOptions};
use svm_admm::{AdmmConfig, Dataset, KernelParams, SolverPath};

use crate::args::{BenchArgs, Solver, Source};
use crate::input;
use crate::train::solver_name;
use crate::{parse_seed_list, CliError, CliResult, Context};

#[derive(Clone, Debug, Serialize)]
pub(crate) struct BenchRow {
    pub solver: String,
    pub n: usize,
    pub seed: u64,
    /// Nystrom rank; empty for SMO.
    pub rank: Option<usize>,
    pub reached_target: bool,
    /// Wall-clock until the iterate first met the target training accuracy,
    /// including the Nystrom factorization for the ADMM solvers.
    pub time_to_target_ms: Option<f64>,
    /// ADMM iterations or SMO passes.
    pub iterations: usize,
    pub final_train_accuracy: f64,
    pub converged: bool,
    pub total_ms: f64,
}

/// Where the class-balanced training sets are drawn from.
enum Pool {
    Mnist { images: Array2<u8>, labels: Vec<u8>, digits: (u8, u8) },
    Blobs { dim: usize, separation: f64 },
    File(Dataset),
}

impl Pool {
    fn draw(&self, n: usize, seed: u64) -> CliResult<Dataset> {
        let per_class = n / 2;
        Ok(match self {
            Pool::Mnist { images, labels, digits } => {
                data::digit_pair(images, labels, digits.0, digits.1, Some(per_class), seed)?
            }
            Pool::Blobs { dim, separation } => data::gaussian_blobs(per_class, *dim, *separation, seed)?,
            Pool::File(ds) => balanced_subset(ds, per_class, seed)?,
        })
    }
}

fn balanced_subset(ds: &Dataset, per_class: usize, seed: u64) -> CliResult<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * per_class);
    for label in [-1.0, 1.0] {
        let members: Vec<usize> = (0..ds.n()).filter(|&i| ds.y()[i] == label).collect();
        if members.len() < per_class {
            return Err(svm_admm::Error::InsufficientClassSamples {
                label,
                count: members.len(),
                required: per_class,
            }
            .into());
        }
        rows.extend(
            rand::seq::index::sample(&mut rng, members.len(), per_class)
                .into_iter()
                .map(|j| members[j]),
        );
    }
    rows.sort_unstable();
    Ok(ds.subset(&rows)?)
}

fn load_pool(ctx: &Context, args: &BenchArgs) -> CliResult<Pool> {
    Ok(match args.source {
        Source::Mnist => {
            let [neg, pos] = digits(&args.digits)?;
            let dir = ctx.data_dir.join("mnist");
            let images = data::read_idx_images(&dir.join("train-images-idx3-ubyte"))?;
            let labels = data::read_idx_labels(&dir.join("train-labels-idx1-ubyte"))?;
            Pool::Mnist {
                images,
                labels,
                digits: (neg, pos),
            }
        }
        Source::Blobs => Pool::Blobs {
            dim: args.dim,
            separation: args.separation,
        },
        Source::File => {
            let path = args
                .data
                .as_ref()
                .ok_or_else(|| CliError::Usage("--source file needs --data".into()))?;
            let path = ctx.resolve(path);
            let ext_sparse = input::is_sparse(&path, crate::args::Format::Auto);
            let ds = if ext_sparse {
                data::load_sparse_text(&path)?
            } else {
                data::load_delimited(
                    &path,
                    &data::DelimitedOptions {
                        delimiter: input::delimiter(&path, None)?,
                        ..Default::default()
                    },
                )?
            };
            Pool::File(ds)
        }
    })
}

pub(crate) fn digits(list: &[u8]) -> CliResult<[u8; 2]> {
    match list {
        [a, b] if a != b && *a <= 9 && *b <= 9 => Ok([*a, *b]),
        _ => Err(CliError::Usage(format!("--digits needs two distinct digits, got {list:?}"))),
    }
}

pub(crate) fn run(ctx: &Context, args: BenchArgs) -> CliResult<()> {
    let params = input::kernel(&args.kernel)?;
    let seeds = parse_seed_list(&args.seeds)?;
    if args.sizes.iter().any(|&n| n < 4) {
        return Err(CliError::Usage("every --sizes entry must be at least 4".into()));
    }
    if !(args.ratio > 0.0 && args.ratio <= 1.0) {
        return Err(CliError::Usage(format!("--ratio must lie in (0, 1], got {}", args.ratio)));
    }
    if !(args.target > 0.0 && args.target <= 1.0) {
        return Err(CliError::Usage(format!("--target must lie in (0, 1], got {}", args.target)));
    }
    let pool = load_pool(ctx, &args)?;

    let mut rows = Vec::new();
    for &n in &args.sizes {
        for &seed in &seeds {
            let ds = pool.draw(n, seed)?;
            for &solver in &args.solvers {
                let row = match solver {
                    Solver::Smo => run_smo(&ds, &params, &args, seed)?,
                    _ => run_admm(ctx, &ds, &params, &args, solver, seed)?,
                };
                log::info!("{row:?}");
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| (&a.solver, a.n, a.seed).cmp(&(&b.solver, b.n, b.seed)));
    input::write_csv(&args.out, &rows)?;
    for row in &rows {
        println!(
            "{:<10} N={:<6} seed={:<3} target={} time={} ms",
            row.solver,
            row.n,
            row.seed,
            row.reached_target,
            row.time_to_target_ms.map_or("-".into(), |t| format!("{t:.1}")),
        );
    }
    Ok(())
}

fn run_admm(
    ctx: &Context,
    ds: &Dataset,
    params: &KernelParams,
    args: &BenchArgs,
    solver: Solver,
    seed: u64,
) -> CliResult<BenchRow> {
    let n = ds.n();
    let r = ((args.ratio * n as f64).round() as usize).clamp(1, n);
    let nys = NystromConfig::square(r, seed);
    let cfg = AdmmConfig {
        lambda: args.admm.lambda,
        rho: args.admm.rho,
        epsilon: args.admm.epsilon,
        max_iters: args.admm.max_iters,
        path: if solver == Solver::Reference {
            SolverPath::Reference
        } else {
            SolverPath::Efficient
        },
        track_accuracy: true,
        target_accuracy: Some(args.target),
    };
    let opts = TrainOptions {
        exec: ctx.exec,
        compute_mse: false,
    };
    let start = Instant::now();
    let rep = svm::train_nonlinear_with(ds.x().view(), ds.y().view(), params, &nys, &cfg, opts)?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let hit = rep
        .trace
        .records
        .iter()
        .find(|rec| rec.train_accuracy.is_some_and(|a| a >= args.target));
    Ok(BenchRow {
        solver: solver_name(solver).into(),
        n,
        seed,
        rank: Some(r),
        reached_target: hit.is_some(),
        time_to_target_ms: hit.map(|rec| rep.nystrom_ms + rec.elapsed_ms),
        iterations: rep.trace.iterations(),
        final_train_accuracy: rep.train_accuracy,
        converged: rep.trace.converged,
        total_ms,
    })
}

fn run_smo(ds: &Dataset, params: &KernelParams, args: &BenchArgs, seed: u64) -> CliResult<BenchRow> {
    let cfg = SmoConfig {
        c_box: args.smo.c_box,
        kkt_tol: args.smo.kkt_tol,
        max_passes: args.smo.max_passes,
        seed,
        error_cache: true,
        target_accuracy: Some(args.target),
    };
    let start = Instant::now();
    let res = smo::smo_train(ds.x().view(), ds.y().view(), params, &cfg)?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let iterations = res.trace.records.len();
    let reached = res.trace.reached_target;
    let target_ms = res.trace.target_ms;
    let converged = res.trace.converged;
    let model = res.into_model(ds.x().view(), ds.y().view(), *params);
    let final_train_accuracy = svm::accuracy(&model, ds.x().view(), ds.y().view())?;
    Ok(BenchRow {
        solver: solver_name(Solver::Smo).into(),
        n: ds.n(),
        seed,
        rank: None,
        reached_target: reached,
        time_to_target_ms: if reached { target_ms } else { None },
        iterations,
        final_train_accuracy,
        converged,
        total_ms,
    })
}
