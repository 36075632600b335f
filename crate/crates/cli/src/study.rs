use ndarray::Axis;
use serde::Serialize;
use svm_admm::data::scale_features;
use svm_admm::eigen::DEFAULT_EIG_TOL;
use svm_admm::kernel;
use svm_admm::nystrom::{self, NystromConfig};

use crate::args::StudyArgs;
use crate::input;
use crate::{parse_seed_list, CliError, CliResult, Context};

/// The study materializes the full N × N kernel matrix.
pub(crate) const MAX_STUDY_SAMPLES: usize = 8192;

#[derive(Debug, Serialize)]
struct StudyRow {
    c: usize,
    r: usize,
    seed: u64,
    effective_rank: usize,
    mse: f64,
}

/// Distinct `(c, r)` cells, ascending; `ranks` empty means `r = c`.
fn cells(columns: &[usize], ranks: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = if ranks.is_empty() {
        columns.iter().map(|&c| (c, c)).collect()
    } else {
        columns
            .iter()
            .flat_map(|&c| ranks.iter().filter(move |&&r| r <= c).map(move |&r| (c, r)))
            .collect()
    };
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn run(ctx: &Context, args: StudyArgs) -> CliResult<()> {
    let params = input::kernel(&args.kernel)?;
    let seeds = parse_seed_list(&args.seeds)?;
    let ds = input::load_labelled(ctx, &args.input)?;
    let n = ds.n();
    if n > MAX_STUDY_SAMPLES {
        return Err(CliError::Usage(format!(
            "approx-study builds the full kernel matrix and is limited to {MAX_STUDY_SAMPLES} samples (got {n})"
        )));
    }
    let grid = cells(&args.columns, &args.ranks);
    if grid.is_empty() {
        return Err(CliError::Usage("no (c, r) pair with r <= c".into()));
    }
    for &(c, r) in &grid {
        NystromConfig { c, r, ..NystromConfig::square(r, 0) }.validate(n)?;
    }
    let (ds, _) = scale_features(&ds, input::scaling_mode(args.scale));
    let psi = kernel::build_kernel_matrix_with(ds.x().view(), ds.y().view(), &params, ctx.exec)?;

    let jobs: Vec<(usize, usize, u64)> = grid
        .iter()
        .flat_map(|&(c, r)| seeds.iter().map(move |&s| (c, r, s)))
        .collect();
    let results = ctx.exec.map(jobs.len(), |k| {
        let (c, r, seed) = jobs[k];
        let m = nystrom::sample_subset(n, c, seed)?;
        let columns = psi.entries().select(Axis(1), &m);
        let factor = nystrom::factor_from_columns(columns, m, r, DEFAULT_EIG_TOL)?;
        let mse = nystrom::approximation_mse(&psi, &factor)?;
        Ok::<_, svm_admm::Error>(StudyRow {
            c,
            r,
            seed,
            effective_rank: factor.effective_rank,
            mse,
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    input::write_csv(&args.out, &rows)?;
    println!("{} cells written to {}", rows.len(), args.out.display());
    Ok(())
}
