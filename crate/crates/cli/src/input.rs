use std::path::Path;

use svm_admm::data::{self, DelimitedOptions};
use svm_admm::{Dataset, KernelParams, ScalingMode};

use crate::args::{Format, InputArgs, KernelArgs, Scale};
use crate::{CliError, CliResult, Context};

pub(crate) fn is_sparse(path: &Path, format: Format) -> bool {
    match format {
        Format::Sparse => true,
        Format::Delimited => false,
        Format::Auto => path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "svm" | "libsvm" | "sparse")),
    }
}

pub(crate) fn delimiter(path: &Path, explicit: Option<char>) -> CliResult<u8> {
    match explicit {
        Some(c) if c.is_ascii() => Ok(c as u8),
        Some(c) => Err(CliError::Usage(format!("delimiter must be a single ASCII character, got {c:?}"))),
        None if path.extension().is_some_and(|e| e == "tsv") => Ok(b'\t'),
        None => Ok(b','),
    }
}

pub(crate) fn delimited_options(path: &Path, args: &InputArgs) -> CliResult<DelimitedOptions> {
    Ok(DelimitedOptions {
        label_column: args.label_column,
        delimiter: delimiter(path, args.delimiter)?,
        has_header: args.header,
    })
}

pub(crate) fn load_labelled(ctx: &Context, args: &InputArgs) -> CliResult<Dataset> {
    let path = ctx.resolve(&args.data);
    load_labelled_path(&path, args)
}

pub(crate) fn load_labelled_path(path: &Path, args: &InputArgs) -> CliResult<Dataset> {
    let ds = if is_sparse(path, args.format) {
        data::load_sparse_text(path)?
    } else {
        data::load_delimited(path, &delimited_options(path, args)?)?
    };
    log::info!("loaded {} samples with {} features from {}", ds.n(), ds.p(), path.display());
    Ok(ds)
}

pub(crate) fn kernel(args: &KernelArgs) -> CliResult<KernelParams> {
    Ok(match args.bandwidth {
        Some(b) => KernelParams::from_bandwidth(b)?,
        None => KernelParams::new(args.gamma)?,
    })
}

pub(crate) fn scaling_mode(s: Scale) -> ScalingMode {
    match s {
        Scale::None => ScalingMode::None,
        Scale::Minmax => ScalingMode::MinMaxUnit,
        Scale::Zscore => ScalingMode::ZScore,
    }
}

pub(crate) fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::output(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::output(path, e))?;
    }
    w.flush().map_err(|e| CliError::output(path, e))
}
