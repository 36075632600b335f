use ndarray::{Array1, Array2};
use serde::Serialize;
use svm_admm::data;
use svm_admm::svm;
use svm_admm::Error;

use crate::args::PredictArgs;
use crate::input;
use crate::{CliResult, Context};

#[derive(Serialize)]
struct Prediction {
    prediction: i8,
    decision_value: f64,
}

pub(crate) fn run(ctx: &Context, args: PredictArgs) -> CliResult<()> {
    let model = svm::load_model_from_path(&ctx.resolve(&args.model))?;
    let path = ctx.resolve(&args.input.data);
    let (x, y) = if input::is_sparse(&path, args.input.format) {
        let ds = data::load_sparse_text(&path)?;
        let (x, y) = ds.into_parts();
        (pad_columns(x, model.dim)?, Some(y))
    } else {
        let delim = input::delimiter(&path, args.input.delimiter)?;
        let raw = data::load_features(&path, delim, args.input.header)?;
        if raw.ncols() == model.dim {
            (raw, None)
        } else if raw.ncols() == model.dim + 1 {
            let ds = data::load_delimited(&path, &input::delimited_options(&path, &args.input)?)?;
            let (x, y) = ds.into_parts();
            (x, Some(y))
        } else {
            return Err(Error::DimensionMismatch {
                expected: model.dim,
                found: raw.ncols(),
            }
            .into());
        }
    };

    let values = svm::decision_values(&model, x.view(), ctx.exec)?;
    let rows: Vec<Prediction> = values
        .iter()
        .map(|&v| Prediction {
            prediction: if v >= 0.0 { 1 } else { -1 },
            decision_value: v,
        })
        .collect();
    input::write_csv(&args.out, &rows)?;

    match y {
        Some(y) => {
            let acc = accuracy(&rows, &y);
            println!("{} predictions written to {}; accuracy {acc:.4}", rows.len(), args.out.display());
        }
        None => println!("{} predictions written to {}", rows.len(), args.out.display()),
    }
    Ok(())
}

fn accuracy(rows: &[Prediction], y: &Array1<f64>) -> f64 {
    let correct = rows
        .iter()
        .zip(y.iter())
        .filter(|(p, &t)| f64::from(p.prediction) == t)
        .count();
    correct as f64 / rows.len().max(1) as f64
}

/// Sparse files only reveal the largest index present, so missing trailing
/// features are zero.
fn pad_columns(x: Array2<f64>, dim: usize) -> CliResult<Array2<f64>> {
    if x.ncols() > dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.ncols(),
        }
        .into());
    }
    let mut out = Array2::zeros((x.nrows(), dim));
    out.slice_mut(ndarray::s![.., ..x.ncols()]).assign(&x);
    Ok(out)
}
