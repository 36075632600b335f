use svm_admm::data;

use crate::args::{ExportArgs, SynthArgs, SynthKind};
use crate::bench::digits;
use crate::input;
use crate::{CliError, CliResult, Context};

pub(crate) fn export_mnist(ctx: &Context, args: ExportArgs) -> CliResult<()> {
    let [neg, pos] = digits(&args.digits)?;
    let dir = args.mnist_dir.clone().unwrap_or_else(|| ctx.data_dir.join("mnist"));
    let images = data::read_idx_images(&dir.join("train-images-idx3-ubyte"))?;
    let labels = data::read_idx_labels(&dir.join("train-labels-idx1-ubyte"))?;
    let train = data::digit_pair(&images, &labels, neg, pos, args.per_class, args.seed)?;
    data::write_delimited(&train, &args.out, input::delimiter(&args.out, None)?)?;
    println!("{} training samples written to {}", train.n(), args.out.display());

    if let Some(out) = &args.test_out {
        let images = data::read_idx_images(&dir.join("t10k-images-idx3-ubyte"))?;
        let labels = data::read_idx_labels(&dir.join("t10k-labels-idx1-ubyte"))?;
        let test = data::digit_pair(&images, &labels, neg, pos, None, args.seed)?;
        data::write_delimited(&test, out, input::delimiter(out, None)?)?;
        println!("{} test samples written to {}", test.n(), out.display());
    }
    Ok(())
}

pub(crate) fn gen_synthetic(args: SynthArgs) -> CliResult<()> {
    let ds = match args.kind {
        SynthKind::Blobs => {
            if !args.n.is_multiple_of(2) {
                return Err(CliError::Usage(format!("--n must be even for blobs, got {}", args.n)));
            }
            data::gaussian_blobs(args.n / 2, args.dim, args.separation, args.seed)?
        }
        SynthKind::Xor => data::xor(args.n, args.flip, args.seed)?,
    };
    if args.sparse {
        data::write_sparse_text(&ds, &args.out)?;
    } else {
        data::write_delimited(&ds, &args.out, input::delimiter(&args.out, None)?)?;
    }
    println!("{} samples written to {}", ds.n(), args.out.display());
    Ok(())
}
