use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "svm-admm", version, about = "Kernel SVM training with ADMM and Nystrom low-rank approximation")]
pub struct Cli {
    /// Directory searched for relative data paths that do not exist as given.
    #[arg(long, global = true, env = "SVM_ADMM_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,

    /// Run the data-parallel loops on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with a JSON report and a CSV convergence trace.
    Train(TrainArgs),
    /// Label rows with a trained model.
    Predict(PredictArgs),
    /// Sweep Nystrom (c, r) settings and record the kernel approximation error.
    ApproxStudy(StudyArgs),
    /// Compare time-to-accuracy of the solvers over several training sizes.
    BenchConvergence(BenchArgs),
    /// Write a two-digit MNIST subset as delimited text.
    ExportMnist(ExportArgs),
    /// Write a synthetic two-class dataset.
    GenSynthetic(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Sparse for .svm/.libsvm/.sparse files, delimited otherwise.
    Auto,
    Delimited,
    Sparse,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input dataset.
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,

    /// Zero-based label column of delimited input [default: last].
    #[arg(long)]
    pub label_column: Option<usize>,

    /// Field delimiter of delimited input [default: tab for .tsv, comma otherwise].
    #[arg(long)]
    pub delimiter: Option<char>,

    /// Delimited input starts with a header row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// RBF parameter in k(a, b) = exp(gamma * |a - b|^2); must be negative.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true, conflicts_with = "bandwidth")]
    pub gamma: f64,

    /// Positive alternative to --gamma (gamma = -bandwidth).
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AdmmArgs {
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,

    /// Augmented-Lagrangian penalty.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,

    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,

    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct SmoArgs {
    /// SMO box constraint C.
    #[arg(long, default_value_t = 10.0)]
    pub c_box: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub kkt_tol: f64,

    #[arg(long, default_value_t = 10_000)]
    pub max_passes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Efficient,
    Reference,
    Smo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    None,
    Minmax,
    Zscore,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub kernel: KernelArgs,

    #[command(flatten)]
    pub admm: AdmmArgs,

    #[command(flatten)]
    pub smo: SmoArgs,

    /// Target rank r [default: min(N, 64)].
    #[arg(long, conflicts_with = "ratio")]
    pub rank: Option<usize>,

    /// Target rank as a fraction of the training size, r = round(ratio * N).
    #[arg(long)]
    pub ratio: Option<f64>,

    /// Sampled columns c [default: r].
    #[arg(long)]
    pub columns: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Solver::Efficient)]
    pub solver: Solver,

    #[arg(long, value_enum, default_value_t = Scale::None)]
    pub scale: Scale,

    /// Hold out part of the data and report test accuracy.
    #[arg(long)]
    pub train_fraction: Option<f64>,

    /// Split without preserving class ratios.
    #[arg(long)]
    pub no_stratify: bool,

    /// Also materialize the full kernel matrix and report the approximation error.
    #[arg(long)]
    pub compute_mse: bool,

    /// Output model; a .json extension writes the text variant.
    #[arg(long)]
    pub model: PathBuf,

    /// [default: <model stem>.report.json]
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// [default: <model stem>.trace.csv]
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Exit 0 even when the solver hit its iteration cap.
    #[arg(long)]
    pub allow_nonconverged: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,

    #[command(flatten)]
    pub input: InputArgs,

    /// Predictions CSV: one row of (prediction, decision_value) per input row.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Sampled column counts, e.g. 8,16,32.
    #[arg(long, value_delimiter = ',', required = true)]
    pub columns: Vec<usize>,

    /// Ranks to pair with every column count (r <= c kept) [default: r = c].
    #[arg(long, value_delimiter = ',')]
    pub ranks: Vec<usize>,

    /// Seeds: comma-separated values or inclusive ranges such as 0-19.
    #[arg(long, default_value = "0")]
    pub seeds: String,

    #[arg(long, value_enum, default_value_t = Scale::None)]
    pub scale: Scale,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// MNIST digit pair from <data-dir>/mnist.
    Mnist,
    /// Gaussian blobs.
    Blobs,
    /// Class-balanced draws from --data.
    File,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Source::Blobs)]
    pub source: Source,

    /// Input for --source file.
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Training sizes N (split evenly between the classes).
    #[arg(long, value_delimiter = ',', default_value = "128,256")]
    pub sizes: Vec<usize>,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "efficient,smo")]
    pub solvers: Vec<Solver>,

    #[arg(long, default_value = "0")]
    pub seeds: String,

    /// Rank reduction ratio R = r/N for the ADMM solvers.
    #[arg(long, default_value_t = 0.03125)]
    pub ratio: f64,

    /// Training accuracy that ends a run.
    #[arg(long, default_value_t = 0.95)]
    pub target: f64,

    /// Negative and positive digit for --source mnist.
    #[arg(long, value_delimiter = ',', default_value = "4,5")]
    pub digits: Vec<u8>,

    /// Feature dimension for --source blobs.
    #[arg(long, default_value_t = 20)]
    pub dim: usize,

    /// Centre separation for --source blobs.
    #[arg(long, default_value_t = 1.0)]
    pub separation: f64,

    #[command(flatten)]
    pub kernel: KernelArgs,

    #[command(flatten)]
    pub admm: AdmmArgs,

    #[command(flatten)]
    pub smo: SmoArgs,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Directory holding the IDX files [default: <data-dir>/mnist].
    #[arg(long)]
    pub mnist_dir: Option<PathBuf>,

    /// Negative and positive digit.
    #[arg(long, value_delimiter = ',', default_value = "4,5")]
    pub digits: Vec<u8>,

    /// Training images drawn per digit [default: all].
    #[arg(long)]
    pub per_class: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Training subset output.
    #[arg(long)]
    pub out: PathBuf,

    /// Optional output for every test image of the two digits.
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Blobs,
    Xor,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Blobs)]
    pub kind: SynthKind,

    /// Total samples.
    #[arg(long, default_value_t = 200)]
    pub n: usize,

    /// Feature dimension (blobs only).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    /// Distance between class centres along each axis (blobs only).
    #[arg(long, default_value_t = 2.0)]
    pub separation: f64,

    /// Fraction of labels flipped (xor only).
    #[arg(long, default_value_t = 0.0)]
    pub flip: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the sparse idx:val format instead of CSV.
    #[arg(long)]
    pub sparse: bool,

    #[arg(long)]
    pub out: PathBuf,
}
