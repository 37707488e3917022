use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qso",
    version,
    about = "Representations of the nonstandard q-deformation U'_q(so_n)",
    long_about = "Representations of the nonstandard q-deformation U'_q(so_n).\n\n\
        Modules are written as JSON (canonical) with generator matrices B1..B{n-1} \
        acting on column vectors. Exact output is at a rational point s = q^(1/2) \
        (default s = 2, overridden by QSO_Q0); --ell evaluates at s = exp(pi i j/ell).\n\n\
        Exit status: 0 success, 2 failed mathematical precondition, \
        3 budget or tolerance exceeded, 64 usage error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the result here instead of stdout. With --format csv one file
    /// per generator is written, named <stem>.B<i>.csv.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format. CSV holds a single numeric generator matrix.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Generator printed with --format csv on stdout (1-based).
    #[arg(long, global = true)]
    pub r#gen: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Classical,
    #[value(name = "nc+")]
    NcPlus,
    #[value(name = "nc-")]
    NcMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Plus,
    Real,
}

/// Where matrices are evaluated.
#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Exact specialization point s = q^(1/2), a Gaussian rational such as
    /// 2, 3/2 or 1+2i.
    #[arg(long = "q-rational", env = "QSO_Q0", default_value = "2")]
    pub q_rational: String,
    /// Evaluate numerically at the root of unity s = exp(pi i j/ell) instead.
    #[arg(long)]
    pub ell: Option<i64>,
    /// Branch j of the root of unity.
    #[arg(long, default_value_t = 1)]
    pub branch: i64,
    /// Keep the matrices as exact rational functions of s.
    #[arg(long, conflicts_with = "ell")]
    pub symbolic: bool,
}

#[derive(Args, Debug, Clone)]
pub struct WeightArgs {
    /// Highest weight, comma-separated rationals (e.g. 2,1 or 1/2,1/2).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    /// classical: m_i = [λ_i]; nc+/nc-: m_i = ±[λ_i]_+.
    #[arg(long, value_enum, default_value_t = KindArg::Classical)]
    pub kind: KindArg,
    /// Per-coordinate signs for nonclassical weights, e.g. +,- (defaults to
    /// the sign of --kind).
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite so3 quotient of dimension 2λ+1 (m = [λ] or ±[λ]_+), or with
    /// --lambda t the weight-basis truncation for a formal λ.
    So3 {
        /// λ in (1/2)Z, or t for a formal weight q^λ = t.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_enum, default_value_t = KindArg::Classical)]
        kind: KindArg,
        /// Basis size for a formal λ.
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// so4 Verma module in its weight basis v(r1,r2), on a window.
    So4 {
        /// Two coordinates, or t for formal weights q^λ_i = t_i.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_enum, default_value_t = KindArg::Classical)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        /// Window r1 <= R1, r2 <= R2.
        #[arg(long, default_value = "3,3")]
        trunc: String,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Verma module on a truncation: basis words, Cartan matrices and an
    /// exact relation check.
    Verma {
        #[arg(long)]
        n: usize,
        /// Weight coordinates, `abstract` for free m_i, ñ_i, or t for
        /// formal weights q^λ_i = t_i.
        #[arg(long, default_value = "abstract", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_enum, default_value_t = KindArg::Classical)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        /// Caps on the number of B_2, B_4, ... per basis word.
        #[arg(long, default_value = "1")]
        truncation: String,
        /// Skip the relation check.
        #[arg(long)]
        no_check: bool,
    },
    /// Finite quotient V_m / I(λ) of a standard Verma module; its dimension
    /// and character agree with the classical Weyl formula.
    Quotient {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        weight: WeightArgs,
        /// Exact specialization point s = q^(1/2).
        #[arg(long = "q-rational", env = "QSO_Q0", default_value = "2")]
        q_rational: String,
        /// Uniform truncation cap (default: from the reflection vectors).
        #[arg(long)]
        cap: Option<u32>,
        /// Levels of the ambient truncation beyond the cap.
        #[arg(long, default_value_t = 2)]
        margin: u32,
        #[arg(long, default_value_t = 512)]
        max_dim: usize,
    },
    /// Split a nonclassical module into 2^⌊(n-1)/2⌋ summands.
    Split {
        /// Module JSON; otherwise built from --n and --lambda.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long = "q-rational", env = "QSO_Q0", default_value = "2")]
        q_rational: String,
    },
    /// The five pairwise nonequivalent simple so3 modules of a dimension.
    ClassifySo3 {
        #[arg(long)]
        dim: usize,
        #[arg(long = "q-rational", env = "QSO_Q0", default_value = "2")]
        q_rational: String,
    },
    /// Baby Verma module of dimension ell^d (d positive roots) for a
    /// generic weight, at s = exp(pi i j/ell).
    Baby {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: i64,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 1)]
        branch: i64,
        /// Rank tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// q-torus representation at a root of unity; with --decompose (so3),
    /// its highest-weight summands.
    Qtorus {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: i64,
        #[arg(long, value_enum, default_value_t = VariantArg::Plus)]
        variant: VariantArg,
        /// + or -.
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        #[arg(long, default_value_t = 1)]
        branch: i64,
        #[arg(long)]
        decompose: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Norms of weight vectors under the invariant form at a root of unity
    /// (so3, so4), for ℓ/4 >= λ_1 >= ... >= |λ_k|.
    Gram {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        ell: i64,
        #[arg(long, default_value_t = 1)]
        branch: i64,
        /// Minimum string length explored.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Residuals of all defining relations; exit 0 iff all are within --tol.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Character of a module file, or the Weyl character of --n/--lambda.
    Character {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value_t = KindArg::Classical)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
    },
    /// Compare two modules by Cartan spectra, highest-weight vectors and,
    /// when both are exact, an intertwiner.
    Match {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}
