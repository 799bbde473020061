use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "spdcfc",
    version,
    about = "Fiber-coupling efficiency of SPDC photon pairs: evaluate, sweep, optimize, cross-check"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form efficiency for one configuration.
    Eval(EvalArgs),
    /// Efficiency over a crystal-length grid and a list of magnifications (CSV or JSON).
    Sweep(SweepArgs),
    /// Maximize the efficiency over mu, rp or xi.
    Optimize(OptimizeArgs),
    /// Compare the closed form with the numerical overlap integrals.
    Oracle(OracleArgs),
    /// Walk-off set, alpha/beta and (with index data) group-delay parameters.
    Params(ParamsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextOrJson {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CsvOrJson {
    Csv,
    Json,
}

/// Walk-offs given directly or derived from index data.
#[derive(Debug, Clone, Default, Args)]
pub struct WalkoffArgs {
    /// Pump walk-off |M_p|.
    #[arg(long = "Mp")]
    pub m_p: Option<f64>,
    /// Extraordinary-photon walk-off |M|.
    #[arg(long = "M")]
    pub m: Option<f64>,
    /// |Q| / K̄.
    #[arg(long = "QK")]
    pub q_over_k: Option<f64>,
    /// Sellmeier JSON file, or `bbo` for the bundled table
    /// [default location: $SPDCFC_SELLMEIER_PATH].
    #[arg(long)]
    pub sellmeier: Option<String>,
    /// Crystal cut angle in degrees (default 42.9, a BBO default).
    #[arg(long = "cut-deg")]
    pub cut_deg: Option<f64>,
    /// External cone-intersection angle in degrees (default 3.5).
    #[arg(long = "cone-deg")]
    pub cone_deg: Option<f64>,
    /// Pump wavelength in nm (default 415; pairs at twice this).
    #[arg(long = "pump-nm")]
    pub pump_nm: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Crystal length in mm.
    #[arg(long = "L-mm", conflicts_with = "length_um")]
    pub length_mm: Option<f64>,
    /// Crystal length in um.
    #[arg(long = "L-um")]
    pub length_um: Option<f64>,
    /// Pump field radius r_p in um.
    #[arg(long = "rp-um", conflicts_with = "pump_diameter_um")]
    pub rp_um: Option<f64>,
    /// Pump spot diameter in um (r_p = d / 2√2).
    #[arg(long = "pump-diameter-um")]
    pub pump_diameter_um: Option<f64>,
    /// Fiber mode field radius w in um.
    #[arg(long = "w-um", conflicts_with = "mfd_um")]
    pub w_um: Option<f64>,
    /// Fiber mode-field diameter in um (w = MFD / 2√2).
    #[arg(long = "mfd-um")]
    pub mfd_um: Option<f64>,
    /// Inverse magnification of the coupling optics.
    #[arg(long, conflicts_with_all = ["f_mm", "dbl_mm"])]
    pub mu: Option<f64>,
    /// Coupling-lens focal length in mm (with --dbl-mm).
    #[arg(long = "f-mm", requires = "dbl_mm")]
    pub f_mm: Option<f64>,
    /// Crystal-to-lens distance in mm (with --f-mm).
    #[arg(long = "dbl-mm", requires = "f_mm")]
    pub dbl_mm: Option<f64>,
    #[command(flatten)]
    pub walkoffs: WalkoffArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextOrJson,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Crystal lengths `lo:hi:step` in mm.
    #[arg(long = "L-range")]
    pub l_range: String,
    /// Inverse magnifications, comma separated.
    #[arg(long = "mu", value_delimiter = ',', required = true, num_args = 1..)]
    pub mu: Vec<f64>,
    #[command(flatten)]
    pub experiment: SweepExperimentArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: CsvOrJson,
}

/// Experiment flags without crystal length and magnification.
#[derive(Debug, Clone, Args)]
pub struct SweepExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "rp-um", conflicts_with = "pump_diameter_um")]
    pub rp_um: Option<f64>,
    #[arg(long = "pump-diameter-um")]
    pub pump_diameter_um: Option<f64>,
    #[arg(long = "w-um", conflicts_with = "mfd_um")]
    pub w_um: Option<f64>,
    #[arg(long = "mfd-um")]
    pub mfd_um: Option<f64>,
    #[command(flatten)]
    pub walkoffs: WalkoffArgs,
}

impl From<SweepExperimentArgs> for ExperimentArgs {
    fn from(a: SweepExperimentArgs) -> Self {
        ExperimentArgs {
            config: a.config,
            rp_um: a.rp_um,
            pump_diameter_um: a.pump_diameter_um,
            w_um: a.w_um,
            mfd_um: a.mfd_um,
            walkoffs: a.walkoffs,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptVar {
    Mu,
    Rp,
    Xi,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long = "var", value_enum)]
    pub var: OptVar,
    /// Search interval `lo:hi`.
    #[arg(long)]
    pub bounds: String,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextOrJson,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Gauss–Legendre nodes along the crystal (default 64).
    #[arg(long = "n-tau")]
    pub n_tau: Option<usize>,
    /// Transverse points per axis (default 96).
    #[arg(long = "n-trans")]
    pub n_trans: Option<usize>,
    /// Transverse half-width in units of max(w mu, r_p) (default 6).
    #[arg(long)]
    pub extent: Option<f64>,
    /// Target relative error of the refinement estimate (default 1e-5).
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextOrJson,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub walkoffs: WalkoffArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextOrJson,
}
