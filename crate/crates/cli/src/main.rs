//! `ddgeom`: generate lattice configurations and verify curvature, holonomy
//! and Lax-pair identities on them.
//!
//! Exit codes: 0 on success or verification pass, 1 on verification failure,
//! 2 on usage, input or IO errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod paths;
mod report;

use report::Format;

const AFTER_HELP: &str = "\
Directions on the command line are 1-based. Paths are comma-separated steps
such as \"x+,t+,x-,t-\" or \"1+,2+,1-,2-\"; on 2D lattices the letters are x and t,
otherwise x, y, z, t.

Reports go to stdout. JSON reports carry schema_version, command, inputs, tol,
pass (verification commands only), summary and an optional table. CSV reports
print `key,value` rows (inputs prefixed with `input.`), then a blank line and
the table with a header row. Table columns by command:
  plaq       site,row,col,re,im          (entries of W_mu_nu)
  chern      site,re,im                  (Chern density per site)
  limit      L,a,im_error,re_error,phase_error
  lax        x,t,additive,multiplicative,a_form   (max entry per plaquette)
  transport  col,re,im                   (transported row vector)

Exit codes: 0 success or verification pass, 1 verification fail, 2 usage/IO error.";

#[derive(Parser, Debug)]
#[command(name = "ddgeom", version, about = "Difference discrete connections, curvature and Lax pairs on lattices", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Verification tolerance.
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKindArg {
    RandomGl,
    RandomU1,
    PureGauge,
    ConstantFlux,
    LaxPureGauge,
    GaugeTransform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalarArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Binary,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    /// A = 0.
    Zero,
    /// Uniform field strength 2πq on the torus.
    Uniform,
    /// Smooth periodic trigonometric potential.
    Trig,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a configuration file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKindArg,
        /// Lattice extents, e.g. 3,3.
        #[arg(long)]
        dims: String,
        /// Fiber dimension.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value = "real")]
        scalar: ScalarArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flux quanta for constant-flux.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        q: i32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        encoding: EncodingArg,
    },
    /// Apply a gauge transformation to a link or site configuration.
    Gauge {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Site-field config holding g; drawn from --seed when absent.
        #[arg(long)]
        gauge: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "binary")]
        encoding: EncodingArg,
    },
    /// Curvature from B = U - I, from the two-form d_D B + B^B and from U; checks they agree.
    Curv {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Plaquette variables W_mu_nu.
    Plaq {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        mu: usize,
        #[arg(long, default_value_t = 2)]
        nu: usize,
        /// Restrict to one site, e.g. 0,0.
        #[arg(long)]
        site: Option<String>,
    },
    /// Check that every plaquette equals the identity.
    Flat {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Form-level Bianchi residual d_D F - F^B + B^F.
    Bianchi {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Abelian Chern density.
    Chern {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// The 2k directions to contract, e.g. 1,2,3,4; defaults to the first 2k.
        #[arg(long)]
        dirs: Option<String>,
        /// Restrict to one site.
        #[arg(long)]
        site: Option<String>,
    },
    /// U(1) topological charge of a plane.
    Charge {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        mu: usize,
        #[arg(long, default_value_t = 2)]
        nu: usize,
        /// Site the plane passes through; defaults to the origin.
        #[arg(long)]
        base: Option<String>,
    },
    /// Continuum-limit scan of plaquettes against a smooth U(1) field strength.
    Limit {
        #[arg(long, value_enum, default_value = "trig")]
        potential: PotentialArg,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        q: i32,
        #[arg(long = "L-list", default_value = "8,16,32,64")]
        l_list: String,
        /// Smallest accepted log-log slope of the Im W error.
        #[arg(long, default_value_t = 1.8)]
        min_slope: f64,
    },
    /// Lax-pair consistency and path independence.
    Lax {
        #[arg(long = "in")]
        input: PathBuf,
        /// Target site for path independence; defaults to the far corner,
        /// clipped so that x + t <= 16.
        #[arg(long)]
        target: Option<String>,
    },
    /// Parallel-transport a unit row vector along a path.
    Transport {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        path: String,
        /// Start site; defaults to the origin.
        #[arg(long)]
        from: Option<String>,
        /// 1-based index of the unit vector.
        #[arg(long, default_value_t = 1)]
        component: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match commands::run(&cli.command, &cli.common) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = report.write(&mut out, cli.common.format) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(2);
            }
            match report.pass {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
