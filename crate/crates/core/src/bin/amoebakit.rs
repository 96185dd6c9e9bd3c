use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use amoebakit::cli::{self, CliError, Outcome, RunConfig, TransformSource};
use amoebakit::lpoly::ExponentVector;

#[derive(Parser)]
#[command(name = "amoebakit", version, about = "Amoebas, coamoebas and tropical curves of Laurent polynomials")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Raster side length in pixels.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// `auto` or `xmin,xmax,ymin,ymax` in Log coordinates.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Torus quadrature grid size for the Ronkin constants.
    #[arg(long, global = true)]
    quad: Option<usize>,
    /// Comma separated values of t, e.g. `e^-1,e^-2,e^-3,e^-4`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_schedule: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out`, or `$AMOEBAKIT_OUT`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Corner locus of log|a|, dual subdivision and balancing report.
    Tropical {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// Override a tropical coefficient: `i,j=value`.
        #[arg(long = "coeff", allow_hyphen_values = true)]
        coeffs: Vec<String>,
        /// Break height ties lexicographically.
        #[arg(long)]
        perturb: bool,
        #[arg(long, hide = true)]
        debug_break_balancing: bool,
    },
    /// Amoeba raster and complement components with their orders.
    Amoeba {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Ronkin constants and the spine.
    Spine {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Coamoeba raster and its volume.
    Coamoeba {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Convergence of rescaled amoebas of the spine family to the limit curve.
    Deform {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Component count against the number of Newton polygon vertices.
    VerifySolid {
        #[arg(allow_hyphen_values = true)]
        polys: Vec<String>,
        /// Check N random maximally sparse polynomials instead.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Polyhedral coamoeba of 1 + z_1 + ... + z_n.
    StandardCoamoeba {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Monte Carlo samples for n = 3.
        #[arg(long, default_value_t = 400_000)]
        samples: usize,
    },
    /// Standard coamoeba under a monomial change of variables.
    TransformCoamoeba {
        /// Numerator of the inverse transpose, rows separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        inverse_transpose: Option<String>,
        #[arg(long, default_value_t = 1)]
        denominator: i64,
        #[arg(long, allow_hyphen_values = true)]
        translation: Option<String>,
        /// Trinomial to derive the transform from and compare with.
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
    },
    /// Pieces of the second coamoeba missing from the first.
    ExtraPieces {
        #[arg(allow_hyphen_values = true)]
        sparse: String,
        #[arg(allow_hyphen_values = true)]
        deformed: String,
    },
    /// Valuation, w and the W-images of the roots of z^k + a0.
    PuiseuxDemo {
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Terms `exponent:re[:im]` separated by commas.
        #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
        a0: String,
    },
}

fn config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Ok(dir) = std::env::var("AMOEBAKIT_OUT") {
        cfg.out = PathBuf::from(dir);
    }
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        cfg.apply_file_text(&text)?;
    }
    if let Some(r) = common.resolution {
        cfg.resolution = r;
    }
    if let Some(w) = &common.window {
        cfg.window = cli::parse_window(w)?;
    }
    if let Some(q) = common.quad {
        cfg.quad_n = q;
    }
    if let Some(t) = &common.t_schedule {
        cfg.t_schedule = cli::parse_schedule(t)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn parse_coeff(s: &str) -> Result<(ExponentVector, f64), CliError> {
    let err = || CliError::Parse(format!("expected i,j=value, got {s:?}"));
    let (e, v) = s.split_once('=').ok_or_else(err)?;
    let exps: Vec<i64> = e.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| err())?;
    Ok((ExponentVector::new(exps), v.trim().parse().map_err(|_| err())?))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = config(&cli.common)?;
    match cli.command {
        Command::Tropical { poly, coeffs, perturb, debug_break_balancing } => {
            let coeffs = coeffs.iter().map(|s| parse_coeff(s)).collect::<Result<Vec<_>, _>>()?;
            cli::cmd_tropical(&poly, &coeffs, perturb, debug_break_balancing, &cfg)
        }
        Command::Amoeba { poly } => cli::cmd_amoeba(&poly, &cfg),
        Command::Spine { poly } => cli::cmd_spine(&poly, &cfg),
        Command::Coamoeba { poly } => cli::cmd_coamoeba(&poly, &cfg),
        Command::Deform { poly } => cli::cmd_deform(&poly, &cfg),
        Command::VerifySolid { polys, random } => match random {
            Some(n) => cli::cmd_verify_random(n, &cfg),
            None if polys.is_empty() => Err(CliError::Parse("give polynomials or --random N".into())),
            None => cli::cmd_verify_solid(&polys, &cfg),
        },
        Command::StandardCoamoeba { n, samples } => cli::cmd_standard_coamoeba(n, samples, &cfg),
        Command::TransformCoamoeba { inverse_transpose, denominator, translation, poly } => {
            let source = match (poly, inverse_transpose) {
                (Some(p), None) => TransformSource::Polynomial(p),
                (None, Some(m)) => {
                    let numerator = cli::parse_matrix(&m)?;
                    let translation = match translation {
                        Some(t) => t
                            .split(',')
                            .map(|x| x.trim().parse::<f64>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| CliError::Parse(format!("bad translation {t:?}")))?,
                        None => vec![0.0; numerator.len()],
                    };
                    TransformSource::InverseTranspose { numerator, denominator, translation }
                }
                _ => return Err(CliError::Parse("give exactly one of --poly or --inverse-transpose".into())),
            };
            cli::cmd_transform_coamoeba(&source, &cfg)
        }
        Command::ExtraPieces { sparse, deformed } => cli::cmd_extra_pieces(&sparse, &deformed, &cfg),
        Command::PuiseuxDemo { k, a0 } => cli::cmd_puiseux_demo(k, &a0, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
