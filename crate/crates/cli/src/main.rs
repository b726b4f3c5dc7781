use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use liouville_cli::commands::{
    analyze, catalog_export, catalog_list, coalesce, dynamics, verify, CliError, CoalesceRequest, DynamicsRequest,
    Result, Settings, Source,
};
use liouville_cli::input::{parameter_list, parse_input, rational, rational_pair};
use liouville_cli::Report;
use liouville_core::catalog::default_constants;
use liouville_core::ode::Tolerance;
use liouville_expr::Rational;

#[derive(Parser)]
#[command(
    name = "liouville",
    version,
    about = "Metrisability of second-order ODEs cubic in the first derivative"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Emit a JSON document instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Seed of the probabilistic zero test.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Absolute error tolerance per integration step.
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    /// Relative error tolerance per integration step.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide metrisability of an input file or a catalog entry.
    Analyze {
        /// ODE input file.
        file: Option<String>,
        /// Catalog entry instead of a file.
        #[arg(long, conflicts_with = "file")]
        catalog: Option<String>,
        /// Parameter values `name=p/q,...`; unspecified catalog parameters are 0.
        #[arg(long, default_value = "")]
        params: String,
        /// Base point `x0,y0` of the jet computation.
        #[arg(long)]
        base: Option<String>,
        /// Highest prolongation order.
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Check the stored metrics, solutions, Killing vectors and integrals of an entry.
    Verify {
        name: String,
        /// Select the metric case matching these parameter values.
        #[arg(long)]
        params: Option<String>,
        /// Free constants `A,B` of the metric families.
        #[arg(long)]
        constants: Option<String>,
    },
    /// Integrate an entry numerically and monitor its integrals.
    Dynamics {
        name: String,
        #[arg(long, default_value = "")]
        params: String,
        /// Initial data `x0,y0,p0`.
        #[arg(long)]
        init: String,
        /// Range `a,b` with `a = x0`; defaults to `x0, x0 + 1`.
        #[arg(long)]
        span: Option<String>,
    },
    /// Tabulate the limit of the transformed PV metric towards the PIII metric.
    Coalesce {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// Decreasing list of epsilons.
        #[arg(long, default_value = "1/100,1/1000,1/10000")]
        eps: String,
        /// Limit constants `A,B` on the gamma = 0 branch.
        #[arg(long)]
        constants: Option<String>,
    },
    /// List or export catalog entries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Print an entry as an input file (or its stored data with --json).
    Export {
        name: String,
        #[arg(long, default_value = "")]
        params: String,
    },
}

fn floats<const N: usize>(text: &str, what: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad {what} `{text}`: {e}")))?;
    v.try_into()
        .map_err(|_| CliError::Usage(format!("{what} needs {N} comma-separated numbers")))
}

fn settings(g: &Global, base: Option<(Rational, Rational)>, max_order: Option<usize>) -> Settings {
    let d = Settings::default();
    Settings {
        base,
        max_order: max_order.unwrap_or(d.max_order),
        tol: Tolerance {
            abs: g.tol_abs.unwrap_or(d.tol.abs),
            rel: g.tol_rel.unwrap_or(d.tol.rel),
        },
        seed: g.seed.unwrap_or(d.seed),
    }
}

fn emit(report: &Report, json: bool) -> u8 {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    report.status.exit_code()
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match cli.command {
        Command::Analyze {
            file,
            catalog,
            params,
            base,
            max_order,
        } => {
            let base = base.map(|b| rational_pair(&b, "base point")).transpose()?;
            let source = match (file, catalog) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(path.clone(), e))?;
                    let mut input = parse_input(&text)?;
                    input.parameters.extend(parameter_list(&params)?);
                    let opts = input.options.clone();
                    let base = match (base, opts.base) {
                        (Some(b), _) => Some(b),
                        (None, Some(b)) => Some(rational_pair(&b, "base point")?),
                        (None, None) => None,
                    };
                    let mut s = settings(g, base, max_order.or(opts.max_order));
                    s.seed = g.seed.or(opts.seed).unwrap_or(s.seed);
                    s.tol.abs = g.tol_abs.or(opts.tol_abs).unwrap_or(s.tol.abs);
                    s.tol.rel = g.tol_rel.or(opts.tol_rel).unwrap_or(s.tol.rel);
                    return Ok(emit(&analyze(&Source::File { path, input }, &s)?, g.json));
                }
                (None, Some(name)) => Source::Catalog {
                    name,
                    params: parameter_list(&params)?,
                },
                _ => return Err(CliError::Usage("give an input file or --catalog NAME".into())),
            };
            Ok(emit(&analyze(&source, &settings(g, base, max_order))?, g.json))
        }
        Command::Verify {
            name,
            params,
            constants,
        } => {
            let params = params.map(|p| parameter_list(&p)).transpose()?;
            let constants = match constants {
                Some(c) => rational_pair(&c, "constants")?,
                None => default_constants(),
            };
            Ok(emit(
                &verify(&name, params.as_ref(), &constants, &settings(g, None, None))?,
                g.json,
            ))
        }
        Command::Dynamics {
            name,
            params,
            init,
            span,
        } => {
            let init: [f64; 3] = floats(&init, "initial data")?;
            let x_end = match span {
                Some(s) => {
                    let [a, b] = floats(&s, "span")?;
                    if a != init[0] {
                        return Err(CliError::Usage(format!("the span must start at x0 = {}", init[0])));
                    }
                    b
                }
                None => init[0] + 1.0,
            };
            let req = DynamicsRequest {
                name,
                params: parameter_list(&params)?,
                init,
                x_end,
            };
            Ok(emit(&dynamics(&req, &settings(g, None, None))?, g.json))
        }
        Command::Coalesce {
            alpha,
            gamma,
            eps,
            constants,
        } => {
            let req = CoalesceRequest {
                alpha: rational(&alpha, "alpha")?,
                gamma: rational(&gamma, "gamma")?,
                epsilons: eps
                    .split(',')
                    .map(|e| rational(e, "epsilon"))
                    .collect::<std::result::Result<_, _>>()?,
                constants: match constants {
                    Some(c) => rational_pair(&c, "constants")?,
                    None => default_constants(),
                },
            };
            Ok(emit(&coalesce(&req)?, g.json))
        }
        Command::Catalog { action } => {
            match action {
                CatalogAction::List => {
                    let entries = catalog_list();
                    if g.json {
                        println!("{}", serde_json::to_string_pretty(&entries).expect("serializable"));
                    } else {
                        for e in entries {
                            let params = if e.parameters.is_empty() {
                                "-".into()
                            } else {
                                e.parameters.join(", ")
                            };
                            let metrics = if e.metric_cases.is_empty() {
                                "-".into()
                            } else {
                                e.metric_cases.join("; ")
                            };
                            println!("{:<7} parameters: {:<28} metrics: {}", e.name, params, metrics);
                        }
                    }
                }
                CatalogAction::Export { name, params } => {
                    let params: BTreeMap<String, Rational> = parameter_list(&params)?;
                    let (file, export) = catalog_export(&name, &params)?;
                    if g.json {
                        println!("{}", serde_json::to_string_pretty(&export).expect("serializable"));
                    } else {
                        print!("{file}");
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
