use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ptgrid_core::analysis::{self, format_decimal};
use ptgrid_core::{
    check_existence, load_scenario, parse_scenario, solve_eut, solve_pt, Error, Scenario,
    SweepParameter, SweepSpec, Theory, REFERENCE_SCENARIO,
};

mod exit {
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const VALIDATION: u8 = 4;
    pub const EXISTENCE: u8 = 5;
    pub const NUMERIC: u8 = 6;
    pub const IO: u8 = 7;
}

#[derive(Parser)]
#[command(name = "ptgrid", version, about = "Storage charge/discharge equilibria under EUT and prospect theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// Scenario file (TOML). Defaults to the bundled reference scenario.
    scenario: Option<PathBuf>,

    /// Override the Prelec weighting parameter.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the proper-equilibrium existence bounds for both players.
    Check {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Solve the mixed equilibrium under EUT, PT or both.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = TheoryArg::Both)]
        theory: TheoryArg,
        /// Print machine-readable CSV instead of a report.
        #[arg(long)]
        csv: bool,
    },
    /// Sweep one parameter and write equilibrium, revenue and load as CSV.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TheoryArg::Both)]
        theory: TheoryArg,
        /// Move only customer 1's selling price in a sell-price sweep.
        #[arg(long)]
        uncoupled: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    Eut,
    Pt,
    Both,
}

impl TheoryArg {
    fn theories(self) -> Vec<Theory> {
        match self {
            TheoryArg::Eut => vec![Theory::Eut],
            TheoryArg::Pt => vec![Theory::Pt],
            TheoryArg::Both => vec![Theory::Eut, Theory::Pt],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    /// Customers' selling price b.
    #[value(name = "sell-price", alias = "b")]
    SellPrice,
    /// Cheapest LMP tier price c (whole ladder shifts).
    #[value(name = "lmp-base", alias = "c")]
    LmpBase,
    /// Regulation penalty factor.
    Beta,
}

impl From<ParamArg> for SweepParameter {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::SellPrice => SweepParameter::SellPrice,
            ParamArg::LmpBase => SweepParameter::LmpBasePrice,
            ParamArg::Beta => SweepParameter::Beta,
        }
    }
}

/// A failure that maps to a specific exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => exit::PARSE,
            Error::Invalid { .. }
            | Error::Parameter { .. }
            | Error::ProfileLength { .. }
            | Error::TooManyPlayers { .. }
            | Error::UnsupportedPlayerCount { .. } => exit::VALIDATION,
            Error::NoProperEquilibrium { .. }
            | Error::NoProperIndifference { .. }
            | Error::DegenerateGame { .. }
            | Error::EmptySweep => exit::EXISTENCE,
            Error::Numeric(_) => exit::NUMERIC,
            Error::Io(_) | Error::Csv(_) => exit::IO,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: exit::IO,
            message: e.to_string(),
        }
    }
}

fn load(args: &ScenarioArgs) -> Result<Scenario, Failure> {
    let scenario = match &args.scenario {
        Some(path) => load_scenario(path).map_err(|e| match e {
            Error::Io(io) => Failure {
                code: exit::IO,
                message: format!("{}: {io}", path.display()),
            },
            other => other.into(),
        })?,
        None => parse_scenario(REFERENCE_SCENARIO)?,
    };
    Ok(match args.alpha {
        Some(alpha) => scenario.with_prelec_alpha(alpha)?,
        None => scenario,
    })
}

fn cmd_check(args: &ScenarioArgs, out: &mut impl Write) -> Result<(), Failure> {
    let scenario = load(args)?;
    let report = check_existence(&scenario)?;
    for (k, p) in report.players.iter().enumerate() {
        writeln!(
            out,
            "player {}: lower {} < b*S {} < upper {}  {}",
            k + 1,
            format_decimal(p.lower),
            format_decimal(p.value),
            format_decimal(p.upper),
            if p.satisfied { "satisfied" } else { "VIOLATED" }
        )?;
    }
    if report.all_satisfied() {
        writeln!(out, "unique proper mixed equilibrium exists")?;
        Ok(())
    } else {
        Err(Failure {
            code: exit::EXISTENCE,
            message: "existence condition violated: no proper mixed equilibrium".into(),
        })
    }
}

fn cmd_solve(args: &ScenarioArgs, theory: TheoryArg, csv: bool, out: &mut impl Write) -> Result<(), Failure> {
    let scenario = load(args)?;
    let mut results = Vec::new();
    for t in theory.theories() {
        let result = match t {
            Theory::Eut => solve_eut(&scenario)?,
            Theory::Pt => solve_pt(&scenario)?,
        };
        let revenue = analysis::revenue(&result.mixed, &scenario)?;
        let load = analysis::expected_load(&result.mixed, scenario.customers());
        results.push((result, revenue, load));
    }

    if csv {
        writeln!(out, "theory,p1,p2,residual1,residual2,revenue,load")?;
    }
    for (r, revenue, load) in &results {
        let p = r.mixed.probabilities();
        let res = &r.indifference_residuals;
        if csv {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.theory,
                format_decimal(p[0]),
                format_decimal(p[1]),
                format_decimal(res[0]),
                format_decimal(res[1]),
                format_decimal(*revenue),
                format_decimal(*load)
            )?;
        } else {
            writeln!(out, "[{}]", r.theory)?;
            writeln!(out, "  p1 (charge)        = {}", format_decimal(p[0]))?;
            writeln!(out, "  p2 (charge)        = {}", format_decimal(p[1]))?;
            writeln!(out, "  residual1          = {:e}", res[0])?;
            writeln!(out, "  residual2          = {:e}", res[1])?;
            writeln!(out, "  revenue            = {}", format_decimal(*revenue))?;
            writeln!(out, "  expected load kWh  = {}", format_decimal(*load))?;
        }
    }
    Ok(())
}

fn cmd_sweep(args: &ScenarioArgs, spec: SweepSpec, out_path: Option<&PathBuf>) -> Result<(), Failure> {
    let scenario = load(args)?;
    let rows = analysis::sweep(&spec, &scenario)?;
    let summary = format!(
        "feasible points: {} of {}",
        analysis::feasible_count(&rows),
        rows.len()
    );
    match out_path {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure {
                code: exit::IO,
                message: format!("{}: {e}", path.display()),
            })?;
            analysis::emit_csv(&rows, BufWriter::new(file))?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            analysis::emit_csv(&rows, io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Check { scenario } => cmd_check(&scenario, &mut out),
        Command::Solve { scenario, theory, csv } => cmd_solve(&scenario, theory, csv, &mut out),
        Command::Sweep {
            scenario,
            param,
            start,
            stop,
            steps,
            out: out_path,
            theory,
            uncoupled,
        } => {
            drop(out);
            let spec = SweepSpec {
                theories: theory.theories(),
                coupled_sell_price: !uncoupled,
                ..SweepSpec::new(param.into(), start, stop, steps)
            };
            spec.validate()?;
            cmd_sweep(&scenario, spec, out_path.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(exit::USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
