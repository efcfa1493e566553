use clap::{Args, Parser, Subcommand};
use filtiso::cli::{self, Command, JobSpec};
use std::io::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "filtiso",
    version,
    about = "Exact arithmetic for filtered isocrystals: strata, admissibility, slopes"
)]
struct Argv {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Io {
    /// Path to a JSON document, inline JSON, or - for standard input
    #[arg(long)]
    input: String,
    /// Emit a machine-readable JSON document instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stratum coweight, generic degrees, and thresholds of a filtration type
    #[command(name = "mu-of-nu")]
    MuOfNu(Io),
    /// Test a point of the adjoint quotient against a stratum
    Stratum {
        #[command(flatten)]
        io: Io,
        /// Test the locally closed stratum instead of its closure
        #[arg(long, conflicts_with = "closed")]
        open: bool,
        /// Test the closure (the default)
        #[arg(long)]
        closed: bool,
    },
    /// Retract coefficient valuations onto the dominant chamber
    #[command(name = "newton-polygon")]
    NewtonPolygon(Io),
    /// Decide weak admissibility of a filtered isocrystal
    #[command(name = "check-wa")]
    CheckWa(Io),
    /// Harder-Narasimhan slope filtration of a filtered isocrystal
    Hn(Io),
    /// Slope decomposition of a Frobenius
    #[command(name = "slope-decomp")]
    SlopeDecomp(Io),
    /// Characteristic-coefficient valuations and their retraction
    #[command(name = "adjoint-image")]
    AdjointImage(Io),
    /// Sweep root-valuation cells and verify the existence criterion on each
    #[command(name = "verify-theorem")]
    VerifyTheorem {
        /// Residue prime
        #[arg(short, long, default_value_t = 5)]
        p: u64,
        /// Rank of the isocrystal
        #[arg(short, long, default_value_t = 2)]
        d: usize,
        /// Ramification degree of the coefficient field
        #[arg(short, long, default_value_t = 1)]
        e: u32,
        /// Residue degree of the base
        #[arg(short, long, default_value_t = 1)]
        f: u32,
        /// Run the full acceptance grid, ignoring --d/--e/--f
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Witness attempts per predicted-positive cell
        #[arg(long, default_value_t = 64)]
        budget: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in reference cases and report each check
    Examples {
        #[arg(short, long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn job_with_io(command: Command, io: Io) -> JobSpec {
    let mut job = JobSpec::new(command);
    job.input = Some(io.input);
    job.json = io.json;
    job
}

fn main() -> ExitCode {
    let argv = Argv::parse();
    let job = match argv.command {
        Cmd::MuOfNu(io) => job_with_io(Command::MuOfNu, io),
        Cmd::Stratum { io, open, .. } => {
            let mut job = job_with_io(Command::Stratum, io);
            job.closed = !open;
            job
        }
        Cmd::NewtonPolygon(io) => job_with_io(Command::NewtonPolygon, io),
        Cmd::CheckWa(io) => job_with_io(Command::CheckWa, io),
        Cmd::Hn(io) => job_with_io(Command::Hn, io),
        Cmd::SlopeDecomp(io) => job_with_io(Command::SlopeDecomp, io),
        Cmd::AdjointImage(io) => job_with_io(Command::AdjointImage, io),
        Cmd::VerifyTheorem {
            p,
            d,
            e,
            f,
            grid,
            seed,
            budget,
            json,
        } => {
            let mut job = JobSpec::new(Command::VerifyTheorem);
            job.sweep.p = p;
            job.sweep.d = d;
            job.sweep.e = e;
            job.sweep.f = f;
            job.sweep.grid = grid;
            job.seed = seed;
            job.budget = budget;
            job.json = json;
            job
        }
        Cmd::Examples { p, seed, json } => {
            let mut job = JobSpec::new(Command::Examples);
            job.sweep.p = p;
            job.seed = seed;
            job.json = json;
            job
        }
    };
    let outcome = cli::run(&job);
    print!("{}", outcome.stdout);
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.exit.clamp(0, 255) as u8)
}
