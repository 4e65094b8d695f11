use std::path::PathBuf;
use std::process::ExitCode;

use channel_resource::harness::{cmd_analyze, cmd_sweep, cmd_verify, Generator, OutputFormat, RunConfig, Suite};
use channel_resource::measures::DistanceMeasure;
use channel_resource::objects::ClassTag;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chanres", version, about = "Coherence generating power and channel discrimination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measures, powers and class memberships of one channel spec.
    Analyze(Common),
    /// Randomized verification suite.
    Verify {
        /// prop1, thm2, prop3, thm4, cor5, prop6, thm9, qubit-closed-form or bounds
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Table of powers and game values over generated channels.
    Sweep {
        /// unitary or channel
        #[arg(long, default_value = "unitary")]
        generator: Generator,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// mio or dio; both when omitted
    #[arg(long)]
    class: Option<ClassTag>,
    /// trace, fidelity or dmax
    #[arg(long, default_value = "trace")]
    measure: DistanceMeasure,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// json or csv
    #[arg(long, default_value = "json")]
    out: OutputFormat,
    #[arg(long)]
    input: Vec<PathBuf>,
}

impl Common {
    fn config(self, generator: Generator) -> RunConfig {
        RunConfig {
            dim: self.dim,
            class: self.class,
            measure: self.measure,
            tol: self.tol,
            trials: self.trials,
            seed: self.seed,
            restarts: self.restarts,
            generator,
            format: self.out,
            inputs: self.input,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(c) => cmd_analyze(&c.config(Generator::default())),
        Command::Verify { suite, common } => cmd_verify(suite, &common.config(Generator::default())),
        Command::Sweep { generator, common } => cmd_sweep(&common.config(generator)),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
