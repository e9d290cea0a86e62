use clap::Parser;
use nb_cli::commands::{dispatch, Command};

/// Ground states of -dΔu + u = u(e^{u²}-1) with Neumann conditions:
/// limit profile, disk solves, d-sweeps and the sharpness table.
#[derive(Parser)]
#[command(name = "nb", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nb: {e}");
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}
