use clap::{Parser, Subcommand};

use algebra_cli::demo_torsion;

#[derive(Parser)]
#[command(name = "demo", about = "Interactive demonstrations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit the result as JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether an element of Q[x]/(f) is a root of unity.
    Torsion {
        /// Defining polynomial in x, e.g. "x^2+1".
        #[arg(long)]
        field: String,
        /// Element expression in the field generator x.
        #[arg(long)]
        elem: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Torsion { field, elem } => demo_torsion(field, elem),
    };
    match res {
        Ok(rep) => {
            if cli.json {
                println!("{}", rep.to_json());
            } else {
                println!("{}", rep.fingerprint);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
