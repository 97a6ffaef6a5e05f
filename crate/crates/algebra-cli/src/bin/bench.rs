use clap::{Parser, Subcommand};

use algebra_cli::{
    bench_fateman, bench_ideal, bench_minpoly, bench_nf_det, bench_pearce,
    bench_resultant_tower, BenchReport, CliError,
};

#[derive(Parser)]
#[command(name = "bench", about = "Computer algebra benchmarks with oracle cross-checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Emit the report as CSV (header plus one row).
    #[arg(long, global = true)]
    csv: bool,
    /// Multiply the main size parameter by this factor (for CI scale-downs).
    #[arg(long, global = true)]
    scale: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fateman benchmark: f*(f+1), f = (1+x+y+z+t)^n over Z.
    Fateman {
        #[arg(long, default_value_t = 10)]
        n: u64,
    },
    /// Pearce benchmark: sparse f*g in 5 variables over Z.
    Pearce {
        #[arg(long, default_value_t = 4)]
        n: u64,
    },
    /// Resultant in ((GF(17^11)[y])/(y^3+3xy+1))[z].
    ResultantTower {
        #[arg(long, default_value_t = 12)]
        e: u64,
    },
    /// Determinant of a random matrix over Q[a]/(a^3+3a+1).
    NfDet {
        #[arg(long, default_value_t = 80)]
        dim: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Random products of prime ideals of bounded norm in Q[x]/(x^n+2).
    Ideal {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 400)]
        bound: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Minimal polynomial of seeded structured integer matrices.
    Minpoly {
        #[arg(long, default_value_t = 20)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
    },
}

fn scaled(v: u64, scale: Option<f64>) -> u64 {
    match scale {
        Some(s) => ((v as f64 * s).round() as u64).max(1),
        None => v,
    }
}

fn run(cli: &Cli) -> Result<BenchReport, CliError> {
    let s = cli.scale;
    match cli.cmd {
        Cmd::Fateman { n } => bench_fateman(scaled(n, s)),
        Cmd::Pearce { n } => bench_pearce(scaled(n, s)),
        Cmd::ResultantTower { e } => bench_resultant_tower(scaled(e, s)),
        Cmd::NfDet { dim, seed } => bench_nf_det(scaled(dim as u64, s) as usize, seed),
        Cmd::Ideal { n, count, bound, seed } => {
            bench_ideal(n, scaled(count as u64, s) as usize, bound, seed)
        }
        Cmd::Minpoly { dim, seed } => bench_minpoly(scaled(dim as u64, s) as usize, seed),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            if cli.json {
                println!("{}", rep.to_json());
            } else if cli.csv {
                println!("{}", rep.to_csv());
            } else {
                println!("{}", rep.to_human());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
