use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use corrida_oscillator::{analytic_delta_max, delta_max, simulate, OscParams};

#[derive(Parser)]
#[command(about = "Desk-on-two-rods oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Physical {
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Half the distance between the rods, m.
    #[arg(long = "half-span", default_value_t = 0.5)]
    half_span: f64,
    #[arg(long, default_value_t = 0.2)]
    mu: f64,
    #[arg(long, default_value_t = 9.81)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long = "rod-mass")]
    rod_inertia_mass: Option<f64>,
}

impl Physical {
    fn params(&self, delta: f64) -> OscParams {
        OscParams {
            mass: self.mass,
            half_span: self.half_span,
            mu: self.mu,
            g: self.g,
            delta,
            threshold: self.threshold,
            rod_inertia_mass: self.rod_inertia_mass,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the trajectory as CSV (t, x, v, phase).
    Simulate {
        #[command(flatten)]
        physical: Physical,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long = "t-max", default_value_t = 10.0)]
        t_max: f64,
    },
    /// Print the largest safe delay, simulated and analytic.
    DeltaMax {
        #[command(flatten)]
        physical: Physical,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Simulate {
            physical,
            delta,
            dt,
            t_max,
        } => simulate(&physical.params(delta), dt, t_max).map(|t| print!("{}", t.to_csv())),
        Command::DeltaMax { physical, tol } => {
            let p = physical.params(0.0);
            delta_max(&p, tol).map(|d| {
                println!("delta_max_simulated,{d}");
                println!("delta_max_analytic,{}", analytic_delta_max(&p));
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
