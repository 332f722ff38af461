use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;

use corrida_service::{Service, ServiceConfig};

#[derive(Parser)]
#[command(name = "corrida-serve", about = "Game session server")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory for per-session move logs; in-memory only when absent.
    #[arg(long)]
    store: Option<PathBuf>,
    /// Idle time before a session expires, in hours.
    #[arg(long, default_value_t = 24.0)]
    idle_hours: f64,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let idle_timeout = Duration::from_secs_f64(args.idle_hours * 3600.0);
    let service = Service::open(ServiceConfig {
        store: args.store,
        idle_timeout,
    })?;
    service.spawn_expiry((idle_timeout / 10).clamp(Duration::from_secs(1), Duration::from_secs(600)));
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, service.router()).await?;
    Ok(())
}
