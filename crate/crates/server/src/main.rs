use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use mlfq_sim_server::{serve, Options};

#[derive(Parser)]
#[command(
    name = "mlfq-sim-server",
    version,
    about = "HTTP+JSON service for the MLFQ simulator"
)]
struct Args {
    #[arg(long, env = "MLFQ_SIM_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "MLFQ_SIM_HOST", default_value = "127.0.0.1")]
    host: IpAddr,
    /// Directory holding the web UI bundle (index.html and assets).
    #[arg(long, env = "MLFQ_SIM_UI_DIR")]
    ui_dir: Option<PathBuf>,
    /// Extra canned scenarios, one `*.txt` file each.
    #[arg(long, env = "MLFQ_SIM_SCENARIO_DIR")]
    scenario_dir: Option<PathBuf>,
    /// Seconds a session may sit idle before it is dropped.
    #[arg(long, default_value_t = 3600)]
    idle_timeout: u64,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let addr = SocketAddr::new(args.host, args.port);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let opts = Options {
        idle_timeout: Duration::from_secs(args.idle_timeout.max(1)),
        ui_dir: args.ui_dir,
        scenario_dir: args.scenario_dir,
    };
    tokio::select! {
        r = serve(listener, opts) => r,
        _ = tokio::signal::ctrl_c() => Ok(()),
    }
}
