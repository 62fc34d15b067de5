use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use grieferlens_core::config::DetectorConfig;
use grieferlens_service::{router, Ingested, Store};

#[derive(Parser)]
#[command(name = "grieferlens", about = "Griefer detection and annotation service")]
struct Cli {
    /// Data directory holding ingested matches and annotations.
    #[arg(long, global = true, default_value = "data")]
    data: PathBuf,
    /// Detector configuration (JSON); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the HTTP API. Port 0 picks a free port.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Validate and store telemetry files.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the detector summaries of a stored match.
    Report { match_id: String },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<DetectorConfig> {
    match path {
        None => Ok(DetectorConfig::default()),
        Some(p) => {
            let raw = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            DetectorConfig::from_json(&raw).with_context(|| format!("loading {}", p.display()))
        }
    }
}

async fn serve(store: Store, host: &str, port: u16) -> anyhow::Result<()> {
    let addr: SocketAddr = format!("{host}:{port}").parse().with_context(|| format!("bad address {host}:{port}"))?;
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    let local = listener.local_addr()?;
    // Printed on stdout so scripts can pick up an ephemeral port.
    println!("listening on http://{local}");
    std::io::stdout().flush()?;
    tracing::info!(%local, config_hash = store.config_hash(), "serving");
    axum::serve(listener, router(Arc::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let cli = Cli::parse();
    let config = load_config(cli.config.as_deref())?;
    let store = Store::open(&cli.data, config).with_context(|| format!("opening {}", cli.data.display()))?;
    match cli.command {
        Command::Serve { port, host } => {
            tokio::runtime::Runtime::new()?.block_on(serve(store, &host, port))?;
        }
        Command::Ingest { files } => {
            let mut failed = 0;
            for f in &files {
                let outcome = std::fs::read(f)
                    .with_context(|| format!("reading {}", f.display()))
                    .and_then(|raw| store.ingest(&raw).map_err(anyhow::Error::from));
                match outcome {
                    Ok((id, Ingested::Created)) => println!("{id}\tcreated"),
                    Ok((id, Ingested::Unchanged)) => println!("{id}\tunchanged"),
                    Err(e) => {
                        eprintln!("{}: {e:#}", f.display());
                        failed += 1;
                    }
                }
            }
            if failed > 0 {
                bail!("{failed} of {} files failed", files.len());
            }
        }
        Command::Report { match_id } => {
            let entry = store.get(&match_id).map_err(|e| anyhow::anyhow!(e.message))?;
            let doc = grieferlens_core::report::SummaryDocument {
                match_id: entry.telemetry.match_id(),
                config_hash: store.config_hash(),
                players: &entry.summaries,
            };
            println!("{}", doc.to_json_pretty());
        }
    }
    Ok(())
}
