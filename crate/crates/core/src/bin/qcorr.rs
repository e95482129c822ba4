use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcorr::campaign::{self, CampaignConfig, PlaneX, DEFAULT_GRID};
use qcorr::extremal::Measure;
use qcorr::{io as state_io, measures, Error, Result};

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Entropic quantum correlations of two-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every measure for one JSON state file.
    Report {
        file: PathBuf,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded campaign of random states, one CSV row each.
    Sample(Campaign),
    /// Extremal curve of a measure against entropy.
    Boundary {
        #[arg(long, default_value = "discord")]
        measure: Measure,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scatter data: random samples, family overlays and the boundary.
    Plane {
        /// Horizontal axis: S or D_two_way.
        #[arg(long, default_value = "S")]
        x: PlaneX,
        #[command(flatten)]
        campaign: Campaign,
    },
    /// Run the invariant suite over a campaign.
    Check(Campaign),
}

#[derive(Args)]
struct Campaign {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 10000, or 2000000 with --long-run.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4))]
    rank: Option<u64>,
    #[arg(long, default_value = "amid")]
    measure: Measure,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    long_run: bool,
}

impl From<Campaign> for CampaignConfig {
    fn from(c: Campaign) -> Self {
        CampaignConfig {
            count: c.count,
            seed: c.seed,
            rank: c.rank.map(|r| r as usize),
            out: c.out,
            measure: c.measure,
            grid: c.grid,
            jobs: c.jobs,
            long_run: c.long_run,
        }
    }
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Report { file, json, out } => {
            let rho = state_io::read_state(&file)?;
            let report = measures::full_report(&rho)?;
            let text = serde_json::to_string_pretty(&report)?;
            if let Some(p) = out {
                std::fs::write(p, text.clone() + "\n")?;
            }
            if json {
                println!("{text}");
            } else {
                print!("{}", report.table());
            }
        }
        Command::Sample(c) => {
            let cfg = CampaignConfig::from(c);
            let mut w = sink(cfg.out.as_ref())?;
            campaign::write_sample_csv(&cfg, &mut w)?;
            w.flush()?;
        }
        Command::Boundary { measure, grid, out } => {
            let text = campaign::boundary_csv(measure, grid)?;
            let mut w = sink(out.as_ref())?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        Command::Plane { x, campaign: c } => {
            let cfg = CampaignConfig::from(c);
            let mut w = sink(cfg.out.as_ref())?;
            campaign::write_plane_csv(&cfg, x, &mut w)?;
            w.flush()?;
        }
        Command::Check(c) => {
            let outcomes = campaign::run_checks(&CampaignConfig::from(c))?;
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(3);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let reason = match &e {
                Error::InvalidState(r) => format!(" (reason: {})", r.reason()),
                _ => String::new(),
            };
            eprintln!("error: {e}{reason}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
