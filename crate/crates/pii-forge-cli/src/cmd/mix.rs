//! `mix`: emit curriculum batch manifests from a schedule.

use std::path::PathBuf;

use clap::Args;
use pii_forge::config::load_schedule;
use pii_forge::jsonl;
use pii_forge::mixer::{simulate, Mixer, MixerError};

use super::common::open_output;
use super::{CliError, CommandOutcome};

#[derive(Debug, Args)]
pub struct MixArgs {
    /// Mix schedule document.
    #[arg(long, value_name = "FILE")]
    pub schedule: PathBuf,
    /// Number of steps to emit, starting at step 0.
    #[arg(long)]
    pub steps: u64,
    /// Master seed; overrides the schedule file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Only report per-stream selection statistics, without reading
    /// stream manifests or drawing item ids.
    #[arg(long, default_value_t = false)]
    pub simulate: bool,
    /// Output JSONL (manifests) or JSON (statistics); stdout when absent.
    #[arg(long = "out", value_name = "FILE")]
    pub output: Option<PathBuf>,
}

fn mixer_error(e: MixerError) -> CliError {
    match e {
        MixerError::InvalidSchedule(_) => CliError::config(e),
        MixerError::ExhaustedStream { .. } | MixerError::Manifest { .. } => CliError::data(e),
    }
}

pub fn run(args: &MixArgs) -> Result<CommandOutcome, CliError> {
    let schedule = load_schedule(&args.schedule, args.seed).map_err(CliError::config)?;
    let mut writer = open_output(args.output.as_deref())?;
    use std::io::Write;

    if args.simulate {
        let stats = simulate(&schedule, args.steps).map_err(mixer_error)?;
        serde_json::to_writer_pretty(&mut writer, &stats).map_err(CliError::data)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        return Ok(CommandOutcome::default());
    }

    let mut mixer = Mixer::from_manifests(schedule).map_err(mixer_error)?;
    for _ in 0..args.steps {
        let batch = mixer.next_batch().map_err(mixer_error)?;
        jsonl::write_line(&mut writer, &batch)?;
    }
    writer.flush()?;
    Ok(CommandOutcome::default())
}
