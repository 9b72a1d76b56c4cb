//! `lowosc` command-line front end.

pub mod args;
mod commands;
pub mod output;

use std::ffi::OsString;
use std::fs;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::{Cli, Common, ConstructionArg, NumbersArg};
use lowosc_core::config::{Construction, NumberFormat, RunConfig};
use lowosc_core::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `argv` (program name first), runs one subcommand and returns the
/// process exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn dispatch<I, T>(argv: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}\n{}\n", Cli::command().render_long_help());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = load_config(&cli.common).and_then(|cfg| commands::run(&cfg, &cli.command));
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

/// Config file (or defaults) with command-line overrides applied.
pub fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(c) = common.construction {
        cfg.construction = match c {
            ConstructionArg::Build1d => Construction::Build1d,
            ConstructionArg::Buildmd => Construction::Buildmd,
            ConstructionArg::Cantor => Construction::Cantor,
            ConstructionArg::Sine => Construction::Sine,
        };
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(n) = common.numbers {
        cfg.formats.numbers = match n {
            NumbersArg::Rational => NumberFormat::Rational,
            NumbersArg::Decimal => NumberFormat::Decimal,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}
