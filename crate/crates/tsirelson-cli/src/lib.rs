//! Library half of the command-line frontend.
//!
//! The binary in `main.rs` is a thin wrapper around [`run_cli`]; everything
//! testable lives here. The crate turns JSON space-specification documents
//! into calls against the `tsirelson` computation crate and renders the
//! results as human-readable text, CSV tables, or a machine-readable
//! structured report with a stable schema.
//!
//! Exit-code contract (honored by [`run_cli`]):
//!
//! * `0` — success,
//! * `1` — usage or input error (bad flags, malformed documents, invalid
//!   mathematical inputs),
//! * `2` — a configured work budget was exhausted,
//! * `3` — the computation finished but the verdict is undetermined /
//!   evidence-only (`classify` and `compare` only), so scripts can
//!   distinguish "decided negative" from "no decision".

#![forbid(unsafe_code)]

pub mod commands;
pub mod report;
pub mod specdoc;

use clap::Parser;

/// Parse `argv`, run the selected command, and return the process exit code.
///
/// `argv` must include the program name in position 0, as with
/// [`std::env::args`].
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match commands::Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // Help and version texts go to stdout with a success code; real
            // usage errors keep clap's rendering but exit 1 per the contract.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    commands::run(cli, &argv)
}
