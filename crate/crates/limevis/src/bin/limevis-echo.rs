//! Reference external predictor speaking the limevis protocol on stdin/stdout.

use std::io;

use clap::Parser;
use limevis::responder::{EchoMode, Responder};

#[derive(Parser)]
#[command(about = "Reference responder for the limevis external predictor protocol")]
struct Args {
    #[arg(long, default_value_t = 10)]
    classes: usize,
    /// first | brightness | bad-sum | features
    #[arg(long, default_value = "first")]
    mode: EchoMode,
}

fn main() -> io::Result<()> {
    let args = Args::parse();
    let r = Responder { classes: args.classes.max(2), mode: args.mode };
    r.serve_lines(io::stdin().lock(), io::stdout().lock())
}
