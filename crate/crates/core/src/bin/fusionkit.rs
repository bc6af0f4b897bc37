use std::io;
use std::process::ExitCode;

use fusionkit::cli::{run, CAPS_ENV};

fn main() -> ExitCode {
    let caps = std::env::var(CAPS_ENV).ok();
    let code = run(std::env::args_os(), caps.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
