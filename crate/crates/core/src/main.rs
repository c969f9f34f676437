use std::io;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use comer::cli::{run, Io};

static STOP: AtomicBool = AtomicBool::new(false);

fn main() -> ExitCode {
    // a second interrupt kills the process the usual way
    let _ = ctrlc::set_handler(|| {
        if STOP.swap(true, Ordering::SeqCst) {
            std::process::exit(130);
        }
    });
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let mut io = Io {
        out: &mut out,
        err: &mut err,
        stop: &STOP,
    };
    let code = run(std::env::args_os(), &mut io);
    ExitCode::from(code as u8)
}
