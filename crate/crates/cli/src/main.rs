use std::process::ExitCode;

fn main() -> ExitCode {
    let spec = match cops_cli::parse_args(std::env::args()) {
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
        Ok(Err(e)) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
        Ok(Ok(spec)) => spec,
    };
    match cops_cli::run(&spec) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(1)
        }
    }
}
