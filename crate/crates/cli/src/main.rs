use std::process::ExitCode;

fn main() -> ExitCode {
    match featsel_cli::run_from(std::env::args_os()) {
        Ok(envelope) => {
            for w in &envelope.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", envelope.payload.join("\n"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("featsel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
