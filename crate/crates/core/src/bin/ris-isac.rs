use std::process::ExitCode;

fn main() -> ExitCode {
    ris_isac::cli::main()
}
