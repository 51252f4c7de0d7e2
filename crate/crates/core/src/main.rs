fn main() -> std::process::ExitCode {
    let code = jacobi_spectra::cli::run_from(std::env::args_os());
    std::process::ExitCode::from(code as u8)
}
