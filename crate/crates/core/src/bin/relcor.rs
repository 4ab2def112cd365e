fn main() {
    let code = relcor::cli::run_with(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
