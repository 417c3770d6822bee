fn main() {
    let code = sobolev_cli::run_cli(std::env::args_os());
    std::process::exit(code);
}
