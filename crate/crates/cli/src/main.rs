fn main() {
    std::process::exit(galerkin_vi_cli::run_cli(std::env::args_os()));
}
