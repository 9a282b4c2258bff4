fn main() {
    std::process::exit(lipshape::cli::run_cli(std::env::args_os()));
}
