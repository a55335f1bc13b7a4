fn main() {
    std::process::exit(fermgrid::cli::run_from_args(std::env::args_os()));
}
