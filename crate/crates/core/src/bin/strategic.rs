fn main() {
    std::process::exit(strategic_pairs::cli::main_with_args(std::env::args_os()));
}
