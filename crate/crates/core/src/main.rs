fn main() {
    std::process::exit(medianforge::cli::main_with_args(std::env::args_os()));
}
