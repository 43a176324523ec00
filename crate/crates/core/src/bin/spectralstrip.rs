fn main() {
    std::process::exit(spectralstrip::report::cli::main_with_args(std::env::args_os()));
}
