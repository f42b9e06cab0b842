fn main() {
    std::process::exit(rmt_outliers::cli::main_with_args(std::env::args_os()));
}
