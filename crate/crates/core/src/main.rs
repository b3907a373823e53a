fn main() {
    std::process::exit(ieq_nls::cli::main_with_args(std::env::args_os()));
}
