fn main() {
    std::process::exit(limitlab::cli::main_with_args(std::env::args_os()));
}
