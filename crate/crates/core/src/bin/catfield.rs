fn main() {
    std::process::exit(catfield::cli::main_with_args(std::env::args_os()));
}
