fn main() {
    std::process::exit(sqfree::cli::main_with_args(std::env::args_os()));
}
