fn main() {
    std::process::exit(kgdecay::cli::main_with_args(std::env::args_os()));
}
