fn main() {
    std::process::exit(rwrs::cli::main_with_args(std::env::args_os()));
}
