fn main() {
    std::process::exit(acca_cli::main_with(std::env::args_os()));
}
