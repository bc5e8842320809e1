fn main() {
    std::process::exit(fracdrift_cli::main_with(std::env::args_os()));
}
