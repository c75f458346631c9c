fn main() {
    std::process::exit(jumpcir_cli::run(std::env::args_os()));
}
