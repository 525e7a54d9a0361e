fn main() {
    std::process::exit(fracstar_cli::run(std::env::args_os()));
}
