fn main() {
    std::process::exit(specint_cli::run(std::env::args_os()));
}
