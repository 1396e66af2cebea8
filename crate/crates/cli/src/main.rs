fn main() {
    std::process::exit(fracosc_cli::run(std::env::args_os()));
}
