fn main() {
    std::process::exit(isrs_cli::run(std::env::args_os()));
}
