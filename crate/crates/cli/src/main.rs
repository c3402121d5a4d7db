fn main() {
    std::process::exit(gz_cli::run(std::env::args_os()));
}
