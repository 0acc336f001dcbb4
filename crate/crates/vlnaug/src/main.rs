fn main() {
    std::process::exit(vlnaug::cli::run(std::env::args_os()));
}
