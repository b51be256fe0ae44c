fn main() {
    std::process::exit(iht::cli::run(std::env::args_os()));
}
