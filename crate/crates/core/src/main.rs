fn main() {
    std::process::exit(gramlab::cli::run(std::env::args()));
}
