fn main() {
    std::process::exit(detbounds::cli::run(std::env::args().collect()));
}
