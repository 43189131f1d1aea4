fn main() {
    std::process::exit(cpwall::cli::run());
}
