fn main() {
    std::process::exit(aplab::cli::run());
}
