fn main() {
    std::process::exit(natorient::cli::run());
}
