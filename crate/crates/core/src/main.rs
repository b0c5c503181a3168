fn main() {
    std::process::exit(phishscope::cli::run());
}
