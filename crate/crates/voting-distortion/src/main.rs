fn main() {
    std::process::exit(voting_distortion::cli::run());
}
