fn main() {
    std::process::exit(coherence_cli::run(std::env::args_os()));
}
