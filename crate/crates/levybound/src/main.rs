fn main() {
    std::process::exit(levybound::cli::run(std::env::args_os()));
}
