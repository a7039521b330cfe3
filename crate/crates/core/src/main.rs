fn main() {
    std::process::exit(lcextract::cli::run(std::env::args_os()));
}
