fn main() {
    std::process::exit(cylsat::cli::run(std::env::args_os()));
}
