fn main() {
    std::process::exit(pdim::cli::run(std::env::args_os()));
}
