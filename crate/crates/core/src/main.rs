fn main() {
    std::process::exit(homodyne_ml::cli::run(std::env::args_os()));
}
