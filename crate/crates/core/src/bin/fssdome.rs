fn main() {
    std::process::exit(fssdome::cli::run(std::env::args_os()));
}
