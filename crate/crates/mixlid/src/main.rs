fn main() {
    std::process::exit(mixlid::cli::run(std::env::args_os()));
}
