fn main() {
    std::process::exit(swipe::cli::run(std::env::args_os()));
}
