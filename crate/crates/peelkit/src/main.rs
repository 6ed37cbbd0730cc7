fn main() {
    std::process::exit(peelkit::cli::run(std::env::args_os()));
}
