fn main() {
    std::process::exit(lvphase::cli::run(std::env::args_os()));
}
