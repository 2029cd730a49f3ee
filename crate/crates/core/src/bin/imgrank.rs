fn main() {
    std::process::exit(imgrank::cli::run(std::env::args_os()));
}
