fn main() {
    std::process::exit(quatmetric::cli::run(std::env::args_os()));
}
