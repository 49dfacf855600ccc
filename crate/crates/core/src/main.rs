fn main() {
    std::process::exit(nkverify::cli::run_from(std::env::args_os()));
}
