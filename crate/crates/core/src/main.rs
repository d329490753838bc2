fn main() {
    std::process::exit(llasso::cli::run(std::env::args_os()));
}
