fn main() {
    std::process::exit(kcca_influence::cli::run_from(std::env::args_os()));
}
