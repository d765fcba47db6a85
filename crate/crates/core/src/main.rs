fn main() {
    std::process::exit(fqh_core::cli::run(std::env::args_os()));
}
