fn main() {
    std::process::exit(clab::cli::run(std::env::args_os()));
}
