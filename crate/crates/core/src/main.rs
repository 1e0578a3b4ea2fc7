fn main() {
    std::process::exit(dygcn::cli::run(std::env::args_os()));
}
