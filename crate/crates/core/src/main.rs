fn main() {
    std::process::exit(hetnet::cli::run(std::env::args_os()));
}
