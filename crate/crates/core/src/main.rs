fn main() {
    std::process::exit(otm::cli::main(std::env::args_os()));
}
