fn main() {
    std::process::exit(starflow::cli::main_with(std::env::args_os()));
}
