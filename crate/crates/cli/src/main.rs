fn main() {
    std::process::exit(faabe_cli::main_with(std::env::args_os()));
}
