fn main() {
    std::process::exit(fdmix_cli::main_with(std::env::args_os()));
}
