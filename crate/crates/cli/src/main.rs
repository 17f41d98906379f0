fn main() {
    std::process::exit(radpol_cli::app::main_with_args(std::env::args_os()));
}
