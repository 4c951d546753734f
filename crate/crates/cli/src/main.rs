fn main() {
    std::process::exit(privwit_cli::main_with_args(std::env::args_os()));
}
