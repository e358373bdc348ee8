fn main() {
    std::process::exit(multinorm_cli::commands::main_with(std::env::args_os()));
}
