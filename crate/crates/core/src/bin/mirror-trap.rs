fn main() {
    std::process::exit(mirror_trap::cli::main_with_args(std::env::args_os()));
}
