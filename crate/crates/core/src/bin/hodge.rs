fn main() {
    std::process::exit(hodge_diabolo::cli::main_with(std::env::args_os()));
}
