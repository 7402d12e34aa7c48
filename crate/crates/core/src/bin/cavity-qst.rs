fn main() {
    std::process::exit(cavity_qst::cli::main_with_args(std::env::args_os()));
}
