fn main() {
    std::process::exit(chabauty::cli::main_entry(std::env::args_os()));
}
