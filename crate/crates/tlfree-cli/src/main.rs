fn main() {
    std::process::exit(tlfree_cli::run(std::env::args_os()));
}
