fn main() {
    std::process::exit(hc_tree::cli::run(std::env::args_os()));
}
