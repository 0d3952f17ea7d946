fn main() {
    std::process::exit(flexbeam_cli::run(std::env::args_os()));
}
