fn main() {
    std::process::exit(circord::cli::cli_main(std::env::args_os()));
}
