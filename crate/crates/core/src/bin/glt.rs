fn main() {
    std::process::exit(nuclear_trace::harness::cli::cli_main(std::env::args_os()));
}
