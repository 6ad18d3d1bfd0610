fn main() {
    std::process::exit(arp_harness::cli::cli_main(std::env::args()));
}
